"""Vectorized adaptive composite Simpson quadrature."""

from __future__ import annotations

import math
from typing import Callable

import numpy as np


def adaptive_simpson(
    f: Callable[[np.ndarray], np.ndarray],
    a: float,
    b: float,
    tol: float = 1e-12,
    panels: int = 4096,
    max_depth: int = 40,
) -> float:
    """Integrate ``f`` over ``[a, b]``.

    Starts from ``panels`` equal panels and bisects each one until the
    Richardson estimate ``|S_left + S_right - S_whole| / 15`` falls below its
    share of ``tol`` (proportional to panel width).  ``f`` must accept and
    return numpy arrays.
    """
    if b <= a:
        return 0.0
    lo = np.linspace(a, b, panels + 1)
    hi = lo[1:]
    lo = lo[:-1]
    span = b - a
    parts: list[np.ndarray] = []
    for _ in range(max_depth):
        mid = 0.5 * (lo + hi)
        ql = 0.5 * (lo + mid)
        qr = 0.5 * (mid + hi)
        flo, fmid, fhi, fql, fqr = f(lo), f(mid), f(hi), f(ql), f(qr)
        h = hi - lo
        whole = h / 6.0 * (flo + 4.0 * fmid + fhi)
        halves = h / 12.0 * (flo + 4.0 * fql + 2.0 * fmid + 4.0 * fqr + fhi)
        err = halves - whole
        # below this the estimate is rounding noise and bisection cannot help
        floor = 64.0 * np.finfo(float).eps * (np.abs(flo) + np.abs(fmid) + np.abs(fhi)) * h
        ok = np.abs(err) <= np.maximum(15.0 * tol * h / span, floor)
        parts.append(halves[ok] + err[ok] / 15.0)
        if ok.all():
            break
        lo, mid, hi = lo[~ok], mid[~ok], hi[~ok]
        lo, hi = np.concatenate([lo, mid]), np.concatenate([mid, hi])
    else:
        parts.append(halves[~ok] + err[~ok] / 15.0)
    return math.fsum(np.concatenate(parts))
