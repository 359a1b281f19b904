"""Finite discrete distributions on contiguous integer supports.

A :class:`DiscretePmf` is the common currency of the package: posteriors,
forecasts, marginals and end-to-end delay laws are all pmfs.  Supports are
always aligned by absolute integer value, never by array index.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammaln

from .errors import AbsoluteContinuityViolation, InvalidParameter, InvalidPmf

SUM_TOL = 1e-9
TRIM_TOL = 1e-15
TAIL_TOL = 1e-10


class NbConvention(enum.Enum):
    """Support convention of the negative binomial.

    ``TRIALS``: number of Bernoulli trials up to and including the r-th
    success, support ``{r, r+1, ...}``; requires an integer shape.
    ``FAILURES``: number of failures before the r-th success, support
    ``{0, 1, ...}``; any real shape ``r > 0``.
    """

    TRIALS = "trials"
    FAILURES = "failures"


@dataclass(frozen=True, eq=False)
class DiscretePmf:
    """Probability mass function over ``offset, offset+1, ...``.

    The constructor trims leading/trailing entries below ``1e-15`` and
    renormalizes.  Mass that does not sum to one within ``1e-9`` is rejected;
    use :meth:`from_weights` to normalize arbitrary non-negative weights.

    ``truncation`` records the last support point kept when the pmf was cut
    from an unbounded law (``None`` for finite laws).
    """

    offset: int
    mass: np.ndarray
    truncation: int | None = field(default=None)

    def __post_init__(self):
        mass = np.array(self.mass, dtype=float).ravel()
        if mass.size == 0:
            raise InvalidPmf("empty mass vector")
        if not np.all(np.isfinite(mass)):
            raise InvalidPmf("mass contains non-finite entries")
        if mass.min() < -TRIM_TOL:
            raise InvalidPmf(f"negative mass {mass.min():.3e}")
        mass = np.clip(mass, 0.0, None)
        total = math.fsum(mass)
        if abs(total - 1.0) > SUM_TOL:
            raise InvalidPmf(f"mass sums to {total!r}, not 1")
        offset = int(self.offset)
        keep = np.flatnonzero(mass >= TRIM_TOL)
        if keep.size == 0:
            raise InvalidPmf("no entry above trimming threshold")
        lo, hi = keep[0], keep[-1] + 1
        mass = mass[lo:hi]
        mass = mass / math.fsum(mass)
        mass.flags.writeable = False
        object.__setattr__(self, "offset", offset + int(lo))
        object.__setattr__(self, "mass", mass)

    @classmethod
    def from_weights(cls, offset: int, weights, truncation: int | None = None) -> DiscretePmf:
        w = np.array(weights, dtype=float)
        if w.size and w.min() < 0:
            raise InvalidPmf("negative weight")
        total = math.fsum(w)
        if not total > 0:
            raise InvalidPmf("weights sum to zero")
        return cls(offset, w / total, truncation)

    @classmethod
    def point(cls, value: int) -> DiscretePmf:
        return cls(value, [1.0])

    @property
    def support_max(self) -> int:
        return self.offset + self.mass.size - 1

    @property
    def support(self) -> np.ndarray:
        return np.arange(self.offset, self.offset + self.mass.size)

    def __len__(self) -> int:
        return self.mass.size

    def __call__(self, z: int) -> float:
        i = int(z) - self.offset
        if 0 <= i < self.mass.size:
            return float(self.mass[i])
        return 0.0

    def mean(self) -> float:
        return float(np.dot(self.support, self.mass))

    def dense(self, offset: int, length: int) -> np.ndarray:
        """Mass laid out on ``offset .. offset+length-1`` (zero-padded)."""
        out = np.zeros(length)
        lo = self.offset - offset
        if lo < 0 or lo + self.mass.size > length:
            raise ValueError("window does not cover the support")
        out[lo : lo + self.mass.size] = self.mass
        return out

    def allclose(self, other: DiscretePmf, atol: float = 1e-12) -> bool:
        off, a, b = align(self, other)
        return bool(np.max(np.abs(a - b)) <= atol)

    def to_dict(self) -> dict:
        return {"offset": self.offset, "mass": [float(v) for v in self.mass]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: dict) -> DiscretePmf:
        try:
            return cls(int(data["offset"]), data["mass"])
        except KeyError as exc:
            raise InvalidPmf(f"missing key {exc}") from None

    @classmethod
    def from_json(cls, text: str) -> DiscretePmf:
        return cls.from_dict(json.loads(text))

    def __repr__(self) -> str:
        return f"DiscretePmf(offset={self.offset}, len={self.mass.size}, mean={self.mean():.6g})"


def align(p: DiscretePmf, q: DiscretePmf) -> tuple[int, np.ndarray, np.ndarray]:
    """Both pmfs as dense vectors over the union of their supports."""
    lo = min(p.offset, q.offset)
    hi = max(p.support_max, q.support_max)
    n = hi - lo + 1
    return lo, p.dense(lo, n), q.dense(lo, n)


def tv_distance(p: DiscretePmf, q: DiscretePmf) -> float:
    """Total-variation distance ``0.5 * sum |p(z) - q(z)|``."""
    _, a, b = align(p, q)
    return min(1.0, 0.5 * math.fsum(np.abs(a - b)))


def tv_dense(a: np.ndarray, b: np.ndarray) -> float:
    return min(1.0, 0.5 * math.fsum(np.abs(np.asarray(a) - np.asarray(b))))


def kl_dense(m: np.ndarray, f: np.ndarray) -> float:
    """``sum m log(m/f)`` over a shared grid; zero-mass terms of ``m`` drop out."""
    m = np.asarray(m, dtype=float)
    f = np.asarray(f, dtype=float)
    pos = m > 0
    if np.any(f[pos] <= 0):
        bad = np.flatnonzero(pos & (f <= 0))
        raise AbsoluteContinuityViolation(
            f"forecast has no mass at {bad.size} grid points where the marginal does"
        )
    return max(0.0, math.fsum(m[pos] * np.log(m[pos] / f[pos])))


def cross_entropy_divergence(marginal: DiscretePmf, forecast: DiscretePmf) -> float:
    """``-sum_z m(z) log(f(z)/m(z))``, i.e. KL(marginal || forecast).

    Raises :class:`AbsoluteContinuityViolation` when the marginal has mass
    outside the forecast support.
    """
    _, m, f = align(marginal, forecast)
    return kl_dense(m, f)


def convolve(p: DiscretePmf, q: DiscretePmf) -> DiscretePmf:
    """Law of the sum of two independent variables."""
    mass = np.convolve(p.mass, q.mass)
    trunc = None
    if p.truncation is not None or q.truncation is not None:
        trunc = p.offset + q.offset + mass.size - 1
    return DiscretePmf.from_weights(p.offset + q.offset, np.clip(mass, 0.0, None), trunc)


def mixture(weights, components: list[DiscretePmf]) -> DiscretePmf:
    """Weighted mixture ``sum_i w_i p_i``; weights must sum to one."""
    weights = np.asarray(weights, dtype=float)
    if weights.size != len(components):
        raise InvalidParameter("weight count does not match component count")
    lo = min(c.offset for c in components)
    hi = max(c.support_max for c in components)
    acc = np.zeros(hi - lo + 1)
    for w, c in zip(weights, components):
        if w != 0.0:
            acc[c.offset - lo : c.offset - lo + c.mass.size] += w * c.mass
    return DiscretePmf(lo, acc)


def _nb_logpmf(k: np.ndarray, shape: float, p: float) -> np.ndarray:
    # k failures before the shape-th success
    return (
        gammaln(k + shape)
        - gammaln(shape)
        - gammaln(k + 1.0)
        + shape * math.log(p)
        + k * math.log1p(-p)
    )


def negative_binomial_pmf(
    shape: float,
    success_prob: float,
    convention: NbConvention | str = NbConvention.TRIALS,
    z_max: int | None = None,
    tail_tol: float = TAIL_TOL,
) -> DiscretePmf:
    """Negative binomial pmf truncated where its tail drops below ``tail_tol``.

    Args:
        shape: number of successes ``r`` (integer for the trials convention).
        success_prob: per-trial success probability in (0, 1).
        convention: :class:`NbConvention` or its string value.
        z_max: initial truncation guess; extended automatically if the tail
            beyond it is still too heavy.
        tail_tol: tail-mass threshold.

    The result is renormalized after truncation and records the last kept
    support point in ``truncation``.
    """
    convention = NbConvention(convention)
    if not (0.0 < success_prob < 1.0):
        raise InvalidParameter(f"success_prob must be in (0,1), got {success_prob}")
    if not (shape > 0) or not math.isfinite(shape):
        raise InvalidParameter(f"shape must be positive, got {shape}")
    if convention is NbConvention.TRIALS:
        if abs(shape - round(shape)) > 1e-12:
            raise InvalidParameter("trials convention needs an integer shape")
        shape = float(round(shape))
        shift = int(shape)
    else:
        shift = 0
    q = 1.0 - success_prob
    mean_f = shape * q / success_prob
    sd_f = math.sqrt(shape * q) / success_prob
    n = int(mean_f + 12.0 * sd_f + 20)
    if z_max is not None:
        n = max(n, int(z_max) - shift + 1)
    while True:
        k = np.arange(n, dtype=float)
        mass = np.exp(_nb_logpmf(k, shape, success_prob))
        covered = math.fsum(mass)
        if 1.0 - covered < tail_tol:
            break
        n *= 2
    tail = 1.0 - np.cumsum(mass)
    cut = int(np.argmax(tail < tail_tol))
    mass = mass[: cut + 1]
    return DiscretePmf.from_weights(shift, mass, truncation=shift + cut)
