"""Geo/Geo/1/K queue: chain, closed forms, sojourn posteriors, predictability.

Arrivals are Bernoulli(``alpha``) per slot, service completions
Bernoulli(``mu``), buffer capacity ``K``.  The observed state is the queue
length, the performance variable is the sojourn time of a packet arriving
in that state, and a separate blocking indicator is covered by
:func:`geo_blocking_predictability`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property, lru_cache

import mpmath
import numpy as np

from .dist import DiscretePmf, NbConvention, negative_binomial_pmf
from .errors import InvalidParameter, UnstableQueue
from .markov import MarkovChain, build_chain
from .omm import ObservableModel
from .quadrature import adaptive_simpson


@dataclass(frozen=True)
class GeoQueueParams:
    alpha: float
    mu: float
    capacity: int

    def __post_init__(self):
        if not (0.0 < self.alpha < 1.0):
            raise InvalidParameter(f"alpha must be in (0,1), got {self.alpha}")
        if not (0.0 < self.mu < 1.0):
            raise InvalidParameter(f"mu must be in (0,1), got {self.mu}")
        if int(self.capacity) != self.capacity or self.capacity < 1:
            raise InvalidParameter(f"capacity must be an integer >= 1, got {self.capacity}")
        object.__setattr__(self, "capacity", int(self.capacity))

    @classmethod
    def from_rho(cls, rho: float, mu: float, capacity: int) -> GeoQueueParams:
        return cls(rho * mu, mu, capacity)

    @property
    def K(self) -> int:
        return self.capacity

    @property
    def up(self) -> float:
        """One-slot probability of a net arrival, ``alpha (1 - mu)``."""
        return self.alpha * (1.0 - self.mu)

    @property
    def down(self) -> float:
        """One-slot probability of a net departure, ``mu (1 - alpha)``."""
        return self.mu * (1.0 - self.alpha)

    @property
    def beta(self) -> float:
        return self.up / self.down

    @property
    def rho(self) -> float:
        return self.alpha / self.mu

    @cached_property
    def chi(self) -> float:
        """Expected stationary queue length at this finite capacity."""
        pi = geo_stationary(self)
        return float(np.dot(np.arange(self.K + 1), pi))

    def chi_state(self, multiple: float) -> int:
        """Queue length nearest to ``multiple * chi``, clamped to ``[0, K]``."""
        return int(min(self.K, max(0, round(multiple * self.chi))))

    def to_dict(self) -> dict:
        return {"alpha": self.alpha, "mu": self.mu, "capacity": self.K}


def _is_unit_beta(p: GeoQueueParams) -> bool:
    return abs(p.beta - 1.0) < 1e-12


def geo_transition_matrix(p: GeoQueueParams) -> MarkovChain:
    """Birth-death chain on ``0..K``; each row's diagonal is the complement."""
    K = p.K
    T = np.zeros((K + 1, K + 1))
    for i in range(K + 1):
        if i < K:
            T[i, i + 1] = p.up
        if i > 0:
            T[i, i - 1] = p.down
        T[i, i] = 1.0 - T[i].sum()
    return build_chain(T)


def geo_stationary(p: GeoQueueParams) -> np.ndarray:
    """``pi(y) = (1-beta) beta^y / (1 - beta^{K+1})``; uniform when ``beta == 1``."""
    K = p.K
    if _is_unit_beta(p):
        return np.full(K + 1, 1.0 / (K + 1))
    y = np.arange(K + 1)
    logb = math.log(p.beta)
    # normalized in log space so beta > 1 does not overflow
    w = np.exp((y - (K if p.beta > 1 else 0)) * logb)
    return w / w.sum()


def _spectral_params(p: GeoQueueParams):
    a, m = p.alpha, p.mu
    c0 = a * m + (1 - a) * (1 - m)
    c1 = 2.0 * math.sqrt(a * m * (1 - a) * (1 - m))
    return c0, c1


def _amplification_digits(p: GeoQueueParams, i: int, j: int) -> float:
    """Decimal digits lost to cancellation in the spectral sum for ``(i, j)``."""
    sb = math.sqrt(p.beta)
    term = (1.0 + sb) ** 2 / max((1.0 - sb) ** 2, 1e-300)
    lost = 0.5 * (j - i) * math.log10(p.beta)
    return max(0.0, lost) + math.log10(max(1.0, term * p.K))


@lru_cache(maxsize=64)
def _mp_tables(alpha: float, mu: float, K: int, dps: int):
    with mpmath.workdps(dps):
        a, m = mpmath.mpf(alpha), mpmath.mpf(mu)
        beta = a * (1 - m) / (m * (1 - a))
        sb = mpmath.sqrt(beta)
        c0 = a * m + (1 - a) * (1 - m)
        c1 = 2 * mpmath.sqrt(a * m * (1 - a) * (1 - m))
        theta = [k * mpmath.pi / (K + 1) for k in range(1, K + 1)]
        cos = [mpmath.cos(t) for t in theta]
        gamma = [c0 + c1 * c for c in cos]
        inv_den = [1 / (1 - 2 * sb * c + beta) for c in cos]
        A = [
            [mpmath.sin(i * t) - sb * mpmath.sin((i + 1) * t) for t in theta]
            for i in range(K + 2)
        ]
        if abs(beta - 1) < mpmath.mpf(10) ** (-12):
            stat = [mpmath.mpf(1) / (K + 1)] * (K + 1)
        else:
            norm = (1 - beta) / (1 - beta ** (K + 1))
            stat = [norm * beta**y for y in range(K + 1)]
    return beta, sb, gamma, inv_den, A, stat


@lru_cache(maxsize=256)
def _mp_weights(alpha: float, mu: float, K: int, dps: int, L: int):
    _, _, gamma, inv_den, _, _ = _mp_tables(alpha, mu, K, dps)
    with mpmath.workdps(dps):
        return [g**L * d for g, d in zip(gamma, inv_den)]


def _transient_float(p: GeoQueueParams, i: int, j: int, L: int) -> float:
    K = p.K
    beta = p.beta
    sb = math.sqrt(beta)
    c0, c1 = _spectral_params(p)
    th = np.arange(1, K + 1) * np.pi / (K + 1)
    cos = np.cos(th)
    g = (c0 + c1 * cos) ** L
    den = 1.0 - 2.0 * sb * cos + beta
    Ai = np.sin(i * th) - sb * np.sin((i + 1) * th)
    Aj = np.sin(j * th) - sb * np.sin((j + 1) * th)
    s = math.fsum(g / den * Ai * Aj)
    stat = geo_stationary(p)[j]
    return float(stat + 2.0 / (K + 1) * beta ** ((j - i) / 2.0) * s)


def _transient_mp(p: GeoQueueParams, i: int, j: int, L: int, dps: int) -> float:
    K = p.K
    beta, sb, _, _, A, stat = _mp_tables(p.alpha, p.mu, K, dps)
    w = _mp_weights(p.alpha, p.mu, K, dps, L)
    with mpmath.workdps(dps):
        s = mpmath.fdot([wk * ak for wk, ak in zip(w, A[i])], A[j])
        val = stat[j] + mpmath.mpf(2) / (K + 1) * beta ** (mpmath.mpf(j - i) / 2) * s
    return float(val)


def geo_transient(p: GeoQueueParams, i: int, j: int, L: int) -> float:
    """``P^L(i, j)`` from the spectral closed form of the Geo/Geo/1/K chain.

    For downward transitions the closed form multiplies an O(1) cancelling
    sum by ``beta^{(j-i)/2}``, which can exceed ``1e15``; those pairs are
    evaluated in extended precision sized to the digits lost.
    """
    K = p.K
    if not (0 <= i <= K and 0 <= j <= K):
        raise IndexError(f"states must lie in [0, {K}]")
    if L < 0:
        raise ValueError("L must be non-negative")
    lost = _amplification_digits(p, i, j)
    if lost <= 5.0:
        return _transient_float(p, i, j, L)
    worst = _amplification_digits(p, K, 0) if p.beta < 1 else _amplification_digits(p, 0, K)
    dps = 25 + int(math.ceil(worst))
    return _transient_mp(p, i, j, L, dps)


def geo_transient_matrix(p: GeoQueueParams, L: int) -> np.ndarray:
    K = p.K
    return np.array([[geo_transient(p, i, j, L) for j in range(K + 1)] for i in range(K + 1)])


def geo_sojourn_posterior(p: GeoQueueParams, y: int) -> DiscretePmf:
    """Sojourn time of a packet that finds ``y`` packets: NB(y+1, mu) in trials."""
    if not 0 <= y <= p.K:
        raise IndexError(f"state {y} outside [0, {p.K}]")
    return negative_binomial_pmf(y + 1, p.mu, NbConvention.TRIALS)


@lru_cache(maxsize=128)
def geo_observable_model(p: GeoQueueParams) -> ObservableModel:
    chain = geo_transition_matrix(p)
    posts = tuple(geo_sojourn_posterior(p, y) for y in range(p.K + 1))
    return ObservableModel(chain, posts)


def geo_predictability_literal(p: GeoQueueParams, x: int, L: int) -> float:
    """Diagnostic: the closed-form sum with ``NB(z; y, mu)`` for ``y = 1..K``.

    Differs from the reference model in posterior indexing (shape ``y``
    instead of ``y + 1``) and in dropping ``y = 0``.
    """
    K = p.K
    pi = geo_stationary(p)
    posts = [negative_binomial_pmf(y, p.mu, NbConvention.TRIALS) for y in range(1, K + 1)]
    lo = min(q.offset for q in posts)
    hi = max(q.support_max for q in posts)
    R = np.vstack([q.dense(lo, hi - lo + 1) for q in posts])
    w = np.array([geo_transient(p, x, y, L) - pi[y] for y in range(1, K + 1)])
    return min(1.0, 0.5 * math.fsum(np.abs(w @ R)))


def _approx_terms(p: GeoQueueParams):
    c0, c1 = _spectral_params(p)
    g = c0 + c1
    kappa = 0.5 * c1 / g
    return g, kappa


def geo_predictability_approx(
    p: GeoQueueParams, x: int, L: int, panels: int = 4096, tol: float = 1e-12
) -> float:
    """Large-``K`` approximation of sojourn-time predictability.

    ``beta^{(1-x)/2} (1-sqrt(beta))^2 g^L / pi * I`` with
    ``g = alpha mu + abar mubar + 2 sqrt(alpha mu abar mubar)`` and
    ``I = int_0^pi sin r sin(x r) / (1 - 2 sqrt(beta) cos r + beta)^2 exp(-L kappa r^2) dr``.
    The integral uses adaptive composite Simpson; ``tol`` applies to the
    final value.

    Raises:
        UnstableQueue: ``beta >= 1``.
    """
    beta = p.beta
    if beta >= 1.0:
        raise UnstableQueue(f"approximation needs beta < 1, got {beta:.6g}")
    sb = math.sqrt(beta)
    g, kappa = _approx_terms(p)
    pref = beta ** ((1.0 - x) / 2.0) * (1.0 - sb) ** 2 * g**L / math.pi

    def integrand(r):
        return np.sin(r) * np.sin(x * r) / (1.0 - 2.0 * sb * np.cos(r) + beta) ** 2 * np.exp(-L * kappa * r * r)

    abs_tol = tol / pref if pref > 0 else tol
    integral = adaptive_simpson(integrand, 0.0, math.pi, tol=min(tol, abs_tol), panels=panels)
    # the derivation drops |.| assuming a positive integral; keep the magnitude
    return abs(pref * integral)


def geo_blocking_predictability(p: GeoQueueParams, x: int, L: int) -> float:
    """``|P^L(x, K) - pi(K)|``: predictability of the blocking indicator."""
    if not 0 <= x <= p.K:
        raise IndexError(f"state {x} outside [0, {p.K}]")
    piK = geo_stationary(p)[p.K]
    if L == 0:
        return abs(float(x == p.K) - piK)
    return abs(geo_transient(p, x, p.K, L) - piK)
