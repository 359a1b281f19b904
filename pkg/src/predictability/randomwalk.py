"""Lazy reflecting random walk over CQI levels with NB throughput.

CQI levels are 1-indexed (``1..K``) at the interface and 0-indexed in the
chain.  Each level's throughput in integer Mbps is negative binomial in the
failures convention with shape ``r(c) = r_slope*c + r_intercept`` and
success probability ``q(c) = q_slope*c + q_intercept``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .dist import DiscretePmf, NbConvention, negative_binomial_pmf
from .errors import InvalidParameter
from .markov import MarkovChain, build_chain
from .omm import ObservableModel

VEHICULAR_STAY = 0.6
STATIC_STAY = 0.9


@dataclass(frozen=True)
class RandomWalkParams:
    states: int = 15
    stay_prob: float = VEHICULAR_STAY
    nb_r_slope: float = 0.105
    nb_r_intercept: float = 0.104
    nb_q_slope: float = -0.006
    nb_q_intercept: float = 0.135

    def __post_init__(self):
        if int(self.states) != self.states or self.states < 1:
            raise InvalidParameter("states must be a positive integer")
        if not (0.0 < self.stay_prob < 1.0):
            raise InvalidParameter("stay_prob must be in (0, 1)")
        for c in range(1, self.states + 1):
            r, q = self.nb_params(c)
            if not (r > 0 and 0 < q < 1):
                raise InvalidParameter(f"CQI {c}: NB parameters r={r:.4g}, q={q:.4g} out of range")

    @classmethod
    def preset(cls, name: str, **overrides) -> RandomWalkParams:
        stays = {"vehicular": VEHICULAR_STAY, "static": STATIC_STAY}
        if name not in stays:
            raise InvalidParameter(f"unknown preset {name!r}; choose from {sorted(stays)}")
        return cls(stay_prob=stays[name], **overrides)

    def nb_params(self, cqi: int) -> tuple[float, float]:
        """``(r, q)`` for a 1-indexed CQI level."""
        return (
            self.nb_r_slope * cqi + self.nb_r_intercept,
            self.nb_q_slope * cqi + self.nb_q_intercept,
        )


def lazy_walk_chain(params: RandomWalkParams) -> MarkovChain:
    """Stay with ``p``, step to each neighbour with ``(1-p)/2``.

    At the two ends the blocked step is folded into the self-loop, which
    keeps the matrix doubly stochastic and the stationary law uniform.
    """
    K = params.states
    p = params.stay_prob
    T = np.zeros((K, K))
    if K == 1:
        T[0, 0] = 1.0
        return build_chain(T)
    side = 0.5 * (1.0 - p)
    for i in range(K):
        if i > 0:
            T[i, i - 1] = side
        if i < K - 1:
            T[i, i + 1] = side
        T[i, i] = 1.0 - T[i].sum()
    return build_chain(T)


def cqi_posterior(params: RandomWalkParams, cqi: int) -> DiscretePmf:
    r, q = params.nb_params(cqi)
    return negative_binomial_pmf(r, q, NbConvention.FAILURES)


@lru_cache(maxsize=32)
def cqi_observable_model(params: RandomWalkParams) -> ObservableModel:
    """Chain state ``i`` carries the posterior of CQI level ``i + 1``."""
    chain = lazy_walk_chain(params)
    posts = tuple(cqi_posterior(params, c) for c in range(1, params.states + 1))
    return ObservableModel(chain, posts)
