"""Observable Markov models: forecast and marginal mixtures, predictability.

An :class:`ObservableModel` pairs a chain with one performance posterior
per state.  Forecasts are posterior mixtures weighted by ``P^L(x, .)``; the
marginal uses the stationary weights; predictability is the TV distance
between the two.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .dist import DiscretePmf, kl_dense, mixture, tv_distance
from .errors import HorizonExceedsScan, InvalidParameter, NotSurjective
from .markov import MarkovChain, build_chain


@dataclass(frozen=True, eq=False)
class ObservableModel:
    chain: MarkovChain
    posteriors: tuple[DiscretePmf, ...]

    def __post_init__(self):
        posteriors = tuple(self.posteriors)
        if len(posteriors) != self.chain.states:
            raise InvalidParameter(
                f"{len(posteriors)} posteriors for a {self.chain.states}-state chain"
            )
        object.__setattr__(self, "posteriors", posteriors)
        # validates the stationary mixture
        self.marginal_pmf  # noqa: B018

    @property
    def states(self) -> int:
        return self.chain.states

    @cached_property
    def grid(self) -> tuple[int, int]:
        """``(offset, length)`` of the union of all posterior supports."""
        lo = min(p.offset for p in self.posteriors)
        hi = max(p.support_max for p in self.posteriors)
        return lo, hi - lo + 1

    @cached_property
    def posterior_matrix(self) -> np.ndarray:
        """Posteriors stacked as rows over :attr:`grid`."""
        lo, n = self.grid
        R = np.vstack([p.dense(lo, n) for p in self.posteriors])
        R.flags.writeable = False
        return R

    @cached_property
    def marginal_dense(self) -> np.ndarray:
        return self.chain.stationary @ self.posterior_matrix

    @cached_property
    def marginal_pmf(self) -> DiscretePmf:
        return mixture(self.chain.stationary, list(self.posteriors))

    def to_dict(self) -> dict:
        return {
            "transition": self.chain.transition.tolist(),
            "posteriors": [p.to_dict() for p in self.posteriors],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: dict) -> ObservableModel:
        chain = build_chain(data["transition"])
        return cls(chain, tuple(DiscretePmf.from_dict(p) for p in data["posteriors"]))


def forecast(model: ObservableModel, x: int, L: int) -> DiscretePmf:
    """Performance law ``L`` slots after observing state ``x``."""
    if L == 0:
        return model.posteriors[x]
    return mixture(model.chain.row_power(x, L), list(model.posteriors))


def marginal(model: ObservableModel) -> DiscretePmf:
    return model.marginal_pmf


def predictability(model: ObservableModel, x: int, L: int) -> float:
    """TV distance between forecast and marginal (mixture-then-TV route)."""
    return tv_distance(forecast(model, x, L), model.marginal_pmf)


def predictability_sum(model: ObservableModel, x: int, L: int) -> float:
    """Same quantity via ``0.5 sum_z |sum_y (P^L(x,y) - pi(y)) r_y(z)|``.

    Kept as an independent route for cross-checking :func:`predictability`.
    """
    diff = model.chain.row_power(x, L) - model.chain.stationary
    inner = diff @ model.posterior_matrix
    return min(1.0, 0.5 * math.fsum(np.abs(inner)))


def predictability_all_states(model: ObservableModel, L: int) -> np.ndarray:
    """Predictability for every observed state at lead ``L`` (vectorized)."""
    W = model.chain.power(L) - model.chain.stationary[None, :]
    return np.minimum(1.0, 0.5 * np.abs(W @ model.posterior_matrix).sum(axis=1))


def predictability_curves(model: ObservableModel, leads: Iterable[int]) -> dict[int, np.ndarray]:
    """``{L: predictability for every state}`` stepping ``P^L`` incrementally."""
    leads = sorted(set(int(L) for L in leads))
    out: dict[int, np.ndarray] = {}
    if not leads:
        return out
    P = model.chain.transition
    R = model.posterior_matrix
    pi = model.chain.stationary
    cur_L = leads[0]
    W = model.chain.power(cur_L)
    for L in leads:
        while cur_L < L:
            W = W @ P
            cur_L += 1
        out[L] = np.minimum(1.0, 0.5 * np.abs((W - pi[None, :]) @ R).sum(axis=1))
    return out


def ce_predictability(model: ObservableModel, x: int, L: int) -> float:
    """Cross-entropy predictability, ``KL(marginal || forecast)``.

    Evaluated on the model's shared support grid.  Raises
    :class:`~predictability.errors.AbsoluteContinuityViolation` where the
    forecast has no mass but the marginal does.
    """
    f = model.chain.row_power(x, L) @ model.posterior_matrix
    return kl_dense(model.marginal_dense, f)


def epsilon_horizon(
    model: ObservableModel,
    x: int,
    epsilon: float,
    L_max: int,
    mode: str = "prefix",
) -> int | None:
    """Longest lead time whose predictability stays at least ``epsilon``.

    ``mode="prefix"`` (default) returns the largest ``L`` such that every
    ``L' <= L`` has ``D(L') >= epsilon``; ``mode="pointwise"`` returns the
    largest ``L <= L_max`` with ``D(L) >= epsilon``.  ``None`` means the
    predictability is already below ``epsilon`` at ``L = 0`` (prefix) or
    nowhere reaches it (pointwise).

    Raises:
        HorizonExceedsScan: ``D(L_max) >= epsilon``, so the scan is too short.
    """
    if not 0.0 < epsilon < 1.0:
        raise InvalidParameter("epsilon must be in (0, 1)")
    if L_max < 1:
        raise InvalidParameter("L_max must be >= 1")
    if mode not in ("prefix", "pointwise"):
        raise InvalidParameter(f"unknown horizon mode {mode!r}")
    P = model.chain.transition
    R = model.posterior_matrix
    pi = model.chain.stationary
    row = np.zeros(model.states)
    row[x] = 1.0
    last = None
    for L in range(L_max + 1):
        d = 0.5 * math.fsum(np.abs((row - pi) @ R))
        if d >= epsilon:
            last = L
        elif mode == "prefix":
            return last
        elif 0.5 * math.fsum(np.abs(row - pi)) < epsilon:
            # D <= TV(P^L(x,.), pi), which never increases with L
            return last
        row = row @ P
    if last == L_max:
        raise HorizonExceedsScan(f"predictability still >= {epsilon} at L_max={L_max}")
    return last


def worst_case_horizon(
    model: ObservableModel,
    epsilon: float,
    L_max: int,
    min_weight: float = 1e-9,
    mode: str = "prefix",
) -> tuple[int | None, int]:
    """Minimum horizon over states with stationary weight above ``min_weight``.

    Returns ``(horizon, argmin_state)``.  A state whose predictability starts
    below ``epsilon`` yields ``None`` and dominates the minimum.
    """
    eligible = np.flatnonzero(model.chain.stationary > min_weight)
    if mode == "pointwise":
        best: tuple[int | None, int] | None = None
        for x in eligible:
            h = epsilon_horizon(model, int(x), epsilon, L_max, mode)
            if h is None:
                return None, int(x)
            if best is None or h < best[0]:
                best = (h, int(x))
        assert best is not None
        return best
    if not 0.0 < epsilon < 1.0:
        raise InvalidParameter("epsilon must be in (0, 1)")
    # prefix horizons: the minimum is fixed by the first state to dip below epsilon
    P = model.chain.transition
    R = model.posterior_matrix
    pi = model.chain.stationary
    W = np.eye(model.states)[eligible]
    for L in range(L_max + 1):
        d = 0.5 * np.abs((W - pi) @ R).sum(axis=1)
        below = np.flatnonzero(d < epsilon)
        if below.size:
            x = int(eligible[below[0]])
            return (None if L == 0 else L - 1), x
        W = W @ P
    raise HorizonExceedsScan(f"predictability still >= {epsilon} at L_max={L_max}")


def delayed_predictability(model: ObservableModel, x: int, L: int, d: int) -> float:
    """Predictability when the observation of ``x`` is ``d`` slots old."""
    if d < 0:
        raise InvalidParameter("delay must be non-negative")
    return predictability(model, x, L + d)


@dataclass(frozen=True, eq=False)
class AggregationMap:
    """Surjective map from fine states ``0..K-1`` onto coarse ``0..Kbar-1``."""

    mapping: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.mapping)
        if m.ndim != 1 or m.size == 0:
            raise NotSurjective("aggregation map must be a non-empty vector")
        if not np.issubdtype(m.dtype, np.integer):
            if not np.all(m == np.round(m)):
                raise NotSurjective("aggregation map entries must be integers")
            m = m.astype(int)
        if m.min() < 0:
            raise NotSurjective("negative coarse state")
        hit = np.bincount(m)
        if np.any(hit == 0):
            raise NotSurjective(f"coarse states {np.flatnonzero(hit == 0).tolist()} have no preimage")
        m = m.copy()
        m.flags.writeable = False
        object.__setattr__(self, "mapping", m)

    @classmethod
    def even(cls, fine_states: int, group: int) -> AggregationMap:
        """Sequential blocks of ``group`` consecutive states (last block may be short)."""
        return cls(np.arange(fine_states) // group)

    @property
    def coarse_states(self) -> int:
        return int(self.mapping.max()) + 1

    @property
    def contiguous(self) -> bool:
        """Every coarse state's preimage is a run of consecutive fine states."""
        m = self.mapping
        return all(
            np.all(np.diff(np.flatnonzero(m == a)) == 1) for a in range(self.coarse_states)
        )

    def __call__(self, x: int) -> int:
        return int(self.mapping[x])


def aggregate(model: ObservableModel, agg: AggregationMap | Sequence[int]) -> ObservableModel:
    """Coarse model observed through ``agg``.

    ``Pbar(a,b) = sum_{x in a, y in b} pi(x) P(x,y) / pi(a)`` and
    ``rbar_a = sum_{y in a} pi(y) r_y / pi(a)``.
    """
    if not isinstance(agg, AggregationMap):
        agg = AggregationMap(np.asarray(agg))
    if agg.mapping.size != model.states:
        raise NotSurjective(
            f"map covers {agg.mapping.size} states, model has {model.states}"
        )
    pi = model.chain.stationary
    P = model.chain.transition
    K_bar = agg.coarse_states
    onehot = np.zeros((model.states, K_bar))
    onehot[np.arange(model.states), agg.mapping] = 1.0
    pi_bar = pi @ onehot
    flow = onehot.T @ (pi[:, None] * P) @ onehot
    P_bar = flow / pi_bar[:, None]
    # exact row normalization; the deficit is rounding only
    P_bar = P_bar / P_bar.sum(axis=1, keepdims=True)
    chain = build_chain(P_bar)
    posts = []
    for a in range(K_bar):
        members = np.flatnonzero(agg.mapping == a)
        w = pi[members] / pi_bar[a]
        posts.append(mixture(w / w.sum(), [model.posteriors[y] for y in members]))
    return ObservableModel(chain, tuple(posts))
