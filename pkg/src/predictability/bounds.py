"""Upper bounds on predictability from chain mixing.

The spectral bounds combine the chain's mixing envelope with the overlap
statistic ``R`` of the posteriors; the chain-TV bound is the direct
data-processing bound ``TV(P^L(x, .), pi)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field


from .errors import NotReversible
from .markov import (
    SpectralDecomposition,
    chain_tv,
    check_reversibility,
    mixing_tv_bound_full,
    mixing_tv_bound_gap,
    spectral_decompose,
)
from .omm import ObservableModel, predictability

MARGINAL_FLOOR = 1e-15


def r_statistic(model: ObservableModel) -> float:
    """``R = sum_z sum_y pi(y) r_y(z)^2 / sum_y pi(y) r_y(z)``, in ``[1, K]``."""
    pi = model.chain.stationary
    R = model.posterior_matrix
    den = pi @ R
    num = pi @ (R * R)
    keep = den > MARGINAL_FLOOR
    return math.fsum(num[keep] / den[keep])


def _require_reversible(model: ObservableModel):
    if not check_reversibility(model.chain):
        raise NotReversible("spectral bounds need a reversible chain")


def _overlap_factor(r: float) -> float:
    return math.sqrt(2.0) * math.sqrt(max(0.0, r - 1.0))


def predictability_ub_spectral_full(
    model: ObservableModel, spec: SpectralDecomposition, x: int, L: int, r: float | None = None
) -> float:
    _require_reversible(model)
    r = r_statistic(model) if r is None else r
    return mixing_tv_bound_full(spec, x, L) * _overlap_factor(r)


def predictability_ub_spectral_gap(
    model: ObservableModel, spec: SpectralDecomposition, x: int, L: int, r: float | None = None
) -> float:
    _require_reversible(model)
    r = r_statistic(model) if r is None else r
    return mixing_tv_bound_gap(spec, x, L) * _overlap_factor(r)


def predictability_ub_chain_tv(model: ObservableModel, x: int, L: int) -> float:
    """``TV(P^L(x, .), pi)``; valid for any posteriors by data processing."""
    return chain_tv(model.chain, x, L)


def predictability_ub_chain_tv_printed(model: ObservableModel, x: int, L: int) -> float:
    """Diagnostic: the chain-TV bound with an extra factor 1/2.

    Not a valid bound in general; point-mass posteriors violate it.
    """
    return 0.5 * chain_tv(model.chain, x, L)


@dataclass(frozen=True)
class BoundReport:
    exact: float
    r_statistic: float
    ub_spectral_full: float
    ub_spectral_gap: float
    ub_chain_tv: float
    metadata: dict = field(default_factory=dict)

    def as_row(self) -> dict:
        return {
            "exact": self.exact,
            "ub_spectral_full": self.ub_spectral_full,
            "ub_spectral_gap": self.ub_spectral_gap,
            "ub_chain_tv": self.ub_chain_tv,
            "r_statistic": self.r_statistic,
        }


def bound_report(
    model: ObservableModel,
    x: int,
    L: int,
    spec: SpectralDecomposition | None = None,
    r: float | None = None,
) -> BoundReport:
    spec = spectral_decompose(model.chain) if spec is None else spec
    r = r_statistic(model) if r is None else r
    tv = predictability_ub_chain_tv(model, x, L)
    return BoundReport(
        exact=predictability(model, x, L),
        r_statistic=r,
        ub_spectral_full=predictability_ub_spectral_full(model, spec, x, L, r),
        ub_spectral_gap=predictability_ub_spectral_gap(model, spec, x, L, r),
        ub_chain_tv=tv,
        metadata={
            "chain_tv_condition_met": bool(1.5 < r <= model.states + 1e-9),
            "ub_chain_tv_printed": 0.5 * tv,
            "lambda_star": spec.lambda_star,
        },
    )
