"""Tandem composition of independent observable models.

End-to-end performance is the sum of per-hop performance, so its law is
the convolution of per-hop laws: an observed hop contributes its forecast
and an unobserved hop its marginal.
"""

from __future__ import annotations

from dataclasses import dataclass

from .dist import DiscretePmf, convolve, tv_distance
from .errors import InvalidParameter
from .omm import ObservableModel, forecast, predictability

TAIL_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class TandemSystem:
    """Independent hops in series.

    ``observed_states[m]`` is the observed state of hop ``m`` and is ignored
    (conventionally ``None``) for unobserved hops.
    """

    hops: tuple[ObservableModel, ...]
    observed: tuple[bool, ...]
    observed_states: tuple[int | None, ...]

    def __post_init__(self):
        hops = tuple(self.hops)
        observed = tuple(bool(o) for o in self.observed)
        states = tuple(self.observed_states)
        if not hops:
            raise InvalidParameter("a tandem needs at least one hop")
        if len(observed) != len(hops) or len(states) != len(hops):
            raise InvalidParameter("observed mask and states must have one entry per hop")
        for m, (hop, obs, x) in enumerate(zip(hops, observed, states)):
            if obs and (x is None or not 0 <= int(x) < hop.states):
                raise InvalidParameter(f"hop {m}: observed state {x!r} outside [0, {hop.states})")
        object.__setattr__(self, "hops", hops)
        object.__setattr__(self, "observed", observed)
        object.__setattr__(self, "observed_states", states)

    @classmethod
    def build(cls, hops, observed_states: dict[int, int]) -> TandemSystem:
        """Observe exactly the hops listed in ``{hop_index: state}``."""
        hops = tuple(hops)
        mask = tuple(m in observed_states for m in range(len(hops)))
        states = tuple(observed_states.get(m) for m in range(len(hops)))
        return cls(hops, mask, states)

    @property
    def M(self) -> int:
        return len(self.hops)

    def with_mask(self, mask) -> TandemSystem:
        return TandemSystem(self.hops, tuple(mask), self.observed_states)


def _convolve_all(parts: list[DiscretePmf]) -> DiscretePmf:
    out = parts[0]
    for p in parts[1:]:
        out = _trim_tail(convolve(out, p))
    return out


def _trim_tail(p: DiscretePmf) -> DiscretePmf:
    """Drop the upper tail once its mass falls below :data:`TAIL_TOL`."""
    tail = p.mass[::-1].cumsum()[::-1]
    keep = int((tail >= TAIL_TOL).sum())
    if keep >= p.mass.size:
        return p
    return DiscretePmf(p.offset, p.mass[:keep] / p.mass[:keep].sum(), truncation=p.offset + keep - 1)


def tandem_forecast(sys: TandemSystem, L: int) -> DiscretePmf:
    parts = [
        forecast(hop, int(x), L) if obs else hop.marginal_pmf
        for hop, obs, x in zip(sys.hops, sys.observed, sys.observed_states)
    ]
    return _convolve_all(parts)


def tandem_marginal(sys: TandemSystem) -> DiscretePmf:
    return _convolve_all([hop.marginal_pmf for hop in sys.hops])


def tandem_predictability(sys: TandemSystem, L: int, marginal: DiscretePmf | None = None) -> float:
    """TV distance of the end-to-end forecast from the end-to-end marginal.

    ``marginal`` may pass a precomputed :func:`tandem_marginal` when
    sweeping many lead times.
    """
    if not any(sys.observed):
        return 0.0
    marginal = tandem_marginal(sys) if marginal is None else marginal
    return tv_distance(tandem_forecast(sys, L), marginal)


def tandem_predictability_ub(sys: TandemSystem, L: int) -> float:
    """Sum of observed hops' own predictability, clamped to ``[0, 1]``."""
    total = sum(
        predictability(hop, int(x), L)
        for hop, obs, x in zip(sys.hops, sys.observed, sys.observed_states)
        if obs
    )
    return min(1.0, max(0.0, total))
