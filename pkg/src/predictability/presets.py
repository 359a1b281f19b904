"""Built-in read-only scenarios, one per evaluation plot family."""

from __future__ import annotations

import copy

from .errors import ConfigError

_BASE_QUEUE = {"type": "queue", "mu": 0.5, "rho": 0.85, "capacity": 128}


def _tandem(alpha, mus, observe, state, capacity=100):
    return {
        "type": "tandem",
        "alpha": alpha,
        "hops": [{"type": "queue", "mu": mu, "capacity": capacity} for mu in mus],
        "observed_states": [{"hop": int(m), "state": state} for m in observe],
    }


_PRESETS: dict[str, dict] = {
    "fig_condmarg": {
        "id": "fig_condmarg",
        "kind": "distributions",
        "model": {"type": "randomwalk", "preset": "vehicular"},
        "states": [3],
        "leads": [1, 5, 20, 100],
        "series": [{"label": "vehicular"}],
    },
    "fig_rwub": {
        "id": "fig_rwub",
        "states": [1, 3, 15],
        "leads": {"start": 0, "stop": 300, "step": 1},
        "quantities": ["exact", "ub_spectral_full", "ub_spectral_gap", "ub_chain_tv"],
        "series": [
            {"label": "vehicular", "model": {"type": "randomwalk", "preset": "vehicular"}},
            {"label": "static", "model": {"type": "randomwalk", "preset": "static"}},
        ],
    },
    "fig_mm1conds": {
        "id": "fig_mm1conds",
        "kind": "distributions",
        "model": _BASE_QUEUE,
        "states": [8, 16, 32, 64],
        "leads": [100, 400],
        "series": [{"label": "K128"}],
    },
    "fig_mm1approxeval": {
        "id": "fig_mm1approxeval",
        "model": _BASE_QUEUE,
        "states": [8, 16, 32, 64],
        "leads": {"start": 0, "stop": 2000, "step": 10},
        "quantities": ["exact", "approx"],
        "series": [{"label": "K128"}],
    },
    "fig_mm1ubeval": {
        "id": "fig_mm1ubeval",
        "model": _BASE_QUEUE,
        "states": [8, 16, 32, 64],
        "leads": {"start": 0, "stop": 2000, "step": 10},
        "quantities": ["exact", "ub_spectral_full", "ub_spectral_gap", "ub_chain_tv"],
        "series": [{"label": "K128"}],
    },
    "fig_mm1agg": {
        "id": "fig_mm1agg",
        "model": _BASE_QUEUE,
        "states": [31, 63],
        "leads": {"start": 0, "stop": 1500, "step": 10},
        "series": [
            {"label": "group1", "quantities": ["exact", "approx"]},
            {"label": "group2", "aggregation": {"group": 2}},
            {"label": "group4", "aggregation": {"group": 4}},
            {"label": "group8", "aggregation": {"group": 8}},
        ],
    },
    "fig_mm1pred": {
        "id": "fig_mm1pred",
        "states": ["3chi", "9chi", "15chi"],
        "leads": {"start": 0, "stop": 2000, "step": 10},
        "quantities": ["exact", "approx", "ce"],
        "series": [
            {"label": "rho0.8", "model": {"type": "queue", "mu": 0.4, "rho": 0.8, "capacity": 100}},
            {"label": "rho0.85", "model": {"type": "queue", "mu": 0.4, "rho": 0.85, "capacity": 100}},
        ],
    },
    "fig_mm1kcomp": {
        "id": "fig_mm1kcomp",
        "states": ["3chi"],
        "leads": {"start": 0, "stop": 400, "step": 2},
        "series": [
            {"label": f"K{K}", "model": {"type": "queue", "mu": 0.4, "rho": 0.85, "capacity": K}}
            for K in (4, 8, 12, 16)
        ],
    },
    "fig_mm1loss": {
        "id": "fig_mm1loss",
        "states": [0, "K-1"],
        "leads": {"start": 0, "stop": 300, "step": 1},
        "quantities": ["blocking"],
        "series": [
            {"label": f"K{K}", "model": {"type": "queue", "mu": 0.5, "rho": 0.85, "capacity": K}}
            for K in (8, 16, 32)
        ],
    },
    "fig_mm1predtime": {
        "id": "fig_mm1predtime",
        "kind": "horizon_map",
        "capacity": 50,
        "epsilon": 0.1,
        "mu": [0.2, 0.3, 0.4, 0.5, 0.6, 0.7],
        "rho": [0.5, 0.6, 0.7, 0.8, 0.85, 0.9, 0.95],
        "L_max": 20000,
    },
    "fig_mm1multi0": {
        "id": "fig_mm1multi0",
        "leads": {"start": 0, "stop": 1500, "step": 10},
        "series": [
            {"label": f"M{M}", "model": _tandem(0.32, [0.4] * M, range(M), "15chi")}
            for M in (1, 2, 3, 5)
        ],
    },
    "fig_mm1multi1": {
        "id": "fig_mm1multi1",
        "leads": {"start": 0, "stop": 1500, "step": 10},
        "quantities": ["exact", "ub_subadditive"],
        "series": [
            {"label": label, "model": _tandem(0.32, [0.4] * 5, range(k), "15chi")}
            for label, k in (("all", 5), ("first3", 3), ("first1", 1))
        ],
    },
    "fig_mm1multi2": {
        "id": "fig_mm1multi2",
        "leads": {"start": 0, "stop": 3000, "step": 20},
        "quantities": ["exact", "ub_subadditive"],
        "series": [
            {"label": label, "model": _tandem(0.34, [0.4, 0.38, 0.4], hops, "10chi")}
            for label, hops in (("all", [0, 1, 2]), ("first", [0]), ("last", [2]), ("bottleneck", [1]))
        ],
    },
}

PRESET_NAMES = tuple(_PRESETS)


def get_preset(name: str) -> dict:
    """A fresh copy of the named preset scenario."""
    if name not in _PRESETS:
        raise ConfigError(f"unknown preset {name!r}; available: {', '.join(PRESET_NAMES)}", field="preset")
    return copy.deepcopy(_PRESETS[name])
