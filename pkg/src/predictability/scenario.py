"""Scenario runner: JSON experiment descriptions to deterministic CSV tables.

A scenario has an ``id``, a ``kind`` and either a list of ``series`` or the
fields of a single series at top level.  Top-level fields other than
``id``, ``kind``, ``series`` and ``description`` act as defaults that every
series inherits.

Kinds:

``curves``
    One row per ``(series, state, L)`` with the requested quantities.
``distributions``
    Long-format pmf table of posteriors, forecasts and the marginal.
``horizon_map``
    Worst-case epsilon horizon over a ``(mu, rho)`` grid of queues.
"""

from __future__ import annotations

import copy
import hashlib
import json
import re
import struct
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .bounds import (
    predictability_ub_chain_tv,
    predictability_ub_spectral_full,
    predictability_ub_spectral_gap,
    r_statistic,
)
from .dist import DiscretePmf, tv_distance
from .errors import (
    AbsoluteContinuityViolation,
    ConfigError,
    HorizonExceedsScan,
    PredictabilityError,
    ValidationFailure,
)
from .geoqueue import (
    GeoQueueParams,
    geo_blocking_predictability,
    geo_observable_model,
    geo_predictability_approx,
    geo_transient,
)
from .markov import check_reversibility, spectral_decompose
from .montecarlo import SimConfig, sample_forecast_empirical
from .multihop import TandemSystem, tandem_marginal, tandem_predictability, tandem_predictability_ub
from .omm import (
    AggregationMap,
    ObservableModel,
    aggregate,
    ce_predictability,
    epsilon_horizon,
    forecast,
    predictability_curves,
    predictability_sum,
    worst_case_horizon,
)
from .randomwalk import RandomWalkParams, cqi_observable_model

KINDS = ("curves", "distributions", "horizon_map")
SINGLE_QUANTITIES = (
    "exact",
    "sum_route",
    "approx",
    "ce",
    "ub_spectral_full",
    "ub_spectral_gap",
    "ub_chain_tv",
    "blocking",
    "montecarlo",
)
TANDEM_QUANTITIES = ("exact", "ub_subadditive")
QUEUE_ONLY = ("approx", "blocking")
SPECTRAL = ("ub_spectral_full", "ub_spectral_gap")
TRANSIENT_TOL = 1e-8
_CHI_RE = re.compile(r"^\s*([0-9]*\.?[0-9]+)\s*(?:\*|·)?\s*chi\s*$")
_K_RE = re.compile(r"^\s*K\s*(?:-\s*([0-9]+))?\s*$")


def fmt(v: Any) -> str:
    """CSV cell text: 12 significant digits for floats, empty for missing."""
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if v == 0.0:
            return "0"
        return f"{v:.12g}"
    return str(v)


@dataclass
class Table:
    columns: list[str]
    rows: list[list[Any]]
    metadata: dict = field(default_factory=dict)

    def column(self, name: str) -> list[Any]:
        i = self.columns.index(name)
        return [r[i] for r in self.rows]

    def checksums(self) -> dict[str, str]:
        """SHA-256 of each numeric column at full double precision."""
        out = {}
        for j, name in enumerate(self.columns):
            vals = [r[j] for r in self.rows]
            if not any(isinstance(v, (float, np.floating)) for v in vals):
                continue
            h = hashlib.sha256()
            for v in vals:
                h.update(struct.pack("<d", float("nan") if v is None else float(v)))
            out[name] = h.hexdigest()
        return out

    def to_csv(self) -> str:
        meta = dict(self.metadata)
        meta["checksums"] = self.checksums()
        lines = ["# " + json.dumps(meta, sort_keys=True, separators=(",", ":"), default=_json_default)]
        lines.append(",".join(self.columns))
        lines.extend(",".join(fmt(v) for v in row) for row in self.rows)
        return "\n".join(lines) + "\n"


def _json_default(o):
    if isinstance(o, np.integer):
        return int(o)
    if isinstance(o, np.floating):
        return float(o)
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(f"not JSON serializable: {type(o).__name__}")


def read_csv(text: str) -> Table:
    """Parse a table written by :meth:`Table.to_csv` (cells stay strings)."""
    lines = text.splitlines()
    meta = json.loads(lines[0][2:]) if lines and lines[0].startswith("# ") else {}
    body = lines[1:] if meta else lines
    columns = body[0].split(",")
    return Table(columns, [ln.split(",") for ln in body[1:]], meta)


# ---------------------------------------------------------------- parsing


def _need(d: dict, key: str, where: str):
    if key not in d:
        raise ConfigError(f"missing required field {key!r}", field=f"{where}.{key}")
    return d[key]


def _number(v, where: str, lo=None, hi=None, integer=False) -> float:
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(f"expected a number, got {v!r}", field=where)
    if integer and int(v) != v:
        raise ConfigError(f"expected an integer, got {v!r}", field=where)
    if (lo is not None and v < lo) or (hi is not None and v > hi):
        raise ConfigError(f"value {v!r} outside [{lo}, {hi}]", field=where)
    return int(v) if integer else float(v)


def parse_leads(spec, where: str, lmax: int | None = None) -> list[int]:
    if isinstance(spec, dict):
        start = _number(spec.get("start", 0), f"{where}.start", lo=0, integer=True)
        stop = _number(_need(spec, "stop", where), f"{where}.stop", lo=0, integer=True)
        step = _number(spec.get("step", 1), f"{where}.step", lo=1, integer=True)
        if lmax is not None:
            stop = lmax
        leads = list(range(start, stop + 1, step))
    elif isinstance(spec, list):
        leads = [_number(v, f"{where}[{i}]", lo=0, integer=True) for i, v in enumerate(spec)]
        if lmax is not None:
            leads = [L for L in leads if L <= lmax]
    else:
        raise ConfigError("leads must be a list or {start, stop, step}", field=where)
    leads = sorted(set(leads))
    if not leads:
        raise ConfigError("lead-time grid is empty", field=where)
    return leads


def queue_params(spec: dict, where: str, alpha_default=None) -> GeoQueueParams:
    mu = _number(_need(spec, "mu", where), f"{where}.mu", lo=0.0, hi=1.0)
    cap = spec.get("capacity", spec.get("K"))
    if cap is None:
        raise ConfigError("missing required field 'capacity'", field=f"{where}.capacity")
    cap = _number(cap, f"{where}.capacity", lo=1, integer=True)
    if "alpha" in spec:
        alpha = _number(spec["alpha"], f"{where}.alpha", lo=0.0, hi=1.0)
    elif "rho" in spec:
        alpha = _number(spec["rho"], f"{where}.rho", lo=0.0) * mu
    elif alpha_default is not None:
        alpha = alpha_default
    else:
        raise ConfigError("queue needs 'alpha' or 'rho'", field=f"{where}.alpha")
    try:
        return GeoQueueParams(alpha, mu, cap)
    except PredictabilityError as exc:
        raise ConfigError(str(exc), field=where) from exc


def resolve_state(spec, n_states: int, where: str, params: GeoQueueParams | None = None, one_indexed=False) -> int:
    """Absolute index, ``"<k>chi"`` (queues), or ``"K"`` / ``"K-<n>"`` (queues)."""
    if isinstance(spec, str):
        m = _CHI_RE.match(spec)
        k = _K_RE.match(spec)
        if params is None or not (m or k):
            raise ConfigError(f"cannot resolve state {spec!r} for this model", field=where)
        x = params.chi_state(float(m.group(1))) if m else params.K - int(k.group(1) or 0)
    else:
        x = _number(spec, where, integer=True)
        if one_indexed:
            x -= 1
    if not 0 <= x < n_states:
        raise ConfigError(f"state {spec!r} resolves to {x}, outside [0, {n_states})", field=where)
    return int(x)


@dataclass
class Series:
    label: str
    model_type: str
    model: ObservableModel | None
    params: GeoQueueParams | None
    tandem: TandemSystem | None
    states: list[int]
    leads: list[int]
    quantities: list[str]
    delay: int
    sim: SimConfig | None
    resolved: dict
    epsilon: list[float]
    one_indexed: bool = False
    aggregation: AggregationMap | None = None

    def state_label(self, x: int):
        return x + 1 if self.one_indexed else x


def _truncation(model: ObservableModel) -> int | None:
    t = [p.truncation for p in model.posteriors if p.truncation is not None]
    return max(t) if t else None


def _build_single(spec: dict, where: str):
    mtype = _need(spec, "type", where)
    params = None
    one_indexed = False
    if mtype == "queue":
        params = queue_params(spec, where)
        model = geo_observable_model(params)
        resolved = params.to_dict() | {"beta": params.beta, "chi": params.chi, "rho": params.rho}
    elif mtype == "randomwalk":
        kw = {k: spec[k] for k in ("states", "stay_prob", "nb_r_slope", "nb_r_intercept", "nb_q_slope", "nb_q_intercept") if k in spec}
        try:
            rw = RandomWalkParams.preset(spec["preset"], **kw) if "preset" in spec else RandomWalkParams(**kw)
        except (PredictabilityError, TypeError) as exc:
            raise ConfigError(str(exc), field=where) from exc
        model = cqi_observable_model(rw)
        one_indexed = True
        resolved = {"states": rw.states, "stay_prob": rw.stay_prob, "state_indexing": "1-based CQI"}
    elif mtype == "custom":
        try:
            model = ObservableModel.from_dict(
                {"transition": _need(spec, "transition", where), "posteriors": _need(spec, "posteriors", where)}
            )
        except PredictabilityError as exc:
            raise ConfigError(str(exc), field=where) from exc
        resolved = {"states": model.states}
    else:
        raise ConfigError(f"unknown model type {mtype!r}", field=f"{where}.type")
    resolved["truncation"] = _truncation(model)
    return mtype, model, params, resolved, one_indexed


def _build_tandem(spec: dict, where: str, leads, quantities):
    alpha = spec.get("alpha")
    if alpha is not None:
        alpha = _number(alpha, f"{where}.alpha", lo=0.0, hi=1.0)
    hops_spec = _need(spec, "hops", where)
    if not isinstance(hops_spec, list) or not hops_spec:
        raise ConfigError("hops must be a non-empty list", field=f"{where}.hops")
    params = [queue_params(h, f"{where}.hops[{m}]", alpha) for m, h in enumerate(hops_spec)]
    hops = [geo_observable_model(p) for p in params]
    obs_spec = spec.get("observed_states", [])
    states: dict[int, int] = {}
    for i, o in enumerate(obs_spec):
        w = f"{where}.observed_states[{i}]"
        m = _number(_need(o, "hop", w), f"{w}.hop", lo=0, hi=len(hops) - 1, integer=True)
        states[m] = resolve_state(_need(o, "state", w), hops[m].states, f"{w}.state", params[m])
    if "observed" in spec:
        mask = spec["observed"]
        if len(mask) != len(hops):
            raise ConfigError("observed mask length must equal hop count", field=f"{where}.observed")
        for m, flag in enumerate(mask):
            if bool(flag) != (m in states):
                raise ConfigError(f"hop {m}: mask and observed_states disagree", field=f"{where}.observed[{m}]")
    sys = TandemSystem.build(hops, states)
    resolved = {
        "hops": [p.to_dict() | {"chi": p.chi} for p in params],
        "observed": list(sys.observed),
        "observed_states": [s for s in sys.observed_states],
        "truncation": [_truncation(h) for h in hops],
    }
    return sys, resolved


def _parse_series(spec: dict, where: str, kind: str, lmax: int | None, seed: int | None) -> Series:
    model_spec = _need(spec, "model", where)
    label = str(spec.get("label", where))
    leads = parse_leads(_need(spec, "leads", where), f"{where}.leads", lmax)
    delay = _number(spec.get("delay", 0), f"{where}.delay", lo=0, integer=True)
    eps = spec.get("epsilon", [])
    eps = [_number(e, f"{where}.epsilon[{i}]", lo=0.0, hi=1.0) for i, e in enumerate(eps)]
    sim = None
    if "sim" in spec:
        s = dict(spec["sim"])
        if seed is not None:
            s["seed"] = seed
        try:
            sim = SimConfig(**s)
        except (TypeError, PredictabilityError) as exc:
            raise ConfigError(str(exc), field=f"{where}.sim") from exc
    mw = f"{where}.model"
    if model_spec.get("type") == "tandem":
        quantities = list(spec.get("quantities", ["exact"]))
        for q in quantities:
            if q not in TANDEM_QUANTITIES:
                raise ConfigError(f"quantity {q!r} not available for tandem models", field=f"{where}.quantities")
        sys, resolved = _build_tandem(model_spec, mw, leads, quantities)
        return Series(label, "tandem", None, None, sys, [], leads, quantities, delay, sim, resolved, eps)

    mtype, model, params, resolved, one_indexed = _build_single(model_spec, mw)
    agg = None
    if "aggregation" in spec:
        a = spec["aggregation"]
        try:
            agg = AggregationMap.even(model.states, int(a["group"])) if "group" in a else AggregationMap(np.asarray(a["map"]))
            fine_model = model
            model = aggregate(fine_model, agg)
        except (KeyError, ValueError, PredictabilityError) as exc:
            raise ConfigError(f"bad aggregation: {exc}", field=f"{where}.aggregation") from exc
        resolved["aggregation"] = {
            "coarse_states": agg.coarse_states,
            "contiguous": agg.contiguous,
            "map": agg.mapping.tolist(),
        }
    quantities = list(spec.get("quantities", ["exact"]))
    for q in quantities:
        if q not in SINGLE_QUANTITIES:
            raise ConfigError(f"unknown quantity {q!r}", field=f"{where}.quantities")
        if q in QUEUE_ONLY and (mtype != "queue" or agg is not None):
            raise ConfigError(f"quantity {q!r} needs an unaggregated queue model", field=f"{where}.quantities")
        if q == "approx" and params.beta >= 1.0:
            raise ConfigError("approximation needs a stable queue (beta < 1)", field=f"{where}.quantities")
        if q in SPECTRAL and not check_reversibility(model.chain):
            raise ConfigError(f"quantity {q!r} needs a reversible chain", field=f"{where}.quantities")
        if q == "montecarlo" and sim is None:
            raise ConfigError("montecarlo needs a 'sim' block", field=f"{where}.sim")
    raw_states = _need(spec, "states", where)
    if not isinstance(raw_states, list) or not raw_states:
        raise ConfigError("states must be a non-empty list", field=f"{where}.states")
    n_fine = model.states if agg is None else agg.mapping.size
    states = [resolve_state(s, n_fine, f"{where}.states[{i}]", params, one_indexed) for i, s in enumerate(raw_states)]
    if agg is not None:
        resolved["fine_states"] = sorted(set(states))
        states = [agg(x) for x in states]
    states = sorted(set(states))
    resolved["resolved_states"] = [x + 1 if one_indexed else x for x in states]
    return Series(label, mtype, model, params, None, states, leads, quantities, delay, sim, resolved, eps, one_indexed, agg)


@dataclass
class Scenario:
    id: str
    kind: str
    series: list[Series]
    raw: dict


def load_scenario(data: dict | str, lmax: int | None = None, seed: int | None = None) -> Scenario | dict:
    """Validate a scenario description; raises :class:`ConfigError` on any problem."""
    if isinstance(data, str):
        try:
            data = json.loads(data)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError("scenario must be a JSON object")
    sid = _need(data, "id", "scenario")
    kind = data.get("kind", "curves")
    if kind not in KINDS:
        raise ConfigError(f"unknown kind {kind!r}", field="scenario.kind")
    if kind == "horizon_map":
        return Scenario(sid, kind, [], copy.deepcopy(data))
    defaults = {k: v for k, v in data.items() if k not in ("id", "kind", "series", "description")}
    series_specs = data.get("series", [{}] if defaults else [])
    if not series_specs:
        raise ConfigError("scenario has no series", field="scenario.series")
    series = []
    labels = set()
    for i, s in enumerate(series_specs):
        merged = copy.deepcopy(defaults) | copy.deepcopy(s)
        merged.setdefault("label", f"s{i}")
        if merged["label"] in labels:
            raise ConfigError(f"duplicate series label {merged['label']!r}", field=f"series[{i}].label")
        labels.add(merged["label"])
        series.append(_parse_series(merged, f"series[{i}]", kind, lmax, seed))
    return Scenario(sid, kind, series, copy.deepcopy(data))


# ---------------------------------------------------------------- running


def _validate_transient(s: Series):
    """Closed-form transient against matrix power on a few rows of the series."""
    p = s.params
    for x in (s.states[0], s.states[-1]):
        for L in (s.leads[0] + s.delay, s.leads[-1] + s.delay):
            row = s.model.chain.row_power(x, L)
            for j in (0, p.K):
                cf = geo_transient(p, x, j, L)
                if abs(cf - row[j]) > TRANSIENT_TOL:
                    raise ValidationFailure(
                        f"closed-form P^{L}({x},{j}) = {cf!r} disagrees with matrix power {row[j]!r}"
                    )


def _curves_single(s: Series) -> tuple[list[list[Any]], dict]:
    eff = [L + s.delay for L in s.leads]
    qs = s.quantities
    meta: dict = {}
    exact = predictability_curves(s.model, eff) if "exact" in qs else None
    spec = r = None
    if any(q in SPECTRAL for q in qs):
        spec = spectral_decompose(s.model.chain)
        r = r_statistic(s.model)
        meta["r_statistic"] = r
        meta["lambda_star"] = spec.lambda_star
    if s.model_type == "queue" and s.aggregation is None:
        _validate_transient(s)
    ce_undefined = 0
    rows = []
    for x in s.states:
        for L, Le in zip(s.leads, eff):
            row: list[Any] = [s.label, s.state_label(x), L]
            for q in qs:
                if q == "exact":
                    v = float(exact[Le][x])
                elif q == "sum_route":
                    v = predictability_sum(s.model, x, Le)
                elif q == "approx":
                    v = geo_predictability_approx(s.params, x, Le)
                elif q == "ce":
                    try:
                        v = ce_predictability(s.model, x, Le)
                    except AbsoluteContinuityViolation:
                        v = None
                        ce_undefined += 1
                elif q == "ub_spectral_full":
                    v = predictability_ub_spectral_full(s.model, spec, x, Le, r)
                elif q == "ub_spectral_gap":
                    v = predictability_ub_spectral_gap(s.model, spec, x, Le, r)
                elif q == "ub_chain_tv":
                    v = predictability_ub_chain_tv(s.model, x, Le)
                elif q == "blocking":
                    v = geo_blocking_predictability(s.params, x, Le)
                elif q == "montecarlo":
                    cfg = SimConfig(
                        seed=s.sim.seed, samples=s.sim.samples, burn_in=s.sim.burn_in,
                        stream_id=s.sim.stream_id * 1_000_003 + x * 10_007 + Le, workers=s.sim.workers,
                    )
                    v = tv_distance(sample_forecast_empirical(s.model, x, Le, cfg).pmf, forecast(s.model, x, Le))
                row.append(v)
            rows.append(row)
    if "ce" in qs:
        meta["ce_undefined_rows"] = ce_undefined
    if s.sim is not None:
        meta["sim"] = s.sim.metadata()
    if s.epsilon:
        hz = {}
        for x in s.states:
            hz[str(s.state_label(x))] = {}
            for e in s.epsilon:
                try:
                    h = epsilon_horizon(s.model, x, e, max(eff))
                except HorizonExceedsScan:
                    h = "exceeds_scan"
                hz[str(s.state_label(x))][fmt(e)] = h
        meta["horizons"] = hz
    return rows, meta


def _tandem_state_label(sys: TandemSystem) -> str:
    return "|".join(str(x) if o else "-" for o, x in zip(sys.observed, sys.observed_states))


def _curves_tandem(s: Series) -> tuple[list[list[Any]], dict]:
    sys = s.tandem
    marg = tandem_marginal(sys)
    label = _tandem_state_label(sys)
    rows = []
    for L in s.leads:
        Le = L + s.delay
        row: list[Any] = [s.label, label, L]
        for q in s.quantities:
            row.append(tandem_predictability(sys, Le, marg) if q == "exact" else tandem_predictability_ub(sys, Le))
        rows.append(row)
    return rows, {"marginal_support": [marg.offset, marg.support_max]}


def _curves_columns(sc: Scenario) -> list[str]:
    cols: list[str] = []
    for s in sc.series:
        for q in s.quantities:
            if q not in cols:
                cols.append(q)
    order = list(SINGLE_QUANTITIES) + [q for q in TANDEM_QUANTITIES if q not in SINGLE_QUANTITIES]
    return sorted(cols, key=order.index)


def _run_series(s: Series):
    return _curves_tandem(s) if s.model_type == "tandem" else _curves_single(s)


def _run_curves(sc: Scenario, threads: int) -> Table:
    cols = _curves_columns(sc)
    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            results = list(pool.map(_run_series, sc.series))
    else:
        results = [_run_series(s) for s in sc.series]
    rows = []
    meta_series = {}
    for s, (srows, smeta) in zip(sc.series, results):
        for r in srows:
            vals = dict(zip(s.quantities, r[3:]))
            rows.append(r[:3] + [vals.get(c) for c in cols])
        meta_series[s.label] = {"model_type": s.model_type, "delay": s.delay, **s.resolved, **smeta}
    return Table(["series", "state", "L"] + cols, rows, {"series": meta_series})


def _run_distributions(sc: Scenario) -> Table:
    rows = []
    meta = {}
    for s in sc.series:
        if s.model is None:
            raise ConfigError("distribution tables need a single (non-tandem) model", field=f"{s.label}.model")
        out: list[tuple[str, Any, Any, DiscretePmf]] = []
        for x in s.states:
            out.append(("posterior", s.state_label(x), None, s.model.posteriors[x]))
        out.append(("marginal", None, None, s.model.marginal_pmf))
        for x in s.states:
            for L in s.leads:
                out.append(("forecast", s.state_label(x), L, forecast(s.model, x, L + s.delay)))
        for kind, x, L, pmf in out:
            for z, pz in zip(pmf.support, pmf.mass):
                rows.append([s.label, kind, x, L, int(z), float(pz)])
        meta[s.label] = {"model_type": s.model_type, **s.resolved}
    return Table(["series", "distribution", "state", "L", "z", "probability"], rows, {"series": meta})


def horizon_map(
    mu_grid, rho_grid, capacity: int = 50, epsilon: float = 0.1, L_max: int = 20000, mode: str = "prefix"
) -> Table:
    """Worst-case-over-state epsilon horizon of Geo/Geo/1/K queues.

    Grid points with ``beta >= 1`` are emitted with an empty horizon and a
    reason instead of being evaluated.
    """
    rows = []
    for mu in sorted(mu_grid):
        for rho in sorted(rho_grid):
            alpha = rho * mu
            if not (0.0 < mu < 1.0 and 0.0 < alpha < 1.0):
                rows.append([mu, rho, None, None, "invalid rates"])
                continue
            p = GeoQueueParams(alpha, mu, capacity)
            if p.beta >= 1.0:
                rows.append([mu, rho, None, None, "unstable: beta >= 1"])
                continue
            try:
                h, x = worst_case_horizon(geo_observable_model(p), epsilon, L_max, mode=mode)
                rows.append([mu, rho, h, x, "below epsilon at L=0" if h is None else "ok"])
            except HorizonExceedsScan:
                rows.append([mu, rho, None, None, f"exceeds scan L_max={L_max}"])
    meta = {"capacity": capacity, "epsilon": epsilon, "L_max": L_max, "mode": mode, "worst_case_over": "states with pi > 1e-9"}
    return Table(["mu", "rho", "horizon", "argmin_state", "reason"], rows, meta)


def _run_horizon(sc: Scenario, lmax: int | None) -> Table:
    d = sc.raw
    w = "scenario"
    mu = _need(d, "mu", w)
    rho = _need(d, "rho", w)
    if not isinstance(mu, list) or not mu or not isinstance(rho, list) or not rho:
        raise ConfigError("mu and rho must be non-empty lists", field=f"{w}.mu")
    mu = [_number(v, f"{w}.mu[{i}]", lo=0.0, hi=1.0) for i, v in enumerate(mu)]
    rho = [_number(v, f"{w}.rho[{i}]", lo=0.0) for i, v in enumerate(rho)]
    cap = _number(d.get("capacity", 50), f"{w}.capacity", lo=1, integer=True)
    eps = _number(d.get("epsilon", 0.1), f"{w}.epsilon", lo=0.0, hi=1.0)
    if not 0.0 < eps < 1.0:
        raise ConfigError("epsilon must be in (0, 1)", field=f"{w}.epsilon")
    L_max = lmax if lmax is not None else _number(d.get("L_max", 20000), f"{w}.L_max", lo=1, integer=True)
    mode = d.get("mode", "prefix")
    if mode not in ("prefix", "pointwise"):
        raise ConfigError(f"unknown horizon mode {mode!r}", field=f"{w}.mode")
    return horizon_map(mu, rho, cap, eps, L_max, mode)


def run_scenario(data: dict | str | Scenario, threads: int = 1, lmax: int | None = None, seed: int | None = None) -> Table:
    sc = data if isinstance(data, Scenario) else load_scenario(data, lmax=lmax, seed=seed)
    if sc.kind == "horizon_map":
        table = _run_horizon(sc, lmax)
    elif sc.kind == "distributions":
        table = _run_distributions(sc)
    else:
        table = _run_curves(sc, threads)
    table.metadata = {"scenario": sc.id, "kind": sc.kind, "float_format": "12 significant digits"} | table.metadata
    return table
