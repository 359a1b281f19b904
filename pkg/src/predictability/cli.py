"""Command-line entry point.

Exit codes: 0 success, 2 configuration error, 3 numerical-validation failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .errors import ConfigError, PredictabilityError, ValidationFailure
from .presets import PRESET_NAMES, get_preset
from .scenario import Table, horizon_map, run_scenario

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_VALIDATION = 3


def _emit(table: Table, out: str | None):
    text = table.to_csv()
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _leads(args) -> dict:
    return {"start": 0, "stop": args.lmax, "step": args.step}


def _queue_model(args) -> dict:
    spec = {"type": "queue", "mu": args.mu, "capacity": args.capacity}
    if args.alpha is not None:
        spec["alpha"] = args.alpha
    elif args.rho is not None:
        spec["rho"] = args.rho
    else:
        raise ConfigError("give --alpha or --rho", field="alpha")
    return spec


def _state_arg(text: str):
    try:
        return int(text)
    except ValueError:
        return text


def _cmd_run(args) -> Table:
    try:
        data = json.loads(Path(args.scenario).read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read scenario: {exc}", field="scenario") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON: {exc}", field="scenario") from exc
    return run_scenario(data, threads=args.threads, lmax=args.lmax, seed=args.seed)


def _cmd_preset(args) -> Table | None:
    if args.list or not args.name:
        print("\n".join(PRESET_NAMES))
        return None
    return run_scenario(get_preset(args.name), threads=args.threads, lmax=args.lmax, seed=args.seed)


def _cmd_chain(args) -> Table:
    from .markov import build_chain, check_reversibility, spectral_decompose

    if args.transition:
        try:
            matrix = json.loads(Path(args.transition).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read transition matrix: {exc}", field="transition") from exc
        if isinstance(matrix, dict):
            matrix = matrix.get("transition", matrix)
        chain = build_chain(matrix)
    else:
        from .geoqueue import geo_transition_matrix
        from .scenario import queue_params

        chain = geo_transition_matrix(queue_params(_queue_model(args), "queue"))
    reversible = check_reversibility(chain)
    meta = {"states": chain.states, "reversible": reversible}
    rows = [["stationary", i, float(v)] for i, v in enumerate(chain.stationary)]
    if reversible:
        spec = spectral_decompose(chain)
        meta |= {"lambda_star": spec.lambda_star, "spectral_gap": spec.spectral_gap, "sweeps": spec.sweeps}
        rows += [["eigenvalue", i, float(v)] for i, v in enumerate(spec.eigenvalues)]
    return Table(["quantity", "index", "value"], rows, meta)


def _cmd_queue(args) -> Table:
    data = {
        "id": "queue_predict",
        "model": _queue_model(args),
        "states": [_state_arg(s) for s in args.state],
        "leads": _leads(args),
        "quantities": args.quantities.split(","),
        "delay": args.delay,
    }
    if "montecarlo" in data["quantities"]:
        data["sim"] = {"seed": args.seed or 0, "samples": args.samples}
    return run_scenario(data, threads=args.threads)


def _cmd_tandem(args) -> Table:
    hops = [{"type": "queue", "mu": mu, "capacity": args.capacity} for mu in args.mu]
    observed = []
    for item in args.observe:
        hop, _, state = item.partition("=")
        try:
            observed.append({"hop": int(hop), "state": _state_arg(state)})
        except ValueError as exc:
            raise ConfigError(f"--observe expects HOP=STATE, got {item!r}", field="observe") from exc
    data = {
        "id": "tandem_predict",
        "model": {"type": "tandem", "alpha": args.alpha, "hops": hops, "observed_states": observed},
        "leads": _leads(args),
        "quantities": ["exact", "ub_subadditive"],
    }
    return run_scenario(data)


def _cmd_randomwalk(args) -> Table:
    model = {"type": "randomwalk"}
    if args.stay_prob is not None:
        model["stay_prob"] = args.stay_prob
    else:
        model["preset"] = args.preset
    data = {
        "id": "randomwalk_predict",
        "model": model,
        "states": args.cqi,
        "leads": _leads(args),
        "quantities": args.quantities.split(","),
    }
    return run_scenario(data, threads=args.threads)


def _cmd_simulate(args) -> Table:
    from .geoqueue import geo_sojourn_posterior, geo_stationary
    from .dist import tv_distance
    from .montecarlo import SimConfig, simulate_geo_queue
    from .scenario import queue_params

    p = queue_params(_queue_model(args), "queue")
    cfg = SimConfig(seed=args.seed or 0, samples=1, burn_in=args.burn_in)
    tr = simulate_geo_queue(p, args.slots, cfg)
    pi = geo_stationary(p)
    hist = tr.histogram()
    rows = [[y, float(hist[y]), float(pi[y])] for y in range(p.K + 1)]
    soj = {}
    for y in range(p.K):
        n = int((tr.sojourn_found == y).sum())
        if n:
            soj[str(y)] = {"samples": n, "tv_to_posterior": tv_distance(tr.conditional_sojourn(y).pmf, geo_sojourn_posterior(p, y))}
    meta = tr.metadata | {
        "histogram_tv_to_stationary": 0.5 * float(np.abs(hist - pi).sum()),
        "blocking_rate": tr.blocking_rate(),
        "full_on_arrival_rate": tr.full_on_arrival_rate(),
        "stationary_full": float(pi[-1]),
        "conditional_sojourn": soj,
    }
    if args.trajectory_out:
        Path(args.trajectory_out).write_text(tr.to_csv())
    return Table(["state", "empirical", "stationary"], rows, meta)


def _cmd_horizon(args) -> Table:
    return horizon_map(args.mu, args.rho, args.capacity, args.epsilon, args.lmax, args.mode)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="write CSV here instead of stdout")
    common.add_argument("--seed", type=int, default=None, help="RNG seed for simulation blocks")
    common.add_argument("--threads", type=int, default=1, help="parallel series workers")

    queue = argparse.ArgumentParser(add_help=False)
    queue.add_argument("--mu", type=float, required=True)
    g = queue.add_mutually_exclusive_group()
    g.add_argument("--alpha", type=float)
    g.add_argument("--rho", type=float)
    queue.add_argument("--capacity", "-K", type=int, required=True)

    grid = argparse.ArgumentParser(add_help=False)
    grid.add_argument("--lmax", type=int, default=200, help="largest lead time")
    grid.add_argument("--step", type=int, default=1, help="lead-time step")

    # argparse exits with 2 on bad usage, which matches the config-error code
    parser = argparse.ArgumentParser(prog="predictability", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", parents=[common], help="run a scenario JSON file")
    p.add_argument("scenario")
    p.add_argument("--lmax", type=int, default=None, help="override each lead grid's stop")
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("preset", parents=[common], help="run a built-in scenario")
    p.add_argument("name", nargs="?", choices=PRESET_NAMES)
    p.add_argument("--list", action="store_true")
    p.add_argument("--lmax", type=int, default=None)
    p.set_defaults(func=_cmd_preset)

    p = sub.add_parser("chain", help="chain utilities")
    chain_sub = p.add_subparsers(dest="chain_command", required=True)
    c = chain_sub.add_parser("analyze", parents=[common], help="stationary law and spectrum")
    c.add_argument("--transition", help="JSON file holding a transition matrix")
    c.add_argument("--mu", type=float)
    cg = c.add_mutually_exclusive_group()
    cg.add_argument("--alpha", type=float)
    cg.add_argument("--rho", type=float)
    c.add_argument("--capacity", "-K", type=int)
    c.set_defaults(func=_cmd_chain)

    p = sub.add_parser("queue", help="Geo/Geo/1/K queue")
    q_sub = p.add_subparsers(dest="queue_command", required=True)
    q = q_sub.add_parser("predict", parents=[common, queue, grid], help="predictability curves")
    q.add_argument("--state", action="append", required=True, help="state index, 'K-1' or '<k>chi'")
    q.add_argument("--quantities", default="exact", help="comma-separated quantity names")
    q.add_argument("--delay", type=int, default=0)
    q.add_argument("--samples", type=int, default=100_000)
    q.set_defaults(func=_cmd_queue)

    p = sub.add_parser("tandem", help="tandem queues")
    t_sub = p.add_subparsers(dest="tandem_command", required=True)
    t = t_sub.add_parser("predict", parents=[common, grid], help="end-to-end predictability")
    t.add_argument("--alpha", type=float, required=True, help="arrival probability shared by all hops")
    t.add_argument("--mu", type=float, action="append", required=True, help="one per hop, in order")
    t.add_argument("--capacity", "-K", type=int, required=True)
    t.add_argument("--observe", action="append", default=[], help="HOP=STATE, e.g. 0=15chi")
    t.set_defaults(func=_cmd_tandem)

    p = sub.add_parser("randomwalk", help="CQI random-walk model")
    r_sub = p.add_subparsers(dest="rw_command", required=True)
    r = r_sub.add_parser("predict", parents=[common, grid], help="predictability curves")
    r.add_argument("--preset", choices=("vehicular", "static"), default="vehicular")
    r.add_argument("--stay-prob", type=float)
    r.add_argument("--cqi", type=int, action="append", required=True, help="1-based CQI level")
    r.add_argument("--quantities", default="exact")
    r.set_defaults(func=_cmd_randomwalk)

    p = sub.add_parser("simulate", parents=[common, queue], help="slot-level queue simulation")
    p.add_argument("--slots", type=int, default=1_000_000)
    p.add_argument("--burn-in", type=int, default=1000)
    p.add_argument("--trajectory-out", help="also write the per-slot trajectory CSV")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("horizon", parents=[common], help="worst-case epsilon horizon map")
    p.add_argument("--mu", type=float, nargs="+", required=True)
    p.add_argument("--rho", type=float, nargs="+", required=True)
    p.add_argument("--capacity", "-K", type=int, default=50)
    p.add_argument("--epsilon", type=float, default=0.1)
    p.add_argument("--lmax", type=int, default=20000)
    p.add_argument("--mode", choices=("prefix", "pointwise"), default="prefix")
    p.set_defaults(func=_cmd_horizon)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        table = args.func(args)
    except ValidationFailure as exc:
        print(f"validation failure: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (PredictabilityError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if table is not None:
        _emit(table, getattr(args, "out", None))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
