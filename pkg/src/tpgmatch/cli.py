"""Command line: ``tpgmatch match | sweep | selftest``.

Exit codes: 0 success, 1 selftest failure, 2 bad input (arguments, graph
or config files), 3 solver or trial failure, 4 product graph over the size
cap. Settings are layered config file < ``TPGMATCH_<KEY>`` env vars < flags.
"""
import argparse
import json
import sys

from .bench import DEFAULT_METHODS, SWEEP_PARAMS, SyntheticConfig, TrialError, run_sweep, sweep_csv
from .errors import ConfigError, GraphError, AffinityError, SizeCapError, SolverError
from .io import (CONFIG_KEYS, ENV_PREFIX, env_overrides, load_config_file, load_graph,
                 make_match_config)
from .matcher import match
from .selftest import run_selftest

EXIT_OK = 0
EXIT_SELFTEST = 1
EXIT_INPUT = 2
EXIT_SOLVER = 3
EXIT_SIZE_CAP = 4


def _add_config_flags(p):
    g = p.add_argument_group("matcher settings (override config file and environment)")
    g.add_argument("--config", help="JSON file with matcher settings")
    for key, parse in CONFIG_KEYS.items():
        flag = "--" + key.replace("_", "-")
        kind = parse if parse in (int, float, str) else str
        g.add_argument(flag, dest=key, type=kind, default=None,
                       help=f"env: {ENV_PREFIX}{key.upper()}")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="tpgmatch",
        description="Inexact subgraph matching with tensor product graph walks.")
    sub = parser.add_subparsers(dest="command", required=True)

    pm = sub.add_parser("match", help="match a pattern graph into a target graph")
    pm.add_argument("pattern", help="pattern graph JSON")
    pm.add_argument("target", help="target graph JSON")
    pm.add_argument("--out", help="result JSON path (default: stdout)")
    pm.add_argument("--no-timing", action="store_true", help="omit stage timings from the result")
    _add_config_flags(pm)

    ps = sub.add_parser("sweep", help="synthetic benchmark sweep, written as CSV")
    ps.add_argument("--sweep", required=True, choices=SWEEP_PARAMS)
    ps.add_argument("--values", required=True, help="comma separated sweep values")
    ps.add_argument("--trials", type=int, default=10)
    ps.add_argument("--seed", type=int, default=0)
    ps.add_argument("--n-inlier", type=int, default=10)
    ps.add_argument("--n-outlier", type=int, default=0)
    ps.add_argument("--sigma", type=float, default=0.0)
    ps.add_argument("--rho", type=float, default=1.0)
    ps.add_argument("--methods", default=",".join(DEFAULT_METHODS),
                    help="comma separated; PG-N/PG-R/PG-B aliases accepted")
    ps.add_argument("--jobs", type=int, default=None, help="worker processes (default: all CPUs)")
    ps.add_argument("--out", help="CSV path (default: stdout)")
    ps.add_argument("--no-timing", action="store_true",
                    help="write nan for times so the CSV is byte-reproducible")
    _add_config_flags(ps)

    sub.add_parser("selftest", help="run the embedded oracle checks")
    return parser


def _match_config(args):
    file_layer = load_config_file(args.config) if args.config else {}
    flag_layer = {k: getattr(args, k) for k in CONFIG_KEYS if getattr(args, k, None) is not None}
    return make_match_config(file_layer, env_overrides(), flag_layer)


def _emit(text, path):
    if path:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_match(args):
    cfg = _match_config(args)
    g1 = load_graph(args.pattern)
    g2 = load_graph(args.target)
    result = match(g1, g2, cfg)
    _emit(json.dumps(result.to_dict(timings=not args.no_timing), indent=1) + "\n", args.out)
    return EXIT_OK


def _parse_values(text, param):
    try:
        vals = [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise ConfigError(f"--values: {exc}") from exc
    if not vals:
        raise ConfigError("--values is empty")
    if param == "n_outlier":
        if any(v != int(v) for v in vals):
            raise ConfigError("n_outlier values must be integers")
        vals = [int(v) for v in vals]
    return vals


def cmd_sweep(args):
    cfg = _match_config(args)
    values = _parse_values(args.values, args.sweep)
    methods = [m.strip() for m in args.methods.split(",") if m.strip()]
    try:
        base = SyntheticConfig(n_inlier=args.n_inlier, n_outlier=args.n_outlier, sigma=args.sigma,
                               rho=args.rho, seed=args.seed, trials=args.trials)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    rows = run_sweep(base, args.sweep, values, methods, cfg, jobs=args.jobs,
                     timing=not args.no_timing)
    _emit(sweep_csv(rows), args.out)
    return EXIT_OK


def cmd_selftest(args):
    failed = run_selftest()
    if failed:
        print(f"selftest failed: {', '.join(failed)}", file=sys.stderr)
        return EXIT_SELFTEST
    return EXIT_OK


COMMANDS = {"match": cmd_match, "sweep": cmd_sweep, "selftest": cmd_selftest}


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except SizeCapError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SIZE_CAP
    except (SolverError, TrialError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except (GraphError, AffinityError, ConfigError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
