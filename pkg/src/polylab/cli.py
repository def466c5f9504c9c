"""Command-line front end: ``polylab <subcommand> [flags]``.

Exit codes: 0 success, 1 failed experiment verdict, 2 usage error,
3 numeric or feasibility refusal.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys

from . import brownian, coupling, drift, experiments, rmt_tw
from .env import DistSpec, generate_field, replicate_seed
from .errors import (BudgetError, CatalogError, DomainError, NumericError, PolylabError,
                     UnsupportedDistributionError)
from .lpp import passage_time, passage_time_bruteforce
from .polymer import ScalingRegime, log_partition, log_partition_bruteforce

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_REFUSED = 0, 1, 2, 3
DEFAULT_EXPERIMENT_BUDGET = 1800.0


class _UsageError(Exception):
    pass


def _n_list(text: str) -> list:
    try:
        values = [int(float(x)) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer or comma-separated integers, got {text!r}")
    if not values:
        raise argparse.ArgumentTypeError("empty size list")
    return values


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--dist", choices=[d.value for d in DistSpec], default=None)
    p.add_argument("--out", default="-", help="output path, '-' for stdout")
    p.add_argument("--format", choices=["json", "csv"], default=None)
    p.add_argument("--reps", type=int, default=None)
    p.add_argument("--n", type=_n_list, default=None)
    p.add_argument("--a", type=float, default=None)
    p.add_argument("--beta", type=float, default=None)
    p.add_argument("--gamma", type=float, default=None)
    p.add_argument("--budget-seconds", type=float, default=None)
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="polylab", description="Directed polymer and last-passage numerics.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("lpp", parents=[common], help="last-passage time T(N, M)")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--bruteforce", action="store_true", help="enumerate all paths instead of the DP")

    p = sub.add_parser("polymer", parents=[common], help="log partition function")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--unnormalized", action="store_true")
    p.add_argument("--bruteforce", action="store_true")

    p = sub.add_parser("brownian", parents=[common], help="Brownian last passage / polymer on a grid")
    p.add_argument("--m-lines", type=int, required=True)
    p.add_argument("--step", type=float, default=None)
    p.add_argument("--extrapolate", action="store_true")

    sub.add_parser("gue", parents=[common], help="GUE top-eigenvalue samples")

    p = sub.add_parser("tw", parents=[common], help="Tracy-Widom F2 table")
    p.add_argument("action", choices=["table"])
    p.add_argument("--smin", type=float, default=rmt_tw.TW_SMIN)
    p.add_argument("--smax", type=float, default=rmt_tw.TW_SMAX)
    p.add_argument("--points", type=int, default=1601)
    p.add_argument("--tol", type=float, default=1e-10)

    p = sub.add_parser("couple", parents=[common], help="dyadic walk/Brownian coupling")
    p.add_argument("--levels", type=int, required=True)

    sub.add_parser("drift", parents=[common], help="huge-drift partition function")

    p = sub.add_parser("experiment", parents=[common], help="run a catalog experiment")
    p.add_argument("name")

    sub.add_parser("catalog", help="list experiments")
    return parser


def _need(args, *names):
    missing = [n for n in names if getattr(args, n) is None]
    if missing:
        raise _UsageError(f"{args.command}: missing --{', --'.join(m.replace('_', '-') for m in missing)}")


def _single_n(args) -> int:
    _need(args, "n")
    if len(args.n) != 1:
        raise _UsageError(f"{args.command}: --n takes a single value here")
    return args.n[0]


def _dist(args, default=DistSpec.GAUSSIAN) -> DistSpec:
    return DistSpec.parse(args.dist) if args.dist else default


def _record_output(args, record: dict, rows=None, default: str = "json") -> str:
    if (args.format or default) == "json":
        return json.dumps(record, sort_keys=True, indent=2, allow_nan=False) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    if rows is None:
        keys = sorted(record)
        w.writerow(keys)
        w.writerow([record[k] for k in keys])
    else:
        for r in rows:
            w.writerow(r)
    return buf.getvalue()


def _cmd_lpp(args):
    n = _single_n(args)
    dist = _dist(args)
    field = generate_field(dist, (n + 1, args.m + 1), args.seed)
    value = passage_time_bruteforce(field, (n, args.m)) if args.bruteforce else passage_time(field, (n, args.m))
    return _record_output(args, {"command": "lpp", "n": n, "m": args.m, "seed": args.seed, "dist": dist.value,
                                 "method": "bruteforce" if args.bruteforce else "dp", "value": value}), EXIT_OK


def _cmd_polymer(args):
    n = _single_n(args)
    _need(args, "beta")
    dist = _dist(args)
    field = generate_field(dist, (n + 1, args.m + 1), args.seed)
    normalized = not args.unnormalized
    if args.bruteforce:
        value = log_partition_bruteforce(field, (n, args.m), args.beta, normalized)
    else:
        value = log_partition(field, (n, args.m), args.beta, normalized)
    return _record_output(args, {"command": "polymer", "n": n, "m": args.m, "beta": args.beta, "seed": args.seed,
                                 "dist": dist.value, "normalized": normalized, "log_z": value}), EXIT_OK


def _cmd_brownian(args):
    horizon = float(_single_n(args))
    step = args.step if args.step is not None else brownian.default_step(horizon, args.m_lines)
    grid = brownian.sample_grid(args.m_lines, horizon, step, args.seed)
    rec = {"command": "brownian", "m_lines": args.m_lines, "t_horizon": horizon, "step": grid.step,
           "seed": args.seed,
           "last_passage": (brownian.last_passage_extrapolated(grid) if args.extrapolate
                            else brownian.last_passage_brownian(grid))}
    if args.beta is not None:
        rec["beta"] = args.beta
        rec["log_z_normalized"] = brownian.log_partition_brownian(grid, args.beta, normalized=True)
    return _record_output(args, rec), EXIT_OK


def _cmd_gue(args):
    n = _single_n(args)
    count = args.reps or 1
    values = rmt_tw.sample_gue_tops(n, count, args.seed)
    seeds = [replicate_seed(args.seed, i) for i in range(count)]
    rows = [("rep", "seed", "value")] + [(i, s, repr(float(v))) for i, (s, v) in enumerate(zip(seeds, values))]
    rec = {"command": "gue", "n": n, "seed": args.seed, "values": [float(v) for v in values],
           "rescaled": [float(v) for v in rmt_tw.rescale_gue(values, n)]}
    return _record_output(args, rec, rows), EXIT_OK


def _cmd_tw(args):
    table = rmt_tw.tw_table(args.smin, args.smax, args.points, args.tol)
    if args.format == "json":  # two-column CSV unless JSON is asked for
        rec = {"command": "tw", "built_tolerance": table.built_tolerance,
               "s": table.s_grid.tolist(), "cdf": table.cdf.tolist()}
        return _record_output(args, rec), EXIT_OK
    rows = [("s", "cdf")] + [(repr(float(s)), repr(float(f))) for s, f in zip(table.s_grid, table.cdf)]
    return _record_output(args, {}, rows, default="csv"), EXIT_OK


def _cmd_couple(args):
    dist = _dist(args, DistSpec.RADEMACHER)
    paths = coupling.dyadic_coupling(dist, args.levels, args.seed)
    rec = {"command": "couple", "dist": dist.value, "levels": args.levels, "n": paths.n, "seed": args.seed,
           "sup_gap": coupling.sup_gap(paths), "walk_end": float(paths.walk[-1]),
           "brownian_end": float(paths.brownian[-1])}
    return _record_output(args, rec), EXIT_OK


def _cmd_drift(args):
    n = _single_n(args)
    _need(args, "a", "beta")
    regime = ScalingRegime(args.a, args.beta, 1.0 if args.gamma is None else args.gamma)
    dist = _dist(args)
    if args.budget_seconds is not None:
        rows = drift.default_width(n, regime.beta, regime.h_n(n))
        projected = rows * n * 7.5e-8
        if projected > args.budget_seconds:
            raise BudgetError(f"projected {projected:.3g} s exceeds the budget of {args.budget_seconds:g} s")
    field = drift.drift_field(n, regime, dist, args.seed)
    res = drift.drifted_log_partition(field, n, regime)
    rec = {"command": "drift", "n_total": n, "a": regime.a, "beta": regime.beta, "gamma": regime.gamma,
           "seed": args.seed, "dist": dist.value, "log_z": res.log_z, "argmax_n": res.argmax_n,
           "width": res.width, "predictor": res.predictor,
           "normalized_log_z": res.log_z / regime.free_energy_scale(n)}
    return _record_output(args, rec), EXIT_OK


def _cmd_experiment(args):
    overrides = {"seed": args.seed, "reps": args.reps, "a": args.a, "beta": args.beta, "gamma": args.gamma,
                 "dist": args.dist}
    if args.n is not None:
        overrides["n_values"] = args.n
    cfg = experiments.default_config(args.name, **overrides)
    budget = DEFAULT_EXPERIMENT_BUDGET if args.budget_seconds is None else args.budget_seconds
    report = experiments.run_experiment(cfg, budget_seconds=budget)
    text = report.to_csv() if args.format == "csv" else report.to_json() + "\n"
    return text, EXIT_OK if report.passed else EXIT_FAIL


def _cmd_catalog(args):
    return "\n".join(experiments.catalog_lines()) + "\n", EXIT_OK


_COMMANDS = {
    "lpp": _cmd_lpp, "polymer": _cmd_polymer, "brownian": _cmd_brownian, "gue": _cmd_gue, "tw": _cmd_tw,
    "couple": _cmd_couple, "drift": _cmd_drift, "experiment": _cmd_experiment, "catalog": _cmd_catalog,
}


def _write(path: str, text: str):
    if path == "-":
        sys.stdout.write(text)
        sys.stdout.flush()
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse reports usage errors itself
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    try:
        text, code = _COMMANDS[args.command](args)
    except _UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"polylab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (BudgetError, NumericError, DomainError) as exc:
        print(f"polylab: refused: {exc}", file=sys.stderr)
        return EXIT_REFUSED
    except (CatalogError, UnsupportedDistributionError, PolylabError, ValueError, IndexError) as exc:
        print(f"polylab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    _write(getattr(args, "out", "-"), text)
    return code


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()
