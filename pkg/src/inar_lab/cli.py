"""Command-line interface.

Examples::

    inar-lab simulate --alpha 1 --beta 0 --innov det:1 --n 5 --seed 7
    inar-lab estimate --mu 1 --input path.csv
    inar-lab mc-clt --innov poisson:1 --n 2000 --reps 1000 --seed 1
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys

from .cls import accumulate, building_blocks, det_scaling, solve, sum_sq_scaling
from .innovations import InnovationSpec
from .limit_laws import DEFAULT_DF_STEPS, df_oracle
from .montecarlo import Case, McConfig, run_clt_experiment, run_df_experiment
from .process import InarParams, path_from_csv, path_from_json, path_to_csv, path_to_json, simulate

DEFAULT_SEED = 20100101
THREADS_ENV = "INAR_LAB_THREADS"


class UsageError(Exception):
    pass


def _probability(text: str) -> float:
    v = float(text)
    if not 0.0 <= v <= 1.0:
        raise argparse.ArgumentTypeError(f"{text} is not in [0, 1]")
    return v


def _at_least(low: int):
    def parse(text: str) -> int:
        v = int(text)
        if v < low:
            raise argparse.ArgumentTypeError(f"{text} is smaller than {low}")
        return v
    return parse


def _innov(text: str) -> InnovationSpec:
    try:
        return InnovationSpec.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _seed(text: str) -> int:
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError("seed must be non-negative")
    return v


def _threads(value: int | None) -> int:
    if value is not None:
        return value
    env = os.environ.get(THREADS_ENV)
    if env:
        try:
            v = int(env)
        except ValueError:
            raise UsageError(f"{THREADS_ENV}={env!r} is not an integer") from None
        if v < 1:
            raise UsageError(f"{THREADS_ENV} must be at least 1")
        return v
    return os.cpu_count() or 1


def _emit(text: str, output: str | None) -> None:
    if output in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(output, "w") as fh:
            fh.write(text)


def _read_path(name: str):
    with open(name) as fh:
        text = fh.read()
    if name.endswith(".json") or text.lstrip().startswith("{"):
        return path_from_json(text)
    return path_from_csv(text)


def cmd_simulate(args) -> int:
    params = InarParams(args.alpha, args.beta)
    path = simulate(params, args.innov, args.n, args.seed)
    if args.format == "json":
        _emit(path_to_json(path) + "\n", args.output)
    else:
        _emit(path_to_csv(path), args.output)
    return 0


def cmd_estimate(args) -> int:
    rows = []
    for name in args.input:
        path = _read_path(name)
        mu = args.mu
        if mu is None:
            innov = path.origin.get("innov")
            if innov is None:
                raise UsageError(f"{name}: --mu is required when the path carries no innovation metadata")
            mu = InnovationSpec.parse(innov).mean
        if not mu > 0:
            raise UsageError("--mu must be positive")
        est = solve(accumulate(path, mu))
        rows.append({"input": name, "mu": mu, **est.to_dict()})
    if args.format == "csv":
        buf = io.StringIO()
        w = csv.DictWriter(buf, ["input", "mu", "n", "alpha_hat", "beta_hat", "branch", "det"], lineterminator="\n")
        w.writeheader()
        for row in rows:
            w.writerow({k: ("" if v is None else v) for k, v in row.items()})
        _emit(buf.getvalue(), args.output)
    else:
        doc = rows[0] if len(rows) == 1 else rows
        _emit(json.dumps(doc, indent=2) + "\n", args.output)
    return 0


def cmd_diag(args) -> int:
    if args.input:
        path = _read_path(args.input)
        config = {"input": args.input}
        innov = args.innov or (InnovationSpec.parse(path.origin["innov"]) if "innov" in path.origin else None)
    else:
        if args.innov is None:
            raise UsageError("diag needs --input or --innov (with --alpha/--beta/--n) to simulate a path")
        path = simulate(InarParams(args.alpha, args.beta), args.innov, args.n, args.seed)
        config = path.origin
        innov = args.innov
    mu = args.mu if args.mu is not None else (innov.mean if innov is not None else None)
    if mu is None or not mu > 0:
        raise UsageError("diag needs a positive --mu (or an innovation spec to take it from)")
    neq = accumulate(path, mu)
    doc = {
        "config": {**config, "mu": mu},
        "n": path.n,
        "det": neq.det,
        "det_over_n4": det_scaling(neq, 4),
        "det_over_n5": det_scaling(neq, 5),
        "sumsq_lag1_over_n3": sum_sq_scaling(path, 1, 3),
        "sumsq_lag2_over_n3": sum_sq_scaling(path, 2, 3),
    }
    if path.n >= 2:
        doc["building_blocks"] = building_blocks(path, mu).tolist()
    _emit(json.dumps(doc, indent=2) + "\n", args.output)
    return 0


def cmd_limit_sample(args) -> int:
    values = df_oracle(args.reps, args.steps, args.seed)
    buf = io.StringIO()
    if args.format == "csv":
        buf.write("# " + json.dumps({"steps": args.steps, "reps": args.reps, "seed": args.seed}) + "\n")
        buf.write("rep,value\n")
        for i, v in enumerate(values.tolist()):
            buf.write(f"{i},{v!r}\n")
    else:
        for v in values.tolist():
            buf.write(f"{v!r}\n")
    _emit(buf.getvalue(), args.output)
    return 0


def _run_mc(args, case: Case) -> int:
    config = McConfig(
        case=case,
        spec=args.innov,
        n=args.n,
        reps=args.reps,
        master_seed=args.seed,
        df_steps=args.steps,
        df_oracle_size=args.oracle_size,
    )
    threads = _threads(args.threads)
    runner = run_clt_experiment if case is Case.CASE10 else run_df_experiment
    report = runner(config, threads=threads)
    if args.format == "csv":
        _emit("# " + json.dumps(config.to_dict(), sort_keys=True) + "\n" + report.samples_csv(), args.output)
    else:
        _emit(report.to_json() + "\n", args.output)
    status = "PASS" if report.passed else "FAIL"
    print(
        f"{status} ks={report.ks_stat:.4f} threshold={report.ks_threshold:.4f} "
        f"skipped={report.skipped} line={report.line_concentration:.4g}",
        file=sys.stderr,
    )
    return 0 if report.passed else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="inar-lab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, fmt=("csv", "json"), default_fmt="csv"):
        p.add_argument("--seed", type=_seed, default=DEFAULT_SEED)
        p.add_argument("--output", "-o", default=None, help="output file (default: stdout)")
        p.add_argument("--format", choices=fmt, default=default_fmt)

    p = sub.add_parser("simulate", help="simulate one INAR(2) path")
    p.add_argument("--alpha", type=_probability, required=True)
    p.add_argument("--beta", type=_probability, required=True)
    p.add_argument("--innov", type=_innov, required=True)
    p.add_argument("--n", type=_at_least(1), required=True)
    common(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("estimate", help="CLS estimate from path file(s)")
    p.add_argument("--input", nargs="+", required=True)
    p.add_argument("--mu", type=float, default=None)
    common(p, default_fmt="json")
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("diag", help="scaling diagnostics and building blocks")
    p.add_argument("--input", default=None)
    p.add_argument("--alpha", type=_probability, default=1.0)
    p.add_argument("--beta", type=_probability, default=0.0)
    p.add_argument("--innov", type=_innov, default=None)
    p.add_argument("--n", type=_at_least(1), default=100_000)
    p.add_argument("--mu", type=float, default=None)
    common(p, fmt=("json",), default_fmt="json")
    p.set_defaults(func=cmd_diag)

    p = sub.add_parser("limit-sample", help="draws of the Dickey-Fuller functional")
    p.add_argument("--reps", type=_at_least(1), default=10_000)
    p.add_argument("--steps", type=_at_least(100), default=DEFAULT_DF_STEPS)
    common(p, fmt=("text", "csv"), default_fmt="text")
    p.set_defaults(func=cmd_limit_sample)

    for name, case in (("mc-clt", Case.CASE10), ("mc-df", Case.CASE01)):
        p = sub.add_parser(name, help=f"Monte Carlo check for case ({case.value[0]},{case.value[1]})")
        p.add_argument("--innov", type=_innov, default=InnovationSpec.poisson(1.0))
        p.add_argument("--n", type=_at_least(10), default=2000)
        p.add_argument("--reps", type=_at_least(2), default=1000)
        p.add_argument("--steps", type=_at_least(100), default=DEFAULT_DF_STEPS)
        p.add_argument("--oracle-size", type=_at_least(1), default=10_000)
        p.add_argument("--threads", type=_at_least(1), default=None)
        common(p, default_fmt="json")
        p.set_defaults(func=lambda a, case=case: _run_mc(a, case))
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (UsageError, ValueError, OSError) as exc:
        print(f"inar-lab: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
