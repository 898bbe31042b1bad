"""Command-line driver.

    qcalc verify --suite {identities,criteria,chains,all} [--seed N]
                 [--tol X] [--fail-threshold X] [--dims D] [--random N]
                 [--json PATH]
    qcalc bell {correlations,bound,qq,tail,simulate} [flags]
    qcalc scenario {list,run} [name] [--dims D] [--seed N] [--json PATH]

Exit codes: 0 success, 1 verification failure, 2 usage or configuration
error, 3 I/O error.  All output is deterministic given the command line
and seed.  Tables print the shortest lossless rendering of each value;
the JSON report renders the same values with 17 significant digits.
"""
from __future__ import annotations

import argparse
import math
import sys

from .bell import (
    PAIR_NAMES,
    AnalyzerConfig,
    break_stats,
    pair_correlation,
    qq_empty,
    sample_pair,
    tail_log10,
    triangle_bound,
)
from .criteria import SCENARIO_EXPECTATIONS, SCENARIO_NAMES
from .errors import QcalcError
from .report import Report, RunConfig, emit_report
from .suites import _record, _scenario_reports, run_verify


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qcalc",
        description="Observation-calculus verification suites and the "
        "counterfactual Bell toolkit.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, dims_default=2):
        p.add_argument("--seed", type=int, default=42)
        p.add_argument("--tol", type=float, default=1e-9)
        p.add_argument("--fail-threshold", type=float, default=1e-3)
        p.add_argument("--dims", type=int, default=dims_default)
        p.add_argument("--json", metavar="PATH", default=None)

    verify = sub.add_parser("verify", help="run verification suites")
    verify.add_argument(
        "--suite",
        choices=("identities", "criteria", "chains", "all"),
        default="all",
    )
    verify.add_argument(
        "--random",
        type=int,
        default=None,
        metavar="N",
        help="number of random instances per identity / perturbed scenarios",
    )
    add_common(verify)

    bell = sub.add_parser("bell", help="two-wing correlation computations")
    bsub = bell.add_subparsers(dest="subcommand", required=True)

    corr = bsub.add_parser("correlations", help="same-outcome probability table")
    corr.add_argument("--angles", default="0,90,45,-45", help="degrees: a,b,j,k")
    corr.add_argument("--no-flip", action="store_true")
    add_common(corr)

    bound = bsub.add_parser("bound", help="triangle bound on the outer break rate")
    bound.add_argument("--rates", required=True, help="three break rates, comma list")
    add_common(bound)

    qq = bsub.add_parser("qq", help="emptiness of the counterfactual pair set")
    qq.add_argument("--favored", type=float, required=True)
    qq.add_argument("--epsilon", type=float, required=True)
    qq.add_argument("--n", type=int, default=1_000_000)
    add_common(qq)

    tail = bsub.add_parser("tail", help="log10 binomial tail outside a rate band")
    tail.add_argument("--n", type=int, required=True)
    tail.add_argument("--p", type=float, required=True)
    tail.add_argument("--lo", type=float, required=True)
    tail.add_argument("--hi", type=float, required=True)
    add_common(tail)

    sim = bsub.add_parser("simulate", help="sample one observable pair")
    sim.add_argument("--pair", choices=PAIR_NAMES, required=True)
    sim.add_argument("--angles", default="0,90,45,-45")
    sim.add_argument("--no-flip", action="store_true")
    sim.add_argument("--n", type=int, default=100_000)
    add_common(sim)

    scen = sub.add_parser("scenario", help="named criterion scenarios")
    ssub = scen.add_subparsers(dest="subcommand", required=True)
    ssub.add_parser("list", help="list scenario names")
    run = ssub.add_parser("run", help="evaluate one scenario")
    run.add_argument("name", choices=SCENARIO_NAMES)
    add_common(run)

    return parser


def _config_from(args) -> RunConfig:
    return RunConfig(
        seed=args.seed,
        tol=args.tol,
        fail_threshold=getattr(args, "fail_threshold", 1e-3),
        dims=getattr(args, "dims", 2),
        output_path=getattr(args, "json", None),
    )


def _parse_floats(text: str, count: int, what: str) -> list[float]:
    parts = [p.strip() for p in str(text).split(",")]
    if len(parts) != count:
        raise QcalcError(f"expected {count} comma-separated {what}, got {len(parts)}")
    try:
        return [float(p) for p in parts]
    except ValueError as exc:
        raise QcalcError(f"malformed {what}: {exc}") from exc


def _analyzer(args) -> AnalyzerConfig:
    a, b, j, k = _parse_floats(args.angles, 4, "angles in degrees")
    return AnalyzerConfig.from_degrees(a, b, j, k, label_flip=not args.no_flip)


def _print_table(report: Report) -> None:
    from .report import canonical_json

    print(f"qcalc {report.command}  (seed {report.config.seed})")
    width = max([len(r["name"]) for r in report.results], default=4)
    for row in report.results:
        name = row["name"].ljust(width)
        if row["kind"] == "value":
            print(f"  {name}  value={row['value']!r}  [{row['outcome']}]")
        else:
            line = f"  {name}  deviation={row['deviation']!r}  [{row['outcome']}]"
            if "expected" in row:
                line += f"  expected={row['expected']}"
            print(line)
        for label, dev in row.get("steps", []):
            print(f"  {' ' * width}    step {label}: {dev!r}")
        if "details" in row:
            print(f"  {' ' * width}    details: {canonical_json(row['details'])}")
    tally = report.summary
    print(
        f"  summary: {tally['passed']} passed, {tally['failed']} failed, "
        f"{tally['indeterminate']} indeterminate"
    )


def _finish(report: Report, json_path: str | None) -> int:
    _print_table(report)
    if json_path:
        try:
            emit_report(report, json_path)
        except OSError as exc:
            print(f"error: cannot write report: {exc}", file=sys.stderr)
            return 3
    return 0 if report.clean else 1


def _value_row(name: str, value, details: dict | None = None) -> dict:
    row = {"name": name, "kind": "value", "value": value, "outcome": "pass"}
    if details:
        row["details"] = details
    return row


def _cmd_verify(args) -> int:
    cfg = _config_from(args)
    rows = run_verify(cfg, args.suite, args.random)
    report = Report(command=f"verify --suite {args.suite}", config=cfg, results=rows)
    return _finish(report, args.json)


def _cmd_bell(args) -> int:
    cfg = _config_from(args)
    sub = args.subcommand
    rows: list[dict] = []
    if sub == "correlations":
        table = pair_correlation(_analyzer(args))
        for pair, value in table.as_dict().items():
            rows.append(_value_row(f"same_rate[{pair}]", float(value)))
    elif sub == "bound":
        rates = _parse_floats(args.rates, 3, "break rates")
        value = triangle_bound(*rates)
        rows.append(_value_row("break_bound", value, {"rates": rates}))
    elif sub == "qq":
        empty, certificate = qq_empty(args.n, args.favored, args.epsilon)
        rows.append(
            {
                "name": "qq_emptiness",
                "kind": "value",
                "value": None,
                "outcome": "pass",
                "details": {"empty": empty, "certificate": certificate},
            }
        )
    elif sub == "tail":
        value = tail_log10(args.n, args.p, args.lo, args.hi)
        rows.append(
            _value_row(
                "log10_tail",
                value,
                {"n": args.n, "p": args.p, "lo": args.lo, "hi": args.hi},
            )
        )
    elif sub == "simulate":
        analyzer = _analyzer(args)
        left, right = sample_pair(analyzer, args.pair, args.n, cfg.seed)
        breaks, rate = break_stats(left, right)
        exact = pair_correlation(analyzer).as_dict()[args.pair]
        band = 4.0 * math.sqrt(exact * (1.0 - exact) / args.n)
        rows.append(
            _value_row(
                f"empirical_same_rate[{args.pair}]",
                1.0 - rate,
                {
                    "exact_same_rate": float(exact),
                    "breaks": breaks,
                    "n": args.n,
                    "seed": cfg.seed,
                    "four_sigma_band": band,
                },
            )
        )
    report = Report(command=f"bell {sub}", config=cfg, results=rows)
    return _finish(report, args.json)


def _cmd_scenario(args) -> int:
    if args.subcommand == "list":
        for name in SCENARIO_NAMES:
            print(name)
        return 0
    cfg = _config_from(args)
    rows = []
    for crit, report in _scenario_reports(args.name, cfg).items():
        expected = SCENARIO_EXPECTATIONS[args.name].get(crit)
        kind = "chain" if crit == "chain" else "criterion"
        rows.append(
            _record(f"{args.name}/{crit}", report, cfg, expected=expected, kind=kind)
        )
    report = Report(command=f"scenario run {args.name}", config=cfg, results=rows)
    return _finish(report, args.json)


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if args.command == "verify":
            return _cmd_verify(args)
        if args.command == "bell":
            return _cmd_bell(args)
        return _cmd_scenario(args)
    except QcalcError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
