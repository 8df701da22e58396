"""Command-line entry point: ``qrfcompare {worked-example,compare,fuzz,report}``.

``paper-example`` is accepted as an alias of ``worked-example``.

Every option can also be set through an environment variable named
``QRFCOMPARE_<OPTION>`` (e.g. ``QRFCOMPARE_SEED=7``, ``QRFCOMPARE_FORMAT=json``);
command-line flags win. Exit codes: 0 no failed check, 1 a check failed,
2 usage error.
"""

from __future__ import annotations

import argparse
import os
import sys
from typing import Any, Callable, Sequence

from .report import VerificationReport, emit_report
from .scenario import APPROACHES, STATES, ConfigError, ScenarioConfig, compare, fuzz, run_worked_example

ENV_PREFIX = "QRFCOMPARE_"

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


def _bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off", ""):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _float_or_none(text: str) -> float | None:
    return None if text.strip().lower() in ("", "none", "default") else float(text)


# (dest, flags, env-var suffix, parser, default)
_OPTIONS: list[tuple[str, tuple[str, ...], str, Callable[[str], Any], Any]] = [
    ("N", ("--group-order",), "GROUP_ORDER", int, 2),
    ("n", ("--registers",), "REGISTERS", int, 3),
    ("frame_from", ("--from",), "FROM", int, 0),
    ("frame_to", ("--to",), "TO", int, 1),
    ("seed", ("--seed",), "SEED", int, 42),
    ("trials", ("--trials",), "TRIALS", int, 100),
    ("tolerance", ("--tolerance",), "TOLERANCE", _float_or_none, None),
    ("dim_cap", ("--dim-cap",), "DIM_CAP", int, 4096),
    ("format", ("--format",), "FORMAT", str, "text"),
    ("output", ("--output", "-o"), "OUTPUT", str, None),
    ("ascii", ("--ascii",), "ASCII", _bool, False),
    ("strict", ("--strict",), "STRICT", _bool, False),
    ("state", ("--state",), "STATE", str, "all"),
    ("approach", ("--approach",), "APPROACH", str, "all"),
]


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("scenario")
    g.add_argument("--group-order", dest="N", type=int, default=None, metavar="N", help="order of Z_N (default 2)")
    g.add_argument("--registers", dest="n", type=int, default=None, metavar="n", help="register count (default 3)")
    g.add_argument("--from", dest="frame_from", type=int, default=None, metavar="I", help="source frame (default 0)")
    g.add_argument("--to", dest="frame_to", type=int, default=None, metavar="J", help="target frame (default 1)")
    g.add_argument("--seed", type=int, default=None, help="PCG64 seed for random samples (default 42)")
    g.add_argument("--trials", type=int, default=None, help="fuzz trials (default 100)")
    g.add_argument("--tolerance", type=float, default=None, help="override every check tolerance")
    g.add_argument("--dim-cap", dest="dim_cap", type=int, default=None, help="largest N**n allowed (default 4096)")
    g.add_argument("--state", default=None, choices=["all", *STATES], help="comparison-table state filter")
    g.add_argument("--approach", default=None, choices=["all", *APPROACHES], help="comparison-table approach filter")
    o = p.add_argument_group("output")
    o.add_argument("--format", default=None, choices=["text", "json"])
    o.add_argument("--output", "-o", default=None, help="file to write (default stdout)")
    o.add_argument("--ascii", action="store_const", const=True, default=None, help="ASCII glyphs in text output")
    s = o.add_mutually_exclusive_group()
    s.add_argument("--strict", dest="strict", action="store_const", const=True, default=None,
                   help="flagged discrepancies count as failures")
    s.add_argument("--allow-flagged", dest="strict", action="store_const", const=False,
                   help="flagged discrepancies do not fail the run (default)")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(
        prog="qrfcompare",
        description="Compare quantum reference frame changes across three frameworks.",
        epilog=f"Environment variables {ENV_PREFIX}<OPTION> set defaults; flags win.",
    )
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")
    # the alias keeps the name used by existing scripts
    sub.add_parser(
        "worked-example", aliases=["paper-example"], parents=[common],
        help="verify every worked value of the three-qubit scenario",
    ).set_defaults(command="worked-example")
    sub.add_parser("compare", parents=[common], help="comparison table of the three approaches")
    sub.add_parser("fuzz", parents=[common], help="random invariant states through every invariant")
    rp = sub.add_parser("report", parents=[common], help="re-render a saved JSON report")
    rp.add_argument("input", help="JSON report file ('-' for stdin)")
    return parser


def resolve(args: argparse.Namespace, environ: dict[str, str] | None = None) -> argparse.Namespace:
    """Fill options left unset on the command line from the environment, then defaults."""
    environ = os.environ if environ is None else environ
    for dest, _flags, env, parse, default in _OPTIONS:
        if getattr(args, dest, None) is not None:
            continue
        raw = environ.get(ENV_PREFIX + env)
        if raw is not None:
            try:
                value = parse(raw)
            except ValueError as e:
                raise ConfigError(f"{ENV_PREFIX}{env}: {e}") from None
        else:
            value = default
        setattr(args, dest, value)
    if args.format not in ("text", "json"):
        raise ConfigError(f"unknown format {args.format!r}")
    for name, allowed in (("state", STATES), ("approach", APPROACHES)):
        v = getattr(args, name)
        if v != "all" and v not in allowed:
            raise ConfigError(f"unknown {name} {v!r}")
    return args


def _config(args: argparse.Namespace) -> ScenarioConfig:
    return ScenarioConfig(
        N=args.N, n=args.n, frame_from=args.frame_from, frame_to=args.frame_to,
        seed=args.seed, trials=args.trials, tolerance=args.tolerance, dim_cap=args.dim_cap,
    )


def _filters(args: argparse.Namespace) -> tuple[tuple[str, ...], tuple[str, ...]]:
    states = STATES if args.state == "all" else (args.state,)
    approaches = APPROACHES if args.approach == "all" else (args.approach,)
    return states, approaches


def _run(args: argparse.Namespace) -> VerificationReport:
    if args.command == "report":
        if args.input == "-":
            text = sys.stdin.read()
        else:
            with open(args.input, encoding="utf-8") as fh:
                text = fh.read()
        return VerificationReport.from_json(text)
    cfg = _config(args)
    if args.command == "worked-example":
        return run_worked_example(cfg, *_filters(args))
    if args.command == "compare":
        return compare(cfg, *_filters(args))
    return fuzz(cfg)


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)  # exits with 2 on bad flags
    try:
        resolve(args)
        report = _run(args)
    except (ConfigError, ValueError, OSError, KeyError) as e:
        print(f"qrfcompare: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    if args.strict:
        report.promote_flags()
    try:
        emit_report(report, args.format, args.output, ascii=args.ascii)
    except OSError as e:
        print(f"qrfcompare: error: cannot write report: {e}", file=sys.stderr)
        return EXIT_USAGE
    return report.exit_code()


if __name__ == "__main__":
    sys.exit(main())
