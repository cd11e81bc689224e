"""Command-line front end.

Three subcommands: ``solve`` runs the optimizer on an instance file and
reports per-run results (optionally as CSV), ``bounds list`` prints the
registered best-known objectives, ``validate`` parse-checks a dataset
file without running anything.

Exit codes: 0 success, 1 parse or configuration error, 2 I/O error.
"""

from __future__ import annotations

import argparse
import sys
from typing import Optional

from .engine import GroupConfig
from .harness import (
    BoundsRegistry,
    DatasetParseError,
    load_fsp_file,
    load_qap_file,
    run_benchmark,
    write_report_csv,
)
from .sbx import SpecParseError, parse_spec

# paper-standard group sizes and session budgets per backend
_DEFAULTS = {"fsp": (30, 100), "qap": (50, 500)}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rtgo", description="Round-table group optimizer.")
    sub = parser.add_subparsers(dest="command", required=True)

    solve = sub.add_parser("solve", help="run the optimizer on an instance file")
    solve.add_argument("--problem", required=True, choices=["fsp", "qap"])
    solve.add_argument("--instance", required=True, help="path to an instance file")
    solve.add_argument("--instance-name", default=None,
                       help="restrict a multi-instance file to one name")
    solve.add_argument("--operator", required=True, help="operator spec, e.g. MP(CA1P/O/-)")
    solve.add_argument("--agents", type=int, default=None,
                       help="group size N (default: 30 for fsp, 50 for qap)")
    solve.add_argument("--sessions", type=int, default=None,
                       help="session count T (default: 100 for fsp, 500 for qap)")
    solve.add_argument("--runs", type=int, default=1, help="independent runs per instance")
    solve.add_argument("--seed", type=int, default=1, help="64-bit master seed")
    solve.add_argument("--out", default=None, help="write a CSV report to this path")

    bounds = sub.add_parser("bounds", help="inspect the best-known-value registry")
    bounds_sub = bounds.add_subparsers(dest="bounds_command", required=True)
    bounds_sub.add_parser("list", help="print every registered instance")

    validate = sub.add_parser("validate", help="parse-check a dataset file")
    validate.add_argument("path")
    validate.add_argument("--problem", choices=["fsp", "qap"], default=None,
                          help="file format (default: try fsp, then qap)")
    return parser


def _load_records(problem: str, path: str):
    if problem == "fsp":
        return load_fsp_file(path)
    return [load_qap_file(path)]


def _cmd_solve(args) -> int:
    parse_spec(args.operator)  # surface spec errors before touching the file
    agents_default, sessions_default = _DEFAULTS[args.problem]
    agents = args.agents if args.agents is not None else agents_default
    sessions = args.sessions if args.sessions is not None else sessions_default

    records = _load_records(args.problem, args.instance)
    if args.instance_name is not None:
        wanted = args.instance_name.lower()
        records = [r for r in records if r.name == wanted]
        if not records:
            raise ValueError(f"no instance named {args.instance_name!r} in {args.instance}")

    cfg = GroupConfig(agents=agents, sessions=sessions, spec=args.operator,
                      master_seed=args.seed)
    reports = run_benchmark(records, cfg, runs=args.runs)

    for rep in reports:
        mean_rpd = "-" if rep.mean_rpd is None else f"{rep.mean_rpd:.3f}"
        print(f"{rep.instance}: best {rep.best_objective}  mean RPD {mean_rpd}  "
              f"mean t_r {rep.mean_t_r:.3f}s  ({len(rep.runs)} runs, spec {rep.spec}, "
              f"N={rep.agents}, T={rep.sessions}, seed={rep.seed})")
    if args.out is not None:
        write_report_csv(reports, args.out)
        print(f"report written to {args.out}")
    return 0


def _cmd_bounds(args) -> int:
    registry = BoundsRegistry.default()
    for name, value in registry.items():
        print(f"{name}\t{value}\t{registry.provenance(name)}")
    return 0


def _cmd_validate(args) -> int:
    attempts = [args.problem] if args.problem else ["fsp", "qap"]
    last_error: Optional[Exception] = None
    for kind in attempts:
        try:
            records = _load_records(kind, args.path)
        except DatasetParseError as exc:
            last_error = exc
            continue
        for rec in records:
            inst = rec.payload
            shape = f"n={inst.n}, m={inst.m}" if rec.kind == "fsp" else f"n={inst.n}"
            known = "" if rec.best_known is None else f", best known {rec.best_known}"
            print(f"{rec.name}: valid {rec.kind} instance ({shape}{known})")
        return 0
    raise last_error


def main(argv: Optional[list[str]] = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on bad usage; that is a config error here
        return 0 if exc.code == 0 else 1

    handlers = {"solve": _cmd_solve, "bounds": _cmd_bounds, "validate": _cmd_validate}
    try:
        return handlers[args.command](args)
    except (SpecParseError, DatasetParseError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
