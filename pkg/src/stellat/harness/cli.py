"""``stellat run|describe|list``."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from ..errors import ConfigError, UnknownSuite
from .config import SuiteConfig
from .suites import SUITE_NAMES, describe, run_suite

EXIT_PASS, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="stellat", description="Run verification suites and emit JSON evidence.")
    sub = p.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="run a suite (or 'all') and write a JSON report array")
    run.add_argument("suite", help=f"one of {', '.join(SUITE_NAMES)}, all")
    run.add_argument("--tol", type=float)
    run.add_argument("--trials", type=int)
    run.add_argument("--seed", type=int)
    run.add_argument("--max-order", type=int, dest="max_order")
    run.add_argument("--n-max", type=int, dest="n_max")
    run.add_argument("--bb-budget", type=int, dest="bb_budget")
    run.add_argument("--out", help="report path (default: stdout)")
    run.add_argument("--csv-dir", help="directory for CSV tables")
    desc = sub.add_parser("describe", help="print a suite's claim and method")
    desc.add_argument("suite")
    sub.add_parser("list", help="list suite names")
    return p


def report_json(reports) -> str:
    return json.dumps([r.to_dict() for r in reports], indent=2, sort_keys=True, default=str) + "\n"


def main(argv=None) -> int:
    parser = _parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_PASS
    if args.command == "list":
        print("\n".join((*SUITE_NAMES, "all")))
        return EXIT_PASS
    if args.command == "describe":
        try:
            print(describe(args.suite), end="")
        except UnknownSuite:
            print(f"unknown suite: {args.suite}", file=sys.stderr)
            return EXIT_CONFIG
        return EXIT_PASS
    try:
        cfg = SuiteConfig.from_env(
            tol=args.tol,
            trials=args.trials,
            seed=args.seed,
            max_order=args.max_order,
            n_max=args.n_max,
            bb_budget=args.bb_budget,
            out=args.out,
        )
        code, reports = run_suite(args.suite, cfg)
    except UnknownSuite:
        print(f"unknown suite: {args.suite} (expected one of {', '.join(SUITE_NAMES)}, all)", file=sys.stderr)
        return EXIT_CONFIG
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    text = report_json(reports)
    if cfg.out:
        Path(cfg.out).write_text(text)
    else:
        sys.stdout.write(text)
    if args.csv_dir:
        d = Path(args.csv_dir)
        d.mkdir(parents=True, exist_ok=True)
        for r in reports:
            for fname, body in r.tables.items():
                (d / f"{r.suite}_{fname}").write_text(body)
    for r in reports:
        print(f"{r.suite}: {r.verdict} ({r.wall_time:.2f} s)", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
