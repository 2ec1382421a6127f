"""Command-line front end: run, catalog, plot, selftest."""

from __future__ import annotations

import argparse
import sys

from .catalog import format_catalog
from .config import ConfigError, parse_config


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="recdyn",
        description="recurrence analysis for dynamical systems and their "
                    "hyperspace and fuzzy-set extensions")
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="execute an experiment config")
    run_p.add_argument("--config", required=True, metavar="PATH")
    run_p.add_argument("--out", default="out", metavar="DIR")
    run_p.add_argument("--seed", type=int, default=None,
                       help="override the config seed")
    run_p.add_argument("--jobs", type=int, default=1)

    sub.add_parser("catalog", help="list built-in systems")

    plot_p = sub.add_parser("plot", help="render a report as a return-time "
                                         "raster")
    plot_p.add_argument("report", metavar="REPORT.jsonl")
    plot_p.add_argument("output", metavar="IMAGE.svg")

    st_p = sub.add_parser("selftest", help="run the acceptance battery")
    st_p.add_argument("--out", default="selftest-out", metavar="DIR")
    st_p.add_argument("--seed", type=int, default=0)
    st_p.add_argument("--jobs", type=int, default=1)
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)

    if args.command == "catalog":
        print(format_catalog())
        return 0

    if args.command == "run":
        from .runner import run_config
        try:
            cfg = parse_config(args.config)
            return run_config(cfg, args.out, args.seed, args.jobs)
        except ConfigError as exc:
            print(f"config error: {exc}", file=sys.stderr)
            return 1

    if args.command == "plot":
        import os
        if not os.path.exists(args.report):
            print(f"no such report: {args.report}", file=sys.stderr)
            return 1
        from .plotting import plot_report
        plot_report(args.report, args.output)
        return 0

    if args.command == "selftest":
        from .selftest import run_selftest
        return run_selftest(args.out, args.seed)

    return 1


if __name__ == "__main__":
    raise SystemExit(main())
