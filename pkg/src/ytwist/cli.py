"""Command line entry point: ytwist check | list-pairs | list-checks."""

from __future__ import annotations

import argparse
import sys
from typing import List, Optional

from .catalog import DEFAULT_CATALOG, parse_key
from .exact import rat
from .report import PASS
from .verifier import REGISTRY, ConfigError, SuiteConfig, default_order, render_report, run_suite

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="ytwist", description="Exact identity checks for twisted Yangians of types B, C, D.")
    sub = ap.add_subparsers(dest="command", required=True)
    ck = sub.add_parser("check", help="run a suite of checks")
    ck.add_argument("--pair", action="append", dest="pairs", metavar="KEY",
                    help="catalog key such as BDI:5:3:2 (repeatable; default: whole catalog)")
    ck.add_argument("--suite", default="all", help="'all' or a comma-separated list of check ids")
    ck.add_argument("--sites", type=int, default=1, help="number of evaluation sites (0, 1 or 2)")
    ck.add_argument("--shifts", default="0,1/3", help="comma-separated rational site shifts")
    ck.add_argument("--order", type=int, default=None, help="truncation order (default 10 or $YTWIST_ORDER)")
    ck.add_argument("--format", default="text", choices=("json", "text"))
    sub.add_parser("list-pairs", help="print the catalog keys")
    sub.add_parser("list-checks", help="print the check ids")
    return ap


def _config(args) -> SuiteConfig:
    checks = "all" if args.suite == "all" else [c.strip() for c in args.suite.split(",") if c.strip()]
    try:
        shifts = tuple(rat(s.strip()) for s in args.shifts.split(","))
    except (ValueError, ZeroDivisionError) as e:
        raise ConfigError(f"bad --shifts: {e}")
    order = args.order if args.order is not None else default_order()
    cfg = SuiteConfig(pairs=list(args.pairs or DEFAULT_CATALOG), checks=checks, sites=args.sites,
                      shifts=shifts, order=order, format=args.format)
    cfg.validate()
    return cfg


def main(argv: Optional[List[str]] = None) -> int:
    args = _parser().parse_args(argv)
    out = sys.stdout
    if args.command == "list-pairs":
        for key in DEFAULT_CATALOG:
            spec = parse_key(key)
            out.write(f"{key}\t{spec.lie_type}\t{spec.kind} kind\n")
        return EXIT_OK
    if args.command == "list-checks":
        for name in REGISTRY:
            out.write(name + "\n")
        return EXIT_OK
    try:
        cfg = _config(args)
        reports = run_suite(cfg)
    except ConfigError as e:
        sys.stderr.write(f"configuration error: {e}\n")
        return EXIT_CONFIG
    sys.stdout.buffer.write(render_report(reports, cfg.format))
    if cfg.format == "json":
        sys.stdout.buffer.write(b"\n")
    sys.stdout.flush()
    return EXIT_OK if all(r.status == PASS for r in reports) else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
