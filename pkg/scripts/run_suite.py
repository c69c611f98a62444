"""Run the check registry over the catalog and write a JSON report.

    python scripts/run_suite.py [--sites 2] [--checks qybe,s-reflection] [--out report.json]
"""

import argparse
import sys
from collections import Counter
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent))

from configs import SuiteRun  # noqa: E402
from ytwist.verifier import SuiteConfig, render_report, run_suite  # noqa: E402


def main(argv=None):
    cfg = SuiteRun()
    ap = argparse.ArgumentParser()
    ap.add_argument("--pairs", default=",".join(cfg.pairs))
    ap.add_argument("--checks", default=cfg.checks)
    ap.add_argument("--sites", type=int, default=cfg.sites)
    ap.add_argument("--order", type=int, default=cfg.order)
    ap.add_argument("--out", default=cfg.out)
    a = ap.parse_args(argv)
    checks = "all" if a.checks == "all" else a.checks.split(",")
    reports = run_suite(SuiteConfig(pairs=a.pairs.split(","), checks=checks, sites=a.sites,
                                    shifts=cfg.shifts, order=a.order))
    Path(a.out).write_bytes(render_report(reports, "json"))
    sys.stdout.write(render_report([r for r in reports if not r.passed], "text").decode())
    print(dict(Counter(r.status for r in reports)), "->", a.out)


if __name__ == "__main__":
    main()
