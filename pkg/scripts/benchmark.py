"""Time S(u) construction, reflection and symmetry per pair and site count."""

import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent))

from configs import Benchmark  # noqa: E402
from ytwist import reps as R  # noqa: E402
from ytwist.catalog import parse_key  # noqa: E402


def main(cfg: Benchmark = Benchmark()):
    total = 0.0
    print(f"{'pair':<12}{'sites':>6}{'build':>9}{'reflect':>9}{'sym':>9}  status")
    for key in cfg.pairs:
        spec = parse_key(key)
        for k in cfg.sites:
            if k == 2 and spec.N > cfg.max_two_site_N:
                continue
            t0 = time.perf_counter()
            S = R.build_S(R.make_rep(spec, k))
            t1 = time.perf_counter()
            a = R.check_reflection(S, spec.kappa)
            t2 = time.perf_counter()
            b = R.check_symmetry(S, spec)
            t3 = time.perf_counter()
            total += t3 - t0
            print(f"{key:<12}{k:>6}{t1 - t0:>9.2f}{t2 - t1:>9.2f}{t3 - t2:>9.2f}  {a.status}/{b.status}")
    print(f"total {total:.1f}s")


if __name__ == "__main__":
    main()
