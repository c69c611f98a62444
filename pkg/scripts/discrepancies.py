"""Show the two identities that do not hold as written, next to the forms that do.

d(u): compared with q(-u)/q(u) and with q(u-k)/q(-u).
tau: the direct projection of delta(F') against the closed form, unprojected and
with the first factor projected to the minus part.
"""

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent))

from configs import Discrepancy  # noqa: E402
from ytwist import current as C  # noqa: E402
from ytwist import reps as R  # noqa: E402
from ytwist.catalog import parse_key  # noqa: E402


def d_table(spec, order):
    rep = R.make_rep(spec, 1)
    k = spec.kappa
    q = R.contractions(rep, order).q
    d, _ = R.d_contraction(R.build_S(rep, "series", order), spec)
    stated = R.shifted(q, -1, 0) / q
    shifted = R.shifted(q, 1, -k) / R.shifted(q, -1, 0)
    print(f"{spec.key}: d        = {d}")
    print(f"{'':{len(spec.key)}}  q(-u)/q(u)  = {stated}   equal: {d == stated}")
    print(f"{'':{len(spec.key)}}  q(u-k)/q(-u) = {shifted}   equal: {d == shifted}")


def tau_table(spec, max_r):
    bad_plain = bad_proj = total = 0
    for r in range(1, max_r + 1):
        for i in spec.indices:
            for j in spec.indices:
                tau = C.tau_projection(spec, i, j, r)
                total += 1
                bad_plain += tau != C.tau_closed_form(spec, i, j, r)
                bad_proj += tau != C.tau_closed_form_projected(spec, i, j, r)
    print(f"{spec.key}: tau mismatches out of {total}: closed form {bad_plain}, projected closed form {bad_proj}")


def main(cfg: Discrepancy = Discrepancy()):
    for key in cfg.pairs:
        d_table(parse_key(key), cfg.order)
    for key in cfg.pairs:
        tau_table(parse_key(key), cfg.max_r)


if __name__ == "__main__":
    main()
