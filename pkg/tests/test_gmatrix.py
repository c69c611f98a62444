from fractions import Fraction as Fr

import pytest

import oracles as O
from ytwist.catalog import ALTERNATIVE, build_pair, catalog, gu_matrix, parse_key, tampered
from ytwist.gmatrix import (check_g_reflection, check_g_subidentities, check_g_symmetry, symmetry_rhs)
from ytwist.tensor import U, theta_transpose

ALL = catalog()


@pytest.mark.parametrize("spec", ALL, ids=lambda s: s.key)
def test_reflection(spec):
    assert check_g_reflection(spec).passed


@pytest.mark.parametrize("spec", ALL, ids=lambda s: s.key)
def test_subidentities_individually(spec):
    reps = check_g_subidentities(spec)
    names = {r.check for r in reps}
    if spec.kind == "first":
        assert names == {f"g-subidentity-{n}" for n in ("A1", "A2a", "A2b", "A3a", "A3b", "A3c")}
    else:
        assert names == {f"g-subidentity-B{i}" for i in range(1, 10)}
    bad = [(r.check, r.witness) for r in reps if not r.passed]
    assert not bad


@pytest.mark.parametrize("spec", ALL, ids=lambda s: s.key)
def test_symmetry(spec):
    assert check_g_symmetry(spec).passed


def _gu_dense(spec):
    return [[spec.G[a][b] for b in range(spec.N)] for a in range(spec.N)]


def test_tampered_sign_fails_and_point_oracle_agrees():
    spec = tampered(parse_key("BDI:5:3:2"), 2, 2, -1)
    assert check_g_reflection(spec).status == "fail"
    # point oracle on the auxiliary space: G(u) at u = 2/7, v = 5/3
    N, c = spec.N, spec.c
    u, v = Fr(2, 7), Fr(5, 3)
    import numpy as np
    Gu, Gv = O.G_of_u(_gu_dense(spec), c, u), O.G_of_u(_gu_dense(spec), c, v)
    I = O.eye(N)
    G1, G2 = np.kron(Gu, I), np.kron(I, Gv)
    Rm, Rp = O.R("orthogonal", N, u - v), O.R("orthogonal", N, u + v)
    assert not O.is_zero(Rm.dot(G1).dot(Rp).dot(G2) - G2.dot(Rp).dot(G1).dot(Rm))


def test_point_oracle_passes_for_catalog_pair():
    import numpy as np
    spec = parse_key("CII:4:2:2")
    N = spec.N
    u, v = Fr(3, 11), Fr(-4, 5)
    G = _gu_dense(spec)
    G1, G2 = np.kron(O.G_of_u(G, None, u), O.eye(N)), np.kron(O.eye(N), O.G_of_u(G, None, v))
    Rm, Rp = O.R("symplectic", N, u - v), O.R("symplectic", N, u + v)
    assert O.is_zero(Rm.dot(G1).dot(Rp).dot(G2) - G2.dot(Rp).dot(G1).dot(Rm))


def test_literal_alternative_odd_matrix_fails():
    # the sign-normalized matrix passes; its negative (trace q - p) does not
    s = parse_key("BDI:5:3:2", ALTERNATIVE)
    assert check_g_reflection(s).passed
    from dataclasses import replace
    neg = replace(s, G=tuple(tuple(-x for x in row) for row in s.G))
    assert check_g_reflection(neg).status == "fail"


def test_symmetry_fails_on_scaled_g():
    spec = parse_key("CI:4")
    gu = gu_matrix(spec).scale(1 + 1 / U)
    ref = gu.substitute(u=spec.kappa - U)
    lhs = theta_transpose(gu, 0, spec.lie_type)
    assert lhs.witness_against(symmetry_rhs(spec, gu, ref, gu.trace(), spec.trace_gu())) is not None
