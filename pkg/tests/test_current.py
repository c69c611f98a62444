from fractions import Fraction as Fr

import flint
import pytest

from ytwist import current as C
from ytwist.catalog import catalog, dim_g, expected_fixed_dim, parse_key
from ytwist.opmatrix import to_array

SMALL = [s for s in catalog() if s.N <= 5]


def test_F_vanishing_and_span():
    assert C.F(1, -1, "orthogonal", 4) == flint.fmpq_mat(4, 4)
    from ytwist.catalog import rank_of
    mats = [C.F(i, j, "orthogonal", 4) for i in (-2, -1, 1, 2) for j in (-2, -1, 1, 2)]
    assert rank_of(mats) == 6
    mats = [C.F(i, j, "symplectic", 4) for i in (-2, -1, 1, 2) for j in (-2, -1, 1, 2)]
    assert rank_of(mats) == 10


def test_F_bad_index():
    with pytest.raises(IndexError):
        C.F(3, 1, "orthogonal", 4)
    with pytest.raises(IndexError):
        C.F(0, 1, "orthogonal", 4)


def test_F_relation_by_hand():
    # [F_12, F_21] = F_11 - F_22 in so5 (no theta terms since 2 != -1)
    F = lambda i, j: C.F(i, j, "orthogonal", 5)
    assert F(1, 2) * F(2, 1) - F(2, 1) * F(1, 2) == F(1, 1) - F(2, 2)


@pytest.mark.parametrize("fam,N", [("orthogonal", 3), ("orthogonal", 5), ("orthogonal", 4),
                                   ("symplectic", 4), ("symplectic", 2)])
def test_F_relations(fam, N):
    assert C.check_F_relations(fam, N).passed


def test_F_relations_corrupted_table():
    table = [list(r) for r in C.theta_table("orthogonal", 5)]
    table[0][1] = -1
    r = C.check_F_relations("orthogonal", 5, table)
    assert r.status == "fail" and r.witness


def test_f_prime_bcd0():
    s = parse_key("B0:3")
    assert C.f_prime_matrix(s, 1, 0, 1) == C.F(1, 0, "orthogonal", 3) * 2
    assert C.f_prime(s, 1, 0, 2).is_zero()
    with pytest.raises(ValueError, match="invalid degree"):
        C.f_prime(s, 1, 0, 0)


@pytest.mark.parametrize("spec", catalog(), ids=lambda s: s.key)
def test_f_prime_antisymmetry(spec):
    sg = C.prime_antisymmetry_sign(spec)
    for m in (1, 2, 3):
        for i in spec.indices:
            for j in spec.indices:
                lhs = C.f_prime_matrix(spec, -j, -i, m)
                assert lhs == C.f_prime_matrix(spec, i, j, m) * (sg * spec.th(i, j) * (-1) ** m)


def test_f_prime_in_fixed_part():
    s = parse_key("CI:4")
    for m in (1, 2, 3):
        assert C.in_fixed(s, C.f_prime(s, 1, -2, m))


@pytest.mark.parametrize("key,m,dim", [("BDI:5:3:2", 1, 4), ("BDI:5:3:2", 2, 6), ("BDI:5:3:2", 3, 4),
                                       ("CI:4", 1, 4), ("CI:4", 2, 6), ("DIII:6", 1, 9), ("DIII:6", 2, 6),
                                       ("C0:4", 1, 10), ("C0:4", 2, 0)])
def test_graded_dimension(key, m, dim):
    s = parse_key(key)
    assert C.graded_dimension(s, m) == dim == C.expected_graded_dimension(s, m)


@pytest.mark.parametrize("spec", catalog(), ids=lambda s: s.key)
def test_graded_dims_check(spec):
    r = C.check_graded_dims(spec)
    assert r.passed, r.witness


def test_pbw_examples():
    assert len(C.pbw_index_set(parse_key("C0:4"), C.ODD)) == 10
    assert C.pbw_index_set(parse_key("B0:3"), C.ODD) == {(0, 1), (1, 0), (1, 1)}
    assert C.pbw_index_set(parse_key("B0:3"), C.EVEN) == set()
    assert len(C.pbw_index_set(parse_key("BDI:5:3:2"), C.EVEN)) == 6
    assert len(C.pbw_index_set(parse_key("BDI:5:3:2"), C.ODD)) == 4


@pytest.mark.parametrize("spec", catalog(), ids=lambda s: s.key)
def test_pbw_counts(spec):
    assert len(C.pbw_index_set(spec, C.ODD)) == expected_fixed_dim(spec)
    assert len(C.pbw_index_set(spec, C.EVEN)) == dim_g(spec) - expected_fixed_dim(spec)
    assert C.check_pbw_counts(spec).passed


def test_killing_pairing():
    F = lambda i, j: C.F(i, j, "orthogonal", 4)
    assert C.killing_pairing(F(1, 2), F(2, 1)) == 1
    assert C.killing_pairing(F(1, 2), F(1, 2)) == 0
    assert C.killing_pairing(F(1, 1), F(1, 1)) == 1
    for a, b in [((1, 2), (-1, 1)), ((2, -1), (1, -2)), ((1, 1), (2, 2))]:
        assert C.killing_pairing(F(*a), F(*b)) == C.killing_pairing(F(*b), F(*a))


def test_liepoly_bracket_and_basis():
    X = C.LiePoly.basis(1, 2, 2, "orthogonal", 5)
    Y = C.LiePoly.basis(2, 1, 1, "orthogonal", 5)
    Z = X.bracket(Y)
    assert Z == C.LiePoly.basis(1, 1, 2, "orthogonal", 5) - C.LiePoly.basis(2, 2, 2, "orthogonal", 5)
    with pytest.raises(ValueError, match="invalid degree"):
        C.LiePoly.basis(1, 2, 0, "orthogonal", 5)


def test_cobracket_low_degree():
    assert C.cobracket(1, 2, 1, "orthogonal", 5).is_zero()
    d = C.cobracket(1, -1, 2, "symplectic", 2)
    # sum_a F_1a (x) F_a,-1 - F_a,-1 (x) F_1a with a in {-1, 1}
    L = lambda i, j: C.LiePoly.basis(i, j, 1, "symplectic", 2)
    T = C.TensorLiePoly.from_pair
    want = (T(L(1, -1), L(-1, -1)) - T(L(-1, -1), L(1, -1)) + T(L(1, 1), L(1, -1)) - T(L(1, -1), L(1, 1)))
    assert d == want


def test_cobracket_is_antisymmetric():
    for r in (2, 3):
        d = C.cobracket(1, -2, r, "orthogonal", 4)
        assert d == -d.flip()


@pytest.mark.parametrize("spec", SMALL, ids=lambda s: s.key)
def test_cobracket_anti(spec):
    r = C.check_cobracket_anti(spec)
    assert r.passed, r.witness


@pytest.mark.parametrize("spec", SMALL, ids=lambda s: s.key)
def test_delta_prime_expansion(spec):
    for r in (2, 3):
        for i in spec.indices:
            for j in spec.indices:
                assert C.cobracket_of(C.f_prime(spec, i, j, r)) == C.delta_prime_expansion(spec, i, j, r)


def test_tau_degree_one_zero():
    s = parse_key("CI:4")
    assert C.tau_projection(s, 1, 2, 1).is_zero() and C.tau_closed_form(s, 1, 2, 1).is_zero()


@pytest.mark.xfail(strict=True, reason="the closed form needs its first factor projected; see the ledger")
def test_tau_closed_form_ci4_r2():
    s = parse_key("CI:4")
    for i in s.indices:
        for j in s.indices:
            assert C.tau_projection(s, i, j, 2) == C.tau_closed_form(s, i, j, 2)


def test_tau_counterexample_identity_G():
    # G = I: F'^(rho,2) vanishes, yet the unprojected closed form does not
    s = parse_key("B0:3")
    assert C.f_prime(s, 1, 0, 2).is_zero()
    assert C.tau_projection(s, 1, 0, 2).is_zero()
    assert not C.tau_closed_form(s, 1, 0, 2).is_zero()
    assert C.tau_closed_form_projected(s, 1, 0, 2).is_zero()


@pytest.mark.parametrize("spec", SMALL, ids=lambda s: s.key)
def test_tau_projected_closed_form(spec):
    for r in (1, 2, 3):
        for i in spec.indices:
            for j in spec.indices:
                assert C.tau_projection(spec, i, j, r) == C.tau_closed_form_projected(spec, i, j, r)


@pytest.mark.parametrize("spec", SMALL, ids=lambda s: s.key)
def test_tau_prime_is_minus_flip(spec):
    for r in (1, 2, 3):
        for i in spec.indices:
            for j in spec.indices:
                assert C.tau_prime_projection(spec, i, j, r) == -C.tau_projection(spec, i, j, r).flip()


def test_tau_check_reports_finding():
    r = C.check_tau_formula(parse_key("CI:4"))
    assert r.status == "fail"
    assert "first factor projected to the minus part matches" in r.witness
