from fractions import Fraction as Fr

import numpy as np
import pytest

import oracles as O
from ytwist.exact import RationalFunction
from ytwist.tensor import (ORTHOGONAL, SYMPLECTIC, TensorMatrix, U, V, apply, basis_vector, build_P,
                           build_Q, build_R, check_qybe, check_r_identities, check_t31, embed,
                           signed_indices, theta, theta_transpose, xi_vector)

FAMS = [(ORTHOGONAL, 2), (ORTHOGONAL, 3), (ORTHOGONAL, 4), (SYMPLECTIC, 2), (SYMPLECTIC, 4)]


def dense(M):
    return np.array([[M.entry(r, c).evaluate() for c in range(M.size)] for r in range(M.size)], dtype=object)


def test_signed_indices():
    assert signed_indices(4) == [-2, -1, 1, 2]
    assert signed_indices(5) == [-2, -1, 0, 1, 2]


def test_P_action_and_square():
    P = build_P(2)
    assert apply(P, basis_vector(2, 1, -1)) == [RationalFunction(x) for x in basis_vector(2, -1, 1)]
    assert P @ P == TensorMatrix.identity(2, 2)


def test_P_invalid_dimension():
    with pytest.raises(ValueError, match="invalid dimension"):
        build_P(1)


def test_Q_invalid_pair():
    with pytest.raises(ValueError, match="invalid pair"):
        build_Q(SYMPLECTIC, 3)


@pytest.mark.parametrize("family,N", FAMS + [(ORTHOGONAL, 5), (ORTHOGONAL, 6), (SYMPLECTIC, 6)])
def test_P_Q_relations(family, N):
    P, Q = build_P(N), build_Q(family, N)
    eps = 1 if family == ORTHOGONAL else -1
    assert Q @ Q == Q.scale(N)
    assert P @ Q == Q.scale(eps) and Q @ P == Q.scale(eps)
    q = Q.scale(Fr(1, N))
    assert q @ q == q
    assert theta_transpose(P, 1, family) == Q == theta_transpose(P, 2, family)


@pytest.mark.parametrize("family,N", FAMS)
def test_Q_matches_dense_oracle(family, N):
    assert (dense(build_Q(family, N)) == O.Q(family, N)).all()


@pytest.mark.parametrize("family,N", FAMS + [(ORTHOGONAL, 5)])
def test_Q_on_basis_gives_xi(family, N):
    Q = build_Q(family, N)
    xi = xi_vector(family, N)
    for i in signed_indices(N):
        for j in signed_indices(N):
            got = apply(Q, basis_vector(N, i, j))
            want = [RationalFunction(x * theta(family, j, 1)) if i == -j else RationalFunction(0) for x in xi]
            assert got == want


def test_Q_e1_em1_is_theta_xi():
    Q = build_Q(SYMPLECTIC, 2)
    xi = xi_vector(SYMPLECTIC, 2)
    assert apply(Q, basis_vector(2, 1, -1)) == [RationalFunction(-x) for x in xi]


@pytest.mark.parametrize("family,N", FAMS)
def test_R_identities(family, N):
    assert all(r.passed for r in check_r_identities(family, N))


@pytest.mark.parametrize("family,N", FAMS)
def test_R_matches_dense_oracle_at_point(family, N):
    x = Fr(7, 3)
    R = build_R(family, N, U)
    got = np.array([[R.entry(r, c).evaluate(u=x) for c in range(N * N)] for r in range(N * N)], dtype=object)
    assert (got == O.R(family, N, x)).all()


def test_theta_transpose_involution_and_examples():
    M = TensorMatrix.from_dense(3, 1, [[Fr(a * 3 + b - 4, 7) for b in range(3)] for a in range(3)])
    assert theta_transpose(theta_transpose(M)) == M
    E = TensorMatrix.unit(2, 1, -1)
    assert theta_transpose(E, 0, SYMPLECTIC) == E.scale(-1)
    with pytest.raises(ValueError, match="leg out of range"):
        theta_transpose(M, 1)


def test_theta_transpose_legs_commute():
    R = build_R(SYMPLECTIC, 4, U + 2 * V)
    a = theta_transpose(theta_transpose(R, 1, SYMPLECTIC), 2, SYMPLECTIC)
    b = theta_transpose(theta_transpose(R, 2, SYMPLECTIC), 1, SYMPLECTIC)
    assert a == b


def test_embed_examples():
    N = 3
    P = build_P(N)
    P12, P23 = embed(P, (0, 1)), embed(P, (1, 2))
    assert P12 @ P23 @ P12 == embed(P, (0, 2))
    assert embed(TensorMatrix.identity(N, 2), (0, 1)) == TensorMatrix.identity(N, 3)
    M = build_Q(ORTHOGONAL, N)
    assert embed(M, (0, 1)).trace() == M.trace() * N
    with pytest.raises(ValueError, match="bad embedding"):
        embed(P, (1, 1))


@pytest.mark.parametrize("family,N", FAMS)
def test_qybe(family, N):
    assert check_qybe(family, N).passed


def test_qybe_wrong_kappa_fails_and_oracle_agrees():
    bad = Fr(3, 2)  # kappa + 1 for (orthogonal, 3)
    r = check_qybe(ORTHOGONAL, 3, bad)
    assert r.status == "fail" and r.witness
    assert not O.is_zero(O.qybe_residual(ORTHOGONAL, 3, Fr(2, 7), Fr(5, 3), bad))
    assert O.is_zero(O.qybe_residual(ORTHOGONAL, 3, Fr(2, 7), Fr(5, 3)))


@pytest.mark.parametrize("family,N", [(ORTHOGONAL, 3), (SYMPLECTIC, 4), (ORTHOGONAL, 4)])
def test_t31_bonus(family, N):
    assert all(r.passed for r in check_t31(family, N))
