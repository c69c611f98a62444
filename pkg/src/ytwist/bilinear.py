"""Point kernels for two-parameter identities on aux (x) aux (x) site space.

Both sides of identities such as

    R(u-v) A_1(u) R(u+v) B_2(v) = B_2(v) R(u+v) A_1(u) R(u-v)

are polynomial in (u, v) once every factor is replaced by its numerator
(the scalar denominators agree on the two sides).  A polynomial of degree
<= du in u and <= dv in v vanishes iff it vanishes on a (du+1) x (dv+1)
integer grid, so the identity is decided exactly by the kernels below,
which evaluate both sides at one integer point.

At a point every entry of the difference is an integer D with |D| <= B for
a bound B from operator norms.  The kernels run modulo primes p < 2^26 in
int64 arithmetic; once the product of the primes exceeds B, D = 0 mod all
of them forces D = 0.

Arrays have axes [i, k, r, j, l, c]: row (i, k, r) and column (j, l, c),
where i, j are the first auxiliary leg, k, l the second and r, c the site
space.
"""

from __future__ import annotations

from typing import List, Optional, Sequence, Tuple

import flint
import numpy as np

PRIME_BITS = 26


def _primes(count: int) -> List[int]:
    out = []
    x = 2 ** PRIME_BITS - 1
    while len(out) < count:
        if flint.fmpz(x).is_prime():
            out.append(x)
        x -= 2
    return out


PRIMES = _primes(64)


def to_fmpz(a: np.ndarray) -> flint.fmpz_mat:
    r, c = a.shape
    return flint.fmpz_mat(r, c, [int(x) for x in a.ravel()])


def from_fmpz(m: flint.fmpz_mat) -> np.ndarray:
    return np.array(m.entries(), dtype=object).reshape(m.nrows(), m.ncols())


def int_entries(m: flint.fmpz_mat) -> List[int]:
    return [int(x) for x in m.entries()]


def inf_norm(m: flint.fmpz_mat) -> int:
    """Max absolute row sum."""
    vals = int_entries(m)
    n = m.ncols()
    return max((sum(abs(x) for x in vals[r * n:(r + 1) * n]) for r in range(m.nrows())), default=0)


def residues(m: flint.fmpz_mat, p: int) -> np.ndarray:
    return np.array([x % p for x in int_entries(m)], dtype=np.int64).reshape(m.nrows(), m.ncols())


class AuxLayout:
    """Index data for one auxiliary dimension and theta-table."""

    def __init__(self, N: int, theta_signs: Sequence[int]):
        # theta_ij = t_i t_j, with t_i = 1 (orthogonal) or sign(i) (symplectic)
        self.N = N
        self.t = np.array(theta_signs, dtype=np.int64)
        self.neg = np.arange(N)[::-1].copy()  # pos(-i) = N-1-pos(i)
        self.orthogonal = all(x == 1 for x in theta_signs)


def blocks(a: np.ndarray, N: int) -> np.ndarray:
    """Split an (N d) x (N d) operator matrix into array [i, r, j, c]."""
    n = a.shape[0]
    d = n // N
    return a.reshape(N, d, N, d)


def pair_table(a4: np.ndarray, b4: np.ndarray, p: int) -> np.ndarray:
    """X[i, j, r, k, l, c] = (a_ij b_kl)[r, c] mod p."""
    N, d = a4.shape[0], a4.shape[1]
    left = a4.transpose(0, 2, 1, 3).reshape(N * N * d, d)
    right = b4.transpose(1, 0, 2, 3).reshape(d, N * N * d)
    return matmul_mod(left, right, p).reshape(N, N, d, N, N, d)


CHUNK = 1 << (62 - 2 * PRIME_BITS)


def matmul_mod(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    """a @ b mod p for residue matrices, splitting the inner dimension to stay inside int64."""
    n = a.shape[1]
    if n <= CHUNK:
        return (a @ b) % p
    out = np.zeros((a.shape[0], b.shape[1]), dtype=np.int64)
    for s in range(0, n, CHUNK):
        out = (out + (a[:, s:s + CHUNK] @ b[s:s + CHUNK]) % p) % p
    return out


def block_product(a: np.ndarray, b: np.ndarray, N: int, p: int) -> np.ndarray:
    """(ab) mod p as [i, r, l, c]."""
    return blocks(matmul_mod(a, b, p), N)


RScalars = Optional[Tuple[int, int, int]]


def _reduce(coeffs: RScalars, p: int):
    if coeffs is None:
        return None
    return tuple(int(c) % p for c in coeffs)


def left_R(M: np.ndarray, coeffs: RScalars, lay: AuxLayout, p: int) -> np.ndarray:
    """(alpha I + beta P + gamma Q) M mod p."""
    coeffs = _reduce(coeffs, p)
    if coeffs is None:
        return M
    al, be, ga = coeffs
    out = (M * al) % p
    if be:
        out = (out + M.transpose(1, 0, 2, 3, 4, 5) * be) % p
    if ga:
        # (Q M)_{(i,k),col} = delta_{k,-i} t_i sum_a t_a M_{(a,-a),col}
        N = lay.N
        diag = M[np.arange(N), lay.neg]  # [a, r, j, l, c]
        s = np.tensordot(lay.t, diag, axes=(0, 0)) % p
        s = (s * ga) % p
        for i in range(N):
            out[i, lay.neg[i]] = (out[i, lay.neg[i]] + s * lay.t[i]) % p
    return out


def right_R(M: np.ndarray, coeffs: RScalars, lay: AuxLayout, p: int) -> np.ndarray:
    """M (alpha I + beta P + gamma Q) mod p."""
    coeffs = _reduce(coeffs, p)
    if coeffs is None:
        return M
    al, be, ga = coeffs
    out = (M * al) % p
    if be:
        out = (out + M.transpose(0, 1, 2, 4, 3, 5) * be) % p
    if ga:
        N = lay.N
        diag = M[:, :, :, np.arange(N), lay.neg]  # [i, k, r, a, c]
        s = np.tensordot(diag, lay.t, axes=(3, 0)) % p
        s = (s * ga) % p
        for j in range(N):
            out[:, :, :, j, lay.neg[j]] = (out[:, :, :, j, lay.neg[j]] + s * lay.t[j]) % p
    return out


def a1_R_b2(a4, b4, ab, coeffs: RScalars, lay: AuxLayout, p: int) -> np.ndarray:
    """A_1 (alpha + beta P + gamma Q) B_2 mod p at one point."""
    N = lay.N
    X = pair_table(a4, b4, p)
    coeffs = _reduce(coeffs, p)
    if coeffs is None:
        return X.transpose(0, 3, 2, 1, 4, 5).copy()
    al, be, ga = coeffs
    out = (X.transpose(0, 3, 2, 1, 4, 5) * al) % p
    if be:
        # delta_kj (ab)[i, r, l, c]
        add = (ab * be) % p
        for k in range(N):
            out[:, k, :, k, :, :] = (out[:, k, :, k, :, :] + add) % p
    if ga:
        Y = X.take(lay.neg, axis=1).take(lay.neg, axis=3)  # [i, k, r, j, l, c] = X[i,-k,r,-j,l,c]
        th = np.outer(lay.t[lay.neg], lay.t)  # theta_{-k, j}
        out = (out + Y * (th[None, :, None, :, None, None] * ga)) % p
    return out


def b2_R_a1(a4, b4, ba, coeffs: RScalars, lay: AuxLayout, p: int) -> np.ndarray:
    """B_2 (alpha + beta P + gamma Q) A_1 mod p at one point."""
    N = lay.N
    X = pair_table(b4, a4, p)  # [k, l, r, i, j, c] = b_kl a_ij
    coeffs = _reduce(coeffs, p)
    if coeffs is None:
        return X.transpose(3, 0, 2, 4, 1, 5).copy()
    al, be, ga = coeffs
    out = (X.transpose(3, 0, 2, 4, 1, 5) * al) % p
    if be:
        # delta_il (ba)[k, r, j, c]
        add = (ba * be) % p
        for i in range(N):
            out[i, :, :, :, i, :] = (out[i, :, :, :, i, :] + add) % p
    if ga:
        # theta_{i,-l} b_{k,-i} a_{-l,j}: X[k, -i, r, -l, j, c]
        Y = X.take(lay.neg, axis=1).take(lay.neg, axis=3)  # [k, i, r, l, j, c]
        Y = Y.transpose(1, 0, 2, 4, 3, 5)  # [i, k, r, j, l, c]
        th = np.outer(lay.t, lay.t[lay.neg])  # theta_{i,-l}
        out = (out + Y * (th[:, None, None, None, :, None] * ga)) % p
    return out


def r_norm(coeffs: RScalars, N: int) -> int:
    """|alpha| + |beta| + N |gamma| bounds the max row sum of alpha I + beta P + gamma Q."""
    if coeffs is None:
        return 1
    al, be, ga = coeffs
    return abs(al) + abs(be) + N * abs(ga)


def primes_for(bound: int) -> List[int]:
    """Enough primes that their product exceeds bound."""
    out, prod = [], 1
    for p in PRIMES:
        if prod > bound:
            break
        out.append(p)
        prod *= p
    if prod <= bound:
        raise OverflowError("bound exceeds the prime table")
    return out


def first_nonzero(D: np.ndarray):
    nz = np.flatnonzero(D.ravel() != 0)
    if nz.size == 0:
        return None
    idx = np.unravel_index(int(nz[0]), D.shape)
    return tuple(int(x) for x in idx), D[idx]
