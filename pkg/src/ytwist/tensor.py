"""Exact matrices on C^N, C^N (x) C^N and triple tensor spaces.

Signed indices run over -n..-1, 1..n (N = 2n) or -n..n (N = 2n+1) and are
stored at positions in ascending order.  A tensor index (i, k) sits at
pos(i)*N + pos(k).  Matrices are sparse and keep their entries as
polynomials over one common scalar denominator, which keeps products cheap
and makes equality a coefficient comparison.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import product
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import flint

from .exact import (Polynomial, RationalFunction, _CTX, _as_rf, _coerce, rat, to_fmpq)
from .report import CheckReport, timed

ORTHOGONAL = "orthogonal"
SYMPLECTIC = "symplectic"
FAMILIES = (ORTHOGONAL, SYMPLECTIC)

_ONE = _CTX.from_dict({(0, 0): 1})
_ZERO = _CTX.from_dict({})


def check_family(family: str, N: int) -> None:
    if family not in FAMILIES:
        raise ValueError(f"unknown family {family!r}")
    if N < 2:
        raise ValueError("invalid dimension")
    if family == SYMPLECTIC and N % 2:
        raise ValueError("invalid pair")


def signed_indices(N: int) -> List[int]:
    n = N // 2
    if N % 2:
        return list(range(-n, n + 1))
    return list(range(-n, 0)) + list(range(1, n + 1))


def pos(N: int, i: int) -> int:
    n = N // 2
    if N % 2:
        if not -n <= i <= n:
            raise IndexError(f"index {i} out of range for N={N}")
        return i + n
    if i == 0 or not -n <= i <= n:
        raise IndexError(f"index {i} out of range for N={N}")
    return i + n if i < 0 else i + n - 1


def sign(i: int) -> int:
    return 1 if i >= 0 else -1


def theta(family: str, i: int, j: int) -> int:
    if family == ORTHOGONAL:
        return 1
    return sign(i) * sign(j)


def default_kappa(family: str, N: int) -> Fraction:
    """kappa = N/2 - 1 (orthogonal) or N/2 + 1 (symplectic)."""
    return Fraction(N, 2) - 1 if family == ORTHOGONAL else Fraction(N, 2) + 1


class TensorMatrix:
    """Square matrix on (C^N)^{(x) legs}: sparse polynomial rows over a scalar denominator."""

    __slots__ = ("N", "legs", "rows", "den")

    def __init__(self, N: int, legs: int, rows: Dict[int, Dict[int, flint.fmpq_mpoly]],
                 den: flint.fmpq_mpoly = _ONE):
        self.N = N
        self.legs = legs
        self.rows = rows
        self.den = den

    @property
    def size(self) -> int:
        return self.N ** self.legs

    # -- construction -------------------------------------------------
    @classmethod
    def zero(cls, N: int, legs: int = 1) -> "TensorMatrix":
        return cls(N, legs, {})

    @classmethod
    def identity(cls, N: int, legs: int = 1) -> "TensorMatrix":
        return cls(N, legs, {r: {r: _ONE} for r in range(N ** legs)})

    @classmethod
    def from_entries(cls, N: int, legs: int, entries: Dict[Tuple[int, int], object]) -> "TensorMatrix":
        """Build from {(row_pos, col_pos): scalar}, scalars rational or rational functions."""
        rfs = {k: _as_rf(v) for k, v in entries.items()}
        den = _ONE
        for f in rfs.values():
            d = f.denominator.raw
            if not d.is_one():
                den = den * d / den.gcd(d)
        rows: Dict[int, Dict[int, flint.fmpq_mpoly]] = {}
        for (r, c), f in rfs.items():
            if f.is_zero():
                continue
            rows.setdefault(r, {})[c] = f.numerator.raw * (den / f.denominator.raw)
        return cls(N, legs, rows, den)

    @classmethod
    def from_dense(cls, N: int, legs: int, dense: Sequence[Sequence[object]]) -> "TensorMatrix":
        return cls.from_entries(N, legs, {(r, c): x for r, row in enumerate(dense)
                                          for c, x in enumerate(row) if x != 0})

    @classmethod
    def unit(cls, N: int, i: int, j: int) -> "TensorMatrix":
        """The matrix unit E_ij on C^N (signed indices)."""
        return cls(N, 1, {pos(N, i): {pos(N, j): _ONE}})

    # -- access ---------------------------------------------------------
    def entry(self, r: int, c: int) -> RationalFunction:
        p = self.rows.get(r, {}).get(c)
        if p is None:
            return RationalFunction(0)
        return RationalFunction(Polynomial(p), Polynomial(self.den))

    def __getitem__(self, rc) -> RationalFunction:
        return self.entry(*rc)

    def at(self, *idx: int) -> RationalFunction:
        """Entry by signed indices: at(i, j) on C^N, at(i, k, j, l) for E_ij (x) E_kl."""
        L = self.legs
        if len(idx) != 2 * L:
            raise ValueError("wrong number of indices")
        r = c = 0
        for t in range(L):
            r = r * self.N + pos(self.N, idx[t])
            c = c * self.N + pos(self.N, idx[L + t])
        return self.entry(r, c)

    def items(self):
        for r, row in self.rows.items():
            for c, p in row.items():
                yield r, c, p

    def to_dense(self) -> List[List[RationalFunction]]:
        n = self.size
        return [[self.entry(r, c) for c in range(n)] for r in range(n)]

    def is_constant(self) -> bool:
        return self.den.is_constant() and all(p.is_constant() for _, _, p in self.items())

    # -- arithmetic -------------------------------------------------------
    def _check(self, other: "TensorMatrix"):
        if self.N != other.N or self.legs != other.legs:
            raise ValueError("shape mismatch")

    def __matmul__(self, other: "TensorMatrix") -> "TensorMatrix":
        self._check(other)
        brows = other.rows
        out = {}
        for r, arow in self.rows.items():
            acc: Dict[int, flint.fmpq_mpoly] = {}
            for k, a in arow.items():
                brow = brows.get(k)
                if not brow:
                    continue
                for c, b in brow.items():
                    t = a * b
                    if c in acc:
                        acc[c] = acc[c] + t
                    else:
                        acc[c] = t
            acc = {c: p for c, p in acc.items() if not p.is_zero()}
            if acc:
                out[r] = acc
        return TensorMatrix(self.N, self.legs, out, self.den * other.den)

    def _combine(self, other: "TensorMatrix", sgn: int) -> "TensorMatrix":
        self._check(other)
        if self.den == other.den:
            den, fa, fb = self.den, _ONE, _ONE
        else:
            g = self.den.gcd(other.den)
            fa, fb = other.den / g, self.den / g
            den = self.den * fa
        out = {}
        keys = set(self.rows) | set(other.rows)
        for r in keys:
            ra, rb = self.rows.get(r, {}), other.rows.get(r, {})
            acc = {}
            for c in set(ra) | set(rb):
                p = _ZERO
                if c in ra:
                    p = ra[c] * fa
                if c in rb:
                    p = p + rb[c] * fb if sgn > 0 else p - rb[c] * fb
                if not p.is_zero():
                    acc[c] = p
            if acc:
                out[r] = acc
        return TensorMatrix(self.N, self.legs, out, den)

    def __add__(self, other):
        return self._combine(other, 1)

    def __sub__(self, other):
        return self._combine(other, -1)

    def __neg__(self):
        return TensorMatrix(self.N, self.legs,
                            {r: {c: -p for c, p in row.items()} for r, row in self.rows.items()}, self.den)

    def scale(self, s) -> "TensorMatrix":
        f = _as_rf(_coerce(s))
        if f.is_zero():
            return TensorMatrix.zero(self.N, self.legs)
        n = f.numerator.raw
        return TensorMatrix(self.N, self.legs,
                            {r: {c: p * n for c, p in row.items()} for r, row in self.rows.items()},
                            self.den * f.denominator.raw)

    def __mul__(self, s):
        return self.scale(s)

    __rmul__ = __mul__

    def map_entries(self, fn) -> "TensorMatrix":
        """Apply a ring map to numerators and the denominator (e.g. a substitution)."""
        rows = {}
        for r, row in self.rows.items():
            acc = {c: fn(p) for c, p in row.items()}
            acc = {c: p for c, p in acc.items() if not p.is_zero()}
            if acc:
                rows[r] = acc
        return TensorMatrix(self.N, self.legs, rows, fn(self.den))

    def substitute(self, u=None, v=None) -> "TensorMatrix":
        """Substitute polynomials (e.g. linear expressions) for u and/or v."""
        uu = _coerce(u).raw if u is not None else _CTX.from_dict({(1, 0): 1})
        vv = _coerce(v).raw if v is not None else _CTX.from_dict({(0, 1): 1})
        return self.map_entries(lambda p: p.compose(uu, vv))

    def trace(self) -> RationalFunction:
        t = _ZERO
        for r, row in self.rows.items():
            if r in row:
                t = t + row[r]
        return RationalFunction(Polynomial(t), Polynomial(self.den))

    # -- comparison -------------------------------------------------------
    def first_difference(self, other: "TensorMatrix") -> Optional[Tuple[int, int, RationalFunction]]:
        """First (row, col, difference) where the matrices differ, or None."""
        self._check(other)
        da, db = self.den, other.den
        for r in sorted(set(self.rows) | set(other.rows)):
            ra, rb = self.rows.get(r, {}), other.rows.get(r, {})
            for c in sorted(set(ra) | set(rb)):
                a = ra.get(c, _ZERO)
                b = rb.get(c, _ZERO)
                if da == db:
                    equal = a == b
                else:
                    equal = a * db == b * da
                if not equal:
                    return r, c, self.entry(r, c) - other.entry(r, c)
        return None

    def __eq__(self, other):
        if not isinstance(other, TensorMatrix):
            return NotImplemented
        return self.N == other.N and self.legs == other.legs and self.first_difference(other) is None

    def is_zero(self) -> bool:
        return not any(self.rows.values())

    def describe_position(self, r: int, c: int) -> str:
        idx = signed_indices(self.N)

        def split(x):
            out = []
            for _ in range(self.legs):
                out.append(idx[x % self.N])
                x //= self.N
            return tuple(reversed(out))

        return f"row {split(r)}, col {split(c)}"

    def witness_against(self, other: "TensorMatrix") -> Optional[str]:
        d = self.first_difference(other)
        if d is None:
            return None
        r, c, f = d
        return f"{self.describe_position(r, c)}: difference {f}"

    def __repr__(self):
        return f"TensorMatrix(N={self.N}, legs={self.legs}, nnz={sum(len(r) for r in self.rows.values())})"


MatrixN = TensorMatrix
Matrix2 = TensorMatrix
Matrix3 = TensorMatrix


def kron(A: TensorMatrix, B: TensorMatrix) -> TensorMatrix:
    if A.N != B.N:
        raise ValueError("shape mismatch")
    sb = B.size
    rows = {}
    for ra, arow in A.rows.items():
        for rb, brow in B.rows.items():
            rows[ra * sb + rb] = {ca * sb + cb: a * b for ca, a in arow.items() for cb, b in brow.items()}
    return TensorMatrix(A.N, A.legs + B.legs, rows, A.den * B.den)


def build_P(N: int) -> TensorMatrix:
    if N < 2:
        raise ValueError("invalid dimension")
    rows = {}
    for a in range(N):
        for b in range(N):
            rows[a * N + b] = {b * N + a: _ONE}
    return TensorMatrix(N, 2, rows)


def build_Q(family: str, N: int) -> TensorMatrix:
    check_family(family, N)
    idx = signed_indices(N)
    rows: Dict[int, Dict[int, flint.fmpq_mpoly]] = {}
    for i in idx:
        r = pos(N, i) * N + pos(N, -i)
        rows[r] = {pos(N, j) * N + pos(N, -j): _ONE if theta(family, i, j) > 0 else -_ONE for j in idx}
    return TensorMatrix(N, 2, rows)


def _lin(arg) -> flint.fmpq_mpoly:
    return _coerce(arg).raw if not isinstance(arg, Polynomial) else arg.raw


def build_R(family: str, N: int, arg, kappa=None) -> TensorMatrix:
    """R(x) = I - P/x + Q/(x - kappa) at a polynomial argument x."""
    check_family(family, N)
    k = default_kappa(family, N) if kappa is None else rat(kappa)
    x = _lin(arg)
    xk = x - to_fmpq(k)
    n2 = N * N
    I = TensorMatrix.identity(N, 2)
    num = I.scale(Polynomial(x * xk)) - build_P(N).scale(Polynomial(xk)) + build_Q(family, N).scale(Polynomial(x))
    return TensorMatrix(N, 2, num.rows, x * xk)


def theta_transpose(M: TensorMatrix, leg: int = 0, family: str = ORTHOGONAL) -> TensorMatrix:
    """(E_ij)^t = theta_ij E_{-j,-i} applied on one tensor factor (leg 0 for C^N, 1/2 for pairs)."""
    N, L = M.N, M.legs
    if L == 1:
        if leg != 0:
            raise ValueError("leg out of range")
        slot = 0
    else:
        if not 1 <= leg <= L:
            raise ValueError("leg out of range")
        slot = leg - 1
    idx = signed_indices(N)
    stride = N ** (L - 1 - slot)
    rows: Dict[int, Dict[int, flint.fmpq_mpoly]] = {}
    for r, row in M.rows.items():
        pi = (r // stride) % N
        for c, p in row.items():
            pj = (c // stride) % N
            i, j = idx[pi], idx[pj]
            s = theta(family, i, j)
            nr = r + (pos(N, -j) - pi) * stride
            nc = c + (pos(N, -i) - pj) * stride
            rows.setdefault(nr, {})[nc] = p if s > 0 else -p
    return TensorMatrix(N, L, rows, M.den)


def embed(M: TensorMatrix, legs: Tuple[int, int], total: int = 3) -> TensorMatrix:
    """Act with a two-leg matrix on factors (a, b) of a total-leg space."""
    a, b = legs
    if M.legs != 2 or not (0 <= a < b < total):
        raise ValueError("bad embedding")
    N = M.N
    rest = [t for t in range(total) if t not in (a, b)]
    rows: Dict[int, Dict[int, flint.fmpq_mpoly]] = {}
    for restvals in product(range(N), repeat=len(rest)):
        for r, row in M.rows.items():
            ra, rb = divmod(r, N)
            digs = [0] * total
            for t, val in zip(rest, restvals):
                digs[t] = val
            digs[a], digs[b] = ra, rb
            R = _pack(digs, N)
            out = rows.setdefault(R, {})
            for c, p in row.items():
                ca, cb = divmod(c, N)
                digs[a], digs[b] = ca, cb
                out[_pack(digs, N)] = p
    return TensorMatrix(N, total, rows, M.den)


def _pack(digs, N):
    x = 0
    for d in digs:
        x = x * N + d
    return x


def xi_vector(family: str, N: int) -> List[Fraction]:
    """xi = sum_k theta_{k1} e_{-k} (x) e_k as a length N^2 vector."""
    check_family(family, N)
    vec = [Fraction(0)] * (N * N)
    for k in signed_indices(N):
        vec[pos(N, -k) * N + pos(N, k)] = Fraction(theta(family, k, 1))
    return vec


def apply(M: TensorMatrix, vec: Sequence) -> List[RationalFunction]:
    out = []
    for r in range(M.size):
        row = M.rows.get(r, {})
        acc = _ZERO
        for c, p in row.items():
            if vec[c]:
                acc = acc + p * to_fmpq(vec[c])
        out.append(RationalFunction(Polynomial(acc), Polynomial(M.den)))
    return out


def basis_vector(N: int, *idx: int) -> List[Fraction]:
    vec = [Fraction(0)] * (N ** len(idx))
    r = 0
    for i in idx:
        r = r * N + pos(N, i)
    vec[r] = Fraction(1)
    return vec


U = Polynomial.var("u")
V = Polynomial.var("v")


def check_qybe(family: str, N: int, kappa=None) -> CheckReport:
    """R12(u) R13(u+v) R23(v) = R23(v) R13(u+v) R12(u) as exact matrices."""
    def run():
        Ru = build_R(family, N, U, kappa)
        Ruv = build_R(family, N, U + V, kappa)
        Rv = build_R(family, N, V, kappa)
        R12, R13, R23 = embed(Ru, (0, 1)), embed(Ruv, (0, 2)), embed(Rv, (1, 2))
        lhs = R12 @ R13 @ R23
        rhs = R23 @ R13 @ R12
        return lhs.witness_against(rhs)

    params = {"family": family, "N": N}
    if kappa is not None:
        params["kappa"] = str(rat(kappa))
    return timed("qybe", run, params)


def check_r_identities(family: str, N: int) -> List[CheckReport]:
    """P^2 = I, Q^2 = NQ, PQ = QP = +-Q, R(u)R(-u) = (1-u^-2)I, R^{t1t2} = R, R^{t1}(u) = R(kappa-u)."""
    kap = default_kappa(family, N)
    eps = 1 if family == ORTHOGONAL else -1
    P, Q = build_P(N), build_Q(family, N)
    I = TensorMatrix.identity(N, 2)
    params = {"family": family, "N": N}
    out = [
        timed("p-squared", lambda: (P @ P).witness_against(I), params),
        timed("q-squared", lambda: (Q @ Q).witness_against(Q.scale(N)), params),
        timed("pq", lambda: (P @ Q).witness_against(Q.scale(eps)), params),
        timed("qp", lambda: (Q @ P).witness_against(Q.scale(eps)), params),
        timed("q-is-p-t1", lambda: theta_transpose(P, 1, family).witness_against(Q), params),
        timed("q-is-p-t2", lambda: theta_transpose(P, 2, family).witness_against(Q), params),
    ]

    def unitarity():
        lhs = build_R(family, N, U) @ build_R(family, N, -U)
        return lhs.witness_against(I.scale(1 - 1 / (U * U)))

    def tt():
        R = build_R(family, N, U)
        return theta_transpose(theta_transpose(R, 1, family), 2, family).witness_against(R)

    def crossing():
        R = build_R(family, N, U)
        return theta_transpose(R, 1, family).witness_against(build_R(family, N, kap - U))

    out.append(timed("r-unitarity", unitarity, params))
    out.append(timed("r-t1t2", tt, params))
    out.append(timed("r-crossing", crossing, params))
    return out


def check_t31(family: str, N: int) -> List[CheckReport]:
    """Q-contractions of R-matrix pairs on the triple space (spectral parameters u, v on legs 0, 1).

    Q_12 R_01(u+v) R_02(u+v-k) = R_02(u+v-k) R_01(u+v) Q_12 = (1 - (u+v-k)^-2) Q_12
    Q_12 R_02(u+k-v) R_01(u-v) = R_01(u-v) R_02(u+k-v) Q_12 = (1 - (u-v)^-2) Q_12
    """
    kap = default_kappa(family, N)
    Q12 = embed(build_Q(family, N), (1, 2))
    params = {"family": family, "N": N}

    def case(A, B, x):
        def run():
            target = Q12.scale(1 - 1 / (x * x))
            return ((Q12 @ A @ B).witness_against(target)
                    or (B @ A @ Q12).witness_against(target))
        return run

    R01p = embed(build_R(family, N, U + V), (0, 1))
    R02 = embed(build_R(family, N, U + V - kap), (0, 2))
    R02p = embed(build_R(family, N, U + kap - V), (0, 2))
    R01 = embed(build_R(family, N, U - V), (0, 1))
    return [timed("t31-first", case(R01p, R02, U + V - kap), params),
            timed("t31-second", case(R02p, R01, U - V), params)]
