"""Operator-valued N x N matrices on an auxiliary space tensor a site space.

A block (i, j) is the image of one generator series, an operator on the
d-dimensional site space.  Rows and columns are laid out auxiliary index
outermost: position pos(i)*d + r.

Two storage modes:

* ExactOperator: polynomial numerator sum_m C_m u^m (C_m rational matrices)
  over a scalar denominator polynomial in u.
* TruncatedOperator: sum_{r=0}^{D} C_r u^{-r}.
"""

from __future__ import annotations

from fractions import Fraction
from math import comb
from typing import List, Optional, Sequence, Tuple

import flint
import numpy as np

from .exact import PowerSeries, RationalFunction, expand_at_infinity, rat, to_fmpq, u_

fmpq = flint.fmpq
fmpq_mat = flint.fmpq_mat
fmpq_poly = flint.fmpq_poly


def zero_mat(n: int) -> fmpq_mat:
    return fmpq_mat(n, n)


def identity_mat(n: int) -> fmpq_mat:
    m = fmpq_mat(n, n)
    for i in range(n):
        m[i, i] = 1
    return m


def mat_is_zero(m: fmpq_mat) -> bool:
    return all(x == 0 for x in m.entries())


def to_array(m: fmpq_mat) -> np.ndarray:
    return np.array(m.entries(), dtype=object).reshape(m.nrows(), m.ncols())


def from_array(a: np.ndarray) -> fmpq_mat:
    r, c = a.shape
    return fmpq_mat(r, c, [x for x in a.ravel()])


def kron_mat(a: fmpq_mat, b: fmpq_mat) -> fmpq_mat:
    A, B = to_array(a), to_array(b)
    return from_array(np.kron(A, B))


def poly_from_rf(f) -> Tuple[fmpq_poly, fmpq_poly]:
    """Numerator and denominator of a univariate rational function in u."""
    f = f if isinstance(f, RationalFunction) else RationalFunction(f)
    if "v" in f.variables:
        raise ValueError("univariate required")

    def conv(p):
        terms = p.terms()
        deg = max((e[0] for e in terms), default=0)
        cs = [Fraction(0)] * (deg + 1)
        for (i, _), c in terms.items():
            cs[i] = c
        return fmpq_poly([to_fmpq(c) for c in cs])

    return conv(f.numerator), conv(f.denominator)


def poly_compose_affine(p: fmpq_poly, a, b) -> fmpq_poly:
    return p(fmpq_poly([to_fmpq(b), to_fmpq(a)]))


def _t_aux_array(A: np.ndarray, N: int, d: int, t: Sequence[int]) -> np.ndarray:
    """Block theta-transpose: new block (i, j) = theta_ij * old block (-j, -i)."""
    B = A.reshape(N, d, N, d)
    rev = np.arange(N)[::-1]
    out = B[rev][:, :, rev].transpose(2, 1, 0, 3)
    th = np.outer(np.array(t, dtype=object), np.array(t, dtype=object))
    out = out * th[:, None, :, None]
    return out.reshape(N * d, N * d)


def _aux_trace_array(A: np.ndarray, N: int, d: int) -> np.ndarray:
    B = A.reshape(N, d, N, d)
    return sum(B[i, :, i, :] for i in range(N))


class OperatorSeries:
    """Common shape data: aux dimension N, site dimension d, theta signs t."""

    mode = "abstract"

    def __init__(self, N: int, d: int, t: Sequence[int]):
        self.N = N
        self.d = d
        self.t = tuple(t)

    @property
    def n(self) -> int:
        return self.N * self.d

    def _same_shape(self, other):
        if (self.N, self.d, self.t) != (other.N, other.d, other.t):
            raise ValueError("operator shape mismatch")


class ExactOperator(OperatorSeries):
    """Numerator polynomial matrix over a scalar denominator, both in u."""

    mode = "exact"

    def __init__(self, N, d, t, coeffs: List[fmpq_mat], den: fmpq_poly):
        super().__init__(N, d, t)
        while len(coeffs) > 1 and mat_is_zero(coeffs[-1]):
            coeffs = coeffs[:-1]
        self.coeffs = list(coeffs)
        self.den = den

    @classmethod
    def constant(cls, N, d, t, m: fmpq_mat) -> "ExactOperator":
        return cls(N, d, t, [m], fmpq_poly([1]))

    @classmethod
    def identity(cls, N, d, t) -> "ExactOperator":
        return cls.constant(N, d, t, identity_mat(N * d))

    @classmethod
    def from_polys(cls, N, d, t, entries, den: fmpq_poly) -> "ExactOperator":
        """Build from a dense n x n list of fmpq_poly numerators."""
        n = N * d
        deg = max((p.degree() for row in entries for p in row), default=0)
        deg = max(deg, 0)
        coeffs = []
        for m in range(deg + 1):
            C = fmpq_mat(n, n)
            for r in range(n):
                for c in range(n):
                    p = entries[r][c]
                    if p.degree() >= m:
                        C[r, c] = p[m]
            coeffs.append(C)
        return cls(N, d, t, coeffs, den)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def num_at(self, x) -> fmpq_mat:
        x = to_fmpq(x)
        acc = self.coeffs[-1]
        for C in reversed(self.coeffs[:-1]):
            acc = acc * x + C
        return acc

    def den_at(self, x) -> fmpq:
        return self.den(to_fmpq(x))

    def at(self, x) -> fmpq_mat:
        dv = self.den_at(x)
        if dv == 0:
            raise ZeroDivisionError("evaluation at a pole")
        return self.num_at(x) * (1 / dv)

    # -- algebra ----------------------------------------------------------
    def __matmul__(self, other: "ExactOperator") -> "ExactOperator":
        self._same_shape(other)
        out = [zero_mat(self.n) for _ in range(self.degree + other.degree + 1)]
        for i, A in enumerate(self.coeffs):
            if mat_is_zero(A):
                continue
            for j, B in enumerate(other.coeffs):
                out[i + j] = out[i + j] + A * B
        return ExactOperator(self.N, self.d, self.t, out, self.den * other.den)

    def scale_poly(self, num: fmpq_poly, den: fmpq_poly = None) -> "ExactOperator":
        cs = [to_fmpq(c) for c in num.coeffs()] or [fmpq(0)]
        out = [zero_mat(self.n) for _ in range(self.degree + len(cs))]
        for i, A in enumerate(self.coeffs):
            for j, c in enumerate(cs):
                if c != 0:
                    out[i + j] = out[i + j] + A * c
        d = self.den if den is None else self.den * den
        return ExactOperator(self.N, self.d, self.t, out, d)

    def scale(self, f) -> "ExactOperator":
        """Multiply by a univariate rational function (or rational)."""
        num, den = poly_from_rf(f)
        return self.scale_poly(num, den)

    def _with_den(self, den: fmpq_poly) -> List[fmpq_mat]:
        """Numerator coefficients after rewriting over den (a multiple of self.den)."""
        q, r = divmod(den, self.den)
        if not r.is_zero():
            raise ValueError("not a multiple of the denominator")
        return self.scale_poly(q).coeffs

    def _combine(self, other: "ExactOperator", sgn: int) -> "ExactOperator":
        self._same_shape(other)
        if self.den == other.den:
            a, b, den = self.coeffs, other.coeffs, self.den
        else:
            g = self.den.gcd(other.den)
            den = self.den * (other.den / g)
            den = fmpq_poly([to_fmpq(c) for c in den.coeffs()])
            a, b = self._with_den(den), other._with_den(den)
        out = []
        for m in range(max(len(a), len(b))):
            x = a[m] if m < len(a) else zero_mat(self.n)
            y = b[m] if m < len(b) else zero_mat(self.n)
            out.append(x + y if sgn > 0 else x - y)
        return ExactOperator(self.N, self.d, self.t, out, den)

    def __add__(self, other):
        return self._combine(other, 1)

    def __sub__(self, other):
        return self._combine(other, -1)

    def __neg__(self):
        return ExactOperator(self.N, self.d, self.t, [-C for C in self.coeffs], self.den)

    def compose(self, a, b) -> "ExactOperator":
        """Substitute u -> a*u + b."""
        a, b = to_fmpq(a), to_fmpq(b)
        D = self.degree
        out = []
        for m in range(D + 1):
            acc = zero_mat(self.n)
            for i in range(m, D + 1):
                c = comb(i, m) * a ** m * b ** (i - m)
                if c != 0:
                    acc = acc + self.coeffs[i] * c
            out.append(acc)
        return ExactOperator(self.N, self.d, self.t, out, poly_compose_affine(self.den, a, b))

    def t_aux(self) -> "ExactOperator":
        out = [from_array(_t_aux_array(to_array(C), self.N, self.d, self.t)) for C in self.coeffs]
        return ExactOperator(self.N, self.d, self.t, out, self.den)

    def aux_trace(self) -> "ExactOperator":
        out = [from_array(_aux_trace_array(to_array(C), self.N, self.d)) for C in self.coeffs]
        return ExactOperator(1, self.d, (1,), out, self.den)

    def aux_identity(self, N: int, t) -> "ExactOperator":
        """I_N (x) X for an operator X with N = 1."""
        if self.N != 1:
            raise ValueError("site operator required")
        out = [kron_mat(identity_mat(N), C) for C in self.coeffs]
        return ExactOperator(N, self.d, t, out, self.den)

    # -- comparison -------------------------------------------------------
    def witness_against(self, other: "ExactOperator") -> Optional[str]:
        """None if equal as rational functions, else a description of a differing entry."""
        self._same_shape(other)
        lhs = self.scale_poly(other.den, fmpq_poly([1]))
        rhs = other.scale_poly(self.den, fmpq_poly([1]))
        for m in range(max(len(lhs.coeffs), len(rhs.coeffs))):
            x = lhs.coeffs[m] if m < len(lhs.coeffs) else zero_mat(self.n)
            y = rhs.coeffs[m] if m < len(rhs.coeffs) else zero_mat(self.n)
            if x != y:
                diff = to_array(x - y)
                r, c = [int(z) for z in np.argwhere(diff != 0)[0]]
                return (f"aux ({self.index_name(r // self.d)},{self.index_name(c // self.d)}) "
                        f"site ({r % self.d},{c % self.d}): u^{m} coefficient of the "
                        f"cross-multiplied difference is {diff[r, c]}")
        return None

    def index_name(self, p: int) -> int:
        n = self.N // 2
        if self.N % 2:
            return p - n
        return p - n if p < n else p - n + 1

    def is_zero(self) -> bool:
        return all(mat_is_zero(C) for C in self.coeffs)

    # -- conversion -------------------------------------------------------
    def expand(self, order: int) -> "TruncatedOperator":
        """Expansion at u = infinity (requires deg numerator <= deg denominator)."""
        m = self.den.degree()
        if self.degree > m:
            raise ValueError("not expandable at infinity")
        dcs = [to_fmpq(c) for c in self.den.coeffs()]
        # 1/den = u^{-m} e(u) with e a series in u^{-1}
        b = PowerSeries([rat(dcs[m - k]) if k <= m else 0 for k in range(order + 1)], order)
        e = PowerSeries.one(order) / b
        ecs = [to_fmpq(c) for c in e.coefficients]
        out = []
        for r in range(order + 1):
            acc = zero_mat(self.n)
            for i, C in enumerate(self.coeffs):
                k = r - (m - i)
                if 0 <= k <= order and ecs[k] != 0:
                    acc = acc + C * ecs[k]
            out.append(acc)
        return TruncatedOperator(self.N, self.d, self.t, out)

    def integer_numerator(self) -> List[flint.fmpz_mat]:
        """Numerator coefficients scaled by one positive integer into Z."""
        dens = [C.numer_denom()[1] for C in self.coeffs]
        L = flint.fmpz(1)
        for x in dens:
            L = L * x // L.gcd(x)
        out = []
        for C in self.coeffs:
            num, den = C.numer_denom()
            out.append(num * (L // den))
        return out

    def block_rf(self, i: int, j: int) -> List[List[RationalFunction]]:
        """Block (i, j) (positions) as d x d rational functions in u."""
        from .exact import Polynomial, poly_in_u
        dn = poly_in_u([rat(c) for c in self.den.coeffs()])
        arrs = [to_array(C) for C in self.coeffs]
        out = []
        for r in range(self.d):
            row = []
            for c in range(self.d):
                R, Cc = i * self.d + r, j * self.d + c
                num = poly_in_u([rat(A[R, Cc]) for A in arrs])
                row.append(RationalFunction(num, dn))
            out.append(row)
        return out


class TruncatedOperator(OperatorSeries):
    """sum_{r=0}^{D} C_r u^{-r} with rational matrix coefficients."""

    mode = "series"

    def __init__(self, N, d, t, coeffs: List[fmpq_mat]):
        super().__init__(N, d, t)
        self.coeffs = list(coeffs)

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    @classmethod
    def identity(cls, N, d, t, order) -> "TruncatedOperator":
        return cls(N, d, t, [identity_mat(N * d)] + [zero_mat(N * d) for _ in range(order)])

    @classmethod
    def scalar(cls, N, d, t, s: PowerSeries) -> "TruncatedOperator":
        I = identity_mat(N * d)
        return cls(N, d, t, [I * to_fmpq(c) for c in s.coefficients])

    def __matmul__(self, other: "TruncatedOperator") -> "TruncatedOperator":
        self._same_shape(other)
        D = min(self.order, other.order)
        out = [zero_mat(self.n) for _ in range(D + 1)]
        for i in range(D + 1):
            A = self.coeffs[i]
            if mat_is_zero(A):
                continue
            for j in range(D + 1 - i):
                out[i + j] = out[i + j] + A * other.coeffs[j]
        return TruncatedOperator(self.N, self.d, self.t, out)

    def __add__(self, other):
        self._same_shape(other)
        D = min(self.order, other.order)
        return TruncatedOperator(self.N, self.d, self.t, [self.coeffs[r] + other.coeffs[r] for r in range(D + 1)])

    def __neg__(self):
        return TruncatedOperator(self.N, self.d, self.t, [-C for C in self.coeffs])

    def __sub__(self, other):
        return self + (-other)

    def scale(self, s) -> "TruncatedOperator":
        """Multiply by a PowerSeries or a rational constant."""
        if not isinstance(s, PowerSeries):
            c = to_fmpq(s)
            return TruncatedOperator(self.N, self.d, self.t, [C * c for C in self.coeffs])
        D = min(self.order, s.order)
        cs = [to_fmpq(c) for c in s.coefficients]
        out = [zero_mat(self.n) for _ in range(D + 1)]
        for i in range(D + 1):
            if cs[i] == 0:
                continue
            for j in range(D + 1 - i):
                out[i + j] = out[i + j] + self.coeffs[j] * cs[i]
        return TruncatedOperator(self.N, self.d, self.t, out)

    def substitute(self, scale: int, shift) -> "TruncatedOperator":
        """Re-expand X(scale*u + shift), scale = +-1."""
        b = to_fmpq(shift)
        D = self.order
        out = [zero_mat(self.n) for _ in range(D + 1)]
        out[0] = self.coeffs[0]
        sb = scale * b
        for r in range(1, D + 1):
            C = self.coeffs[r]
            if mat_is_zero(C):
                continue
            lead = scale ** r
            for t in range(D - r + 1):
                c = lead * (-1) ** t * comb(r + t - 1, t) * sb ** t
                if c != 0:
                    out[r + t] = out[r + t] + C * c
        return TruncatedOperator(self.N, self.d, self.t, out)

    def inverse(self) -> "TruncatedOperator":
        A0inv = self.coeffs[0].inv()
        D = self.order
        out = [A0inv]
        for m in range(1, D + 1):
            acc = zero_mat(self.n)
            for k in range(1, m + 1):
                if not mat_is_zero(self.coeffs[k]):
                    acc = acc + self.coeffs[k] * out[m - k]
            out.append(-(A0inv * acc))
        return TruncatedOperator(self.N, self.d, self.t, out)

    def t_aux(self) -> "TruncatedOperator":
        return TruncatedOperator(self.N, self.d, self.t,
                                 [from_array(_t_aux_array(to_array(C), self.N, self.d, self.t)) for C in self.coeffs])

    def aux_trace(self) -> "TruncatedOperator":
        return TruncatedOperator(1, self.d, (1,), [from_array(_aux_trace_array(to_array(C), self.N, self.d))
                                                  for C in self.coeffs])

    def scalar_part(self) -> Tuple[Optional[PowerSeries], Optional[str]]:
        """(s, None) if every coefficient is s_r * I, else (None, witness)."""
        vals = []
        for r, C in enumerate(self.coeffs):
            lam = C[0, 0]
            if C != identity_mat(self.n) * lam:
                A = to_array(C - identity_mat(self.n) * lam)
                i, j = [int(z) for z in np.argwhere(A != 0)[0]]
                return None, f"u^-{r} coefficient not scalar at ({i},{j}): {C[i, j]} vs {lam if i == j else 0}"
            vals.append(rat(lam))
        return PowerSeries(vals, self.order), None

    def witness_against(self, other: "TruncatedOperator") -> Optional[str]:
        self._same_shape(other)
        for r in range(min(self.order, other.order) + 1):
            if self.coeffs[r] != other.coeffs[r]:
                A = to_array(self.coeffs[r] - other.coeffs[r])
                i, j = [int(z) for z in np.argwhere(A != 0)[0]]
                return f"u^-{r} coefficient differs at ({i},{j}) by {A[i, j]}"
        return None

    def entry(self, i: int, j: int) -> PowerSeries:
        """Scalar entry (positions) when d = 1."""
        return PowerSeries([rat(C[i, j]) for C in self.coeffs], self.order)

    def block(self, i: int, j: int) -> "TruncatedOperator":
        d = self.d
        out = []
        for C in self.coeffs:
            A = to_array(C)[i * d:(i + 1) * d, j * d:(j + 1) * d]
            out.append(from_array(A))
        return TruncatedOperator(1, d, (1,), out)
