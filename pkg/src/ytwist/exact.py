"""Exact scalars: rationals, polynomials and rational functions in u, v,
and truncated power series in u^{-1}.

Polynomials are backed by FLINT multivariate polynomials over Q in the
variables (u, v) with lexicographic order u > v.  Rational functions are
kept reduced with a monic denominator, so equality is coefficient equality.
"""

from __future__ import annotations

from fractions import Fraction
from math import comb
from typing import Iterable, Mapping, Sequence, Union

import flint

Rational = Fraction

DEFAULT_ORDER = 10

_CTX = flint.fmpq_mpoly_ctx.get(("u", "v"), "lex")
_VARS = ("u", "v")

Scalar = Union[int, Fraction, "Polynomial", "RationalFunction"]


def rat(x) -> Fraction:
    """Coerce an int, Fraction, fmpq or 'p/q' string to a Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, flint.fmpq):
        return Fraction(int(x.p), int(x.q))
    if isinstance(x, flint.fmpz):
        return Fraction(int(x))
    if isinstance(x, str):
        return Fraction(x.strip())
    raise TypeError(f"cannot interpret {x!r} as a rational")


def to_fmpq(x) -> flint.fmpq:
    x = rat(x)
    return flint.fmpq(x.numerator, x.denominator)


class Polynomial:
    """Polynomial in u, v with rational coefficients."""

    __slots__ = ("_p",)

    def __init__(self, p=0):
        if isinstance(p, Polynomial):
            p = p._p
        elif not isinstance(p, flint.fmpq_mpoly):
            p = _CTX.from_dict({(0, 0): to_fmpq(p)}) if p != 0 else _CTX.from_dict({})
        self._p = p

    @classmethod
    def var(cls, name: str) -> "Polynomial":
        exps = (1, 0) if name == "u" else (0, 1) if name == "v" else None
        if exps is None:
            raise ValueError(f"unknown variable {name!r}")
        return cls(_CTX.from_dict({exps: 1}))

    @classmethod
    def from_terms(cls, terms: Mapping[tuple, object]) -> "Polynomial":
        return cls(_CTX.from_dict({tuple(e): to_fmpq(c) for e, c in terms.items() if c != 0}))

    @property
    def raw(self) -> flint.fmpq_mpoly:
        return self._p

    def terms(self) -> dict:
        return {e: rat(c) for e, c in self._p.terms()}

    @property
    def variables(self) -> tuple:
        degs = self._p.degrees()
        return tuple(name for name, d in zip(_VARS, degs) if d > 0)

    def degree(self, var: str = "u") -> int:
        if self._p.is_zero():
            return -1
        return self._p.degrees()[_VARS.index(var)]

    def is_zero(self) -> bool:
        return self._p.is_zero()

    def leading_coefficient(self) -> Fraction:
        return rat(self._p.leading_coefficient())

    def evaluate(self, u=0, v=0) -> Fraction:
        return rat(self._p(to_fmpq(u), to_fmpq(v)))

    def compose(self, u: "Polynomial", v: "Polynomial | None" = None) -> "Polynomial":
        """Substitute polynomials for u and v."""
        v = Polynomial.var("v") if v is None else v
        return Polynomial(self._p.compose(_poly(u)._p, _poly(v)._p))

    def __add__(self, other):
        other = _coerce(other)
        if isinstance(other, RationalFunction):
            return RationalFunction(self) + other
        return Polynomial(self._p + other._p)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(-self._p)

    def __sub__(self, other):
        return self + (-_coerce(other))

    def __rsub__(self, other):
        return _coerce(other) + (-self)

    def __mul__(self, other):
        other = _coerce(other)
        if isinstance(other, RationalFunction):
            return RationalFunction(self) * other
        return Polynomial(self._p * other._p)

    __rmul__ = __mul__

    def __truediv__(self, other):
        return RationalFunction(self) / other

    def __rtruediv__(self, other):
        return RationalFunction(_coerce(other)) / self

    def __pow__(self, n: int):
        return Polynomial(self._p ** n)

    def __eq__(self, other):
        try:
            other = _coerce(other)
        except TypeError:
            return NotImplemented
        if isinstance(other, RationalFunction):
            return RationalFunction(self) == other
        return self._p == other._p

    def __hash__(self):
        return hash(tuple(sorted(self.terms().items())))

    def __repr__(self):
        return f"Polynomial({self._p.str()})"

    def __str__(self):
        return self._p.str()


def _coerce(x):
    if isinstance(x, (Polynomial, RationalFunction)):
        return x
    if isinstance(x, (int, Fraction, flint.fmpq, flint.fmpz)):
        return Polynomial(x)
    raise TypeError(f"unsupported scalar {x!r}")


def _poly(x) -> Polynomial:
    x = _coerce(x)
    if isinstance(x, RationalFunction):
        if x.denominator != 1:
            raise ValueError("polynomial required")
        return x.numerator
    return x


class RationalFunction:
    """Reduced fraction num/den with den monic in lex order u > v."""

    __slots__ = ("_n", "_d")

    def __init__(self, numerator=0, denominator=1, _reduced: bool = False):
        n = _coerce(numerator)
        d = _coerce(denominator)
        if isinstance(n, RationalFunction) or isinstance(d, RationalFunction):
            q = (n if isinstance(n, RationalFunction) else RationalFunction(n)) / d
            self._n, self._d = q._n, q._d
            return
        n, d = n._p, d._p
        if d.is_zero():
            raise ZeroDivisionError("zero denominator")
        if not _reduced:
            if n.is_zero():
                d = _CTX.from_dict({(0, 0): 1})
            else:
                g = n.gcd(d)
                if not g.is_one():
                    n = n / g
                    d = d / g
            lc = d.leading_coefficient()
            if lc != 1:
                n = n / lc
                d = d / lc
        self._n = n
        self._d = d

    @property
    def numerator(self) -> Polynomial:
        return Polynomial(self._n)

    @property
    def denominator(self) -> Polynomial:
        return Polynomial(self._d)

    @property
    def variables(self) -> tuple:
        seen = set(self.numerator.variables) | set(self.denominator.variables)
        return tuple(v for v in _VARS if v in seen)

    def is_zero(self) -> bool:
        return self._n.is_zero()

    def evaluate(self, u=0, v=0) -> Fraction:
        den = rat(self._d(to_fmpq(u), to_fmpq(v)))
        if den == 0:
            raise ZeroDivisionError("evaluation at a pole")
        return rat(self._n(to_fmpq(u), to_fmpq(v))) / den

    def compose(self, u: Polynomial, v: "Polynomial | None" = None) -> "RationalFunction":
        return RationalFunction(self.numerator.compose(u, v), self.denominator.compose(u, v))

    def __add__(self, other):
        o = _as_rf(other)
        if self._d == o._d:
            return RationalFunction(Polynomial(self._n + o._n), Polynomial(self._d))
        return RationalFunction(Polynomial(self._n * o._d + o._n * self._d),
                                Polynomial(self._d * o._d))

    __radd__ = __add__

    def __neg__(self):
        return RationalFunction(Polynomial(-self._n), Polynomial(self._d), _reduced=True)

    def __sub__(self, other):
        return self + (-_as_rf(other))

    def __rsub__(self, other):
        return _as_rf(other) - self

    def __mul__(self, other):
        o = _as_rf(other)
        return RationalFunction(Polynomial(self._n * o._n), Polynomial(self._d * o._d))

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = _as_rf(other)
        if o.is_zero():
            raise ZeroDivisionError("division by zero rational function")
        return RationalFunction(Polynomial(self._n * o._d), Polynomial(self._d * o._n))

    def __rtruediv__(self, other):
        return _as_rf(other) / self

    def __pow__(self, k: int):
        if k < 0:
            return RationalFunction(1) / (self ** (-k))
        return RationalFunction(Polynomial(self._n ** k), Polynomial(self._d ** k), _reduced=True)

    def __eq__(self, other):
        try:
            o = _as_rf(other)
        except TypeError:
            return NotImplemented
        return self._n == o._n and self._d == o._d

    def __hash__(self):
        return hash((self.numerator, self.denominator))

    def __repr__(self):
        return f"RationalFunction(({self._n.str()})/({self._d.str()}))"

    def __str__(self):
        if self._d.is_one():
            return self._n.str()
        return f"({self._n.str()})/({self._d.str()})"


def _as_rf(x) -> RationalFunction:
    x = _coerce(x)
    if isinstance(x, RationalFunction):
        return x
    return RationalFunction(x, 1, _reduced=True)


u_ = Polynomial.var("u")
v_ = Polynomial.var("v")


class PowerSeries:
    """Truncated series sum_{r=0}^{D} c_r u^{-r} with rational coefficients."""

    __slots__ = ("order", "coefficients")

    def __init__(self, coefficients: Iterable, order: "int | None" = None):
        cs = [rat(c) for c in coefficients]
        if order is None:
            order = max(len(cs) - 1, 0)
        if len(cs) < order + 1:
            cs = cs + [Fraction(0)] * (order + 1 - len(cs))
        self.order = order
        self.coefficients = tuple(cs[: order + 1])

    @classmethod
    def one(cls, order: int = DEFAULT_ORDER) -> "PowerSeries":
        return cls([1], order)

    @classmethod
    def zero(cls, order: int = DEFAULT_ORDER) -> "PowerSeries":
        return cls([], order)

    def __getitem__(self, r: int) -> Fraction:
        return self.coefficients[r]

    def __len__(self):
        return len(self.coefficients)

    def truncate(self, order: int) -> "PowerSeries":
        return PowerSeries(self.coefficients[: order + 1], min(order, self.order))

    def _aligned(self, other):
        if isinstance(other, PowerSeries):
            d = min(self.order, other.order)
            return d, self.coefficients[: d + 1], other.coefficients[: d + 1]
        c = rat(other)
        return self.order, self.coefficients, (c,) + (Fraction(0),) * self.order

    def __add__(self, other):
        d, a, b = self._aligned(other)
        return PowerSeries([x + y for x, y in zip(a, b)], d)

    __radd__ = __add__

    def __neg__(self):
        return PowerSeries([-c for c in self.coefficients], self.order)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, PowerSeries):
            c = rat(other)
            return PowerSeries([c * x for x in self.coefficients], self.order)
        d, a, b = self._aligned(other)
        out = [Fraction(0)] * (d + 1)
        for i, x in enumerate(a):
            if x:
                for j in range(d + 1 - i):
                    if b[j]:
                        out[i + j] += x * b[j]
        return PowerSeries(out, d)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, PowerSeries):
            return self * series_invert(other)
        return self * (1 / rat(other))

    def __pow__(self, k: int):
        if k < 0:
            return series_invert(self) ** (-k)
        out = PowerSeries.one(self.order)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        if isinstance(other, PowerSeries):
            d, a, b = self._aligned(other)
            return a == b
        try:
            d, a, b = self._aligned(other)
        except TypeError:
            return NotImplemented
        return a == b

    def __hash__(self):
        return hash(self.coefficients)

    def is_even(self) -> bool:
        return all(c == 0 for c in self.coefficients[1::2])

    def __repr__(self):
        return f"PowerSeries({[str(c) for c in self.coefficients]}, order={self.order})"

    def __str__(self):
        parts = []
        for r, c in enumerate(self.coefficients):
            if c:
                parts.append(f"{c}" if r == 0 else f"{c}*u^-{r}")
        return " + ".join(parts) if parts else "0"


def expand_at_infinity(f, order: int = DEFAULT_ORDER) -> PowerSeries:
    """Expansion of a proper univariate rational function in powers of u^{-1}."""
    f = _as_rf(_coerce(f))
    if "v" in f.variables:
        raise ValueError("univariate required")
    num = f.numerator.terms()
    den = f.denominator.terms()
    m = f.denominator.degree("u")
    if f.numerator.degree("u") > m:
        raise ValueError("not expandable at infinity")
    # num/den = (num u^{-m}) / (den u^{-m}), both series in u^{-1}
    a = [Fraction(0)] * (order + 1)
    b = [Fraction(0)] * (order + 1)
    for (i, _), c in num.items():
        if m - i <= order:
            a[m - i] = c
    for (j, _), c in den.items():
        if m - j <= order:
            b[m - j] = c
    return PowerSeries(a, order) * series_invert(PowerSeries(b, order))


def series_invert(a: PowerSeries) -> PowerSeries:
    if a[0] == 0:
        raise ValueError("non-invertible series")
    inv0 = 1 / a[0]
    out = [inv0]
    for m in range(1, a.order + 1):
        acc = sum((a[k] * out[m - k] for k in range(1, m + 1) if a[k]), Fraction(0))
        out.append(-inv0 * acc)
    return PowerSeries(out, a.order)


NEGATE = "u->-u"
SHIFT = "u->u+k"
REFLECT = "u->k-u"
TRANSFORMS = (NEGATE, SHIFT, REFLECT)


def substitute_affine(a: PowerSeries, scale: int, shift) -> PowerSeries:
    """Re-expand a(scale*u + shift) with scale = +-1 at u = infinity."""
    if scale not in (1, -1):
        raise ValueError("scale must be +1 or -1")
    b = rat(shift)
    D = a.order
    out = [Fraction(0)] * (D + 1)
    out[0] = a[0]
    # (s u + b)^{-r} = s^r u^{-r} (1 + s b / u)^{-r}
    sb = scale * b
    for r in range(1, D + 1):
        if not a[r]:
            continue
        lead = a[r] * (scale ** r)
        for t in range(0, D - r + 1):
            out[r + t] += lead * (-1) ** t * comb(r + t - 1, t) * sb ** t
    return PowerSeries(out, D)


def series_substitute(a: PowerSeries, transform: str, kappa=0) -> PowerSeries:
    """Apply u->-u, u->u+kappa or u->kappa-u to a series in u^{-1}."""
    if transform == NEGATE:
        return substitute_affine(a, -1, 0)
    if transform == SHIFT:
        return substitute_affine(a, 1, kappa)
    if transform == REFLECT:
        return substitute_affine(a, -1, kappa)
    raise ValueError(f"unknown transform {transform!r}")


def solve_half_factorization(w: PowerSeries, kappa) -> PowerSeries:
    """The unit series q with q(u) q(u+kappa) = w(u)."""
    if w[0] != 1:
        raise ValueError("unit series required")
    D = w.order
    q = [Fraction(1)] + [Fraction(0)] * D
    for m in range(1, D + 1):
        qs = PowerSeries(q, D)
        prod = qs * substitute_affine(qs, 1, kappa)
        # q_m enters the u^{-m} coefficient twice and nothing lower
        q[m] = (w[m] - prod[m]) / 2
    return PowerSeries(q, D)


def series_sqrt(c: PowerSeries) -> PowerSeries:
    """The unit series v with v^2 = c."""
    if c[0] != 1:
        raise ValueError("unit series required")
    D = c.order
    v = [Fraction(1)] + [Fraction(0)] * D
    for m in range(1, D + 1):
        acc = sum((v[i] * v[m - i] for i in range(1, m)), Fraction(0))
        v[m] = (c[m] - acc) / 2
    return PowerSeries(v, D)


def poly_in_u(coeffs: Sequence) -> Polynomial:
    """Polynomial sum coeffs[i] u^i."""
    return Polynomial.from_terms({(i, 0): c for i, c in enumerate(coeffs)})
