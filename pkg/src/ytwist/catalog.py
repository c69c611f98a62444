"""Symmetric pairs (g, g^rho) of types B, C, D and their matrices G, G(u)."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

import flint

from .exact import DEFAULT_ORDER, Polynomial, RationalFunction, rat, to_fmpq, u_
from .opmatrix import ExactOperator, TruncatedOperator, fmpq_mat, fmpq_poly, identity_mat
from .report import CheckReport, Timer, verdict
from .tensor import (ORTHOGONAL, SYMPLECTIC, TensorMatrix, default_kappa, pos, sign,
                     signed_indices, theta)

FAMILY_TAGS = ("B0", "C0", "D0", "CI", "DIII", "CII", "BDI")
SYMPLECTIC_TAGS = ("C0", "CI", "CII")

FIRST = "first"
SECOND = "second"

PRIMARY = "primary"
ALTERNATIVE = "alternative"

DEFAULT_CATALOG = (
    "B0:3", "C0:4", "D0:4", "CI:4", "DIII:6", "CII:4:2:2", "CII:8:4:4", "CII:8:6:2",
    "BDI:5:3:2", "BDI:4:2:2", "BDI:6:4:2", "BDI:3:2:1",
)


class PairError(ValueError):
    pass


@dataclass(frozen=True)
class PairSpec:
    """A symmetric pair with its matrix G and the sign conventions used downstream.

    G is stored densely in position order (ascending signed indices).
    sign_pm is +1 for orthogonal and -1 for symplectic families; sign_paren
    is -1 for CI and DIII and +1 otherwise.
    """

    family: str
    N: int
    p: Optional[int]
    q: Optional[int]
    kappa: Fraction
    theta: Tuple[Tuple[int, ...], ...]
    G: Tuple[Tuple[Fraction, ...], ...]
    kind: str
    c: Optional[Fraction]
    sign_pm: int
    sign_paren: int
    variant: str = PRIMARY

    @property
    def lie_type(self) -> str:
        return SYMPLECTIC if self.family in SYMPLECTIC_TAGS else ORTHOGONAL

    @property
    def key(self) -> str:
        if self.family in ("CII", "BDI"):
            return f"{self.family}:{self.N}:{self.p}:{self.q}"
        return f"{self.family}:{self.N}"

    @property
    def indices(self) -> List[int]:
        return signed_indices(self.N)

    @property
    def theta_signs(self) -> Tuple[int, ...]:
        """t_i with theta_ij = t_i t_j."""
        if self.lie_type == ORTHOGONAL:
            return (1,) * self.N
        return tuple(sign(i) for i in self.indices)

    def th(self, i: int, j: int) -> int:
        return self.theta[pos(self.N, i)][pos(self.N, j)]

    def g(self, i: int, j: int) -> Fraction:
        return self.G[pos(self.N, i)][pos(self.N, j)]

    def G_fmpq(self) -> fmpq_mat:
        return fmpq_mat(self.N, self.N, [to_fmpq(x) for row in self.G for x in row])

    def G_matrix(self) -> TensorMatrix:
        return TensorMatrix.from_dense(self.N, 1, self.G)

    def trace_G(self) -> Fraction:
        return sum(self.G[i][i] for i in range(self.N))

    def trace_gu(self) -> RationalFunction:
        """Tr G(u): Tr G (first kind) or (N - 4u)/(1 - cu) (second kind)."""
        if self.kind == FIRST:
            return RationalFunction(self.trace_G())
        return (self.N - self.c * self.trace_G() * u_) / (1 - self.c * u_)

    def __str__(self):
        return self.key


def _theta_table(lie: str, N: int) -> Tuple[Tuple[int, ...], ...]:
    idx = signed_indices(N)
    return tuple(tuple(theta(lie, i, j) for j in idx) for i in idx)


def _diag_plus(N: int, entries: dict) -> List[List[Fraction]]:
    G = [[Fraction(0)] * N for _ in range(N)]
    for (i, j), x in entries.items():
        G[pos(N, i)][pos(N, j)] += Fraction(x)
    return G


def primary_G(family: str, N: int, p: Optional[int], q: Optional[int]) -> List[List[Fraction]]:
    ent = {}
    if family in ("B0", "C0", "D0"):
        for i in signed_indices(N):
            ent[(i, i)] = 1
    elif family in ("CI", "DIII"):
        for i in range(1, N // 2 + 1):
            ent[(i, i)] = 1
            ent[(-i, -i)] = -1
    elif family == "CII":
        for i in range(1, N // 2 + 1):
            s = -1 if i <= q // 2 else 1
            ent[(i, i)] = s
            ent[(-i, -i)] = s
    elif family == "BDI":
        if N % 2 == 0:
            h = (p - q) // 2
            for i in range(1, h + 1):
                ent[(i, i)] = 1
                ent[(-i, -i)] = 1
            for i in range(h + 1, N // 2 + 1):
                ent[(-i, i)] = 1
                ent[(i, -i)] = 1
        else:
            h = (p - q - 1) // 2
            for i in range(-h, h + 1):
                ent[(i, i)] = 1
            for i in range(h + 1, (N - 1) // 2 + 1):
                ent[(-i, i)] = 1
                ent[(i, -i)] = 1
    return _diag_plus(N, ent)


def alternative_G(family: str, N: int, p: int, q: int) -> List[List[Fraction]]:
    """The diagonal BDI matrices offered as another possibility.

    N, p, q even: +1 on |i| > q/2, -1 on |i| <= q/2.  N odd, p odd, q even:
    +1 on |i| <= (p-1)/2 (the index 0 counted once), -1 on |i| >= (p+1)/2.
    The odd case is written with the opposite overall sign in the source;
    that matrix has trace q - p and G(u) built from it fails the reflection
    equation, so the sign is normalized to make the +1 eigenspace p-dimensional.
    """
    if family != "BDI":
        raise PairError("no alternative matrix for this family")
    ent = {}
    if N % 2 == 0 and p % 2 == 0 and q % 2 == 0:
        for i in range(1, N // 2 + 1):
            s = -1 if i <= q // 2 else 1
            ent[(i, i)] = s
            ent[(-i, -i)] = s
    elif N % 2 == 1 and p % 2 == 1 and q % 2 == 0:
        ent[(0, 0)] = 1
        for i in range(1, (N - 1) // 2 + 1):
            s = 1 if i <= (p - 1) // 2 else -1
            ent[(i, i)] = s
            ent[(-i, -i)] = s
    else:
        raise PairError("alternative matrix needs N, p, q even or N, p odd and q even")
    return _diag_plus(N, ent)


def _validate_params(family: str, N: int, p, q) -> None:
    bad = PairError("invalid symmetric pair parameters")
    if family not in FAMILY_TAGS:
        raise PairError(f"unknown family {family!r}")
    if N < 2:
        raise bad
    if family == "B0" and N % 2 == 0:
        raise bad
    if family in ("C0", "D0", "CI", "DIII") and N % 2:
        raise bad
    if family in ("CII", "BDI"):
        if p is None or q is None or p + q != N or q <= 0 or p < q:
            raise bad
    if family == "CII" and (p % 2 or q % 2):
        raise bad
    if family == "BDI":
        if N % 2 == 0 and (p - q) % 2:
            raise bad
        if N % 2 == 1 and ((p - q) % 2 == 0 or p <= q):
            raise bad


def build_pair(family: str, N: int, p: Optional[int] = None, q: Optional[int] = None,
               variant: str = PRIMARY) -> PairSpec:
    if family == "BD0":
        family = "B0" if N % 2 else "D0"
    _validate_params(family, N, p, q)
    if family not in ("CII", "BDI"):
        p = q = None
    lie = SYMPLECTIC if family in SYMPLECTIC_TAGS else ORTHOGONAL
    if variant == PRIMARY:
        G = primary_G(family, N, p, q)
    elif variant == ALTERNATIVE:
        G = alternative_G(family, N, p, q)
    else:
        raise PairError(f"unknown variant {variant!r}")
    second = family in ("CII", "BDI") and p > q
    return PairSpec(
        family=family, N=N, p=p, q=q,
        kappa=default_kappa(lie, N),
        theta=_theta_table(lie, N),
        G=tuple(tuple(r) for r in G),
        kind=SECOND if second else FIRST,
        c=Fraction(4, p - q) if second else None,
        sign_pm=1 if lie == ORTHOGONAL else -1,
        sign_paren=-1 if family in ("CI", "DIII") else 1,
        variant=variant,
    )


def parse_key(key: str, variant: str = PRIMARY) -> PairSpec:
    """'BDI:5:3:2', 'CI:4', 'B0:3' (also 'BD0:N')."""
    parts = key.strip().split(":")
    try:
        fam = parts[0]
        nums = [int(x) for x in parts[1:]]
    except ValueError:
        raise PairError(f"bad catalog key {key!r}") from None
    if fam in ("CII", "BDI"):
        if len(nums) != 3:
            raise PairError(f"bad catalog key {key!r}")
        return build_pair(fam, nums[0], nums[1], nums[2], variant)
    if len(nums) != 1:
        raise PairError(f"bad catalog key {key!r}")
    return build_pair(fam, nums[0], variant=variant)


def catalog(keys: Sequence[str] = DEFAULT_CATALOG) -> List[PairSpec]:
    return [parse_key(k) for k in keys]


# -- small dense helpers over Q ------------------------------------------

def t_mat(M: fmpq_mat, spec_or_signs) -> fmpq_mat:
    """(M^t)_ij = theta_ij M_{-j,-i}."""
    t = spec_or_signs.theta_signs if isinstance(spec_or_signs, PairSpec) else spec_or_signs
    N = M.nrows()
    out = fmpq_mat(N, N)
    for a in range(N):
        for b in range(N):
            out[a, b] = M[N - 1 - b, N - 1 - a] * (t[a] * t[b])
    return out


def F_mat(N: int, signs: Sequence[int], i: int, j: int) -> fmpq_mat:
    """F_ij = E_ij - theta_ij E_{-j,-i}."""
    out = fmpq_mat(N, N)
    a, b = pos(N, i), pos(N, j)
    out[a, b] = out[a, b] + 1
    out[N - 1 - b, N - 1 - a] = out[N - 1 - b, N - 1 - a] - signs[a] * signs[b]
    return out


def expected_trace(spec: PairSpec) -> Fraction:
    if spec.family in ("B0", "C0", "D0"):
        return Fraction(spec.N)
    if spec.family in ("CI", "DIII"):
        return Fraction(0)
    return Fraction(spec.p - spec.q)


def validate_pair(spec: PairSpec) -> CheckReport:
    """G^2 = I, G^t = +-G, Ad(G) preserves g, and the trace and kind bookkeeping."""
    def run():
        N = spec.N
        G = spec.G_fmpq()
        if G * G != identity_mat(N):
            return f"G^2 != I: {(G * G).entries()}"
        s = -1 if spec.family in ("CI", "DIII") else 1
        Gt = t_mat(G, spec)
        if Gt != G * s:
            diff = [(a, b) for a in range(N) for b in range(N) if Gt[a, b] != G[a, b] * s]
            a, b = diff[0]
            return (f"G^t != {'+' if s > 0 else '-'}G at ({spec.indices[a]},{spec.indices[b]}): "
                    f"{Gt[a, b]} vs {G[a, b] * s}")
        Ginv = G.inv()
        signs = spec.theta_signs
        for i in spec.indices:
            for j in spec.indices:
                X = G * F_mat(N, signs, i, j) * Ginv
                if X + t_mat(X, spec) != fmpq_mat(N, N):
                    return f"Ad(G) F_({i},{j}) leaves g"
        tr = spec.trace_G()
        if tr != expected_trace(spec):
            return f"trace G = {tr}, expected {expected_trace(spec)}"
        lie = spec.lie_type
        if spec.kappa != default_kappa(lie, N):
            return f"kappa = {spec.kappa}, expected {default_kappa(lie, N)}"
        if spec.theta != _theta_table(lie, N):
            return "theta table inconsistent with the family"
        second = spec.family in ("CII", "BDI") and spec.p > spec.q
        if (spec.kind == SECOND) != second:
            return f"kind {spec.kind} inconsistent with p, q"
        if second and spec.c != Fraction(4, spec.p - spec.q):
            return f"c = {spec.c}, expected 4/(p-q)"
        if spec.sign_pm != (1 if lie == ORTHOGONAL else -1):
            return "sign_pm inconsistent"
        if spec.sign_paren != (-1 if spec.family in ("CI", "DIII") else 1):
            return "sign_paren inconsistent"
        return None

    with Timer() as t:
        w = run()
    return verdict("validate-pair", w, {"pair": spec.key}, t.ms)


def gu_matrix(spec: PairSpec, representation: str = "exact", order: int = DEFAULT_ORDER):
    """G(u): G (first kind) or (I - c u G)/(1 - c u).

    representation='exact' gives a TensorMatrix of rational functions in u;
    'series' gives the truncated expansion at u = infinity.
    """
    N = spec.N
    if representation == "exact":
        if spec.kind == FIRST:
            return spec.G_matrix()
        c = spec.c
        ent = {}
        for a in range(N):
            for b in range(N):
                x = (Fraction(int(a == b)) - c * u_ * spec.G[a][b]) / (1 - c * u_)
                if x != 0:
                    ent[(a, b)] = x
        return TensorMatrix.from_entries(N, 1, ent)
    if representation == "series":
        return gu_operator(spec).expand(order)
    raise ValueError(f"unknown representation {representation!r}")


def gu_operator(spec: PairSpec) -> ExactOperator:
    """G(u) as an exact operator matrix with one-dimensional site space."""
    N = spec.N
    G = spec.G_fmpq()
    if spec.kind == FIRST:
        return ExactOperator(N, 1, spec.theta_signs, [G], fmpq_poly([1]))
    c = to_fmpq(spec.c)
    return ExactOperator(N, 1, spec.theta_signs, [identity_mat(N), G * (-c)], fmpq_poly([1, -c]))


@dataclass
class SubalgebraBasis:
    plus_basis: List[fmpq_mat]
    minus_basis: List[fmpq_mat]


def _flat(M: fmpq_mat) -> List[flint.fmpq]:
    return list(M.entries())


def rank_of(mats: Sequence[fmpq_mat]) -> int:
    if not mats:
        return 0
    n = len(_flat(mats[0]))
    return fmpq_mat(len(mats), n, [x for M in mats for x in _flat(M)]).rank()


def independent_subset(mats: Sequence[fmpq_mat]) -> List[fmpq_mat]:
    """Greedy maximal linearly independent subset, by exact rank."""
    chosen: List[fmpq_mat] = []
    r = 0
    for M in mats:
        if all(x == 0 for x in M.entries()):
            continue
        r2 = rank_of(chosen + [M])
        if r2 > r:
            chosen.append(M)
            r = r2
    return chosen


def g_basis(spec: PairSpec) -> List[fmpq_mat]:
    signs = spec.theta_signs
    return [F_mat(spec.N, signs, i, j) for i in spec.indices for j in spec.indices]


def fixed_subalgebra(spec: PairSpec) -> SubalgebraBasis:
    """Bases of the +1 and -1 eigenspaces of Ad(G) on g."""
    G = spec.G_fmpq()
    Ginv = G.inv()
    half = flint.fmpq(1, 2)
    plus, minus = [], []
    for F in g_basis(spec):
        X = G * F * Ginv
        plus.append((F + X) * half)
        minus.append((F - X) * half)
    return SubalgebraBasis(independent_subset(plus), independent_subset(minus))


def dim_g(spec: PairSpec) -> int:
    N = spec.N
    return N * (N - 1) // 2 if spec.lie_type == ORTHOGONAL else N * (N + 1) // 2


def expected_fixed_dim(spec: PairSpec) -> int:
    N, p, q = spec.N, spec.p, spec.q
    if spec.family in ("B0", "C0", "D0"):
        return dim_g(spec)
    if spec.family in ("CI", "DIII"):
        return (N // 2) ** 2
    if spec.family == "CII":
        return p * (p + 1) // 2 + q * (q + 1) // 2
    return p * (p - 1) // 2 + q * (q - 1) // 2


def in_span(X: fmpq_mat, basis: Sequence[fmpq_mat]) -> bool:
    return rank_of(list(basis) + [X]) == rank_of(basis)


def check_fixed_dim(spec: PairSpec) -> CheckReport:
    """dim g^rho by exact rank against the closed formula, plus the bracket closure rules."""
    def run():
        sb = fixed_subalgebra(spec)
        dp, dm = len(sb.plus_basis), len(sb.minus_basis)
        if dp != expected_fixed_dim(spec):
            return f"dim g^rho = {dp}, expected {expected_fixed_dim(spec)}"
        if dp + dm != dim_g(spec):
            return f"dim plus + dim minus = {dp + dm}, expected {dim_g(spec)}"
        def br(A, B):
            return A * B - B * A
        for a, X in enumerate(sb.plus_basis):
            for Y in sb.plus_basis[a + 1:]:
                if not in_span(br(X, Y), sb.plus_basis):
                    return "plus basis not closed under bracket"
            for Y in sb.minus_basis:
                if not in_span(br(X, Y), sb.minus_basis):
                    return "[plus, minus] not in minus span"
        for a, X in enumerate(sb.minus_basis):
            for Y in sb.minus_basis[a + 1:]:
                if not in_span(br(X, Y), sb.plus_basis):
                    return "[minus, minus] not in plus span"
        return None

    with Timer() as t:
        w = run()
    return verdict("fixed-dim", w, {"pair": spec.key}, t.ms)


def tampered(spec: PairSpec, i: int, j: int, value) -> PairSpec:
    """Copy of spec with one entry of G replaced (for failure-path tests)."""
    G = [list(r) for r in spec.G]
    G[pos(spec.N, i)][pos(spec.N, j)] = rat(value)
    return replace(spec, G=tuple(tuple(r) for r in G))
