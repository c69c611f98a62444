"""The classical layer: g in the F-basis, the twisted current algebra g[x]^rho,
the cobracket on g[x] and its coideal projection on g[x]^rho.

Elements of g[x] are LiePoly objects (one exact N x N matrix per power of x).
Tensors are TensorLiePoly objects holding coefficients on pairs of canonical
basis elements F^{(r)}_ij = F_ij x^(r-1), where (i, j) is canonical when
i + j > 0 (orthogonal) or i + j >= 0 (symplectic).  Together with
F_ij = -theta_ij F_{-j,-i} this removes every redundancy in the F-basis, so
two tensors are equal iff their coefficient tables are.
"""

from __future__ import annotations

from functools import lru_cache
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Set, Tuple

import flint

from .catalog import PairSpec, dim_g, expected_fixed_dim, rank_of
from .opmatrix import fmpq_mat
from .report import CheckReport, Timer, verdict
from .tensor import ORTHOGONAL, SYMPLECTIC, check_family, pos, sign, signed_indices

DEFAULT_DEGREE_BOUND = 6

ODD = "odd"
EVEN = "even"

Key = Tuple[int, int, int]  # (i, j, r) for F^{(r)}_ij


def theta_table(family: str, N: int) -> Tuple[Tuple[int, ...], ...]:
    idx = signed_indices(N)
    t = [1] * N if family == ORTHOGONAL else [sign(i) for i in idx]
    return tuple(tuple(t[a] * t[b] for b in range(N)) for a in range(N))


def _check_index(N: int, i: int) -> None:
    if i not in signed_indices(N):
        raise IndexError(f"index {i} out of range for N={N}")


def F_from_table(N: int, table, i: int, j: int) -> fmpq_mat:
    """E_ij - theta_ij E_{-j,-i} with theta read from table."""
    _check_index(N, i)
    _check_index(N, j)
    a, b = pos(N, i), pos(N, j)
    out = fmpq_mat(N, N)
    out[a, b] += 1
    out[N - 1 - b, N - 1 - a] -= table[a][b]
    return out


def F(i: int, j: int, family: str, N: int) -> fmpq_mat:
    """The g-basis matrix F_ij."""
    check_family(family, N)
    return F_from_table(N, theta_table(family, N), i, j)


def canonical(i: int, j: int, family: str) -> bool:
    return i + j > 0 or (family == SYMPLECTIC and i + j == 0)


def canonical_pairs(family: str, N: int) -> List[Tuple[int, int]]:
    idx = signed_indices(N)
    return [(i, j) for i in idx for j in idx if canonical(i, j, family)]


def _is_zero(M: fmpq_mat) -> bool:
    return all(x == 0 for x in M.entries())


def _theta_transpose(M: fmpq_mat, family: str) -> fmpq_mat:
    N = M.nrows()
    t = theta_table(family, N)
    out = fmpq_mat(N, N)
    for a in range(N):
        for b in range(N):
            out[a, b] = M[N - 1 - b, N - 1 - a] * t[a][b]
    return out


def in_g(M: fmpq_mat, family: str) -> bool:
    return _is_zero(M + _theta_transpose(M, family))


class LiePoly:
    """An element of g[x]: components[m] is the coefficient of x^m."""

    __slots__ = ("N", "family", "degree_bound", "components")

    def __init__(self, N: int, family: str, components: Optional[Dict[int, fmpq_mat]] = None,
                 degree_bound: int = DEFAULT_DEGREE_BOUND, check: bool = True):
        self.N = N
        self.family = family
        self.degree_bound = degree_bound
        comps = {}
        for m, X in (components or {}).items():
            if m < 0 or m > degree_bound:
                raise ValueError(f"power x^{m} exceeds degree bound {degree_bound}")
            if _is_zero(X):
                continue
            if check and not in_g(X, family):
                raise ValueError(f"component x^{m} is not in g")
            comps[m] = X
        self.components = comps

    @classmethod
    def zero(cls, N: int, family: str) -> "LiePoly":
        return cls(N, family)

    @classmethod
    def basis(cls, i: int, j: int, r: int, family: str, N: int) -> "LiePoly":
        """F^{(r)}_ij = F_ij x^(r-1)."""
        if r < 1:
            raise ValueError("invalid degree")
        return cls(N, family, {r - 1: F(i, j, family, N)}, check=False)

    def _new(self, comps) -> "LiePoly":
        return LiePoly(self.N, self.family, comps, self.degree_bound, check=False)

    def __add__(self, other: "LiePoly") -> "LiePoly":
        comps = dict(self.components)
        for m, X in other.components.items():
            comps[m] = comps[m] + X if m in comps else X
        return self._new(comps)

    def __neg__(self) -> "LiePoly":
        return self._new({m: -X for m, X in self.components.items()})

    def __sub__(self, other: "LiePoly") -> "LiePoly":
        return self + (-other)

    def scale(self, c) -> "LiePoly":
        c = flint.fmpq(c) if not isinstance(c, flint.fmpq) else c
        return self._new({m: X * c for m, X in self.components.items()})

    def bracket(self, other: "LiePoly") -> "LiePoly":
        comps: Dict[int, fmpq_mat] = {}
        for m, X in self.components.items():
            for k, Y in other.components.items():
                Z = X * Y - Y * X
                comps[m + k] = comps[m + k] + Z if m + k in comps else Z
        return LiePoly(self.N, self.family, comps, self.degree_bound + other.degree_bound, check=False)

    def is_zero(self) -> bool:
        return not self.components

    def __eq__(self, other) -> bool:
        return isinstance(other, LiePoly) and (self - other).is_zero()

    def coords(self) -> Dict[Key, flint.fmpq]:
        """Coefficients on the canonical basis F^{(r)}_ij."""
        N, out = self.N, {}
        half = flint.fmpq(1, 2)
        for m, X in self.components.items():
            for i, j in canonical_pairs(self.family, N):
                c = X[pos(N, i), pos(N, j)]
                if i + j == 0:
                    c = c * half
                if c != 0:
                    out[(i, j, m + 1)] = c
        return out

    def __repr__(self):
        return f"LiePoly({self.coords()})"


# ----------------------------------------------------------------- F-relations


def check_F_relations(family: str, N: int, table=None) -> CheckReport:
    """[F_ij, F_kl] = d_jk F_il - d_il F_kj + th_ij d_{j,-l} F_{k,-i} - th_ij d_{i,-k} F_{-j,l}
    and F_ij + th_ij F_{-j,-i} = 0, for every quadruple.

    The matrices and the structure constants both use table (default: the family's).
    """
    check_family(family, N)
    table = table if table is not None else theta_table(family, N)
    idx = signed_indices(N)

    def th(i, j):
        return table[pos(N, i)][pos(N, j)]

    def run():
        Fm = {(i, j): F_from_table(N, table, i, j) for i in idx for j in idx}
        zero = fmpq_mat(N, N)
        for i in idx:
            for j in idx:
                if not _is_zero(Fm[i, j] + Fm[-j, -i] * th(i, j)):
                    return f"F_{i},{j} + theta F_{-j},{-i} != 0"
        for (i, j), A in Fm.items():
            for (k, l), B in Fm.items():
                lhs = A * B - B * A
                rhs = zero
                if j == k:
                    rhs = rhs + Fm[i, l]
                if i == l:
                    rhs = rhs - Fm[k, j]
                if j == -l:
                    rhs = rhs + Fm[k, -i] * th(i, j)
                if i == -k:
                    rhs = rhs - Fm[-j, l] * th(i, j)
                if lhs != rhs:
                    return f"bracket fails at (i,j,k,l)=({i},{j},{k},{l})"
        return None

    with Timer() as t:
        w = run()
    return verdict("f-relations", w, {"family": family, "N": N}, t.ms)


# ------------------------------------------------------------ twisted currents


def _G(spec: PairSpec) -> Tuple[fmpq_mat, fmpq_mat]:
    G = spec.G_fmpq()
    return G, G.inv()


def rho(spec: PairSpec, P: LiePoly) -> LiePoly:
    """rho(X x^m) = (-1)^m G X G^-1 x^m."""
    G, Gi = _G(spec)
    return P._new({m: (G * X * Gi) * (-1) ** m for m, X in P.components.items()})


def project_plus(spec: PairSpec, P: LiePoly) -> LiePoly:
    return (P + rho(spec, P)).scale(flint.fmpq(1, 2))


def project_minus(spec: PairSpec, P: LiePoly) -> LiePoly:
    return (P - rho(spec, P)).scale(flint.fmpq(1, 2))


def in_fixed(spec: PairSpec, P: LiePoly) -> bool:
    return P == rho(spec, P)


def in_minus(spec: PairSpec, P: LiePoly) -> bool:
    """X = -rho(X), checked exactly."""
    return (P + rho(spec, P)).is_zero()


def f_prime_matrix(spec: PairSpec, i: int, j: int, m: int) -> fmpq_mat:
    """sum_a (F_ia g_aj - (-1)^m g_ia F_aj), the x^(m-1) coefficient of F'^{(rho,m)}_ij."""
    if m < 1:
        raise ValueError("invalid degree")
    N, lie = spec.N, spec.lie_type
    out = fmpq_mat(N, N)
    sgn = (-1) ** m
    for a in spec.indices:
        gaj, gia = spec.g(a, j), spec.g(i, a)
        if gaj:
            out = out + F(i, a, lie, N) * flint.fmpq(gaj.numerator, gaj.denominator)
        if gia:
            out = out - F(a, j, lie, N) * flint.fmpq(sgn * gia.numerator, gia.denominator)
    return out


def f_prime(spec: PairSpec, i: int, j: int, m: int) -> LiePoly:
    """F'^{(rho,m)}_ij as an element of g[x]^rho (homogeneous of degree m-1)."""
    return LiePoly(spec.N, spec.lie_type, {m - 1: f_prime_matrix(spec, i, j, m)}, check=False)


def f_rho_matrix(spec: PairSpec, i: int, j: int, m: int) -> fmpq_mat:
    """F_ij - (-1)^m G F_ij G^-1."""
    G, Gi = _G(spec)
    X = F(i, j, spec.lie_type, spec.N)
    return X - (G * X * Gi) * (-1) ** m


def graded_dimension(spec: PairSpec, m: int) -> int:
    """Exact rank of span{F'^{(rho,m)}_ij}."""
    if m < 1:
        raise ValueError("invalid degree")
    return rank_of([f_prime_matrix(spec, i, j, m) for i in spec.indices for j in spec.indices])


def expected_graded_dimension(spec: PairSpec, m: int) -> int:
    d = expected_fixed_dim(spec)
    return d if m % 2 else dim_g(spec) - d


def prime_antisymmetry_sign(spec: PairSpec) -> int:
    """The sign in F'_{-j,-i} = (+-) theta_ij (-1)^m F'_ij.

    It is +1 except for the CI and DIII pairs, where G is theta-antisymmetric.
    """
    return spec.sign_paren


# ------------------------------------------------------------------ PBW sets


def _bdi_sets(spec: PairSpec):
    N, p, q = spec.N, spec.p, spec.q
    k = N % 2
    h = (p - q - k) // 2
    top = (N - k) // 2
    P = set(range(-h, h + 1)) - ({0} if k == 0 else set())
    P_pos = {i for i in P if i > 0}
    Q_plus = set(range(h + 1, top + 1))
    Q_all = Q_plus | {-i for i in Q_plus}
    return P, P_pos, Q_plus, Q_all


def pbw_index_set(spec: PairSpec, parity: str) -> Set[Tuple[int, int]]:
    """Index pairs (i, j) of the generators of one parity in the PBW basis.

    parity "odd" selects the generators of degree 2r-1 and "even" those of degree 2r.
    """
    if parity not in (ODD, EVEN):
        raise ValueError(f"bad parity {parity!r}")
    odd = parity == ODD
    fam, idx = spec.family, spec.indices
    pairs = [(i, j) for i in idx for j in idx]
    if fam in ("B0", "D0"):
        return {(i, j) for i, j in pairs if i + j > 0} if odd else set()
    if fam == "C0":
        return {(i, j) for i, j in pairs if i + j >= 0} if odd else set()
    if fam in ("CI", "DIII"):
        if odd:
            return {(i, j) for i, j in pairs if i > 0 and j > 0}
        if fam == "CI":
            return {(i, j) for i, j in pairs if i + j >= 0 and i * j < 0}
        return {(i, j) for i, j in pairs if i + j > 0 and i * j < 0}
    if fam == "CII":
        s = spec.q // 2
        if odd:
            return {(i, j) for i, j in pairs if i + j >= 0
                    and ((abs(i) <= s and abs(j) <= s) or (abs(i) >= s + 1 and abs(j) >= s + 1))}
        return {(i, j) for i, j in pairs
                if (i >= s + 1 and -s <= j <= s) or (j >= s + 1 and -s <= i <= s)}
    P, P_pos, Q_plus, Q_all = _bdi_sets(spec)
    type_b = spec.N % 2 == 1
    out = set()
    for i, j in pairs:
        mixed = (i in P_pos and j in Q_plus) or (i in Q_plus and j in P_pos) \
            or (type_b and i == 0 and j in Q_plus)
        if odd:
            if i + j > 0 and ((i in P and j in P) or mixed):
                out.add((i, j))
            elif i in Q_all and j in Q_all and i > abs(j):
                out.add((i, j))
        else:
            if i + j > 0 and mixed:
                out.add((i, j))
            elif i in Q_all and j in Q_all and i >= abs(j) and i != j:
                out.add((i, j))
    return out


# ------------------------------------------------------------ Killing pairing


def killing_pairing(X: fmpq_mat, Y: fmpq_mat) -> flint.fmpq:
    """(1/2) Tr(XY)."""
    Z = X * Y
    return sum((Z[a, a] for a in range(Z.nrows())), flint.fmpq(0)) * flint.fmpq(1, 2)


# ------------------------------------------------------------------- tensors


class TensorLiePoly:
    """A finite sum of basis tensors F^{(r)}_ij (x) F^{(s)}_kl."""

    __slots__ = ("N", "family", "terms")

    def __init__(self, N: int, family: str, terms: Optional[Dict[Tuple[Key, Key], flint.fmpq]] = None):
        self.N = N
        self.family = family
        self.terms = {k: v for k, v in (terms or {}).items() if v != 0}

    @classmethod
    def from_pair(cls, A: LiePoly, B: LiePoly, c=1) -> "TensorLiePoly":
        c = flint.fmpq(c)
        ca, cb = A.coords(), B.coords()
        return cls(A.N, A.family, {(ka, kb): va * vb * c for ka, va in ca.items() for kb, vb in cb.items()})

    def _new(self, terms) -> "TensorLiePoly":
        return TensorLiePoly(self.N, self.family, terms)

    def __add__(self, other: "TensorLiePoly") -> "TensorLiePoly":
        terms = dict(self.terms)
        for k, v in other.terms.items():
            terms[k] = terms.get(k, 0) + v
        return self._new(terms)

    def __neg__(self) -> "TensorLiePoly":
        return self._new({k: -v for k, v in self.terms.items()})

    def __sub__(self, other: "TensorLiePoly") -> "TensorLiePoly":
        return self + (-other)

    def scale(self, c) -> "TensorLiePoly":
        c = flint.fmpq(c)
        return self._new({k: v * c for k, v in self.terms.items()})

    def flip(self) -> "TensorLiePoly":
        return self._new({(b, a): v for (a, b), v in self.terms.items()})

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other) -> bool:
        return isinstance(other, TensorLiePoly) and (self - other).is_zero()

    def map(self, f: Callable[[Key], Dict[Key, flint.fmpq]],
            g: Callable[[Key], Dict[Key, flint.fmpq]]) -> "TensorLiePoly":
        """Apply linear maps f (x) g given by their values on basis keys."""
        out: Dict[Tuple[Key, Key], flint.fmpq] = {}
        for (a, b), v in self.terms.items():
            fa, gb = f(a), g(b)
            for ka, va in fa.items():
                for kb, vb in gb.items():
                    key = (ka, kb)
                    out[key] = out.get(key, 0) + v * va * vb
        return self._new(out)

    def witness_against(self, other: "TensorLiePoly") -> Optional[str]:
        d = self - other
        if d.is_zero():
            return None
        (a, b), v = min(d.terms.items())
        return f"coefficient of F{a} (x) F{b} differs by {v}"

    def __repr__(self):
        return f"TensorLiePoly({self.terms})"


def cobracket(i: int, j: int, r: int, family: str, N: int) -> TensorLiePoly:
    """sum_a sum_{s=1}^{r-1} (F^{(r-s)}_ia (x) F^{(s)}_aj - F^{(s)}_aj (x) F^{(r-s)}_ia)."""
    if r < 1:
        raise ValueError("invalid degree")
    out = TensorLiePoly(N, family)
    for a in signed_indices(N):
        for s in range(1, r):
            A = LiePoly.basis(i, a, r - s, family, N)
            B = LiePoly.basis(a, j, s, family, N)
            out = out + TensorLiePoly.from_pair(A, B) - TensorLiePoly.from_pair(LiePoly.basis(a, j, s, family, N),
                                                                               LiePoly.basis(i, a, r - s, family, N))
    return out


def cobracket_of(P: LiePoly) -> TensorLiePoly:
    """Linear extension of the cobracket through canonical coordinates."""
    out = TensorLiePoly(P.N, P.family)
    for (i, j, r), c in P.coords().items():
        out = out + _cobracket_cached(i, j, r, P.family, P.N).scale(c)
    return out


@lru_cache(maxsize=None)
def _cobracket_cached(i, j, r, family, N) -> TensorLiePoly:
    return cobracket(i, j, r, family, N)


class _Maps:
    """Cached images of basis keys under rho and the two projections."""

    def __init__(self, spec: PairSpec):
        self.spec = spec
        self._cache: Dict[Tuple[str, Key], Dict[Key, flint.fmpq]] = {}

    def _basis(self, key: Key) -> LiePoly:
        i, j, r = key
        return LiePoly.basis(i, j, r, self.spec.lie_type, self.spec.N)

    def _get(self, name, key, fn):
        k = (name, key)
        if k not in self._cache:
            self._cache[k] = fn(self._basis(key)).coords()
        return self._cache[k]

    def rho(self, key):
        return self._get("rho", key, lambda P: rho(self.spec, P))

    def plus(self, key):
        return self._get("plus", key, lambda P: project_plus(self.spec, P))

    def minus(self, key):
        return self._get("minus", key, lambda P: project_minus(self.spec, P))


@lru_cache(maxsize=64)
def _maps(spec: PairSpec) -> _Maps:
    return _Maps(spec)


def tau_projection(spec: PairSpec, i: int, j: int, r: int) -> TensorLiePoly:
    """delta(F'^{(rho,r)}_ij) projected onto (minus part) (x) (plus part)."""
    mp = _maps(spec)
    return cobracket_of(f_prime(spec, i, j, r)).map(mp.minus, mp.plus)


def tau_prime_projection(spec: PairSpec, i: int, j: int, r: int) -> TensorLiePoly:
    """delta(F'^{(rho,r)}_ij) projected onto (plus part) (x) (minus part)."""
    mp = _maps(spec)
    return cobracket_of(f_prime(spec, i, j, r)).map(mp.plus, mp.minus)


def tau_closed_form(spec: PairSpec, i: int, j: int, r: int) -> TensorLiePoly:
    """sum_a sum_{s=1}^{r-1} (F^{(s)}_ia (x) F'^{(rho,r-s)}_aj - (-1)^s F^{(s)}_aj (x) F'^{(rho,r-s)}_ia)."""
    lie, N = spec.lie_type, spec.N
    out = TensorLiePoly(N, lie)
    for a in spec.indices:
        for s in range(1, r):
            out = out + TensorLiePoly.from_pair(LiePoly.basis(i, a, s, lie, N), f_prime(spec, a, j, r - s))
            out = out - TensorLiePoly.from_pair(LiePoly.basis(a, j, s, lie, N),
                                                f_prime(spec, i, a, r - s), (-1) ** s)
    return out


def delta_prime_expansion(spec: PairSpec, i: int, j: int, r: int) -> TensorLiePoly:
    """The four-term expansion of delta(F'^{(rho,r)}_ij): the closed form for tau
    minus its flip."""
    closed = tau_closed_form(spec, i, j, r)
    return closed - closed.flip()


def _identity_key(k: Key) -> Dict[Key, flint.fmpq]:
    return {k: flint.fmpq(1)}


def tau_closed_form_projected(spec: PairSpec, i: int, j: int, r: int) -> TensorLiePoly:
    """The closed form with its first factor projected to the minus part."""
    return tau_closed_form(spec, i, j, r).map(_maps(spec).minus, _identity_key)


# -------------------------------------------------------------------- checks

MAX_GRADED_DEGREE = 6
MAX_COBRACKET_DEGREE = 4


def _params(spec: PairSpec) -> dict:
    return {"pair": spec.key}


def graded_dims_witness(spec: PairSpec, max_m: int = MAX_GRADED_DEGREE) -> Optional[str]:
    sp = prime_antisymmetry_sign(spec)
    for m in range(1, max_m + 1):
        got, want = graded_dimension(spec, m), expected_graded_dimension(spec, m)
        if got != want:
            return f"degree {m}: rank {got}, expected {want}"
        primes = [f_prime_matrix(spec, i, j, m) for i in spec.indices for j in spec.indices]
        rhos = [f_rho_matrix(spec, i, j, m) for i in spec.indices for j in spec.indices]
        if rank_of(primes + rhos) != got or rank_of(rhos) != got:
            return f"degree {m}: span of F' differs from span of F^(rho)"
        for i in spec.indices:
            for j in spec.indices:
                lhs = f_prime_matrix(spec, -j, -i, m)
                rhs = f_prime_matrix(spec, i, j, m) * (sp * spec.th(i, j) * (-1) ** m)
                if lhs != rhs:
                    return f"degree {m}: F'_{-j},{-i} != (+-) theta (-1)^m F'_{i},{j}"
        for X in primes:
            if not in_fixed(spec, LiePoly(spec.N, spec.lie_type, {m - 1: X})):
                return f"degree {m}: F' not fixed by rho"
    return None


def check_graded_dims(spec: PairSpec, max_m: int = MAX_GRADED_DEGREE) -> CheckReport:
    with Timer() as t:
        w = graded_dims_witness(spec, max_m)
    return verdict("graded-dims", w, _params(spec), t.ms)


def pbw_witness(spec: PairSpec, max_m: int = 2) -> Optional[str]:
    for m in range(1, max_m + 1):
        parity = ODD if m % 2 else EVEN
        idx = sorted(pbw_index_set(spec, parity))
        want = expected_graded_dimension(spec, m)
        if len(idx) != want:
            return f"{parity} index set has {len(idx)} elements, expected {want}"
        r = rank_of([f_prime_matrix(spec, i, j, m) for i, j in idx])
        if r != len(idx):
            return f"{parity} index set: F' rank {r} < {len(idx)}"
    return None


def check_pbw_counts(spec: PairSpec) -> CheckReport:
    with Timer() as t:
        w = pbw_witness(spec)
    return verdict("pbw-counts", w, _params(spec), t.ms)


def cobracket_witness(spec: PairSpec, max_r: int = MAX_COBRACKET_DEGREE) -> Optional[str]:
    """Anti-invariance on every basis element and image containment on every F'."""
    lie, N = spec.lie_type, spec.N
    mp = _maps(spec)
    for r in range(1, max_r + 1):
        for i, j in canonical_pairs(lie, N):
            P = LiePoly.basis(i, j, r, lie, N)
            lhs = cobracket_of(rho(spec, P))
            rhs = -cobracket_of(P).map(mp.rho, mp.rho)
            w = lhs.witness_against(rhs)
            if w:
                return f"anti-invariance at F^({r})_{i},{j}: {w}"
        for i in spec.indices:
            for j in spec.indices:
                d = cobracket_of(f_prime(spec, i, j, r))
                if not d.map(mp.plus, mp.plus).is_zero() or not d.map(mp.minus, mp.minus).is_zero():
                    return f"delta(F'^({r})_{i},{j}) leaves the mixed components"
                w = d.witness_against(delta_prime_expansion(spec, i, j, r))
                if w:
                    return f"delta(F'^({r})_{i},{j}) vs its four-term expansion: {w}"
    return None


def check_cobracket_anti(spec: PairSpec, max_r: int = MAX_COBRACKET_DEGREE) -> CheckReport:
    with Timer() as t:
        w = cobracket_witness(spec, max_r)
    return verdict("cobracket-anti", w, _params(spec), t.ms)


def tau_witness(spec: PairSpec, max_r: int = MAX_COBRACKET_DEGREE) -> Optional[str]:
    """tau' = -flip(tau), and the direct projection equals the closed formula.

    The closed formula is compared as written, with an unprojected first
    factor.  When it disagrees, the witness also says whether the version with
    the first factor projected to the minus part agrees.
    """
    first = None
    for r in range(1, max_r + 1):
        for i in spec.indices:
            for j in spec.indices:
                tau = tau_projection(spec, i, j, r)
                w = tau_prime_projection(spec, i, j, r).witness_against(-tau.flip())
                if w:
                    return f"tau'(F'^({r})_{i},{j}) vs -flip(tau): {w}"
                if first is None:
                    w = tau.witness_against(tau_closed_form(spec, i, j, r))
                    if w:
                        first = (r, i, j, w)
    if first is None:
        return None
    r, i, j, w = first
    ok = all(tau_projection(spec, a, b, m) == tau_closed_form_projected(spec, a, b, m)
             for m in range(1, max_r + 1) for a in spec.indices for b in spec.indices)
    note = ("the closed form with its first factor projected to the minus part matches for all r <= "
            f"{max_r}" if ok else "the projected closed form does not match either")
    return f"tau(F'^({r})_{i},{j}) vs closed form: {w}; {note}"


def check_tau_formula(spec: PairSpec, max_r: int = MAX_COBRACKET_DEGREE) -> CheckReport:
    with Timer() as t:
        w = tau_witness(spec, max_r)
    return verdict("tau-formula", w, _params(spec), t.ms)
