"""Reflection and symmetry identities for the constant solution G(u).

Everything here runs over exact rational-function matrices (TensorMatrix),
independently of the operator-valued machinery used for representations.
"""

from __future__ import annotations

from typing import Callable, Dict, List

from .catalog import FIRST, PairSpec, gu_matrix
from .exact import RationalFunction
from .report import CheckReport, combine, timed
from .tensor import U, V, TensorMatrix, build_P, build_Q, build_R, kron, theta_transpose


def _pieces(spec: PairSpec):
    N = spec.N
    I1 = TensorMatrix.identity(N, 1)
    G = spec.G_matrix()
    return {
        "I": TensorMatrix.identity(N, 2),
        "P": build_P(N),
        "Q": build_Q(spec.lie_type, N),
        "G1": kron(G, I1),
        "G2": kron(I1, G),
    }


def _gu_legs(spec: PairSpec):
    I1 = TensorMatrix.identity(spec.N, 1)
    gu = gu_matrix(spec)
    return kron(gu, I1), kron(I1, gu.substitute(u=V))


def check_g_reflection(spec: PairSpec) -> CheckReport:
    """R(u-v) G1(u) R(u+v) G2(v) = G2(v) R(u+v) G1(u) R(u-v)."""
    def run():
        lie, N = spec.lie_type, spec.N
        G1u, G2v = _gu_legs(spec)
        Rm = build_R(lie, N, U - V, spec.kappa)
        Rp = build_R(lie, N, U + V, spec.kappa)
        return (Rm @ G1u @ Rp @ G2v).witness_against(G2v @ Rp @ G1u @ Rm)

    return timed("g-reflection", run, {"pair": spec.key})


def _a1(m, G1, G2):
    I, P = m["I"], m["P"]
    a = I - P.scale(1 / (U - V))
    b = I - P.scale(1 / (U + V))
    return (a @ G1 @ b @ G2).witness_against(G2 @ b @ G1 @ a)


def subidentities(spec: PairSpec) -> Dict[str, Callable[[], object]]:
    """Named sufficient identities for the reflection equation of G(u).

    First kind: A1, A2 (two relations), A3 (three relations).
    Second kind: B1 (with G(u)) and B2..B9 (with the constant G).
    """
    m = _pieces(spec)
    I, P, Q, G1, G2 = m["I"], m["P"], m["Q"], m["G1"], m["G2"]
    k = spec.kappa

    def eq(lhs, rhs):
        return lambda: lhs().witness_against(rhs())

    if spec.kind == FIRST:
        return {
            "A1": lambda: _a1(m, G1, G2),
            "A2a": eq(lambda: P @ G1 @ Q @ G2, lambda: G2 @ Q @ G1 @ P),
            "A2b": eq(lambda: Q @ G1 @ P @ G2, lambda: G2 @ P @ G1 @ Q),
            "A3a": eq(lambda: G1 @ Q @ G2, lambda: G2 @ Q @ G1),
            "A3b": eq(lambda: Q @ G1 @ G2, lambda: G2 @ G1 @ Q),
            "A3c": eq(lambda: Q @ G1 @ Q @ G2, lambda: G2 @ Q @ G1 @ Q),
        }
    c = spec.c

    def b1():
        G1u, G2v = _gu_legs(spec)
        return _a1(m, G1u, G2v)

    return {
        "B1": b1,
        "B2": eq(lambda: G2 @ Q @ P + Q @ P @ G2, lambda: G2 @ P @ Q + P @ Q @ G2),
        "B3": eq(lambda: P @ G1 @ Q @ G2 + Q @ G1 @ P @ G2, lambda: G2 @ P @ G1 @ Q + G2 @ Q @ G1 @ P),
        "B4": eq(lambda: P @ G1 @ Q @ G2 + G2 @ P @ G1 @ Q, lambda: G2 @ Q @ G1 @ P + Q @ G1 @ P @ G2),
        "B5": eq(lambda: (Q @ G1 @ P).scale(2) + G2 @ P @ Q + G2 @ Q @ P,
                 lambda: (P @ G1 @ Q).scale(2) + P @ Q @ G2 + Q @ P @ G2),
        "B6": eq(lambda: P @ Q @ G2 + Q @ P @ G2 + G2 @ Q @ Q,
                 lambda: G2 @ P @ Q + G2 @ Q @ P + (G2 @ Q - Q @ G2).scale(2 * k) + Q @ Q @ G2),
        "B7": eq(lambda: G2 @ G1 @ Q + G1 @ Q @ G2, lambda: G2 @ Q @ G1 + Q @ G1 @ G2),
        "B8": eq(lambda: G2 @ G1 @ Q + G2 @ Q @ G1, lambda: G1 @ Q @ G2 + Q @ G1 @ G2),
        "B9": eq(lambda: (Q @ (G1 + G2)).scale(2) - ((G1 + G2) @ Q).scale(2),
                 lambda: (G2 @ P @ G1 @ Q + G2 @ Q @ G1 @ P + Q @ G1 @ Q @ G2
                          - P @ G1 @ Q @ G2 - Q @ G1 @ P @ G2 - G2 @ Q @ G1 @ Q).scale(c)),
    }


def check_g_subidentities(spec: PairSpec) -> List[CheckReport]:
    return [timed(f"g-subidentity-{name}", fn, {"pair": spec.key})
            for name, fn in subidentities(spec).items()]


def check_g_subidentities_combined(spec: PairSpec) -> CheckReport:
    return combine("g-subidentities", check_g_subidentities(spec), {"pair": spec.key})


def symmetry_rhs(spec: PairSpec, S_u: TensorMatrix, S_ref: TensorMatrix, tr_aux_S: RationalFunction,
                 tr_gu: RationalFunction) -> TensorMatrix:
    """(+-)S(k-u) +- (S(u)-S(k-u))/(2u-k) + (Tr G(u) S(k-u) - Tr S(u) I)/(2u-2k)."""
    k = spec.kappa
    I = TensorMatrix.identity(spec.N, 1)
    return (S_ref.scale(spec.sign_paren)
            + (S_u - S_ref).scale(RationalFunction(spec.sign_pm) / (2 * U - k))
            + (S_ref.scale(tr_gu) - I.scale(tr_aux_S)).scale(1 / (2 * U - 2 * k)))


def check_g_symmetry(spec: PairSpec) -> CheckReport:
    """The symmetry relation for S(u) = G(u) on the auxiliary space alone."""
    def run():
        gu = gu_matrix(spec)
        ref = gu.substitute(u=spec.kappa - U)
        lhs = theta_transpose(gu, 0, spec.lie_type)
        rhs = symmetry_rhs(spec, gu, ref, gu.trace(), spec.trace_gu())
        return lhs.witness_against(rhs)

    return timed("g-symmetry", run, {"pair": spec.key})
