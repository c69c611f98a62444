"""Independent dense oracles: plain Fraction matrices evaluated at rational points.

Nothing here imports the package's matrix engines, so agreement with them is
a second route rather than a re-run of the same code.
"""

from fractions import Fraction

import numpy as np


def indices(N):
    n = N // 2
    return list(range(-n, n + 1)) if N % 2 else list(range(-n, 0)) + list(range(1, n + 1))


def position(N, i):
    return indices(N).index(i)


def signs(family, N):
    return [1] * N if family == "orthogonal" else [1 if i > 0 else -1 for i in indices(N)]


def kappa(family, N):
    return Fraction(N, 2) - 1 if family == "orthogonal" else Fraction(N, 2) + 1


def eye(n):
    a = np.zeros((n, n), dtype=object)
    for i in range(n):
        a[i, i] = Fraction(1)
    a[a == 0] = Fraction(0)
    return a


def zeros(n, m=None):
    a = np.empty((n, m or n), dtype=object)
    a.fill(Fraction(0))
    return a


def P(N):
    out = zeros(N * N)
    for a in range(N):
        for b in range(N):
            out[a * N + b, b * N + a] = Fraction(1)
    return out


def Q(family, N):
    t = signs(family, N)
    out = zeros(N * N)
    # Q = sum_ij theta_ij E_ij (x) E_{-i,-j}
    for a in range(N):
        for b in range(N):
            out[a * N + (N - 1 - a), b * N + (N - 1 - b)] = Fraction(t[a] * t[b])
    return out


def R(family, N, x, k=None):
    k = kappa(family, N) if k is None else Fraction(k)
    x = Fraction(x)
    return eye(N * N) - P(N) * (1 / x) + Q(family, N) * (1 / (x - k))


def embed3(M2, legs, N):
    """Two-leg matrix acting on legs (a, b) of a triple space."""
    a, b = legs
    T = M2.reshape(N, N, N, N)
    out = zeros(N ** 3).reshape(N, N, N, N, N, N)
    rest = [x for x in range(3) if x not in legs][0]
    for i in range(N):
        for j in range(N):
            for k in range(N):
                for l in range(N):
                    v = T[i, j, k, l]
                    if v == 0:
                        continue
                    for m in range(N):
                        r = [0, 0, 0]
                        c = [0, 0, 0]
                        r[a], r[b], r[rest] = i, j, m
                        c[a], c[b], c[rest] = k, l, m
                        out[r[0], r[1], r[2], c[0], c[1], c[2]] = v
    return out.reshape(N ** 3, N ** 3)


def t_aux(M, family, N, d):
    """(M^t)_{(i r),(j c)} = theta_ij M_{(-j r),(-i c)} on the first tensor factor."""
    t = signs(family, N)
    A = M.reshape(N, d, N, d)
    out = np.empty_like(A)
    for a in range(N):
        for b in range(N):
            out[a, :, b, :] = A[N - 1 - b, :, N - 1 - a, :] * (t[a] * t[b])
    return out.reshape(N * d, N * d)


def G_of_u(G, c, u):
    """G(u) = (I - c u G)/(1 - c u), or G when c is None."""
    G = np.array(G, dtype=object)
    if c is None:
        return G
    u = Fraction(u)
    n = G.shape[0]
    return (eye(n) - G * (c * u)) * (1 / (1 - c * u))


def one_site_S(family, N, G, c, u, shift=0):
    """S(u) = T(u-k/2) G(u) T^t(-u+k/2) with T(u) = R_{aux,site}(u - shift)."""
    k = kappa(family, N)
    u = Fraction(u)
    T1 = R(family, N, u - k / 2 - shift)
    T2 = t_aux(R(family, N, -u + k / 2 - shift), family, N, N)
    Gu = np.kron(G_of_u(G, c, u), eye(N))
    return T1.dot(Gu).dot(T2)


def reflection_residual(family, N, S_of, u, v):
    """R(u-v) S_1(u) R(u+v) S_2(v) - S_2(v) R(u+v) S_1(u) R(u-v) on aux (x) aux (x) site."""
    Rm = embed3(R(family, N, Fraction(u) - v), (0, 1), N)
    Rp = embed3(R(family, N, Fraction(u) + v), (0, 1), N)
    S1 = embed3(S_of(u), (0, 2), N)
    S2 = embed3(S_of(v), (1, 2), N)
    return Rm.dot(S1).dot(Rp).dot(S2) - S2.dot(Rp).dot(S1).dot(Rm)


def qybe_residual(family, N, u, v, k=None):
    R12 = embed3(R(family, N, u, k), (0, 1), N)
    R13 = embed3(R(family, N, Fraction(u) + v, k), (0, 2), N)
    R23 = embed3(R(family, N, v, k), (1, 2), N)
    return R12.dot(R13).dot(R23) - R23.dot(R13).dot(R12)


def rtt_residual(family, N, u, v, shift=0):
    """R(u-v) T_1(u) T_2(v) - T_2(v) T_1(u) R(u-v) with T(u) = R_{aux,site}(u - shift)."""
    Rm = embed3(R(family, N, Fraction(u) - v), (0, 1), N)
    T1 = embed3(R(family, N, Fraction(u) - shift), (0, 2), N)
    T2 = embed3(R(family, N, Fraction(v) - shift), (1, 2), N)
    return Rm.dot(T1).dot(T2) - T2.dot(T1).dot(Rm)


def is_zero(a):
    return all(x == 0 for x in np.asarray(a).ravel())


def commutator(A, B):
    return A.dot(B) - B.dot(A)
