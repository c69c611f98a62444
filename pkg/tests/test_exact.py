from fractions import Fraction as Fr

import pytest

from ytwist.exact import (NEGATE, REFLECT, SHIFT, Polynomial, PowerSeries, RationalFunction,
                          expand_at_infinity, rat, series_invert, series_sqrt, series_substitute,
                          solve_half_factorization, u_)

v_ = Polynomial.var("v")


def ps(*cs, order=None):
    return PowerSeries([Fr(c) for c in cs], order)


def test_rational_normalization():
    assert rat("-6/4") == Fr(-3, 2)
    assert rat(Fr(2, 4)).denominator == 2


def test_rational_function_canonical_form():
    f = (u_ * u_ - 1) / (2 * u_ - 2)
    assert f == (u_ + 1) / 2
    assert f.denominator.leading_coefficient() == 1
    assert ((u_ - v_) / (v_ - u_)) == -1


def test_rational_function_field_inverse():
    f = (u_ + 3) / (u_ * v_ - 2)
    assert f * (1 / f) == 1


def test_expand_geometric():
    assert expand_at_infinity(1 / (u_ - Fr(1, 2)), 3) == ps(0, 1, Fr(1, 2), Fr(1, 4))


def test_expand_second_kind_scalar():
    # 1/(1 - 4u) = -(1/4)u^-1 - (1/16)u^-2 - (1/64)u^-3
    assert expand_at_infinity(1 / (1 - 4 * u_), 3) == ps(0, Fr(-1, 4), Fr(-1, 16), Fr(-1, 64))


def test_expand_long_division():
    assert expand_at_infinity(u_ / (u_ + 1), 2) == ps(1, -1, 1)


def test_expand_errors():
    with pytest.raises(ValueError, match="not expandable at infinity"):
        expand_at_infinity(u_ * u_ / (u_ + 1), 3)
    with pytest.raises(ValueError, match="univariate required"):
        expand_at_infinity(1 / (u_ - v_), 3)


def test_expand_multiply_back():
    f = (2 * u_ + 1) / (u_ * u_ - 3)
    s = expand_at_infinity(f, 8)
    den = expand_at_infinity((u_ * u_ - 3) / (u_ * u_), 8)
    num = expand_at_infinity((2 * u_ + 1) / (u_ * u_), 8)
    assert s * den == num


def test_series_invert_examples():
    assert series_invert(PowerSeries.one(4)) == PowerSeries.one(4)
    assert series_invert(ps(1, 1, 0, 0)) == ps(1, -1, 1, -1)
    a = ps(2, 1, 0, 0, 0)
    inv = series_invert(a)
    assert (inv[0], inv[1], inv[2]) == (Fr(1, 2), Fr(-1, 4), Fr(1, 8))
    assert a * inv == PowerSeries.one(4)


def test_series_invert_error():
    with pytest.raises(ValueError, match="non-invertible series"):
        series_invert(ps(0, 1))


def test_substitute_examples():
    assert series_substitute(ps(1, 0, 1), NEGATE) == ps(1, 0, 1)
    assert series_substitute(ps(0, 1, 0, 0), SHIFT, 1) == ps(0, 1, -1, 1)


def test_substitute_reflect_involution():
    a = ps(1, 2, Fr(-1, 3), 5, 7)
    k = Fr(3, 2)
    assert series_substitute(series_substitute(a, REFLECT, k), REFLECT, k) == a


def test_half_factorization_examples():
    assert solve_half_factorization(PowerSeries.one(6), 1) == PowerSeries.one(6)
    q0 = ps(1, 0, 1, 0, 0, 0, 0)
    w = q0 * series_substitute(q0, SHIFT, 1)
    assert solve_half_factorization(w, 1) == q0


def test_half_factorization_error():
    with pytest.raises(ValueError, match="unit series required"):
        solve_half_factorization(ps(2, 1), 1)


def test_sqrt_examples():
    assert series_sqrt(ps(1, 2, 1, 0, 0)) == ps(1, 1, 0, 0, 0)
    assert series_sqrt(PowerSeries.one(5)) == PowerSeries.one(5)
    with pytest.raises(ValueError, match="unit series required"):
        series_sqrt(ps(4, 1))


def test_power_series_truncation_consistent():
    a = ps(1, 1, 1, 1)
    b = ps(1, -1, 0, 0, 0, 0)
    assert (a * b).order == 3
