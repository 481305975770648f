import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest

from matphi.pade import (
    NU1,
    OPTIMAL_DEGREES,
    THETA,
    degree_index,
    htilde_eval,
    htilde_series,
    leading_error_coeff,
    optimal_degree,
    pade_coeffs,
    pade_coeffs_exact,
    pole_radius,
    regenerate_theta,
    theta,
)


def series_mul(a, b, order):
    out = [Fraction(0)] * (order + 1)
    for i, x in enumerate(a[: order + 1]):
        for j, y in enumerate(b[: order + 1 - i]):
            out[i + j] += x * y
    return out


def series_inv(d, order):
    out = [Fraction(0)] * (order + 1)
    out[0] = 1 / d[0]
    for k in range(1, order + 1):
        acc = sum((d[i] * out[k - i] for i in range(1, min(k, len(d) - 1) + 1)), Fraction(0))
        out[k] = -acc / d[0]
    return out


def chain_numerators(m, p):
    """Numerators of R_0..R_p built with R_j = z R_{j+1} + 1/j!."""
    num, den = pade_coeffs_exact(m, p)
    nums = {p: list(num)}
    for j in range(p - 1, -1, -1):
        shifted = [Fraction(0)] + nums[j + 1]
        own = [c / math.factorial(j) for c in den] + [Fraction(0)] * (len(shifted) - len(den))
        nums[j] = [x + y for x, y in zip(shifted, own)]
    return nums, den


def phi_taylor(j, order):
    return [Fraction(1, math.factorial(k + j)) for k in range(order + 1)]


def test_optimal_degrees():
    assert tuple(optimal_degree(i) for i in range(8)) == OPTIMAL_DEGREES
    assert all(degree_index(m) == i for i, m in enumerate(OPTIMAL_DEGREES))
    with pytest.raises(ValueError):
        degree_index(5)


@pytest.mark.parametrize("m,p", [(1, 1), (2, 2), (3, 1), (4, 3), (6, 5)])
def test_order_conditions_exact(m, p):
    nums, den = chain_numerators(m, p)
    for j in range(p + 1):
        first = 2 * m + p - j + 1
        r = series_mul(nums[j], series_inv(den, first + 1), first + 1)
        diff = [x - y for x, y in zip(phi_taylor(j, first + 1), r)]
        assert all(c == 0 for c in diff[:first])
        assert diff[first] == (-1) ** m * leading_error_coeff(m, p)


def test_denominator_shared_and_numerator_degrees():
    for p in (1, 4):
        nums, den = chain_numerators(3, p)
        assert den[0] == 1
        for j in range(p + 1):
            degree = max(k for k, c in enumerate(nums[j]) if c != 0)
            assert degree == 3 + p - j


def test_small_case_by_hand():
    # [1/1] approximant to phi_1: (1 + z/6) / (1 - z/3).
    num, den = pade_coeffs_exact(1, 1)
    assert num == [1, Fraction(1, 6)]
    assert den == [1, Fraction(-1, 3)]


def test_double_coefficients_round_once():
    for m in OPTIMAL_DEGREES:
        c = pade_coeffs(m, 7)
        num, den = pade_coeffs_exact(m, 7)
        assert list(c.num) == [float(x) for x in num]
        assert list(c.den) == [float(x) for x in den]
    with pytest.raises(ValueError):
        pade_coeffs(13, 1)


def test_theta_table_shape_and_monotone():
    assert len(THETA) == 8 and all(len(row) == 10 for row in THETA)
    arr = np.array(THETA)
    assert np.all(np.diff(arr, axis=0) > 0)  # larger degree, larger threshold
    assert np.all(np.diff(arr, axis=1) > 0)  # larger p, larger threshold
    assert THETA[0][0] == 2.00e-5 and THETA[7][9] == 8.47


def test_theta_below_pole_radius():
    for i, m in enumerate(OPTIMAL_DEGREES):
        assert THETA[i][0] < NU1[i]
        assert pole_radius(m, 1) == pytest.approx(NU1[i], rel=5e-3)


def test_theta_clamp():
    assert theta(7, 12) == theta(7, 7) == 7.30
    assert theta(0, 3) == THETA[0][2]
    with pytest.raises(ValueError):
        theta(0, 0)
    with pytest.raises(IndexError):
        theta(8, 1)


@pytest.mark.parametrize("m,p,expected", [(1, 1, 2.00e-5), (12, 10, 8.47), (4, 7, 1.05), (3, 10, 1.16)])
def test_regenerate_selected_entries(m, p, expected):
    assert float(f"{regenerate_theta(m, p):.2e}") == expected


def test_htilde_first_coefficient_is_pade_error_constant():
    for m, p in [(1, 1), (6, 2), (12, 10)]:
        s = htilde_series(m, p, K=2 * m + p + 160, dps=60)
        assert s.coeffs[0] == pytest.approx(float(leading_error_coeff(m, p)), rel=1e-14)
        assert htilde_eval(s, 0.0) == 0


def test_htilde_matches_direct_taylor():
    # Independent route: Taylor coefficients of log(exp(-x) R0(x)) by mpmath.
    m, p = 3, 2
    num, den = pade_coeffs_exact(m, p)
    with mpmath.workdps(80):
        def poly(c, x):
            return sum(mpmath.mpf(v.numerator) / v.denominator * x**k for k, v in enumerate(c))

        def f(x):
            r0 = sum(x**i / mpmath.factorial(i) for i in range(p)) + x**p * poly(num, x) / poly(den, x)
            return mpmath.log(mpmath.exp(-x) * r0)

        order = 2 * m + p + 1
        direct = mpmath.taylor(f, 0, order + 2)
    s = htilde_series(m, p)
    for k in range(3):
        assert abs(direct[order + k]) / s.coeffs[k] == pytest.approx(1, rel=1e-30)


def test_htilde_near_leading_term_at_tenth_of_theta():
    # At x = theta/10 the value sits within 1% of the leading term only while
    # the second coefficient allows it (small m); in general it follows the
    # two-term expansion.
    for i, m in enumerate(OPTIMAL_DEGREES):
        for p in (1, 5, 10):
            s = htilde_series(m, p, K=2 * m + p + 160, dps=60)
            x = mpmath.mpf(THETA[i][p - 1]) / 10
            ratio = htilde_eval(s, x) / (s.coeffs[0] * x**s.first_order)
            second = s.coeffs[1] / s.coeffs[0] * x
            third = s.coeffs[2] / s.coeffs[0] * x**2
            assert third <= ratio - 1 - second <= 2 * third
            if second < 0.009:
                assert abs(ratio - 1) < 0.01
    s = htilde_series(1, 1)
    assert htilde_eval(s, THETA[0][0] / 10) / (s.coeffs[0] * (THETA[0][0] / 10) ** 4) - 1 < 1e-3


@pytest.mark.parametrize("i,p", [(0, 1), (3, 4), (7, 10), (2, 10)])
def test_theta_defining_property(i, p):
    m = OPTIMAL_DEGREES[i]
    th = regenerate_theta(m, p)
    s = htilde_series(m, p)
    power = 1 if regenerate_theta_unrefined(m, p) >= 1 else p
    assert htilde_eval(s, th) / mpmath.mpf(th) ** power <= 2.0**-53 * (1 + 1e-3)
    assert htilde_eval(s, th * 1.01) / mpmath.mpf(th * 1.01) ** power > 2.0**-53


def regenerate_theta_unrefined(m, p):
    s = htilde_series(m, p)
    lo, hi = 1e-12, s.radius * (1 - 1e-9)
    for _ in range(200):
        mid = math.sqrt(lo * hi)
        if htilde_eval(s, mid) / mid > 2.0**-53:
            hi = mid
        else:
            lo = mid
    return lo


def test_shared_denominator_by_interpolation():
    # D_m(z) R_j(z) is a polynomial of degree <= m+p-j: interpolate through
    # m+p-j+2 points and check the top coefficient vanishes.
    m, p = 4, 3
    c = pade_coeffs(m, p)
    with mpmath.workdps(50):
        def r(j, z):
            num = sum(mpmath.mpf(x) * z**k for k, x in enumerate(c.num))
            den = sum(mpmath.mpf(x) * z**k for k, x in enumerate(c.den))
            val = num / den
            for jj in range(p - 1, j - 1, -1):
                val = z * val + mpmath.mpf(1) / math.factorial(jj)
            return den * val

        for j in range(p + 1):
            deg = m + p - j
            zs = [mpmath.mpf(k + 1) / 7 for k in range(deg + 2)]
            vals = [r(j, z) for z in zs]
            v = mpmath.matrix([[z**k for k in range(deg + 2)] for z in zs])
            coef = mpmath.lu_solve(v, mpmath.matrix(vals))
            assert abs(coef[deg + 1]) < mpmath.mpf(10) ** -35


def test_htilde_rejects_outside_range():
    s = htilde_series(2, 1, K=200)
    with pytest.raises(ValueError):
        htilde_eval(s, s.radius * 1.01)
    with pytest.raises(ValueError):
        regenerate_theta(2, 1, K=10)
