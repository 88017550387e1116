import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import assume, given, strategies as st

from liouvillian.specfun import (
    SeriesDivergence,
    chebyshev_elementary,
    gauss_2f1,
    inc_beta,
    inc_gamma,
    kummer_1f1,
)

from oracles import beta_integral, euler_1f1, euler_2f1, rel_err, upper_gamma_integral

F = Fraction


def mp2f1(a, b, c, z):
    return float(mpmath.hyp2f1(mpmath.mpf(float(a)), float(b), float(c), float(z)))


def test_spot_values():
    assert gauss_2f1(F(1, 3), F(1, 2), F(4, 3), 0.0) == 1.0
    assert gauss_2f1(1, 1, 2, 0.5) == pytest.approx(2 * math.log(2), rel=1e-15)
    assert kummer_1f1(F(1, 3), F(4, 3), 0.0) == 1.0
    assert kummer_1f1(1, 2, 1.0) == pytest.approx(math.e - 1, rel=1e-15)
    assert inc_beta(0.0, F(1, 2), F(1, 2)) == 0.0
    assert inc_beta(1.0, F(1, 2), F(1, 2)) == pytest.approx(math.pi, rel=1e-14)
    assert inc_beta(0.75, F(1, 2), F(1, 2)) == pytest.approx(2 * math.pi / 3, rel=1e-14)
    assert inc_gamma(1, 2.5) == pytest.approx(math.exp(-2.5), rel=1e-15)
    assert inc_gamma(F(1, 2), 0.0) == pytest.approx(math.sqrt(math.pi), rel=1e-15)


def test_quadrature_spot_values():
    # the n = 3 Duffing parameters
    a, b, c = 0.5, 0.25, 1.25
    assert rel_err(gauss_2f1(F(1, 2), F(1, 4), F(5, 4), 0.5), euler_2f1(a, b, c, 0.5)) < 1e-12
    assert rel_err(kummer_1f1(F(1, 3), F(4, 3), -1.0), euler_1f1(1 / 3, 4 / 3, -1.0)) < 1e-12
    assert rel_err(inc_gamma(F(1, 3), 1.0), upper_gamma_integral(1 / 3, 1.0)) < 1e-12


def test_kummer_against_incomplete_gamma():
    # 1F1(a; a+1; -z) = a z^-a gamma_lower(a, z)
    a, z = 1 / 3, 2.0
    lower = math.gamma(a) - inc_gamma(F(1, 3), z)
    assert kummer_1f1(F(1, 3), F(4, 3), -z) == pytest.approx(a * z**-a * lower, rel=1e-13)


@pytest.mark.parametrize("z", [-1e200, -1e8, -50.0, -3.0, -0.9, -0.2, 0.3, 0.76, 0.9, 0.99, 0.999999])
@pytest.mark.parametrize("abc", [(F(1, 2), F(1, 4), F(5, 4)), (1, 1, F(4, 3)), (F(1, 3), F(1, 3), F(4, 3)),
                                 (F(1, 2), F(1, 2), 1), (F(3, 2), F(1, 2), 3)])
def test_gauss_against_mpmath(abc, z):
    assert rel_err(gauss_2f1(*abc, z), mp2f1(*abc, z)) < 1e-12


@pytest.mark.parametrize("z", [-600.0, -40.0, -1.0, 0.5, 12.0, 300.0])
def test_kummer_against_mpmath(z):
    a, b = F(1, 4), F(5, 4)
    want = float(mpmath.hyp1f1(0.25, 1.25, z))
    assert rel_err(kummer_1f1(a, b, z), want) < 1e-12


def test_vectorised_matches_scalar():
    zs = np.array([-20.0, -0.5, 0.0, 0.5, 0.95])
    vec = gauss_2f1(F(1, 2), F(1, 3), F(4, 3), zs)
    assert vec.shape == zs.shape
    for z, v in zip(zs, vec):
        assert v == gauss_2f1(F(1, 2), F(1, 3), F(4, 3), float(z))


def test_terminating_series():
    assert gauss_2f1(0, F(1, 3), F(4, 3), -7.0) == 1.0
    assert gauss_2f1(-2, 1, 1, 0.5) == pytest.approx(0.25)


def test_domain_errors():
    with pytest.raises(ValueError):
        gauss_2f1(1, 1, 2, 1.0)
    with pytest.raises(ValueError):
        gauss_2f1(1, 1, 2, 1.5)
    with pytest.raises(ValueError):
        gauss_2f1(1, 1, -2, 0.5)
    with pytest.raises(ValueError):
        kummer_1f1(1, 2, 701.0)
    with pytest.raises(ValueError):
        kummer_1f1(1, 0, 1.0)
    with pytest.raises(ValueError):
        inc_beta(1.2, 1, 1)
    with pytest.raises(ValueError):
        inc_beta(0.5, 0, 1)
    with pytest.raises(ValueError):
        inc_gamma(1, -1.0)
    assert issubclass(SeriesDivergence, ArithmeticError)


def test_inc_beta_non_positive_b():
    want = beta_integral(0.6, 0.5, -0.5)
    assert rel_err(inc_beta(0.6, F(1, 2), F(-1, 2)), want) < 1e-11


@pytest.mark.parametrize("s", [F(1, 3), F(-1, 2), 0])
def test_inc_gamma_small_s(s):
    want = float(mpmath.gammainc(float(s), 1.5))
    assert rel_err(inc_gamma(s, 1.5), want) < 1e-13


param = st.fractions(min_value=F(1, 20), max_value=2, max_denominator=20)
zneg = st.floats(-5, 0.9)


@given(param, param, param, zneg)
def test_contiguity(a, b, c, z):
    lhs = c * gauss_2f1(a, b, c, z) - c * gauss_2f1(a + 1, b, c, z)
    rhs = b * z * gauss_2f1(a + 1, b + 1, c + 1, z)
    scale = abs(c * gauss_2f1(a, b, c, z)) + abs(rhs)
    assert abs(lhs + rhs) <= 1e-10 * scale


@given(param, param, param, zneg)
def test_euler_transform(a, b, c, z):
    lhs = gauss_2f1(a, b, c, z)
    rhs = (1 - z) ** float(c - a - b) * gauss_2f1(c - a, c - b, c, z)
    assert rel_err(rhs, lhs) < 1e-10


@given(param, param, st.floats(-30, 30))
def test_kummer_transform(a, b, z):
    lhs = kummer_1f1(a, b, z)
    rhs = math.exp(z) * kummer_1f1(b - a, b, -z)
    assert abs(lhs - rhs) <= 1e-10 * max(abs(lhs), abs(rhs), 1e-300) + 1e-300


@given(param, st.fractions(min_value=F(-3, 2), max_value=2, max_denominator=20), st.floats(0.01, 0.97))
def test_beta_as_hypergeometric(a, b, z):
    assume(b != 0)
    want = z ** float(a) / float(a) * gauss_2f1(a, 1 - b, a + 1, z)
    assert rel_err(inc_beta(z, a, b), want) < 1e-10


@given(param, param, st.floats(0.0, 0.99), st.floats(0.0, 0.99))
def test_beta_monotone(a, b, z1, z2):
    assume(abs(z1 - z2) > 1e-6)
    lo, hi = sorted((z1, z2))
    assert inc_beta(lo, a, b) < inc_beta(hi, a, b)


def test_chebyshev_examples():
    assert not chebyshev_elementary(F(-3, 4), F(-1, 2), 1)
    for n in range(2, 12):
        assert chebyshev_elementary(-1 + F(1, n), -F(1, n), 1)
    assert chebyshev_elementary(0, 1, 1)
    with pytest.raises(ValueError):
        chebyshev_elementary(0, 1, 0)


def test_beta_arcsine_identity():
    for z in np.linspace(0.0, 1.0, 41):
        assert inc_beta(z, F(1, 2), F(1, 2)) == pytest.approx(2 * math.asin(math.sqrt(z)), rel=1e-12, abs=1e-300)
