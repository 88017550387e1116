from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from liouvillian.polyring import (
    Derivation,
    MPoly,
    UPoly,
    apply_derivation,
    divergence,
    exact_divide,
    parse,
)

VARS = ("x", "y")
x, y = MPoly.gens(*VARS)

small = st.fractions(min_value=-5, max_value=5, max_denominator=6)
exps = st.tuples(st.integers(0, 3), st.integers(0, 3))
polys = st.dictionaries(exps, small, max_size=6).map(lambda t: MPoly(VARS, t))


def test_docstring_example():
    assert str(9 * x**2 + 2 * (1 + 3 * y) ** 2) == "9*x^2 + 18*y^2 + 12*y + 2"


def test_zero_terms_are_dropped():
    p = MPoly(VARS, {(1, 0): 1, (0, 1): 0})
    assert p.terms == {(1, 0): Fraction(1)}
    assert (x - x).is_zero()
    assert str(x - x) == "0"


def test_float_coefficients_rejected():
    with pytest.raises(TypeError):
        MPoly(VARS, {(1, 0): 0.5})


@given(polys, polys, polys)
def test_ring_axioms(a, b, c):
    assert a + b == b + a
    assert a * b == b * a
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a - a == MPoly(VARS)


@given(polys, polys)
def test_degree_of_product(a, b):
    if a.is_zero() or b.is_zero():
        return
    assert (a * b).degree() == a.degree() + b.degree()


@given(polys, polys, polys, polys)
def test_derivation_leibniz(p, q, f, g):
    D = Derivation([p, q])
    assert D(f * g) == D(f) * g + f * D(g)


@given(polys, polys)
def test_exact_divide_recovers_factor(f, g):
    if g.is_zero():
        return
    assert exact_divide(f * g, g) == f


def test_exact_divide_reports_non_divisibility():
    assert exact_divide(x**2 + 1, x) is None
    with pytest.raises(ZeroDivisionError):
        exact_divide(x, MPoly(VARS))


@given(polys)
def test_parse_round_trip(f):
    assert parse(str(f), VARS) == f


def test_parse_syntax():
    assert parse("9*x^2 + 2*(1+3*y)**2", VARS) == 9 * x**2 + 2 * (1 + 3 * y) ** 2
    assert parse("x/3", VARS) == x * Fraction(1, 3)
    for bad in ("x/y", "x^y", "x^(1/2)", "z", "x +"):
        with pytest.raises(ValueError):
            parse(bad, VARS)


def test_parametric_coefficients():
    p = parse("lam*x + y", VARS, param="lam")
    assert p.is_parametric()
    assert p.subs_param(Fraction(2, 3)) == Fraction(2, 3) * x + y
    with pytest.raises(TypeError):
        p(1, 2)


def test_evaluation_exact_and_float():
    f = 9 * x**2 + 2 * (1 + 3 * y) ** 2
    assert f(Fraction(1, 3), Fraction(-1, 3)) == 1
    assert f(0.5, 0.0) == pytest.approx(4.25)


def test_divergence_and_derivation():
    D = Derivation([x * y, -y - x**2])
    assert divergence(D) == y - 1
    assert apply_derivation(D, x) == x * y
    with pytest.raises(ValueError):
        Derivation([x])


def test_upoly_arithmetic():
    lam = UPoly.gen("lam")
    p = (lam + 1) * (lam - 2)
    assert p(Fraction(2)) == 0
    assert p(Fraction(3)) == 4
