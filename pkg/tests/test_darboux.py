from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from liouvillian import darboux as dx
from liouvillian import oscillators as osc
from liouvillian.polyring import Derivation, MPoly, apply_derivation

VARS = ("x", "y")
x, y = MPoly.gens(*VARS)
F = Fraction


def duffing(w2=F(2, 9)):
    return Derivation([x * y, -y - w2 - x**2 - y**2])


def monic(p):
    return p * (1 / p.leading_term()[1])


def found(pairs):
    return {(p.f, p.k) for p in pairs}


def test_duffing_linear_pair():
    pairs = dx.find_darboux(duffing(), 1)
    assert (x, y) in found(pairs)


def test_duffing_quadratic_pairs():
    F2 = 9 * x**2 + 2 * (1 + 3 * y) ** 2
    pairs = dx.find_darboux(duffing(), 2)
    assert (monic(F2), -F(4, 3) - 2 * y) in found(pairs)
    assert all(dx.verify_pair(duffing(), p) for p in pairs)
    square = [p for p in pairs if p.f == x**2]
    assert square and square[0].reducible


def test_dvdp_linear_pairs():
    D = osc.derivation(osc.theorem_model("dvdp", 3))
    got = found(dx.find_darboux(D, 1))
    assert (x, 2 * y) in got
    assert (monic(16 * x + 12 * (1 + y) - 9), -(3 + 4 * y) / 4) in got
    assert (monic(1 + 4 * y), F(1, 4) - 1 - y - 4 * x) in got


def test_exp_element_of_gen_dvdp():
    D = osc.derivation(osc.theorem_model("gen-dvdp", 3))
    known = dx.find_darboux(D, 1)
    exps = dx.find_exp_elements(D, known, 1)
    F2 = 1 + 4 * y + F(8, 3) * x
    assert len(exps) == 1
    e = exps[0]
    assert e.k == 2 * x
    # same rational function as (8/3) x / F2
    assert e.f.g * F2 == F(8, 3) * x * e.f.h
    assert dx.verify_pair(D, e)


def test_no_exp_element_over_constant_denominator():
    D = osc.derivation(osc.theorem_model("gen-dvdp", 3))
    assert dx.find_exp_elements(D, [], 1) == []


def test_trivial_exp_element_is_rejected():
    with pytest.raises(ValueError):
        dx.ExpElement(x, MPoly(VARS))


def test_verify_pair_rejects_wrong_data():
    D = duffing()
    assert dx.verify_pair(D, dx.DarbouxPair(x, y))
    assert not dx.verify_pair(D, dx.DarbouxPair(x, y**2))
    F2 = 9 * x**2 + 2 * (1 + 3 * y) ** 2
    assert dx.verify_pair(D, dx.DarbouxPair(F2, -F(4, 3) - 2 * y))
    assert not dx.verify_pair(D, dx.DarbouxPair(F2 + y, -F(4, 3) - 2 * y))


def test_product_rule_for_pairs():
    D = duffing()
    F2 = 9 * x**2 + 2 * (1 + 3 * y) ** 2
    prod = dx.DarbouxPair(x * F2, y - F(4, 3) - 2 * y)
    assert dx.verify_pair(D, prod)


def test_parameter_conditions_duffing():
    D = osc.derivation(osc.theorem_model("duffing", 3), param="omega0sq")
    conds = dx.find_parameter_conditions(D, 2)
    roots = {r for c in conds for r, _ in c.pairs}
    assert F(2, 9) in roots
    for c in conds:
        for r, pair in c.pairs:
            assert c.condition(r) == 0
            assert dx.verify_pair(D.subs_param(r), pair)


def test_parameter_conditions_need_one_parameter():
    with pytest.raises(ValueError):
        dx.find_parameter_conditions(duffing(), 1)


def test_search_rejects_parametric_derivation():
    D = osc.derivation(osc.theorem_model("duffing", 3), param="omega0sq")
    with pytest.raises(ValueError):
        dx.find_darboux(D, 1)


def test_search_size_guard():
    with pytest.raises(dx.AnsatzTooLarge):
        dx.find_darboux(duffing(), 2, height_bound=12, max_candidates=10)


def test_monomials_and_heights():
    assert dx.monomials(2, 1) == [(0, 0), (0, 1), (1, 0)]
    assert dx.monomials(2, 2, exact=True) == [(0, 2), (1, 1), (2, 0)]
    hs = dx.height_rationals(2)
    assert hs == sorted(set(hs))
    assert F(-2) in hs and F(1, 2) in hs and F(1, 3) not in hs


coef = st.integers(-3, 3).map(F)


@settings(max_examples=25)
@given(st.lists(coef, min_size=3, max_size=3), st.lists(coef, min_size=6, max_size=6))
def test_planted_line_is_found(a, q):
    # P = x A makes {x = 0} invariant with cofactor A
    A = a[0] + a[1] * x + a[2] * y
    Q = q[0] + q[1] * x + q[2] * y + q[3] * x * x + q[4] * x * y + q[5] * y * y
    D = Derivation([x * A, Q])
    if D.degree == 0:
        return
    got = found(dx.find_darboux(D, 1, height_bound=3))
    assert (x, A) in got


def test_cofactor_of():
    D = duffing()
    assert dx.cofactor_of(D, x) == y
    assert dx.cofactor_of(D, y) is None
    assert dx.cofactor_of(D, MPoly(VARS)) is None
    assert apply_derivation(D, x) == x * y
