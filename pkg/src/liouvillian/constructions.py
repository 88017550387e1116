"""Integral forms of the three oscillator families, assembled from certified Darboux data.

All polynomials live in the power coordinates ``x = u^(n-1), y = v/u``.
Every pair is certified by exact division before it is used, so a wrong
parameter value surfaces as a :class:`StructureError`, not as a bad number.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from .darboux import DarbouxPair, ExpElement, cofactor_of, verify_pair
from .elements import (
    Binomial,
    DarbouxElement,
    ExpMonomial,
    FirstIntegralForm,
    StructureError,
    certify_signs,
    lemma1_build,
    lemma2_build,
)
from .oscillators import ModelParams, derivation
from .polyring import Derivation, MPoly

__all__ = ["family_pairs", "build_form", "certified_form", "evaluate_certified", "region_key",
           "chebyshev_triple"]


def _pair(D: Derivation, f) -> DarbouxPair:
    if isinstance(f, ExpElement):
        raise TypeError("exponential elements need an explicit cofactor")
    k = cofactor_of(D, f)
    if k is None:
        raise StructureError(f"{f} is not a Darboux polynomial of the system")
    return DarbouxPair(f, k, certified=True)


def family_pairs(m: ModelParams) -> dict:
    """Named Darboux pairs behind the family's integral, each certified exactly."""
    D = derivation(m, coords="power")
    x, y = MPoly.gens("x", "y")
    n, w2, beta, phi = m.n, m.omega0_sq, m.beta, m.phi
    if m.family == "duffing":
        return {
            "F1": _pair(D, 4 * x),
            "F2": _pair(D, 4 * x + w2 * (2 + (n + 3) * y) ** 2),
        }
    if m.family == "dvdp":
        line = 1 + beta * y
        quad = beta * beta * x + n * beta * (1 + y) - n * n
        return {
            "P1": _pair(D, -(n + 1) * x),
            "P2": _pair(D, line * Fraction(n, n + 1)),
            "P3": _pair(D, quad * Fraction(1, n + 1)),
        }
    F2 = 1 + beta * y + 2 * phi * x
    F3 = DarbouxPair(ExpElement(2 * phi * x, F2), Fraction(beta, 2) * x)
    if not verify_pair(D, F3):
        raise StructureError("exp(2 phi x / F2) does not have cofactor (beta/2) x")
    return {"F1": _pair(D, x), "F2": _pair(D, F2), "F3": F3}


def build_form(m: ModelParams) -> FirstIntegralForm:
    """The family's hypergeometric integral in power coordinates."""
    p = family_pairs(m)
    n = m.n
    if m.family == "duffing":
        f1 = DarbouxElement(((p["F1"], 1), (p["F2"], Fraction(n - 3, 4))))
        f2 = DarbouxElement.of(p["F2"], Fraction(n + 1, 4))
        return lemma2_build(f1, f2, Fraction(1, n + 1), Binomial(0, Fraction(1, 2)),
                            (Fraction(n + 1, 2), Fraction(1, 2)))
    if m.family == "dvdp":
        return lemma1_build(p["P1"], p["P2"], p["P3"], (1, 0, n - 1))
    f1 = DarbouxElement(((p["F1"], 1), (p["F2"], Fraction(n - 2, 2))), (p["F3"], Fraction(n - 1, 2)))
    f2 = DarbouxElement(((p["F2"], Fraction(n, 2)),), (p["F3"], Fraction(n - 1, 2)))
    return lemma2_build(f1, f2, Fraction(1, n), ExpMonomial(0, 2 * (1 - n) * m.phi / n),
                        (Fraction(n, n + 1), 1))


def _region_polys(form: FirstIntegralForm) -> list:
    polys = []
    for el in (form.J, *form.zeta):
        for pair, _ in el.factors:
            if not pair.f.is_constant() and all(pair.f != q for q in polys):
                polys.append(pair.f)
    dk = form.zeta[0].cofactor() - form.zeta[1].cofactor()
    if not dk.is_constant() and all(dk != q for q in polys):
        polys.append(dk)
    return polys


def region_key(form: FirstIntegralForm, x: float, y: float) -> str:
    """Sign pattern of the form's factor polynomials at ``(x, y)``; '0' marks a zero."""
    return "".join("+" if v > 0 else "-" if v < 0 else "0"
                   for v in (float(f(x, y)) for f in _region_polys(form)))


def evaluate_certified(form: FirstIntegralForm, x: float, y: float) -> float:
    """The form's value with its certified sign; NaN in regions without a sign."""
    s = form.sign_rule.get(region_key(form, x, y))
    return float("nan") if s is None else float(form.evaluate(x, y, sign=s))


def certified_form(m: ModelParams, probes: int = 8, seed: int = 0) -> FirstIntegralForm:
    """:func:`build_form` with its per-region signs fixed numerically.

    Regions are the sign patterns of the polynomial factors and of
    ``k1 - k2`` (whose square root may enter with either sign); probe
    points are drawn in ``x > 0`` where the hypergeometric argument is
    moderate.
    """
    form = build_form(m)
    D = derivation(m, coords="power")
    polys = _region_polys(form)

    def field_xy(x, y):
        return float(D.components[0](x, y)), float(D.components[1](x, y))

    rng = np.random.default_rng(seed)
    xs, ys = rng.uniform(0.05, 2.0, 4000), rng.uniform(-2.0, 2.0, 4000)
    vals = np.array([[float(f(x, y)) for x, y in zip(xs, ys)] for f in polys])
    with np.errstate(all="ignore"):
        arg = float(form.arg_scale) * form.zeta_value(xs, ys)
        # large arguments make the two terms cancel and the difference quotient noisy
        ok = np.all(np.abs(vals) > 0.2, axis=0) & (np.abs(arg) < 8) & np.isfinite(form.evaluate(xs, ys))
    regions: dict = {}
    for i in np.nonzero(ok)[0]:
        key = "".join("+" if v > 0 else "-" for v in vals[:, i])
        if len(regions.setdefault(key, [])) < probes:
            regions[key].append((float(xs[i]), float(ys[i])))
    certify_signs(form, field_xy, {k: v for k, v in sorted(regions.items()) if len(v) >= 3})
    return form


def chebyshev_triple(family: str, n: int) -> tuple[Fraction, Fraction, Fraction]:
    """``(p, q, r)`` of the binomial integrand ``z^p (1 - z^r)^q`` behind the family's 2F1."""
    if family == "duffing":
        return Fraction(-1) + Fraction(1, n + 1), Fraction(-1, 2), Fraction(1)
    if family == "dvdp":
        return Fraction(-1) + Fraction(1, n), Fraction(-1, n), Fraction(1)
    raise ValueError(f"family {family!r} has no Gauss-type integral")
