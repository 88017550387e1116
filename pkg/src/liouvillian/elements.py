"""Darboux elements, constant-cofactor combinations and hypergeometric integrals.

A Darboux element is a formal product ``prod f_i^a_i * exp(g/h)^b`` of
Darboux pairs with rational exponents; its cofactor is the matching
linear combination of cofactors.  Two constructions turn suitable
elements into first integrals:

* the three-polynomial construction: ``f3 = f2 - f1`` with
  ``k1 - k2 = f3`` and ``sum a_i k_i = a0`` gives
  ``I = J/a0 - zeta^a1/a1 * 2F1(1-a3, a1; a1+1; zeta)`` with ``zeta = f1/f2``;
* the two-element construction: ``J = f1 f2`` with constant cofactor and
  ``k1 - k2 = C f2^(2g) L(zeta)``.  For ``L = zeta^a (1-zeta)^b`` the
  integral involves ``2F1(g-a, b; g-a+1; zeta)``; for
  ``L = zeta^a exp(b zeta)`` it involves ``1F1(g-a; g-a+1; -b zeta)``.

Fractional powers are taken of absolute values; the sign in front of the
hypergeometric term is a per-region constant fixed numerically by
:func:`certify_signs`.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from . import _linalg
from .darboux import DarbouxPair, ExpElement
from .polyring import Derivation, MPoly, divergence, lcm_denominators
from .specfun import gauss_2f1, kummer_1f1

__all__ = [
    "StructureError",
    "DarbouxElement",
    "Binomial",
    "ExpMonomial",
    "FirstIntegralForm",
    "constant_cofactor_combination",
    "lemma1_build",
    "lemma2_build",
    "check_integrating_factor",
    "integrating_factor_exponents",
    "certify_signs",
]


class StructureError(ValueError):
    """A precondition identity of an integral construction does not hold."""


# --------------------------------------------------------------------------
# rational functions, used for exponent-cleared identity checks
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class _RatFn:
    num: MPoly
    den: MPoly

    @classmethod
    def of(cls, p: MPoly) -> "_RatFn":
        return cls(p, MPoly.constant(p.variables, 1))

    def __mul__(self, other: "_RatFn") -> "_RatFn":
        return _RatFn(self.num * other.num, self.den * other.den)

    def __add__(self, other: "_RatFn") -> "_RatFn":
        return _RatFn(self.num * other.den + other.num * self.den, self.den * other.den)

    def scale(self, c) -> "_RatFn":
        return _RatFn(self.num * c, self.den)

    def __pow__(self, k: int) -> "_RatFn":
        if k < 0:
            return _RatFn(self.den ** (-k), self.num ** (-k))
        return _RatFn(self.num**k, self.den**k)

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def __eq__(self, other) -> bool:
        return (self.num * other.den - other.num * self.den).is_zero()

    def __hash__(self):
        return 0


# --------------------------------------------------------------------------
# Darboux elements
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class DarbouxElement:
    """``prod f_i^a_i``, optionally times ``exp(g/h)^b``.

    ``factors`` holds ``(pair, exponent)`` with polynomial pairs;
    ``exp_part`` is ``(pair, exponent)`` for an exponential pair or None.
    """

    factors: tuple = ()
    exp_part: tuple | None = None

    def __post_init__(self):
        merged: dict = {}
        order = []
        # kept so that a product whose exponents all cancel still knows its ring
        vars_from = self.factors[0][0] if self.factors else (self.exp_part or (None,))[0]
        object.__setattr__(self, "_variables", None if vars_from is None else vars_from.k.variables)
        for pair, a in self.factors:
            if pair.is_exponential:
                raise TypeError("exponential pairs belong in exp_part")
            a = Fraction(a)
            if pair.f in merged:
                merged[pair.f] = (pair, merged[pair.f][1] + a)
            else:
                merged[pair.f] = (pair, a)
                order.append(pair.f)
        facs = tuple(merged[f] for f in order if merged[f][1] != 0)
        object.__setattr__(self, "factors", facs)
        if self.exp_part is not None:
            pair, b = self.exp_part
            if not pair.is_exponential:
                raise TypeError("exp_part must hold an exponential pair")
            b = Fraction(b)
            object.__setattr__(self, "exp_part", None if b == 0 else (pair, b))

    @classmethod
    def of(cls, pair: DarbouxPair, exponent=1) -> "DarbouxElement":
        if pair.is_exponential:
            return cls((), (pair, exponent))
        return cls(((pair, exponent),))

    @property
    def variables(self):
        if self._variables is None:
            raise ValueError("empty element has no variables")
        return self._variables

    def cofactor(self) -> MPoly:
        out = MPoly(self.variables)
        for pair, a in self.factors:
            out = out + pair.k * a
        if self.exp_part is not None:
            pair, b = self.exp_part
            out = out + pair.k * b
        return out

    def __mul__(self, other: "DarbouxElement") -> "DarbouxElement":
        exp = self.exp_part
        if other.exp_part is not None:
            if exp is None:
                exp = other.exp_part
            elif exp[0] == other.exp_part[0]:
                exp = (exp[0], exp[1] + other.exp_part[1])
            else:
                exp = _merge_exp(exp, other.exp_part)
        return DarbouxElement(self.factors + other.factors, exp)

    def __pow__(self, a) -> "DarbouxElement":
        a = Fraction(a)
        exp = None if self.exp_part is None else (self.exp_part[0], self.exp_part[1] * a)
        return DarbouxElement(tuple((p, e * a) for p, e in self.factors), exp)

    def inverse(self) -> "DarbouxElement":
        return self ** -1

    def exponents(self) -> list[Fraction]:
        out = [a for _, a in self.factors]
        if self.exp_part is not None:
            out.append(self.exp_part[1])
        return out

    def _rational_part(self, power: int) -> _RatFn:
        out = _RatFn.of(MPoly.constant(self.variables, 1))
        for pair, a in self.factors:
            k = a * power
            if k.denominator != 1:
                raise StructureError(f"exponent {a} times {power} is not an integer")
            out = out * (_RatFn.of(pair.f) ** int(k))
        return out

    def _exp_argument(self, power: int) -> _RatFn:
        if self.exp_part is None:
            return _RatFn.of(MPoly(self.variables))
        pair, b = self.exp_part
        return _RatFn(pair.f.g * (b * power), pair.f.h)

    def is_rational(self) -> bool:
        return self.exp_part is None and all(a.denominator == 1 for _, a in self.factors)

    def evaluate(self, x, y, signed: bool = False):
        """Numeric value; fractional powers are taken of ``|f|`` unless ``signed``."""
        out = 1.0
        for pair, a in self.factors:
            v = np.asarray(pair.f(x, y), dtype=float)
            if signed:
                if a.denominator != 1:
                    raise StructureError("signed evaluation needs integer exponents")
                out = out * v ** int(a)
            else:
                out = out * np.abs(v) ** float(a)
        if self.exp_part is not None:
            pair, b = self.exp_part
            out = out * np.exp(float(b) * np.asarray(pair.f.g(x, y), float) / np.asarray(pair.f.h(x, y), float))
        return out

    def __str__(self):
        parts = [f"({p.f})^{a}" if a != 1 else f"({p.f})" for p, a in self.factors]
        if self.exp_part is not None:
            pair, b = self.exp_part
            parts.append(f"{pair.f}^{b}" if b != 1 else str(pair.f))
        return " * ".join(parts) if parts else "1"


def _merge_exp(e1, e2):
    (p1, b1), (p2, b2) = e1, e2
    g = p1.f.g * p2.f.h * b1 + p2.f.g * p1.f.h * b2
    h = p1.f.h * p2.f.h
    return (DarbouxPair(ExpElement(g, h), p1.k * b1 + p2.k * b2, certified=p1.certified and p2.certified), 1)


def constant_cofactor_combination(pairs: Sequence[DarbouxPair]):
    """Exponents ``a_i`` with ``sum a_i k_i`` constant, and that constant.

    The exponent vector is the first nullspace basis vector, scaled to a
    primitive integer vector whose first nonzero entry is positive.
    Returns ``None`` when only the trivial combination exists.
    """
    if len(pairs) < 2:
        raise ValueError("need at least two pairs")
    variables = pairs[0].k.variables
    zero = (0,) * len(variables)
    monos = sorted({e for p in pairs for e in p.k.terms if e != zero})
    rows = [[p.k.coeff(e) for p in pairs] for e in monos]
    basis = _linalg.nullspace(rows, len(pairs)) if rows else [
        [Fraction(int(i == j)) for i in range(len(pairs))] for j in range(len(pairs))
    ]
    if not basis:
        return None
    v = basis[0]
    m = lcm_denominators(v)
    ints = [int(c * m) for c in v]
    g = 0
    for c in ints:
        g = np.gcd(g, c)
    ints = [c // int(g) for c in ints]
    if next(c for c in ints if c) < 0:
        ints = [-c for c in ints]
    exps = [Fraction(c) for c in ints]
    alpha0 = sum((p.k * a for p, a in zip(pairs, exps)), MPoly(variables)).coeff(zero)
    return exps, Fraction(alpha0)


# --------------------------------------------------------------------------
# integral forms
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Binomial:
    """``L(zeta) = zeta^a (1 - zeta)^b``."""

    a: Fraction
    b: Fraction


@dataclass(frozen=True)
class ExpMonomial:
    """``L(zeta) = zeta^a exp(b zeta)``."""

    a: Fraction
    b: Fraction


@dataclass(frozen=True)
class FirstIntegralForm:
    """``I = cJ |J|^gamma + s * cH * sgn(zeta) |zeta|^p * HF(params; scale*zeta)``.

    ``s`` is the per-region sign in ``sign_rule`` (default +1).  ``cH`` is
    ``prefactors['hyper'] / base**power`` with ``(base, power) =
    prefactors['root']``, which allows constants such as square roots.
    """

    kind: str
    J: DarbouxElement
    gamma: Fraction
    zeta: tuple
    hyper_params: tuple
    alpha0: Fraction
    power: Fraction
    arg_scale: Fraction = Fraction(1)
    prefactors: dict = field(default_factory=dict)
    sign_rule: dict = field(default_factory=dict)

    def __hash__(self):
        return id(self)

    def zeta_value(self, x, y):
        f1, f2 = self.zeta
        return np.asarray(f1.evaluate(x, y, signed=True), float) / np.asarray(
            f2.evaluate(x, y, signed=True), float
        )

    def hyper_coefficient(self) -> float:
        base, pw = self.prefactors.get("root", (Fraction(1), Fraction(1)))
        return float(self.prefactors["hyper"]) / float(base) ** float(pw)

    def hyper_term(self, x, y):
        z = np.atleast_1d(self.zeta_value(x, y)).astype(float)
        arg = float(self.arg_scale) * z
        out = np.full_like(z, np.nan)
        ok = np.isfinite(arg) & (z != 0)
        if self.kind == "Gauss2F1":
            ok &= arg < 1
            a, b, c = self.hyper_params
            out[ok] = gauss_2f1(a, b, c, arg[ok])
        else:
            a, b = self.hyper_params
            ok &= np.abs(arg) <= 700
            out[ok] = kummer_1f1(a, b, arg[ok])
        out = np.sign(z) * np.abs(z) ** float(self.power) * out
        return out

    def evaluate(self, x, y, sign: float = 1.0):
        """Numeric value of the integral; NaN outside the real branch."""
        jpart = float(self.prefactors["J"]) * np.abs(self.J.evaluate(x, y)) ** float(self.gamma)
        val = jpart + sign * self.hyper_coefficient() * self.hyper_term(x, y)
        return float(val[0]) if np.ndim(x) == 0 and np.ndim(y) == 0 else val.reshape(np.shape(x))

    def euler_transformed(self):
        """For a Gauss form: ``(c-a, c-b, c)`` and the exponent ``c-a-b`` of ``(1-zeta)``."""
        if self.kind != "Gauss2F1":
            raise ValueError("Euler transformation applies to 2F1 forms")
        a, b, c = self.hyper_params
        return (c - a, c - b, c), c - a - b

    def to_record(self) -> dict:
        def rat(q):
            return str(Fraction(q))

        f1, f2 = self.zeta
        return {
            "kind": self.kind,
            "hyper_params": [rat(p) for p in self.hyper_params],
            "argument_scale": rat(self.arg_scale),
            "zeta_numerator": str(f1),
            "zeta_denominator": str(f2),
            "zeta_power": rat(self.power),
            "J_factors": [[str(p.f), rat(a)] for p, a in self.J.factors]
            + ([[str(self.J.exp_part[0].f), rat(self.J.exp_part[1])]] if self.J.exp_part else []),
            "J_power": rat(self.gamma),
            "alpha0": rat(self.alpha0),
            "prefactors": {
                k: ([rat(v[0]), rat(v[1])] if isinstance(v, tuple) else rat(v))
                for k, v in self.prefactors.items()
            },
            "signs": dict(self.sign_rule),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_record(), sort_keys=True)


def lemma1_build(
    f1: DarbouxPair, f2: DarbouxPair, f3: DarbouxPair, alphas: Sequence
) -> FirstIntegralForm:
    """Gauss-type integral from three polynomials with ``f3 = f2 - f1`` and ``k1 - k2 = f3``."""
    if f3.f.is_zero() or f1.f == f2.f:
        raise StructureError("degenerate triple: f3 = f2 - f1 vanishes")
    if not (f2.f - f1.f - f3.f).is_zero():
        raise StructureError("f2 - f1 != f3")
    if not (f1.k - f2.k - f3.f).is_zero():
        raise StructureError("k1 - k2 != f3")
    alphas = [Fraction(a) for a in alphas]
    combo = f1.k * alphas[0] + f2.k * alphas[1] + f3.k * alphas[2]
    if not combo.is_constant():
        raise StructureError("sum a_i k_i is not constant")
    total = sum(alphas)
    if total == 0:
        raise StructureError("exponents sum to zero and cannot be normalised")
    alphas = [a / total for a in alphas]
    alpha0 = combo.coeff((0,) * len(combo.variables)) / total
    if alpha0 == 0:
        raise StructureError("constant cofactor is zero; J itself is a first integral")
    a1, _, a3 = alphas
    if a1 == 0:
        raise StructureError("exponent of f1 is zero")
    J = DarbouxElement(((f1, alphas[0]), (f2, alphas[1]), (f3, alphas[2])))
    return FirstIntegralForm(
        kind="Gauss2F1",
        J=J,
        gamma=Fraction(1),
        zeta=(DarbouxElement.of(f1), DarbouxElement.of(f2)),
        hyper_params=(1 - a3, a1, a1 + 1),
        alpha0=alpha0,
        power=a1,
        prefactors={"J": 1 / alpha0, "hyper": -1 / a1},
    )


def lemma2_build(
    f1: DarbouxElement,
    f2: DarbouxElement,
    gamma,
    L_shape,
    constant=(Fraction(1), Fraction(1)),
) -> FirstIntegralForm:
    """Integral from ``J = f1 f2`` and ``k1 - k2 = C f2^(2 gamma) L(f1/f2)``.

    ``constant`` is ``(base, power)`` with ``C = base**power``.  The
    identity is checked exactly after raising both sides to the least
    common denominator of every exponent involved.
    """
    gamma = Fraction(gamma)
    a, b = Fraction(L_shape.a), Fraction(L_shape.b)
    base, cpow = Fraction(constant[0]), Fraction(constant[1])
    if gamma == 0:
        raise StructureError("gamma must be nonzero")
    if gamma == a:
        raise StructureError("degenerate exponent gamma = a")
    J = f1 * f2
    kJ = J.cofactor()
    if not kJ.is_constant() or kJ.is_zero():
        raise StructureError("J = f1 f2 does not have a nonzero constant cofactor")
    alpha0 = Fraction(kJ.coeff((0,) * len(kJ.variables)))
    zeta = f1 * f2.inverse()
    if not zeta.is_rational():
        raise StructureError("f1/f2 is not a rational function")
    _check_lemma2_identity(f1, f2, gamma, L_shape, base, cpow, zeta)
    p = gamma - a
    num, den = _split_signed(zeta)
    if isinstance(L_shape, Binomial):
        kind, params, scale = "Gauss2F1", (p, b, p + 1), Fraction(1)
    elif isinstance(L_shape, ExpMonomial):
        kind, params, scale = "Kummer1F1", (p, p + 1), -b
    else:
        raise TypeError("L_shape must be Binomial or ExpMonomial")
    return FirstIntegralForm(
        kind=kind,
        J=J,
        gamma=gamma,
        zeta=(num, den),
        hyper_params=params,
        alpha0=alpha0,
        power=p,
        arg_scale=scale,
        prefactors={"J": 1 / (gamma * alpha0), "hyper": -1 / p, "root": (base, cpow)},
    )


def _split_signed(el: DarbouxElement):
    num = DarbouxElement(tuple((p, e) for p, e in el.factors if e > 0))
    den = DarbouxElement(tuple((p, -e) for p, e in el.factors if e < 0))
    if not den.factors:
        one = MPoly.constant(el.variables, 1)
        den = DarbouxElement.of(DarbouxPair(one, MPoly(el.variables), certified=True))
    return num, den


def _check_lemma2_identity(f1, f2, gamma, L_shape, base, cpow, zeta):
    vals = [gamma, L_shape.a, L_shape.b, cpow, 2 * gamma]
    vals += [e * 2 * gamma for e in f2.exponents()]
    vals += [e * L_shape.a for e in zeta.exponents()]
    N = lcm_denominators(vals)
    z = zeta._rational_part(1)
    rhs = (f2 ** (2 * gamma))._rational_part(N)
    rhs = rhs * (z ** int(L_shape.a * N))
    exp_arg = (f2 ** (2 * gamma))._exp_argument(N)
    if isinstance(L_shape, Binomial):
        one_minus = _RatFn(z.den - z.num, z.den)
        rhs = rhs * (one_minus ** int(L_shape.b * N))
    else:
        exp_arg = exp_arg + z.scale(L_shape.b * N)
    k = int(cpow * N)
    cN = base**k
    lhs = _RatFn.of(f1.cofactor() - f2.cofactor()) ** N
    if not exp_arg.is_zero():
        raise StructureError("exponential factors of k1 - k2 = C f2^(2g) L(zeta) do not cancel")
    if not lhs == rhs.scale(cN):
        raise StructureError("k1 - k2 != C f2^(2 gamma) L(zeta) after clearing exponents")


def check_integrating_factor(D: Derivation, f1: DarbouxPair, f2: DarbouxPair) -> bool:
    """Whether ``f1/f2`` is an inverse integrating factor, i.e. ``k1 - k2 = -div D``."""
    return (f1.k - f2.k + divergence(D)).is_zero()


def integrating_factor_exponents(D: Derivation, pairs: Sequence[DarbouxPair]):
    """Exponents ``a_i`` with ``sum a_i k_i = -div D``, or ``None``.

    Then ``prod f_i^a_i`` is an integrating factor of ``D``.
    """
    target = -divergence(D)
    monos = sorted({e for p in pairs for e in p.k.terms} | set(target.terms))
    rows = [[p.k.coeff(e) for p in pairs] + [-target.coeff(e)] for e in monos]
    for v in _linalg.nullspace(rows, len(pairs) + 1):
        if v[-1] != 0:
            return [c / v[-1] for c in v[:-1]]
    return None


def certify_signs(
    form: FirstIntegralForm,
    field_xy: Callable,
    points_by_region: dict,
    threshold: float = 1e-5,
) -> dict:
    """Fix the per-region sign of the hypergeometric term numerically.

    For each region, exactly one of ``+1``/``-1`` must make the
    finite-difference derivative of the integral along ``field_xy`` vanish
    at every probe point; the result is also stored in ``form.sign_rule``.
    """
    from .verify import fd_directional_derivative

    out = {}
    for region, pts in points_by_region.items():
        passing = []
        for s in (1.0, -1.0):
            def integral(x, y, s=s):
                return form.evaluate(x, y, sign=s)

            res = [fd_directional_derivative(field_xy, integral, p, normalized=True) for p in pts]
            if all(np.isfinite(r) and abs(r) < threshold for r in res):
                passing.append(int(s))
        if len(passing) != 1:
            raise StructureError(f"region {region!r}: {len(passing)} sign choices pass")
        out[region] = passing[0]
    form.sign_rule.update(out)
    return out

