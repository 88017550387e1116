"""Exact multivariate polynomials over the rationals.

Coefficients are :class:`fractions.Fraction` values, or :class:`UPoly`
values (dense univariate polynomials in a single parameter) when a
polynomial is built in parametric mode.  Terms are stored sparsely as a
map from exponent tuples to coefficients and printed in graded
lexicographic order.

Example
-------
>>> x, y = MPoly.gens("x", "y")
>>> str(9 * x**2 + 2 * (1 + 3 * y) ** 2)
'9*x^2 + 18*y^2 + 12*y + 2'
"""

from __future__ import annotations

import ast
import math
from fractions import Fraction
from functools import total_ordering
from typing import Iterable, Mapping, Sequence, Union

Rat = Fraction

__all__ = [
    "Rat",
    "UPoly",
    "MPoly",
    "Derivation",
    "add",
    "mul",
    "apply_derivation",
    "exact_divide",
    "divergence",
    "parse",
    "grlex_key",
]


def _rat(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value)
    raise TypeError(f"expected an exact rational, got {type(value).__name__}")


def _fmt_rat(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


# --------------------------------------------------------------------------
# univariate polynomials in the parameter
# --------------------------------------------------------------------------


class UPoly:
    """Dense polynomial in one parameter with rational coefficients.

    ``coeffs[i]`` multiplies ``name**i``.  Trailing zeros are stripped so
    the zero polynomial has an empty coefficient tuple.
    """

    __slots__ = ("coeffs", "name")

    def __init__(self, coeffs: Iterable = (), name: str = "lam"):
        cs = [_rat(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.coeffs = tuple(cs)
        self.name = name

    @classmethod
    def gen(cls, name: str = "lam") -> "UPoly":
        return cls((0, 1), name)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_constant(self) -> bool:
        return len(self.coeffs) <= 1

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise ValueError("polynomial is not constant")
        return self.coeffs[0] if self.coeffs else Fraction(0)

    def _coerce(self, other) -> "UPoly":
        if isinstance(other, UPoly):
            return other
        return UPoly((_rat(other),), self.name)

    def __bool__(self):
        return bool(self.coeffs)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = UPoly((other,), self.name)
        if not isinstance(other, UPoly):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        if len(self.coeffs) <= 1:
            return hash(self.coeffs[0] if self.coeffs else Fraction(0))
        return hash(("UPoly", self.coeffs))

    def __add__(self, other):
        other = self._coerce(other)
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (Fraction(0),) * (n - len(self.coeffs))
        b = other.coeffs + (Fraction(0),) * (n - len(other.coeffs))
        return UPoly((p + q for p, q in zip(a, b)), self.name)

    __radd__ = __add__

    def __neg__(self):
        return UPoly((-c for c in self.coeffs), self.name)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        other = self._coerce(other)
        if not self.coeffs or not other.coeffs:
            return UPoly((), self.name)
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return UPoly(out, self.name)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        out = UPoly((1,), self.name)
        for _ in range(k):
            out = out * self
        return out

    def __call__(self, value):
        acc = 0 * value
        for c in reversed(self.coeffs):
            acc = acc * value + c
        return acc

    def divmod(self, other: "UPoly"):
        other = self._coerce(other)
        if not other:
            raise ZeroDivisionError("division by the zero polynomial")
        rem = list(self.coeffs)
        q = [Fraction(0)] * max(len(rem) - len(other.coeffs) + 1, 0)
        lead = other.coeffs[-1]
        while len(rem) >= len(other.coeffs) and rem:
            shift = len(rem) - len(other.coeffs)
            f = rem[-1] / lead
            q[shift] = f
            for i, c in enumerate(other.coeffs):
                rem[shift + i] -= f * c
            rem.pop()
            while rem and rem[-1] == 0:
                rem.pop()
        return UPoly(q, self.name), UPoly(rem, self.name)

    def exact_div(self, other) -> "UPoly":
        q, r = self.divmod(self._coerce(other))
        if r:
            raise ArithmeticError("inexact polynomial division")
        return q

    def monic(self) -> "UPoly":
        if not self.coeffs:
            return self
        lead = self.coeffs[-1]
        return UPoly((c / lead for c in self.coeffs), self.name)

    def gcd(self, other) -> "UPoly":
        a, b = self, self._coerce(other)
        while b:
            a, b = b, a.divmod(b)[1]
        return a.monic()

    def derivative(self) -> "UPoly":
        return UPoly((i * c for i, c in enumerate(self.coeffs) if i), self.name)

    def __repr__(self):
        return f"UPoly({list(map(str, self.coeffs))}, {self.name!r})"

    def __str__(self):
        if not self.coeffs:
            return "0"
        parts = []
        for i in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[i]
            if c == 0:
                continue
            mono = "" if i == 0 else (self.name if i == 1 else f"{self.name}^{i}")
            parts.append(_term_str(c, mono))
        return _join_terms(parts)


Coeff = Union[Fraction, UPoly]


def _is_zero(c) -> bool:
    return not c


def _norm_coeff(c):
    if isinstance(c, UPoly) and c.is_constant():
        return c.constant_value()
    return c


def _term_str(c: Fraction, mono: str) -> str:
    if not mono:
        return _fmt_rat(c)
    if c == 1:
        return mono
    if c == -1:
        return "-" + mono
    return f"{_fmt_rat(c)}*{mono}"


def _join_terms(parts: Sequence[str]) -> str:
    out = parts[0]
    for p in parts[1:]:
        out += f" - {p[1:]}" if p.startswith("-") else f" + {p}"
    return out


# --------------------------------------------------------------------------
# multivariate polynomials
# --------------------------------------------------------------------------


def grlex_key(exps: tuple) -> tuple:
    """Sort key: total degree first, then lexicographic on exponents."""
    return (sum(exps), exps)


@total_ordering
class MPoly:
    """Immutable sparse polynomial over a fixed, ordered variable list."""

    __slots__ = ("variables", "_terms", "_hash")

    def __init__(self, variables: Sequence[str], terms: Mapping[tuple, Coeff] | None = None):
        self.variables = tuple(variables)
        nv = len(self.variables)
        clean = {}
        for exps, c in (terms or {}).items():
            exps = tuple(int(e) for e in exps)
            if len(exps) != nv or any(e < 0 for e in exps):
                raise ValueError(f"bad exponent vector {exps} for variables {self.variables}")
            if not isinstance(c, UPoly):
                c = _rat(c)
            acc = _norm_coeff(clean.get(exps, 0) + c)
            if _is_zero(acc):
                clean.pop(exps, None)
            else:
                clean[exps] = acc
        self._terms = clean
        self._hash = None

    # construction helpers
    @classmethod
    def gens(cls, *names: str) -> tuple["MPoly", ...]:
        out = []
        for i in range(len(names)):
            e = [0] * len(names)
            e[i] = 1
            out.append(cls(names, {tuple(e): 1}))
        return tuple(out)

    @classmethod
    def constant(cls, variables: Sequence[str], c) -> "MPoly":
        return cls(variables, {(0,) * len(variables): c})

    @classmethod
    def monomial(cls, variables: Sequence[str], exps: tuple, c=1) -> "MPoly":
        return cls(variables, {tuple(exps): c})

    @property
    def terms(self) -> dict:
        return dict(self._terms)

    def items(self):
        """Terms as ``(exponents, coefficient)`` in descending graded-lex order."""
        return sorted(self._terms.items(), key=lambda t: grlex_key(t[0]), reverse=True)

    def coeff(self, exps: tuple) -> Coeff:
        return self._terms.get(tuple(exps), Fraction(0))

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self):
        return bool(self._terms)

    def degree(self) -> int:
        """Total degree; ``-1`` for the zero polynomial."""
        return max((sum(e) for e in self._terms), default=-1)

    def is_constant(self) -> bool:
        return self.degree() <= 0

    def is_parametric(self) -> bool:
        return any(isinstance(c, UPoly) for c in self._terms.values())

    def leading_term(self) -> tuple[tuple, Coeff]:
        if not self._terms:
            raise ValueError("zero polynomial has no leading term")
        exps = max(self._terms, key=grlex_key)
        return exps, self._terms[exps]

    def homogeneous_part(self, d: int) -> "MPoly":
        return MPoly(self.variables, {e: c for e, c in self._terms.items() if sum(e) == d})

    def monic(self) -> "MPoly":
        _, lc = self.leading_term()
        if isinstance(lc, UPoly):
            raise TypeError("cannot normalize a parametric leading coefficient")
        return self * (1 / lc)

    # arithmetic
    def _coerce(self, other) -> "MPoly":
        if isinstance(other, MPoly):
            if other.variables != self.variables:
                raise ValueError(f"variable mismatch: {self.variables} vs {other.variables}")
            return other
        if isinstance(other, (int, Fraction, UPoly)):
            return MPoly.constant(self.variables, other)
        raise TypeError(f"cannot combine MPoly with {type(other).__name__}")

    def __add__(self, other):
        other = self._coerce(other)
        out = dict(self._terms)
        for e, c in other._terms.items():
            out[e] = out.get(e, 0) + c
        return MPoly(self.variables, out)

    __radd__ = __add__

    def __neg__(self):
        return MPoly(self.variables, {e: -c for e, c in self._terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, UPoly)):
            return MPoly(self.variables, {e: c * other for e, c in self._terms.items()})
        other = self._coerce(other)
        out: dict = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, 0) + c1 * c2
        return MPoly(self.variables, out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self * (1 / _rat(other))
        return NotImplemented

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise ValueError("exponent must be a non-negative integer")
        out = MPoly.constant(self.variables, 1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = MPoly.constant(self.variables, other)
        if not isinstance(other, MPoly):
            return NotImplemented
        return self.variables == other.variables and self._terms == other._terms

    def __lt__(self, other):
        if not isinstance(other, MPoly):
            return NotImplemented
        return self._sort_key() < other._sort_key()

    def _sort_key(self):
        return (self.degree(), str(self))

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.variables, frozenset(self._terms.items())))
        return self._hash

    # calculus and evaluation
    def diff(self, var: Union[int, str]) -> "MPoly":
        i = self.variables.index(var) if isinstance(var, str) else var
        out = {}
        for e, c in self._terms.items():
            if e[i]:
                ne = list(e)
                ne[i] -= 1
                out[tuple(ne)] = c * e[i]
        return MPoly(self.variables, out)

    def subs_param(self, value) -> "MPoly":
        """Substitute a value for the parameter of parametric coefficients."""
        value = _rat(value)
        return MPoly(
            self.variables,
            {e: (c(value) if isinstance(c, UPoly) else c) for e, c in self._terms.items()},
        )

    def __call__(self, *point):
        """Evaluate at a point; floats, Fractions and numpy arrays all work."""
        if len(point) != len(self.variables):
            raise ValueError("wrong number of coordinates")
        if self.is_parametric():
            raise TypeError("substitute the parameter before numeric evaluation")
        acc = 0
        for e, c in self._terms.items():
            t = c if all(isinstance(p, (int, Fraction)) for p in point) else float(c)
            for p, k in zip(point, e):
                if k:
                    t = t * p**k
            acc = acc + t
        return acc

    # text
    def __str__(self):
        if not self._terms:
            return "0"
        parts = []
        for e, c in self.items():
            mono = "*".join(
                v if k == 1 else f"{v}^{k}" for v, k in zip(self.variables, e) if k
            )
            if isinstance(c, UPoly):
                cs = f"({c})"
                parts.append(f"{cs}*{mono}" if mono else cs)
            else:
                parts.append(_term_str(c, mono))
        return _join_terms(parts)

    def __repr__(self):
        return f"MPoly({self.variables}, {str(self)!r})"


def add(a: MPoly, b: MPoly) -> MPoly:
    return a + b


def mul(a: MPoly, b: MPoly) -> MPoly:
    return a * b


def exact_divide(f: MPoly, g: MPoly) -> MPoly | None:
    """Return ``q`` with ``f == q * g``, or ``None`` when ``g`` does not divide ``f``.

    Raises ZeroDivisionError for ``g == 0``.  Leading coefficients of ``g``
    must be rational (parametric divisors are not supported).
    """
    g = f._coerce(g)
    if g.is_zero():
        raise ZeroDivisionError("division by the zero polynomial")
    lg_e, lg_c = g.leading_term()
    if isinstance(lg_c, UPoly):
        raise TypeError("parametric leading coefficient in divisor")
    q = MPoly(f.variables)
    r = f
    while r:
        le, lc = r.leading_term()
        if any(a < b for a, b in zip(le, lg_e)):
            return None
        t = MPoly.monomial(f.variables, tuple(a - b for a, b in zip(le, lg_e)), lc * (1 / lg_c))
        q = q + t
        r = r - t * g
    return q


# --------------------------------------------------------------------------
# derivations
# --------------------------------------------------------------------------


class Derivation:
    """The operator ``sum_i P_i d/dx_i`` given by one component per variable."""

    __slots__ = ("components", "variables", "degree")

    def __init__(self, components: Sequence[MPoly]):
        comps = tuple(components)
        if not comps:
            raise ValueError("a derivation needs at least one component")
        variables = comps[0].variables
        if any(c.variables != variables for c in comps):
            raise ValueError("components over different variable lists")
        if len(comps) != len(variables):
            raise ValueError(
                f"{len(comps)} components for {len(variables)} variables"
            )
        self.components = comps
        self.variables = variables
        self.degree = max(c.degree() for c in comps)

    def __call__(self, f: MPoly) -> MPoly:
        return apply_derivation(self, f)

    def is_parametric(self) -> bool:
        return any(c.is_parametric() for c in self.components)

    def subs_param(self, value) -> "Derivation":
        return Derivation([c.subs_param(value) for c in self.components])

    def homogeneous_part(self, d: int) -> "Derivation":
        return Derivation([c.homogeneous_part(d) for c in self.components])

    def __eq__(self, other):
        return isinstance(other, Derivation) and self.components == other.components

    def __hash__(self):
        return hash(self.components)

    def __repr__(self):
        body = " + ".join(f"({c})*d/d{v}" for c, v in zip(self.components, self.variables))
        return f"Derivation({body})"


def apply_derivation(D: Derivation, f: MPoly) -> MPoly:
    if f.variables != D.variables:
        raise ValueError(f"variable mismatch: {f.variables} vs {D.variables}")
    out = MPoly(f.variables)
    for i, P in enumerate(D.components):
        df = f.diff(i)
        if df:
            out = out + P * df
    return out


def divergence(D: Derivation) -> MPoly:
    out = MPoly(D.variables)
    for i, P in enumerate(D.components):
        out = out + P.diff(i)
    return out


# --------------------------------------------------------------------------
# parsing
# --------------------------------------------------------------------------


def parse(text: str, variables: Sequence[str], param: str | None = None) -> MPoly:
    """Parse ``'9*x^2 + 2*(1+3*y)^2'`` style text into an :class:`MPoly`.

    ``^`` and ``**`` both mean power; ``p/q`` is an exact rational.  If
    ``param`` names a symbol, it becomes the parameter of :class:`UPoly`
    coefficients.
    """
    variables = tuple(variables)
    try:
        tree = ast.parse(text.replace("^", "**"), mode="eval")
    except SyntaxError as exc:
        raise ValueError(f"cannot parse polynomial {text!r}") from exc

    def const(c):
        return MPoly.constant(variables, c)

    def walk(node):
        if isinstance(node, ast.Expression):
            return walk(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, int):
            return const(node.value)
        if isinstance(node, ast.Name):
            if node.id in variables:
                return MPoly.gens(*variables)[variables.index(node.id)]
            if param is not None and node.id == param:
                return const(UPoly.gen(param))
            raise ValueError(f"unknown symbol {node.id!r}")
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = walk(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        if isinstance(node, ast.BinOp):
            left, right = walk(node.left), walk(node.right)
            if isinstance(node.op, ast.Add):
                return left + right
            if isinstance(node.op, ast.Sub):
                return left - right
            if isinstance(node.op, ast.Mult):
                return left * right
            if isinstance(node.op, ast.Div):
                if not right.is_constant() or right.is_parametric():
                    raise ValueError("division only by rational constants")
                return left * (1 / right.coeff((0,) * len(variables)))
            if isinstance(node.op, ast.Pow):
                if not right.is_constant() or right.is_parametric():
                    raise ValueError("exponent must be a non-negative integer")
                k = right.coeff((0,) * len(variables))
                if k.denominator != 1 or k < 0:
                    raise ValueError("exponent must be a non-negative integer")
                return left ** int(k)
        raise ValueError(f"unsupported syntax in {text!r}")

    return walk(tree)


def lcm_denominators(values: Iterable[Fraction]) -> int:
    out = 1
    for v in values:
        out = out * v.denominator // math.gcd(out, v.denominator)
    return out
