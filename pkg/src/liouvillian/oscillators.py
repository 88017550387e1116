"""Duffing-type oscillator families, their closed-form integrals and phase regions.

Three families of ``u'' + damping(u) u' + w2 u + N(u) = 0``:

* ``duffing``:  damping 1, ``N = u^n``;
* ``dvdp``:     damping ``1 + beta u^(n-1)``, ``N = u^n``;
* ``gen-dvdp``: as ``dvdp`` plus ``phi u^(2n-1)``.

At the special parameter values (:func:`theorem_model`) each family has a
Liouvillian first integral expressed through ``2F1`` or ``1F1``.  The
integrals are local: each one is real and smooth only inside regions
cut out by invariant curves or by lines where its sign factor flips.

With ``harmonic_sign`` every odd power ``u^n`` is read as ``|u|^(n-1) u``
(and ``u^(n-1)`` in the damping as ``|u|^(n-1)``).  The system is then
symmetric under ``(u, v) -> (-u, -v)`` and the integrals follow from the
plain ones evaluated at ``(|u|, sign(u) v)``.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .polyring import Derivation, MPoly, UPoly
from .specfun import Z_MAX, gauss_2f1, kummer_1f1

__all__ = [
    "FAMILIES",
    "DomainError",
    "ModelParams",
    "RegionTag",
    "theorem_model",
    "vector_field",
    "to_xy",
    "derivation",
    "I1",
    "I2",
    "I3",
    "I4",
    "I5",
    "integral",
    "integral_names",
    "integral_region",
    "boundary_distance",
    "time_dependent_J",
    "alpha0",
    "classify_region",
    "invariant_curve_value",
    "barrier_values",
    "critical_points",
    "v_variant",
    "sign_rule",
]

FAMILIES = ("duffing", "dvdp", "gen-dvdp")


class DomainError(ValueError):
    """The point lies outside the region where the requested formula is real."""


@dataclass(frozen=True)
class ModelParams:
    family: str
    n: int
    omega0_sq: Fraction
    beta: Fraction = Fraction(0)
    phi: Fraction = Fraction(0)
    harmonic_sign: bool | None = None

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}; expected one of {FAMILIES}")
        if int(self.n) != self.n or self.n < 2:
            raise ValueError("n must be an integer >= 2")
        for name in ("omega0_sq", "beta", "phi"):
            object.__setattr__(self, name, Fraction(getattr(self, name)))
        if self.harmonic_sign is None:
            object.__setattr__(self, "harmonic_sign", self.n % 2 == 0)

    @property
    def harmonic(self) -> bool:
        # for odd n the two readings of u^n coincide
        return bool(self.harmonic_sign) and self.n % 2 == 0

    def is_theorem_conditioned(self) -> bool:
        try:
            t = theorem_model(self.family, self.n)
        except ValueError:
            return False
        return (t.omega0_sq, t.beta, t.phi) == (self.omega0_sq, self.beta, self.phi)

    def describe(self) -> str:
        parts = [f"family={self.family}", f"n={self.n}", f"omega0sq={self.omega0_sq}"]
        if self.family != "duffing":
            parts.append(f"beta={self.beta}")
        if self.family == "gen-dvdp":
            parts.append(f"phi={self.phi}")
        parts.append(f"harmonic_sign={str(self.harmonic).lower()}")
        return " ".join(parts)


def theorem_model(family: str, n: int, harmonic_sign: bool | None = None) -> ModelParams:
    """Parameters at which the family has a hypergeometric first integral."""
    n = int(n)
    if family == "duffing":
        return ModelParams(family, n, Fraction(2 * (n + 1), (n + 3) ** 2), harmonic_sign=harmonic_sign)
    w2 = Fraction(n, (n + 1) ** 2)
    if family == "dvdp":
        return ModelParams(family, n, w2, beta=Fraction(n + 1), harmonic_sign=harmonic_sign)
    if family == "gen-dvdp":
        return ModelParams(family, n, w2, beta=Fraction(n + 1), phi=1 / (4 * w2), harmonic_sign=harmonic_sign)
    raise ValueError(f"unknown family {family!r}")


@dataclass(frozen=True)
class RegionTag:
    family: str
    label: str

    @property
    def is_boundary(self) -> bool:
        return self.label == "boundary"

    def __str__(self):
        return self.label


# --------------------------------------------------------------------------
# dynamics
# --------------------------------------------------------------------------


def _odd_power(u, k: int, harmonic: bool):
    """``u^k``, or ``|u|^(k-1) u`` in harmonic mode."""
    if harmonic:
        return np.abs(u) ** (k - 1) * u
    return u**k


def vector_field(m: ModelParams, u, v):
    """``(u', v')`` of the first-order system."""
    h = m.harmonic
    force = float(m.omega0_sq) * u + _odd_power(u, m.n, h)
    damping = 1.0
    if m.family != "duffing":
        damping = 1.0 + float(m.beta) * (np.abs(u) ** (m.n - 1) if h else u ** (m.n - 1))
    if m.family == "gen-dvdp":
        force = force + float(m.phi) * _odd_power(u, 2 * m.n - 1, h)
    return v, -v * damping - force


def to_xy(m: ModelParams, u, v):
    """``(x, y) = (u^(n-1), v/u)``."""
    if np.any(np.asarray(u) == 0):
        raise DomainError("u = 0: the coordinate y = v/u is undefined")
    return u ** (m.n - 1), v / u


def derivation(m: ModelParams, coords: str = "auto", param: str | None = None) -> Derivation:
    """The polynomial derivation of the family in ``y = v/u`` coordinates.

    ``coords='power'`` uses ``x = u^(n-1)`` (always quadratic);
    ``coords='plain'`` uses ``x = u``.  ``'auto'`` picks plain where that
    is still quadratic (Duffing with ``n <= 3``) and power otherwise.
    ``param`` names one of ``omega0sq``, ``beta``, ``phi`` to keep as a
    symbolic parameter.
    """
    if coords == "auto":
        coords = "plain" if m.family == "duffing" and m.n <= 3 else "power"
    if coords not in ("plain", "power"):
        raise ValueError(f"unknown coordinates {coords!r}")
    var = ("x", "y")
    x, y = MPoly.gens(*var)
    one = MPoly.constant(var, 1)

    def coef(name, value):
        if param == name:
            return MPoly.constant(var, UPoly.gen(name))
        return one * value

    if param not in (None, "omega0sq", "beta", "phi"):
        raise ValueError(f"unknown parameter {param!r}")
    w2, beta, phi = coef("omega0sq", m.omega0_sq), coef("beta", m.beta), coef("phi", m.phi)
    if coords == "power":
        xn1, P = x, (m.n - 1) * x * y
    else:
        xn1, P = x ** (m.n - 1), x * y
    damping = one
    if m.family != "duffing":
        damping = one + beta * xn1
    Q = -damping * y - w2 - xn1 - y * y
    if m.family == "gen-dvdp":
        Q = Q - phi * xn1 * xn1
    return Derivation([P, Q])


# --------------------------------------------------------------------------
# curves and regions
# --------------------------------------------------------------------------


@functools.lru_cache(maxsize=None)
def v_variant(n: int) -> str:
    """Which reading of the curve polynomial ``V`` makes ``I1`` conserved.

    Two readings are possible, ``4u^(n+1) + w2 (2u + (n+3)v)^2``
    ('scaled') and ``4u^(n+1) + (2u + w2 (n+3) v)^2`` ('inner').  The choice
    is made once per ``n`` by the finite-difference derivative of ``I1``
    along the flow at fixed probe points.
    """
    from .verify import fd_directional_derivative

    m = theorem_model("duffing", n, harmonic_sign=False)
    rng = np.random.default_rng(1234 + n)
    pts = [(rng.uniform(0.2, 1.5), rng.uniform(-0.5, 0.5)) for _ in range(8)]
    scores = {}
    for variant in ("scaled", "inner"):
        def f(u, v, variant=variant):
            return _I1_plain(m, u, v, variant=variant)

        res = []
        for p in pts:
            try:
                res.append(abs(fd_directional_derivative(m, f, p, normalized=True)))
            except DomainError:
                res.append(np.inf)
        scores[variant] = max(res)
    return min(scores, key=scores.get)


def _duffing_V(m: ModelParams, u, v, variant: str | None = None):
    variant = variant or v_variant(m.n)
    n, w2 = m.n, float(m.omega0_sq)
    if variant == "scaled":
        return 4 * u ** (n + 1) + w2 * (2 * u + (n + 3) * v) ** 2
    return 4 * u ** (n + 1) + (2 * u + w2 * (n + 3) * v) ** 2


def _mirror(m: ModelParams, u, v):
    """Map a harmonic-mode point to the plain system's ``u >= 0`` half."""
    if not m.harmonic:
        return u, v
    s = np.where(np.asarray(u) < 0, -1.0, 1.0)
    return np.abs(u), s * v


def invariant_curve_value(m: ModelParams, u, v):
    """The polynomial whose zero set is the family's main invariant curve.

    Duffing: ``V``; dvdp: ``u^n + w2 (u + beta v)``; gen-dvdp:
    ``u + beta v + 2 phi u^n``.
    """
    u, v = _mirror(m, u, v)
    if m.family == "duffing":
        return _duffing_V(m, u, v)
    A = u + float(m.beta) * v
    if m.family == "dvdp":
        return u**m.n + float(m.omega0_sq) * A
    return A + 2 * float(m.phi) * u**m.n


def barrier_values(m: ModelParams, u, v) -> dict:
    """Values of every invariant curve polynomial of the family (plain coordinates)."""
    u, v = _mirror(m, u, v)
    if m.family == "duffing":
        return {"V": _duffing_V(m, u, v)}
    A = u + float(m.beta) * v
    if m.family == "dvdp":
        return {"A": A, "B": u**m.n + float(m.omega0_sq) * A}
    return {"V": A + 2 * float(m.phi) * u**m.n}


def _sgn(x) -> str:
    return "+" if x > 0 else "-"


def classify_region(m: ModelParams, u: float, v: float) -> RegionTag:
    """Total region classification; exact zeros of a defining function are 'boundary'."""
    mu, mv = _mirror(m, u, v)
    mu, mv = float(mu), float(mv)
    prefix = f"u{_sgn(u)}|" if m.harmonic else ""
    if m.harmonic and u == 0:
        return RegionTag(m.family, "boundary")
    if m.family == "duffing":
        S = 2 * mu + (m.n + 3) * mv
        if m.n % 2 == 0 and not m.harmonic:
            V = float(_duffing_V(m, mu, mv))
            if V == 0 or S == 0:
                return RegionTag(m.family, "boundary")
            return RegionTag(m.family, "left" if V < 0 else f"right,S{_sgn(S)}")
        if S == 0 or mu == 0:
            return RegionTag(m.family, "boundary")
        return RegionTag(m.family, f"{prefix}S{_sgn(S)},u{_sgn(mu)}")
    vals = barrier_values(m, u, v)
    if any(float(x) == 0 for x in vals.values()):
        return RegionTag(m.family, "boundary")
    label = ",".join(f"{k}{_sgn(float(x))}" for k, x in vals.items())
    return RegionTag(m.family, prefix + label)


def critical_points(m: ModelParams) -> list[tuple[float, float]]:
    """Real equilibria ``(u, 0)`` of the plain or harmonic system."""
    n, w2 = m.n, float(m.omega0_sq)
    coeffs = np.zeros(2 * n)
    coeffs[-2] = w2  # u^1
    coeffs[-(n + 1)] += 1.0  # u^n
    if m.family == "gen-dvdp":
        coeffs[0] += float(m.phi)  # u^(2n-1)
    coeffs = np.trim_zeros(coeffs, "f")
    roots = np.roots(coeffs) if len(coeffs) > 1 else []
    # multiple roots come back as close clusters (at gen-dvdp's parameters
    # the nonzero roots are double); merge within 1e-6
    real = sorted(float(r.real) for r in roots if abs(r.imag) < 1e-6)
    merged: list[list[float]] = []
    for r in real:
        if merged and r - merged[-1][-1] < 1e-6:
            merged[-1].append(r)
        else:
            merged.append([r])
    us = {0.0}
    for group in merged:
        ur = round(sum(group) / len(group), 9)
        if ur == 0 or (m.harmonic and ur < 0):
            continue
        us.add(ur)
        if m.harmonic:
            us.add(-ur)
    return sorted((u, 0.0) for u in us)


# --------------------------------------------------------------------------
# closed-form integrals
# --------------------------------------------------------------------------

_INTEGRALS = {
    "duffing": ("I1", "I2"),
    "dvdp": ("I3", "I4"),
    "gen-dvdp": ("I5",),
}


def integral_names(m: ModelParams) -> tuple[str, ...]:
    return _INTEGRALS[m.family]


def _region_label(m: ModelParams, name: str, u: float, v: float) -> str | None:
    """Region of validity of integral ``name`` containing the plain point, or None."""
    n = m.n
    if name in ("I1", "I2"):
        S = 2 * u + (n + 3) * v
        V = float(_duffing_V(m, u, v))
        even_plain = n % 2 == 0 and not m.harmonic
        if name == "I1":
            if V <= 0 or S == 0:
                return None
            return ("right," if even_plain else "") + f"S{_sgn(S)}"
        if V < 0:
            return "left" if u < 0 else None
        if V == 0 or u == 0 or u ** (n + 1) <= 0:
            return None
        return f"u{_sgn(u)}"
    if name in ("I3", "I4"):
        A = u + float(m.beta) * v
        B = u**n + float(m.omega0_sq) * A
        if A == 0 or B == 0:
            return None
        inside = (B / A > 0) == (name == "I3")
        if name == "I4" and u == 0:
            return None
        return f"A{_sgn(A)},B{_sgn(B)}" if inside else None
    if name == "I5":
        V = u + float(m.beta) * v + 2 * float(m.phi) * u**n
        return None if V == 0 else f"V{_sgn(V)}"
    raise ValueError(f"unknown integral {name!r}")


def integral_region(m: ModelParams, name: str, u: float, v: float) -> str | None:
    """Region label for integral ``name`` at ``(u, v)``; None where it is not real."""
    if name not in integral_names(m):
        raise ValueError(f"{name} is not an integral of family {m.family}")
    mu, mv = _mirror(m, u, v)
    label = _region_label(m, name, float(mu), float(mv))
    if label is None:
        return None
    if m.harmonic:
        if u == 0:
            return None
        label = f"u{_sgn(u)}|{label}"
    return label


def _boundary_functions(m: ModelParams, name: str):
    """``(f, grad f)`` pairs of the curves bounding the regions of ``name`` (plain coords)."""
    n, w2, beta, phi = m.n, float(m.omega0_sq), float(m.beta), float(m.phi)
    out = []
    if name in ("I1", "I2"):
        out.append((lambda u, v: 2 * u + (n + 3) * v, lambda u, v: (2.0, float(n + 3))))
        if name == "I2":
            out.append((lambda u, v: u, lambda u, v: (1.0, 0.0)))
        if n % 2 == 0 and not m.harmonic:
            variant = v_variant(n)

            def gradV(u, v):
                if variant == "scaled":
                    S = 2 * u + (n + 3) * v
                    return 4 * (n + 1) * u**n + 4 * w2 * S, 2 * (n + 3) * w2 * S
                T = 2 * u + w2 * (n + 3) * v
                return 4 * (n + 1) * u**n + 4 * T, 2 * w2 * (n + 3) * T

            out.append((lambda u, v: _duffing_V(m, u, v), gradV))
    elif name in ("I3", "I4"):
        out.append((lambda u, v: u + beta * v, lambda u, v: (1.0, beta)))
        out.append((lambda u, v: u**n + w2 * (u + beta * v),
                    lambda u, v: (n * u ** (n - 1) + w2, w2 * beta)))
        if name == "I4":
            out.append((lambda u, v: u, lambda u, v: (1.0, 0.0)))
    elif name == "I5":
        out.append((lambda u, v: u + beta * v + 2 * phi * u**n,
                    lambda u, v: (1 + 2 * n * phi * u ** (n - 1), beta)))
    if m.harmonic:
        out.append((lambda u, v: u, lambda u, v: (1.0, 0.0)))
    return out


def boundary_distance(m: ModelParams, name: str, u: float, v: float) -> float:
    """First-order distance ``|f| / |grad f|`` to the nearest boundary curve of ``name``."""
    mu, mv = _mirror(m, u, v)
    mu, mv = float(mu), float(mv)
    best = math.inf
    for f, g in _boundary_functions(m, name):
        gu, gv = g(mu, mv)
        norm = math.hypot(gu, gv)
        val = abs(f(mu, mv))
        best = min(best, val / norm if norm > 0 else (0.0 if val == 0 else math.inf))
    return best


def _as_eval(values, scalar: bool, label_ok):
    if scalar:
        if not label_ok:
            raise DomainError("point outside the region where the integral is real")
        return float(values)
    return values


def _I1_plain(m: ModelParams, u, v, variant: str | None = None, sign=1.0):
    n, w = m.n, math.sqrt(float(m.omega0_sq))
    V = _duffing_V(m, u, v, variant)
    S = 2 * u + (n + 3) * v
    with np.errstate(divide="ignore", invalid="ignore"):
        arg = np.where(V > 0, 4 * u ** (n + 1) / np.where(V > 0, V, 1.0), np.nan)
        ok = (V > 0) & (S != 0) & (arg < 1)
        hyp = _masked(lambda z: gauss_2f1(Fraction(1, 2), Fraction(1, n + 1), Fraction(n + 2, n + 1), z), arg, ok)
        Vs = np.where(ok, V, np.nan)
        return Vs ** (-1.0 / (n + 1)) * (np.sqrt(Vs) + sign * (n - 1) * w * np.sign(S) * u * hyp)


def _I2_plain(m: ModelParams, u, v, sign=1.0):
    n, w2 = m.n, float(m.omega0_sq)
    V = _duffing_V(m, u, v)
    S = 2 * u + (n + 3) * v
    c = (n - 1) / (n + 1) * 2 ** ((n - 1) / (n + 1)) * w2
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(V != 0, 4 * u ** (n + 1) / np.where(V != 0, V, 1.0), np.nan)
        ok = (V != 0) & (u != 0) & (ratio > 0)
        hyp = _masked(lambda z: gauss_2f1(Fraction(1, 2), Fraction(n, n + 1), Fraction(3, 2), z), 1 - ratio, ok)
        aV = np.where(ok, np.abs(V), np.nan)
        # the sign of u is the sign factor on both sides of u = 0; it is folded
        # into the per-region constant left of the invariant curve
        su = np.where(V > 0, np.sign(u), 1.0)
        return aV ** (0.5 - 1.0 / (n + 1)) - sign * c * su * S / np.sqrt(aV) * hyp


def _I3_plain(m: ModelParams, u, v, sign=1.0):
    n, w2, beta = m.n, float(m.omega0_sq), float(m.beta)
    A = u + beta * v
    B = u**n + w2 * A
    with np.errstate(divide="ignore", invalid="ignore"):
        zeta = np.where(A != 0, -(u**n) / (w2 * np.where(A != 0, A, 1.0)), np.nan)
        ok = (A != 0) & (B != 0) & (zeta < 1)
        hyp = _masked(lambda z: gauss_2f1(1, 1, 1 + Fraction(1, n), z), zeta, ok)
        return np.abs(np.where(ok, B, np.nan)) ** (1 - 1 / n) * (1 + sign * (n - 1) * u / A * hyp)


def _I4_plain(m: ModelParams, u, v, sign=1.0):
    n, w2, beta = m.n, float(m.omega0_sq), float(m.beta)
    A = u + beta * v
    B = u**n + w2 * A
    with np.errstate(divide="ignore", invalid="ignore"):
        zeta = np.where(A != 0, -(u**n) / (w2 * np.where(A != 0, A, 1.0)), np.nan)
        ok = (A != 0) & (B != 0) & (zeta > 0)
        hyp = _masked(lambda z: gauss_2f1(1, 1, 2 - Fraction(1, n), z), 1 - zeta, ok)
        return np.abs(np.where(ok, B, np.nan)) ** (1 - 1 / n) * (1 - sign * u / A * hyp)


def _I5_plain(m: ModelParams, u, v, sign=1.0):
    n, beta, phi = m.n, float(m.beta), float(m.phi)
    V = u + beta * v + 2 * phi * u**n
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        z = np.where(V != 0, 2 * (n - 1) * phi * u**n / (n * np.where(V != 0, V, 1.0)), np.nan)
        ok = (V != 0) & (np.abs(z) <= Z_MAX)
        hyp = _masked(lambda s: kummer_1f1(Fraction(1, n), 1 + Fraction(1, n), s), z, ok)
        Vs = np.where(ok, V, np.nan)
        return np.abs(Vs) ** (-1.0 / n) * (np.exp(np.where(ok, z, 0.0)) * Vs + sign * (n - 1) * u * hyp)


def _masked(fn, arg, ok):
    arg = np.asarray(arg, dtype=float)
    ok = np.asarray(ok, dtype=bool)
    out = np.full(arg.shape, np.nan)
    if ok.any():
        out[ok] = fn(arg[ok])
    return out


_PLAIN = {"I1": _I1_plain, "I2": _I2_plain, "I3": _I3_plain, "I4": _I4_plain, "I5": _I5_plain}


@functools.lru_cache(maxsize=None)
def _sign_rule_cached(family: str, n: int, harmonic: bool, name: str) -> tuple:
    from .verify import certify_sign_rule

    m = theorem_model(family, n, harmonic_sign=harmonic)
    return tuple(sorted(certify_sign_rule(m, name).items()))


def sign_rule(m: ModelParams, name: str) -> dict:
    """Per-region unit constants in front of the hypergeometric term.

    Determined numerically (see :func:`liouvillian.verify.certify_sign_rule`)
    at the family's special parameters.  Keys are plain-coordinate labels,
    so harmonic mode looks them up on the mirrored point.
    """
    return dict(_sign_rule_cached(m.family, m.n, m.harmonic, name))


def integral(m: ModelParams, name: str, u, v):
    """Evaluate integral ``name`` at scalar or array ``(u, v)``.

    Arrays return NaN outside the region of validity; scalars raise
    :class:`DomainError` there.
    """
    if name not in integral_names(m):
        raise ValueError(f"{name} is not an integral of family {m.family}")
    scalar = np.ndim(u) == 0 and np.ndim(v) == 0
    uu, vv = np.asarray(u, float), np.asarray(v, float)
    mu, mv = _mirror(m, uu, vv)
    rule = sign_rule(m, name)
    signs = np.ones(np.broadcast(mu, mv).shape)
    if any(s != 1 for s in rule.values()):
        labels = np.vectorize(lambda a, b: _region_label(m, name, a, b) or "", otypes=[object])(mu, mv)
        for lab, s in rule.items():
            signs = np.where(labels == lab, float(s), signs)
    vals = _PLAIN[name](m, mu, mv, sign=signs)
    if m.harmonic:
        vals = np.where(uu == 0, np.nan, vals)
    if scalar:
        val = float(vals)
        if not np.isfinite(val):
            raise DomainError(f"{name} is not real at ({float(u)}, {float(v)}) for {m.describe()}")
        return val
    return vals


def I1(m: ModelParams, u, v):
    return integral(m, "I1", u, v)


def I2(m: ModelParams, u, v):
    return integral(m, "I2", u, v)


def I3(m: ModelParams, u, v):
    return integral(m, "I3", u, v)


def I4(m: ModelParams, u, v):
    return integral(m, "I4", u, v)


def I5(m: ModelParams, u, v):
    return integral(m, "I5", u, v)


# --------------------------------------------------------------------------
# time-dependent integrals
# --------------------------------------------------------------------------


def alpha0(m: ModelParams) -> Fraction:
    """Constant cofactor ``a0`` of the time-dependent quantity ``J`` (``dJ/dt = a0 J``)."""
    n = m.n
    if m.family == "duffing":
        return -(n + 3) * m.omega0_sq
    return Fraction(n * (1 - n), n + 1)


def time_dependent_J(m: ModelParams, u, v, t=0.0):
    """``exp(-a0 t) J(u, v)``, conserved along orbits.

    Duffing: ``J = V/16`` (at ``n = 3`` this is the classical quadratic
    energy-like expression); dvdp: the linear quantity
    ``v + (beta-n)/beta u + beta/n u^n`` with rate ``n/beta``; gen-dvdp:
    ``V^(n-1) exp(2(n-1) phi u^n / V)``.
    """
    n = m.n
    mu, mv = _mirror(m, np.asarray(u, float), np.asarray(v, float))
    sgn = np.where(np.asarray(u) < 0, -1.0, 1.0) if m.harmonic else 1.0
    if m.family == "duffing":
        val = _duffing_V(m, mu, mv, "scaled") / 16.0
        rate = -float(alpha0(m))
    elif m.family == "dvdp":
        beta = float(m.beta)
        val = sgn * (mv + (beta - n) / beta * mu + beta / n * mu**n)
        rate = n / beta
    else:
        beta, phi = float(m.beta), float(m.phi)
        V = mu + beta * mv + 2 * phi * mu**n
        with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
            val = np.where(V != 0, V ** (n - 1) * np.exp(2 * (n - 1) * phi * mu**n / np.where(V != 0, V, 1.0)), 0.0)
        # the mirror flips the sign of V, hence of its odd powers
        val = sgn ** (n - 1) * val
        rate = -float(alpha0(m))
    out = np.exp(rate * np.asarray(t, float)) * val
    return float(out) if np.ndim(out) == 0 else out


def exact_time_dependent_J(m: ModelParams, u: Fraction, v: Fraction) -> Fraction:
    """``J(u, v)`` at ``t = 0`` in exact arithmetic (Duffing and dvdp only)."""
    n = m.n
    u, v = Fraction(u), Fraction(v)
    if m.family == "duffing":
        return (4 * u ** (n + 1) + m.omega0_sq * (2 * u + (n + 3) * v) ** 2) / 16
    if m.family == "dvdp":
        b = m.beta
        return v + (b - n) / b * u + b / n * u**n
    raise ValueError("the gen-dvdp quantity is not rational")

