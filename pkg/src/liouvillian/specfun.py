"""Real-argument hypergeometric functions and incomplete beta/gamma.

``gauss_2f1`` and ``kummer_1f1`` are evaluated from their power series,
moved into the fast-converging range with the Pfaff, Euler and Kummer
transformations and the connection formula around ``z = 1``.  Both accept
scalars or numpy arrays for the argument; parameters are exact rationals
(ints and floats are accepted too) converted to double once.
"""

from __future__ import annotations

import math
from fractions import Fraction
from numbers import Rational

import numpy as np
from scipy import special as sc

__all__ = [
    "SeriesDivergence",
    "gauss_2f1",
    "kummer_1f1",
    "inc_beta",
    "inc_gamma",
    "chebyshev_elementary",
    "Z_MAX",
]

Z_MAX = 700.0
SERIES_RTOL = 1e-17
MAX_TERMS = 10_000
_DIRECT_RADIUS = 0.75


class SeriesDivergence(ArithmeticError):
    """A series did not reach the termination tolerance within the term cap."""


def _nonpos_int(x) -> bool:
    if isinstance(x, Rational):
        return Fraction(x).denominator == 1 and x <= 0
    return float(x) <= 0 and float(x) == math.floor(float(x))


def _as_array(z):
    arr = np.asarray(z, dtype=float)
    return arr, arr.ndim == 0


def _series_2f1(a: float, b: float, c: float, z: np.ndarray) -> np.ndarray:
    total = np.ones_like(z)
    term = np.ones_like(z)
    for k in range(MAX_TERMS):
        term = term * ((a + k) * (b + k) / ((c + k) * (k + 1))) * z
        total = total + term
        if np.all(np.abs(term) <= SERIES_RTOL * np.abs(total)):
            return total
    raise SeriesDivergence(f"2F1({a}, {b}; {c}) series did not converge in {MAX_TERMS} terms")


def _terminating_2f1(a, b, c, z: np.ndarray) -> np.ndarray:
    top = -int(min(Fraction(x) for x in (a, b) if _nonpos_int(x)))
    af, bf, cf = float(a), float(b), float(c)
    total = np.ones_like(z)
    term = np.ones_like(z)
    for k in range(top):
        term = term * ((af + k) * (bf + k) / ((cf + k) * (k + 1))) * z
        total = total + term
    return total


def _log_case(a: float, b: float, m: int, w: np.ndarray) -> np.ndarray:
    """``2F1(a, b; a+b+m; 1 - w)`` for integer ``m >= 0`` and small ``w > 0``.

    Limit form of the connection formula (Abramowitz & Stegun 15.3.10-11);
    ``a`` and ``b`` must not be non-positive integers.
    """
    logw = np.log(w)
    c = a + b + m
    finite = np.zeros_like(w)
    if m > 0:
        pref = math.gamma(m) * sc.gamma(c) * sc.rgamma(a + m) * sc.rgamma(b + m)
        term = 1.0
        for n in range(m):
            finite = finite + term * w**n
            if n + 1 < m:
                term *= (a + n) * (b + n) / ((n + 1) * (1 - m + n))
        finite = pref * finite
    pref = sc.gamma(c) * sc.rgamma(a) * sc.rgamma(b)
    sign = -((-1.0) ** m)
    total = np.zeros_like(w)
    coef = 1.0 / math.factorial(m)
    wn = np.ones_like(w)
    for n in range(MAX_TERMS):
        bracket = (
            logw - sc.psi(n + 1) - sc.psi(n + m + 1) + sc.psi(a + n + m) + sc.psi(b + n + m)
        )
        term = coef * wn * bracket
        total = total + term
        if np.all(np.abs(term) <= SERIES_RTOL * np.maximum(np.abs(total), 1e-300)):
            break
        coef *= (a + m + n) * (b + m + n) / ((n + 1) * (n + m + 1))
        wn = wn * w
    else:
        raise SeriesDivergence("logarithmic 2F1 series did not converge")
    return finite + sign * pref * w**m * total


def _near_one(a, b, c, w: np.ndarray) -> np.ndarray:
    """``2F1`` at ``z = 1 - w`` for ``0 < w < 0.25`` via the linear transformation to ``w``.

    The complement is passed in directly so it keeps full relative precision.
    """
    s = Fraction(c) - Fraction(a) - Fraction(b) if all(isinstance(x, Rational) for x in (a, b, c)) else None
    af, bf, cf = float(a), float(b), float(c)
    sf = cf - af - bf
    if (s is not None and s.denominator == 1) or (s is None and sf == round(sf)):
        m = int(round(sf))
        if m >= 0:
            return _log_case(af, bf, m, w)
        # Euler transform maps c-a-b = -m to +m
        return w**m * _log_case(cf - af, cf - bf, -m, w)
    g1 = sc.gamma(cf) * sc.gamma(sf) * sc.rgamma(cf - af) * sc.rgamma(cf - bf)
    g2 = sc.gamma(cf) * sc.gamma(-sf) * sc.rgamma(af) * sc.rgamma(bf)
    out = np.zeros_like(w)
    if g1 != 0.0:
        out = out + g1 * _series_2f1(af, bf, 1.0 - sf, w)
    if g2 != 0.0:
        out = out + g2 * w**sf * _series_2f1(cf - af, cf - bf, 1.0 + sf, w)
    return out


def _unit_interval(a, b, c, z: np.ndarray, w: np.ndarray) -> np.ndarray:
    """``2F1`` for ``0 <= z < 1``; ``w = 1 - z`` supplied by the caller."""
    out = np.empty_like(z)
    small = z <= _DIRECT_RADIUS
    if small.any():
        out[small] = _series_2f1(float(a), float(b), float(c), z[small])
    if (~small).any():
        out[~small] = _near_one(a, b, c, w[~small])
    return out


def gauss_2f1(a, b, c, z):
    """Gauss hypergeometric function on the real branch ``z < 1``."""
    if _nonpos_int(c):
        raise ValueError(f"2F1 undefined for non-positive integer c = {c}")
    arr, scalar = _as_array(z)
    if np.any(~np.isfinite(arr)) or np.any(arr >= 1.0):
        raise ValueError("2F1 real branch requires z < 1")
    if _nonpos_int(a) or _nonpos_int(b):
        out = _terminating_2f1(a, b, c, arr)
        return float(out) if scalar else out
    flat = arr.reshape(-1)
    out = np.empty_like(flat)
    direct = np.abs(flat) <= _DIRECT_RADIUS
    if direct.any():
        out[direct] = _series_2f1(float(a), float(b), float(c), flat[direct])
    pos = (flat > _DIRECT_RADIUS)
    if pos.any():
        out[pos] = _near_one(a, b, c, 1.0 - flat[pos])
    neg = flat < -_DIRECT_RADIUS
    if neg.any():
        # Pfaff: 2F1(a,b;c;z) = (1-z)^-a 2F1(a, c-b; c; z/(z-1))
        zn = flat[neg]
        w = zn / (zn - 1.0)
        wc = 1.0 / (1.0 - zn)
        cb = Fraction(c) - Fraction(b) if isinstance(c, Rational) and isinstance(b, Rational) else float(c) - float(b)
        if _nonpos_int(cb):
            inner = _terminating_2f1(cb, a, c, w)
        else:
            inner = _unit_interval(a, cb, c, w, wc)
        out[neg] = (1.0 - zn) ** (-float(a)) * inner
    out = out.reshape(arr.shape)
    return float(out) if scalar else out


def kummer_1f1(a, b, z, z_max: float = Z_MAX):
    """Confluent hypergeometric function ``1F1(a; b; z)`` for ``|z| <= z_max``."""
    if _nonpos_int(b):
        raise ValueError(f"1F1 undefined for non-positive integer b = {b}")
    arr, scalar = _as_array(z)
    if np.any(~np.isfinite(arr)) or np.any(np.abs(arr) > z_max):
        raise ValueError(f"1F1 argument exceeds |z| <= {z_max}")
    af, bf = float(a), float(b)
    flat = arr.reshape(-1)
    out = np.empty_like(flat)
    pos = flat >= 0
    if pos.any():
        out[pos] = _series_1f1(af, bf, flat[pos])
    if (~pos).any():
        # Kummer: 1F1(a;b;z) = e^z 1F1(b-a; b; -z)
        zn = flat[~pos]
        out[~pos] = np.exp(zn) * _series_1f1(bf - af, bf, -zn)
    out = out.reshape(arr.shape)
    return float(out) if scalar else out


def _series_1f1(a: float, b: float, z: np.ndarray) -> np.ndarray:
    total = np.ones_like(z)
    term = np.ones_like(z)
    for k in range(MAX_TERMS):
        term = term * ((a + k) / ((b + k) * (k + 1))) * z
        total = total + term
        if np.all(np.abs(term) <= SERIES_RTOL * np.abs(total)):
            return total
    raise SeriesDivergence(f"1F1({a}; {b}) series did not converge in {MAX_TERMS} terms")


def inc_beta(z, a, b):
    """Non-normalised incomplete beta ``B_z(a, b)`` for ``0 <= z <= 1``, ``a > 0``."""
    if float(a) <= 0:
        raise ValueError("inc_beta requires a > 0")
    arr, scalar = _as_array(z)
    if np.any((arr < 0) | (arr > 1)):
        raise ValueError("inc_beta requires 0 <= z <= 1")
    af, bf = float(a), float(b)
    if bf > 0:
        out = sc.betainc(af, bf, arr) * sc.beta(af, bf)
    else:
        if np.any(arr >= 1):
            raise ValueError("B_1(a, b) diverges for b <= 0")
        out = arr**af / af * gauss_2f1(a, 1 - Fraction(b) if isinstance(b, Rational) else 1 - bf,
                                       Fraction(a) + 1 if isinstance(a, Rational) else af + 1, arr)
    return float(out) if scalar else np.asarray(out)


def inc_gamma(s, z):
    """Upper incomplete gamma ``Gamma(s, z)`` for ``z >= 0``."""
    arr, scalar = _as_array(z)
    if np.any(arr < 0):
        raise ValueError("inc_gamma requires z >= 0")
    out = _upper_gamma(float(s), arr)
    return float(out) if scalar else out


def _upper_gamma(s: float, z: np.ndarray) -> np.ndarray:
    if s > 0:
        return sc.gammaincc(s, z) * sc.gamma(s)
    if np.any(z == 0):
        raise ValueError("Gamma(s, 0) diverges for s <= 0")
    if s == 0:
        return sc.exp1(z)
    # Gamma(s, z) = (Gamma(s+1, z) - z^s e^-z) / s
    return (_upper_gamma(s + 1, z) - z**s * np.exp(-z)) / s


def chebyshev_elementary(p, q, r) -> bool:
    """Whether ``int z^p (A + B z^r)^q dz`` is elementary (Chebyshev's criterion)."""
    p, q, r = Fraction(p), Fraction(q), Fraction(r)
    if r == 0:
        raise ValueError("r must be nonzero")
    t = (p + 1) / r
    return any(x.denominator == 1 for x in (t, q, q + t))
