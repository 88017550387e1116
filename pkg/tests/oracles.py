"""Independent reference values: adaptive quadrature of the Euler integrals."""

import math

from scipy.integrate import quad

QUAD = dict(epsabs=0.0, epsrel=2e-14, limit=500)


def euler_2f1(a, b, c, z):
    """``Gamma(c)/(Gamma(b)Gamma(c-b)) * int_0^1 t^(b-1) (1-t)^(c-b-1) (1-zt)^(-a) dt``, c > b > 0."""
    val, _ = quad(lambda t: (1.0 - z * t) ** (-a), 0.0, 1.0, weight="alg", wvar=(b - 1, c - b - 1), **QUAD)
    return math.exp(math.lgamma(c) - math.lgamma(b) - math.lgamma(c - b)) * val


def euler_1f1(a, b, z):
    """``Gamma(b)/(Gamma(a)Gamma(b-a)) * int_0^1 e^(zt) t^(a-1) (1-t)^(b-a-1) dt``, b > a > 0."""
    val, _ = quad(lambda t: math.exp(z * t), 0.0, 1.0, weight="alg", wvar=(a - 1, b - a - 1), **QUAD)
    return math.exp(math.lgamma(b) - math.lgamma(a) - math.lgamma(b - a)) * val


def beta_integral(z, a, b):
    """``int_0^z t^(a-1) (1-t)^(b-1) dt`` for ``0 <= z < 1``."""
    val, _ = quad(lambda t: (1.0 - t) ** (b - 1), 0.0, z, weight="alg", wvar=(a - 1, 0), **QUAD)
    return val


def upper_gamma_integral(s, z):
    """``int_z^inf t^(s-1) e^(-t) dt`` for ``z >= 0``."""
    # the decaying tail leaves 2e-14 out of reach on the finite piece
    quad_opts = {**QUAD, "epsrel": 1e-13}
    if z == 0:
        head, _ = quad(lambda t: math.exp(-t), 0.0, 1.0, weight="alg", wvar=(s - 1, 0), **quad_opts)
    else:
        head, _ = quad(lambda t: t ** (s - 1) * math.exp(-t), z, z + 1.0, **quad_opts)
    tail, _ = quad(lambda t: t ** (s - 1) * math.exp(-t), z + 1.0, math.inf, **quad_opts)
    return head + tail


def rel_err(got, want):
    return abs(got - want) / max(abs(want), 1e-300)
