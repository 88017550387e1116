"""Darboux polynomials and hypergeometric first integrals of damped nonlinear oscillators.

Modules:

* ``polyring``  exact sparse polynomials over Q (and Q[lam])
* ``darboux``   Darboux polynomial, exponential element and parameter searches
* ``elements``  Darboux elements and the two hypergeometric integral constructions
* ``specfun``   real 2F1, 1F1, incomplete beta/gamma, Chebyshev's test
* ``oscillators`` the three oscillator families and their closed-form integrals
* ``verify``    ODE integration and conservation checks
* ``portrait``  grids, marching-squares contours and SVG output
* ``cli``       the ``liouvillian`` command
"""

from .oscillators import ModelParams, theorem_model

__version__ = "0.1.0"
__all__ = ["ModelParams", "theorem_model", "__version__"]
