"""From the Duffing vector field to a conserved hypergeometric quantity.

Run with ``python demos/duffing_walkthrough.py [n]`` (default n = 5).
"""

import sys

import numpy as np

from liouvillian import darboux, oscillators as osc, verify
from liouvillian.constructions import build_form, family_pairs
from liouvillian.elements import constant_cofactor_combination


def main(n: int = 5) -> None:
    m = osc.theorem_model("duffing", n)
    print(m.describe())

    D = osc.derivation(m, coords="power")
    print("\nDarboux polynomials of degree 2 in x = u^(n-1), y = v/u:")
    for p in darboux.find_darboux(D, 2):
        print("  ", darboux.format_pair(p))

    pairs = list(family_pairs(m).values())
    exps, a0 = constant_cofactor_combination(pairs)
    print(f"\nexponents {[str(e) for e in exps]} give the constant cofactor {a0}")
    # V/16 is a power of that product, so it decays at a proportional rate
    print(f"J = V/16 in (u, v) has dJ/dt = {osc.alpha0(m)} J")

    form = build_form(m)
    print(f"integral kind {form.kind}, hypergeometric parameters {[str(c) for c in form.hyper_params]}")

    p0 = (0.8, -0.3)
    traj = verify.integrate(m, p0, t_end=10.0, tol=1e-11)
    for name in osc.integral_names(m):
        rep = verify.conservation_check(traj, name)
        print(f"{name} along the orbit from {p0}: relative drift {rep.max_drift:.1e}")
    rep = verify.conservation_check(verify.integrate(m, p0, 10.0, 1e-13, method="DOP853"), "J")
    print(f"J exp(-a0 t): relative drift {rep.max_drift:.1e}")
    u_end, v_end = traj.u[-1], traj.v[-1]
    print(f"the orbit ends at ({u_end:.3e}, {v_end:.3e}), |p| = {np.hypot(u_end, v_end):.1e}")


if __name__ == "__main__":
    main(int(sys.argv[1]) if len(sys.argv) > 1 else 5)
