"""Write the phase portraits of all three families as SVG files.

``python demos/gallery.py out_dir``
"""

import sys
import time
from pathlib import Path

from liouvillian import oscillators as osc
from liouvillian.portrait import GridSpec, compute_portrait, to_svg

CASES = [("duffing", 5, None), ("duffing", 4, False), ("dvdp", 3, None),
         ("gen-dvdp", 3, None), ("gen-dvdp", 4, False)]

out = Path(sys.argv[1] if len(sys.argv) > 1 else "portraits")
out.mkdir(parents=True, exist_ok=True)
for family, n, harmonic in CASES:
    t0 = time.perf_counter()
    m = osc.theorem_model(family, n, harmonic_sign=harmonic)
    p = compute_portrait(m, GridSpec(resolution=401))
    path = out / f"{family}-{n}{'-plain' if harmonic is False else ''}.svg"
    path.write_text(to_svg(p))
    curves = ", ".join(f"{k}: {len(s)} segments" for k, s in p.invariant_curves.items()) or "none"
    print(f"{path} ({time.perf_counter() - t0:.1f}s) critical points {p.critical}; invariant curves {curves}")
