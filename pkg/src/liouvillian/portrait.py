"""Phase portraits as data: integral values on a grid, masks, contours, SVG.

Level sets come from a small marching-squares pass over the grid.  Cells
touching a masked node are skipped, so contours never bridge the lines
where an integral jumps.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np

from . import oscillators as osc
from .oscillators import ModelParams

__all__ = [
    "GridSpec",
    "Portrait",
    "compute_portrait",
    "marching_squares",
    "to_svg",
    "svg_layers",
    "grid_csv",
]


@dataclass(frozen=True)
class GridSpec:
    u_range: tuple = (-2.0, 2.0)
    v_range: tuple = (-2.0, 2.0)
    resolution: int = 401

    def __post_init__(self):
        if int(self.resolution) < 2:
            raise ValueError("resolution must be at least 2")
        for lo, hi in (self.u_range, self.v_range):
            if not (math.isfinite(lo) and math.isfinite(hi) and lo < hi):
                raise ValueError("grid ranges must be finite and ordered")

    def axes(self):
        r = int(self.resolution)
        return np.linspace(*self.u_range, r), np.linspace(*self.v_range, r)


@dataclass
class Portrait:
    model: ModelParams
    grid: GridSpec
    us: np.ndarray
    vs: np.ndarray
    values: np.ndarray  # indexed [iv, iu]; NaN where masked or not real
    labels: np.ndarray  # "<integral>:<region>", "" where no integral is real
    mask: np.ndarray  # True where excluded
    contours: dict = field(default_factory=dict)  # label -> segments
    discontinuities: list = field(default_factory=list)
    invariant_curves: dict = field(default_factory=dict)  # curve name -> segments
    critical: list = field(default_factory=list)


# corner bits bl=1, br=2, tr=4, tl=8; edges 0 bottom, 1 right, 2 top, 3 left
_CASES = {
    1: [(3, 0)], 2: [(0, 1)], 3: [(3, 1)], 4: [(1, 2)], 5: [(3, 2), (1, 0)],
    6: [(0, 2)], 7: [(3, 2)], 8: [(2, 3)], 9: [(2, 0)], 10: [(2, 1), (0, 3)],
    11: [(2, 1)], 12: [(1, 3)], 13: [(1, 0)], 14: [(0, 3)],
}
# saddles whose centre lies on the positive side join the positive corners
_SADDLE_JOINED = {5: [(0, 1), (2, 3)], 10: [(3, 0), (1, 2)]}


def marching_squares(us, vs, values, level: float = 0.0, valid=None) -> list:
    """Segments ``((u0, v0), (u1, v1))`` of the ``level`` set of ``values[iv, iu]``.

    Cells with a non-finite or invalid corner are skipped.
    """
    F = np.asarray(values, float) - level
    ok = np.isfinite(F)
    if valid is not None:
        ok &= valid
    F = np.where(ok, F, 0.0)
    bl, br, tr, tl = F[:-1, :-1], F[:-1, 1:], F[1:, 1:], F[1:, :-1]
    cell_ok = ok[:-1, :-1] & ok[:-1, 1:] & ok[1:, 1:] & ok[1:, :-1]
    code = (bl > 0) * 1 + (br > 0) * 2 + (tr > 0) * 4 + (tl > 0) * 8
    code = np.where(cell_ok, code, 0)
    segs = []
    for iv, iu in zip(*np.nonzero((code != 0) & (code != 15))):
        c = int(code[iv, iu])
        f = (bl[iv, iu], br[iv, iu], tr[iv, iu], tl[iv, iu])
        u0, u1, v0, v1 = us[iu], us[iu + 1], vs[iv], vs[iv + 1]
        pairs = _CASES[c]
        if c in _SADDLE_JOINED and sum(f) > 0:
            pairs = _SADDLE_JOINED[c]

        def point(e):
            if e == 0:
                return (u0 + (u1 - u0) * f[0] / (f[0] - f[1]), v0)
            if e == 1:
                return (u1, v0 + (v1 - v0) * f[1] / (f[1] - f[2]))
            if e == 2:
                return (u1 + (u0 - u1) * f[2] / (f[2] - f[3]), v1)
            return (u0, v1 + (v0 - v1) * f[3] / (f[3] - f[0]))

        segs.extend((point(a), point(b)) for a, b in pairs)
    return segs


def _dilate(mask: np.ndarray, radius: int) -> np.ndarray:
    out = mask.copy()
    for _ in range(radius):
        grown = out.copy()
        grown[1:, :] |= out[:-1, :]
        grown[:-1, :] |= out[1:, :]
        grown[:, 1:] |= out[:, :-1]
        grown[:, :-1] |= out[:, 1:]
        out = grown
    return out


def _sign_change(values: np.ndarray) -> np.ndarray:
    """Nodes with a neighbour of the opposite sign (or a zero)."""
    s = np.sign(values)
    hit = s == 0
    hit[1:, :] |= s[1:, :] * s[:-1, :] < 0
    hit[:-1, :] |= s[1:, :] * s[:-1, :] < 0
    hit[:, 1:] |= s[:, 1:] * s[:, :-1] < 0
    hit[:, :-1] |= s[:, 1:] * s[:, :-1] < 0
    return hit


def _boundary_grids(m: ModelParams, names, U, V) -> list:
    MU, MV = osc._mirror(m, U, V)
    out, seen = [], set()
    for name in names:
        for f, _ in osc._boundary_functions(m, name):
            vals = np.asarray(f(MU, MV), float) * np.ones_like(U)
            key = vals.tobytes()
            if key not in seen:
                seen.add(key)
                out.append(vals)
    if m.harmonic:
        out.append(U.copy())
    return out


def _discontinuity_grids(m: ModelParams, U, V) -> list:
    """Lines where a sign factor of the integrals flips (not invariant curves)."""
    MU, MV = osc._mirror(m, U, V)
    if m.family == "duffing":
        return [2 * MU + (m.n + 3) * MV, MU]
    if m.family == "dvdp":
        return [MU]
    return []


def _invariant_grids(m: ModelParams, U, V) -> dict:
    vals = osc.barrier_values(m, U, V)
    if m.family == "duffing" and (m.n % 2 == 1 or m.harmonic):
        # V >= 0 there: the curve degenerates to the origin
        return {}
    return {k: np.asarray(x, float) for k, x in vals.items()}


def compute_portrait(m: ModelParams, grid: GridSpec | None = None, integrals=None,
                     mask_radius: int = 1, levels: int = 16) -> Portrait:
    """Evaluate the family's integrals on ``grid`` and extract every layer.

    At each node the first integral in ``integrals`` (default: all of the
    family's, in order) that is real there is used.  Nodes within
    ``mask_radius`` cells of a sign change of any region-defining function
    are masked.  Contour levels are per-region quantiles of the values.
    """
    grid = grid or GridSpec()
    names = tuple(integrals or osc.integral_names(m))
    us, vs = grid.axes()
    U, V = np.meshgrid(us, vs)
    values = np.full(U.shape, np.nan)
    labels = np.full(U.shape, "", dtype=object)
    for name in names:
        todo = np.isnan(values)
        if not todo.any():
            break
        vals = np.full(U.shape, np.nan)
        with np.errstate(all="ignore"):
            vals[todo] = osc.integral(m, name, U[todo], V[todo])
        new = todo & np.isfinite(vals)
        values[new] = vals[new]
        for iv, iu in zip(*np.nonzero(new)):
            lab = osc.integral_region(m, name, U[iv, iu], V[iv, iu])
            labels[iv, iu] = f"{name}:{lab}" if lab else ""
    edge = np.zeros(U.shape, bool)
    for g in _boundary_grids(m, names, U, V):
        edge |= _sign_change(g)
    mask = _dilate(edge, mask_radius) | ~np.isfinite(values) | (labels == "")
    values = np.where(mask, np.nan, values)
    labels = np.where(mask, "", labels)

    portrait = Portrait(m, grid, us, vs, values, labels, mask)
    for lab in sorted(set(labels[~mask].ravel())):
        region = labels == lab
        vals = values[region]
        if vals.size < 4:
            continue
        qs = np.quantile(vals, np.linspace(0.05, 0.95, levels))
        segs = []
        for q in np.unique(qs):
            segs.extend(marching_squares(us, vs, values, q, valid=region))
        portrait.contours[lab] = segs
    for g in _discontinuity_grids(m, U, V):
        portrait.discontinuities.extend(marching_squares(us, vs, g))
    for key, g in _invariant_grids(m, U, V).items():
        portrait.invariant_curves[key] = marching_squares(us, vs, g)
    (ulo, uhi), (vlo, vhi) = grid.u_range, grid.v_range
    portrait.critical = [p for p in osc.critical_points(m) if ulo <= p[0] <= uhi and vlo <= p[1] <= vhi]
    return portrait


def grid_csv(p: Portrait) -> str:
    """Grid as CSV rows ``u,v,value,region,masked`` (``nan`` for masked values)."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["u", "v", "value", "region", "masked"])
    for iv, v in enumerate(p.vs):
        for iu, u in enumerate(p.us):
            val = p.values[iv, iu]
            sval = "nan" if not np.isfinite(val) else f"{val:.12g}"
            w.writerow([f"{u:.6g}", f"{v:.6g}", sval, p.labels[iv, iu], int(p.mask[iv, iu])])
    return buf.getvalue()


_SIZE = 600


def _xform(p: Portrait):
    (ulo, uhi), (vlo, vhi) = p.grid.u_range, p.grid.v_range

    def xy(u, v):
        return (u - ulo) / (uhi - ulo) * _SIZE, (vhi - v) / (vhi - vlo) * _SIZE

    return xy


def _path(segs, xy) -> str:
    parts = []
    for a, b in segs:
        x0, y0 = xy(*a)
        x1, y1 = xy(*b)
        parts.append(f"M{x0:.2f} {y0:.2f}L{x1:.2f} {y1:.2f}")
    return "".join(parts)


def _mask_rects(p: Portrait, xy) -> list[str]:
    """Masked nodes as one rectangle per horizontal run, centred on the nodes."""
    du = (p.us[-1] - p.us[0]) / (len(p.us) - 1)
    dv = (p.vs[-1] - p.vs[0]) / (len(p.vs) - 1)
    w = du / (p.grid.u_range[1] - p.grid.u_range[0]) * _SIZE
    h = dv / (p.grid.v_range[1] - p.grid.v_range[0]) * _SIZE
    rects = []
    for iv in range(len(p.vs)):
        row = p.mask[iv]
        iu = 0
        while iu < len(row):
            if not row[iu]:
                iu += 1
                continue
            start = iu
            while iu < len(row) and row[iu]:
                iu += 1
            x, y = xy(p.us[start], p.vs[iv])
            rects.append(f'<rect x="{x - w / 2:.2f}" y="{y - h / 2:.2f}" '
                         f'width="{w * (iu - start):.2f}" height="{h:.2f}"/>')
    return rects


def svg_layers(p: Portrait) -> dict[str, str]:
    """The SVG group bodies keyed by layer id."""
    xy = _xform(p)
    layers = {"mask": "\n".join(_mask_rects(p, xy))}
    layers["contours"] = "\n".join(
        f'<path class="level" data-region="{lab}" d="{_path(segs, xy)}"/>'
        for lab, segs in p.contours.items() if segs)
    layers["discontinuity"] = f'<path d="{_path(p.discontinuities, xy)}"/>' if p.discontinuities else ""
    layers["invariant"] = "\n".join(
        f'<path data-curve="{k}" d="{_path(segs, xy)}"/>' for k, segs in p.invariant_curves.items() if segs)
    marks = []
    for u, v in p.critical:
        x, y = xy(u, v)
        marks.append(f'<circle cx="{x:.2f}" cy="{y:.2f}" r="4" data-u="{u:.6g}" data-v="{v:.6g}"/>')
    layers["critical"] = "\n".join(marks)
    return layers


_STYLE = {
    "mask": 'fill="#dddddd" stroke="none"',
    "contours": 'fill="none" stroke="#3060a0" stroke-width="0.6"',
    "discontinuity": 'fill="none" stroke="#000000" stroke-width="1" stroke-dasharray="4 3"',
    "invariant": 'fill="none" stroke="#d02020" stroke-width="1.6"',
    "critical": 'fill="#ffffff" stroke="#000000" stroke-width="1.2"',
}


def to_svg(p: Portrait) -> str:
    layers = svg_layers(p)
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_SIZE}" height="{_SIZE}" '
        f'viewBox="0 0 {_SIZE} {_SIZE}">',
        f"<title>{p.model.describe()}</title>",
        f'<rect width="{_SIZE}" height="{_SIZE}" fill="#ffffff"/>',
    ]
    for name in ("mask", "contours", "discontinuity", "invariant", "critical"):
        out.append(f'<g id="{name}" {_STYLE[name]}>')
        if layers[name]:
            out.append(layers[name])
        out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"
