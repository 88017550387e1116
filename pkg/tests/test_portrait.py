import math
import xml.etree.ElementTree as ET

import numpy as np
import pytest
from hypothesis import given, strategies as st

from liouvillian.oscillators import theorem_model
from liouvillian.portrait import GridSpec, compute_portrait, grid_csv, marching_squares, to_svg


def test_circle_contour():
    us = vs = np.linspace(-2, 2, 81)
    U, V = np.meshgrid(us, vs)
    segs = marching_squares(us, vs, U**2 + V**2, level=1.0)
    pts = np.array([p for s in segs for p in s])
    r = np.hypot(pts[:, 0], pts[:, 1])
    assert np.all(np.abs(r - 1) < 2e-3)
    length = sum(math.dist(a, b) for a, b in segs)
    assert length == pytest.approx(2 * math.pi, rel=2e-3)


def test_contour_skips_invalid_cells():
    us = vs = np.linspace(-1, 1, 21)
    U, V = np.meshgrid(us, vs)
    valid = U < 0
    segs = marching_squares(us, vs, U + V, valid=valid)
    assert segs and all(p[0] <= 0 for s in segs for p in s)
    nan_vals = np.where(U < 0, U + V, np.nan)
    assert marching_squares(us, vs, nan_vals) == segs


@given(st.integers(0, 15), st.floats(0.1, 1.0))
def test_single_cell_cases(code, mag):
    corners = [mag if code >> k & 1 else -mag for k in range(4)]
    bl, br, tr, tl = corners
    vals = np.array([[bl, br], [tl, tr]])
    segs = marching_squares(np.array([0.0, 1.0]), np.array([0.0, 1.0]), vals)
    expected = {0: 0, 15: 0, 5: 2, 10: 2}.get(code, 1)
    assert len(segs) == expected
    for a, b in segs:
        for u, v in (a, b):
            assert 0 <= u <= 1 and 0 <= v <= 1
            assert u in (0.0, 1.0) or v in (0.0, 1.0)


def test_grid_spec_validation():
    with pytest.raises(ValueError):
        GridSpec(resolution=1)
    with pytest.raises(ValueError):
        GridSpec(u_range=(1, -1))
    with pytest.raises(ValueError):
        GridSpec(v_range=(0, math.inf))


def test_degenerate_grid_csv():
    p = compute_portrait(theorem_model("duffing", 3), GridSpec(resolution=2))
    rows = grid_csv(p).splitlines()
    assert rows[0] == "u,v,value,region,masked"
    assert len(rows) == 5
    for row in rows[1:]:
        assert len(row.split(",")) == 5
    ET.fromstring(to_svg(p))


def test_svg_is_well_formed_and_layered():
    p = compute_portrait(theorem_model("gen-dvdp", 3), GridSpec(resolution=81))
    root = ET.fromstring(to_svg(p))
    ids = [g.get("id") for g in root.iter("{http://www.w3.org/2000/svg}g")]
    assert ids == ["mask", "contours", "discontinuity", "invariant", "critical"]
    assert p.invariant_curves["V"]
    assert len(p.critical) == 1


def test_masked_nodes_are_nan():
    p = compute_portrait(theorem_model("dvdp", 3), GridSpec(resolution=61))
    assert np.all(np.isnan(p.values[p.mask]))
    assert np.all(np.isfinite(p.values[~p.mask]))
    assert np.all(p.labels[p.mask] == "")
    assert p.mask.any() and (~p.mask).any()


def test_portrait_is_deterministic():
    m = theorem_model("duffing", 5)
    a = to_svg(compute_portrait(m, GridSpec(resolution=41)))
    b = to_svg(compute_portrait(m, GridSpec(resolution=41)))
    assert a == b
