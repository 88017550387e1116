"""Numerical checks: adaptive integration, conservation drift, directional derivatives."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable

import numpy as np
from scipy.integrate import solve_ivp

from . import oscillators as osc
from .oscillators import DomainError, ModelParams

__all__ = [
    "NumericalFailure",
    "Trajectory",
    "DriftReport",
    "VerifyRow",
    "integrate",
    "conservation_check",
    "exponential_law_check",
    "fd_directional_derivative",
    "certify_sign_rule",
    "sample_region_points",
    "run_suite",
    "SuiteResult",
    "CSV_HEADER",
]

ESCAPE_RADIUS = 1e3
DEFAULT_MARGIN = 0.05


class NumericalFailure(ArithmeticError):
    """Step-size underflow or a non-finite state during integration."""


@dataclass
class Trajectory:
    t: np.ndarray
    u: np.ndarray
    v: np.ndarray
    tol: tuple
    model: object
    escaped: bool = False

    @property
    def samples(self):
        return list(zip(self.t, zip(self.u, self.v)))

    def __len__(self):
        return len(self.t)


@dataclass
class DriftReport:
    quantity: str
    max_drift: float
    values: np.ndarray
    region_stable: bool
    segments: list = field(default_factory=list)

    def passed(self, threshold: float) -> bool:
        return bool(self.max_drift < threshold)


def _field(m) -> Callable:
    if isinstance(m, ModelParams):
        return lambda u, v: osc.vector_field(m, u, v)
    return m


def integrate(m, p0, t_end: float, tol: float = 1e-10, samples: int = 200,
              escape_radius: float = ESCAPE_RADIUS, method: str = "RK45") -> Trajectory:
    """Integrate from ``p0`` over ``[0, t_end]`` with an adaptive embedded Runge-Kutta pair.

    ``m`` is a :class:`ModelParams` or a callable ``(u, v) -> (du, dv)``.
    ``method`` is 'RK45' (Dormand-Prince 5(4)) or 'DOP853' for the
    high-accuracy runs; ``tol`` bounds both the absolute and relative
    local error.
    Output is sampled densely at ``samples`` equally spaced times (one
    sample when ``t_end == 0``).  Integration stops early, with
    ``escaped=True``, if the state leaves the disc of ``escape_radius``.
    """
    if not 1e-14 <= tol <= 1e-4:
        raise ValueError("tol must lie in [1e-14, 1e-4]")
    if method not in ("RK45", "DOP853"):
        raise ValueError(f"unknown method {method!r}")
    if samples < 2:
        raise ValueError("need at least two samples")
    u0, v0 = float(p0[0]), float(p0[1])
    if not (math.isfinite(u0) and math.isfinite(v0)):
        raise NumericalFailure("non-finite initial state")
    if t_end == 0:
        return Trajectory(np.zeros(1), np.array([u0]), np.array([v0]), (tol, tol), m)
    f = _field(m)

    def rhs(t, y):
        du, dv = f(y[0], y[1])
        return [du, dv]

    def escape(t, y):
        return escape_radius - math.hypot(y[0], y[1])

    escape.terminal = True
    t_eval = np.linspace(0.0, t_end, samples)
    sol = solve_ivp(rhs, (0.0, t_end), [u0, v0], method=method, rtol=tol, atol=tol,
                    max_step=0.1, t_eval=t_eval, events=escape)
    if sol.status == -1:
        raise NumericalFailure(f"integration failed: {sol.message}")
    if not np.all(np.isfinite(sol.y)):
        raise NumericalFailure("non-finite state during integration")
    return Trajectory(sol.t, sol.y[0], sol.y[1], (tol, tol), m, escaped=sol.status == 1)


def _segments(labels: list) -> list[tuple[str, list[int]]]:
    """Runs of equal labels, skipping ``None`` entries."""
    segs: list[tuple[str, list[int]]] = []
    for i, lab in enumerate(labels):
        if lab is None:
            continue
        if segs and segs[-1][0] == lab:
            segs[-1][1].append(i)
        else:
            segs.append((lab, [i]))
    return segs


def _drift(vals: np.ndarray, floor: float) -> float:
    if len(vals) < 2:
        return 0.0
    ref = vals[0]
    return float(np.max(np.abs(vals - ref)) / max(abs(ref), floor))


def conservation_check(traj: Trajectory, which, margin: float = DEFAULT_MARGIN,
                       floor: float = 1e-300) -> DriftReport:
    """Drift of a conserved quantity along a trajectory.

    ``which`` is the name of a closed-form integral ('I1' ... 'I5'), 'J' for
    the time-weighted quantity, or a callable ``(u, v) -> value``.  Closed
    forms are only compared within one region: the trajectory is split at
    region changes and samples within ``margin`` of a region boundary are
    skipped.  The reported drift is the largest per-segment drift.
    """
    m = traj.model
    n = len(traj.t)
    if callable(which):
        vals = np.array([float(which(u, v)) for u, v in zip(traj.u, traj.v)])
        labels = ["all"] * n
        name = getattr(which, "__name__", "custom")
    elif which == "J":
        vals = np.asarray(osc.time_dependent_J(m, traj.u, traj.v, traj.t), float)
        labels = ["all"] * n
        name = "J"
    else:
        name = which
        labels = []
        for u, v in zip(traj.u, traj.v):
            lab = osc.integral_region(m, which, u, v)
            if lab is not None and osc.boundary_distance(m, which, u, v) <= margin:
                lab = None
            labels.append(lab)
        vals = np.full(n, np.nan)
        keep = [i for i, lab in enumerate(labels) if lab is not None]
        if keep:
            vals[keep] = osc.integral(m, which, traj.u[keep], traj.v[keep])
        labels = [lab if lab is not None and np.isfinite(vals[i]) else None
                  for i, lab in enumerate(labels)]
    segs = _segments(labels)
    seg_rows = []
    worst = 0.0
    for lab, idx in segs:
        d = _drift(vals[idx], floor)
        seg_rows.append((lab, d, len(idx)))
        worst = max(worst, d)
    return DriftReport(name, worst, vals, len(segs) <= 1, seg_rows)


def exponential_law_check(traj: Trajectory, J: Callable, alpha0: float,
                          floor: float = 1e-300) -> DriftReport:
    """Drift of ``J(p(t)) exp(-alpha0 t)``, constant when ``dJ/dt = alpha0 J``."""
    vals = np.array([J(u, v) for u, v in zip(traj.u, traj.v)]) * np.exp(-alpha0 * traj.t)
    return DriftReport("J*exp(-a0 t)", _drift(vals, floor), vals, True, [("all", _drift(vals, floor), len(vals))])


def fd_directional_derivative(m, I: Callable, p, h: float = 1e-6, normalized: bool = False) -> float:
    """Central-difference estimate of ``P dI/du + Q dI/dv`` at ``p``.

    ``h`` is relative: the step in each coordinate is ``h * max(1, |coord|)``.
    With ``normalized`` the result is divided by ``|grad I| |(P, Q)|``.
    """
    u, v = float(p[0]), float(p[1])
    hu, hv = h * max(1.0, abs(u)), h * max(1.0, abs(v))
    try:
        vals = [float(I(u + hu, v)), float(I(u - hu, v)), float(I(u, v + hv)), float(I(u, v - hv))]
    except DomainError as exc:
        raise DomainError(f"evaluation failed on the stencil around {p}: {exc}") from exc
    if not all(math.isfinite(x) for x in vals):
        raise DomainError(f"non-finite value on the stencil around {p}")
    Iu = (vals[0] - vals[1]) / (2 * hu)
    Iv = (vals[2] - vals[3]) / (2 * hv)
    P, Q = _field(m)(u, v)
    P, Q = float(P), float(Q)
    out = P * Iu + Q * Iv
    if normalized:
        scale = math.hypot(Iu, Iv) * math.hypot(P, Q)
        return out / scale if scale > 0 else 0.0
    return out


def sample_region_points(m: ModelParams, name: str, per_region: int, rng: np.random.Generator,
                         margin: float = DEFAULT_MARGIN, box: float = 2.0,
                         max_tries: int = 200_000, min_radius: float = 0.1) -> dict:
    """Random points in each region of integral ``name``, away from its boundaries."""
    out: dict = {}
    batch = 2000
    tried = 0
    while tried < max_tries:
        pts = rng.uniform(-box, box, size=(batch, 2))
        tried += batch
        for u, v in pts:
            if math.hypot(u, v) < min_radius:
                continue
            lab = osc.integral_region(m, name, u, v)
            if lab is None or len(out.get(lab, [])) >= per_region:
                continue
            if osc.boundary_distance(m, name, u, v) <= margin:
                continue
            out.setdefault(lab, []).append((float(u), float(v)))
        if out and all(len(p) >= per_region for p in out.values()) and tried >= 4 * batch:
            break
    return {k: out[k] for k in sorted(out)}


def certify_sign_rule(m: ModelParams, name: str, probes: int = 10, seed: int = 0,
                      threshold: float = 1e-5) -> dict:
    """Per-region sign constant of a closed-form integral, fixed numerically.

    In every region exactly one of ``+1``/``-1`` in front of the
    hypergeometric term must make the normalized finite-difference
    derivative along the flow vanish at all probe points.
    """
    from .elements import StructureError

    rng = np.random.default_rng(seed)
    pts = sample_region_points(m, name, probes, rng, margin=0.1)
    plain = osc._PLAIN[name]
    rule = {}
    for lab, ps in pts.items():
        passing = []
        for s in (1.0, -1.0):
            def f(u, v, s=s):
                mu, mv = osc._mirror(m, np.asarray(u, float), np.asarray(v, float))
                return float(plain(m, mu, mv, sign=s))

            try:
                ok = all(abs(fd_directional_derivative(m, f, p, normalized=True)) < threshold for p in ps)
            except DomainError:
                ok = False
            if ok:
                passing.append(int(s))
        key = osc._region_label(m, name, *map(float, osc._mirror(m, *ps[0])))
        if len(passing) != 1:
            raise StructureError(f"{name} region {lab}: {len(passing)} sign constants pass")
        rule[key] = passing[0]
    return rule


@dataclass(frozen=True)
class VerifyRow:
    family: str
    n: int
    region: str
    integral: str
    p0_u: float
    p0_v: float
    drift: float
    passed: bool

    def csv(self) -> str:
        return _csv_line([self.family, self.n, self.region, self.integral, f"{self.p0_u:.12g}",
                          f"{self.p0_v:.12g}", f"{self.drift:.3e}", str(self.passed).lower()])


def _csv_line(fields: list) -> str:
    # region labels such as "A+,B+" contain commas and get quoted
    buf = io.StringIO()
    csv.writer(buf, lineterminator="").writerow(fields)
    return buf.getvalue()


CSV_HEADER = "family,n,region,integral,p0_u,p0_v,drift,pass"


@dataclass
class SuiteResult:
    rows: list
    # initial points whose orbit left the escape disc before t_end (finite-time blow-up)
    escaped: list = field(default_factory=list)

    @property
    def all_passed(self) -> bool:
        return all(r.passed for r in self.rows)

    def csv(self) -> str:
        return "\n".join([CSV_HEADER] + [r.csv() for r in self.rows]) + "\n"


def run_suite(models: Iterable[ModelParams], per_region: int = 20, seed: int = 0,
              t_end: float = 10.0, tol: float = 1e-11, threshold: float = 1e-7,
              j_threshold: float = 1e-8, j_tol: float = 1e-13, margin: float = DEFAULT_MARGIN,
              include_j: bool = True, max_draws: int = 5) -> SuiteResult:
    """Conservation runs over random initial points in every region of every integral.

    Each closed-form integral is checked on an RK45 orbit at ``tol``.  The
    time-weighted quantity is checked on the same initial point with DOP853
    at ``j_tol``: its relative error grows with the gap between the decay
    rates of the invariant curve and of the state, so it needs the more
    accurate orbit.  Initial points whose orbit blows up before ``t_end``
    are redrawn (up to ``max_draws`` times the requested count) and listed
    in ``SuiteResult.escaped``.
    """
    rows, escaped = [], []
    for m in models:
        rng = np.random.default_rng([seed, m.n, osc.FAMILIES.index(m.family)])
        for name in osc.integral_names(m):
            pools = sample_region_points(m, name, per_region * max_draws, rng, margin=margin)
            for lab, pts in pools.items():
                used = 0
                for p0 in pts:
                    if used == per_region:
                        break
                    traj = integrate(m, p0, t_end, tol)
                    if traj.escaped:
                        escaped.append((m.family, m.n, name, lab, p0))
                        continue
                    used += 1
                    rep = conservation_check(traj, name, margin=margin)
                    rows.append(VerifyRow(m.family, m.n, lab, name, p0[0], p0[1],
                                          rep.max_drift, rep.max_drift < threshold))
                    if include_j:
                        jt = integrate(m, p0, t_end, j_tol, method="DOP853")
                        jr = conservation_check(jt, "J")
                        rows.append(VerifyRow(m.family, m.n, lab, "J", p0[0], p0[1],
                                              jr.max_drift, jr.max_drift < j_threshold))
    return SuiteResult(rows, escaped)
