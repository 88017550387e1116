"""Search for Darboux polynomials, exponential elements and parameter conditions.

The cofactor search is a bounded-height scan: cofactor coefficients are
drawn from the rationals ``p/q`` with ``|p|, |q| <= height_bound``.  For a
fixed cofactor ``K`` the equation ``D F = K F`` is linear in the
coefficients of ``F``.  The scan is layered by degree: the top homogeneous
component of ``D F - K F`` involves only the top parts of ``F``, ``K`` and
``D``, so the leading cofactor coefficients are scanned first and the
remaining ones only for survivors.  A vectorised floating point
rank test is used purely as a prefilter; every reported pair comes from an
exact nullspace and is re-certified exactly.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Sequence, Union

import numpy as np
import sympy

from . import _linalg
from .polyring import Derivation, MPoly, UPoly, apply_derivation, exact_divide, grlex_key

__all__ = [
    "AnsatzTooLarge",
    "ExpElement",
    "DarbouxPair",
    "ParameterCondition",
    "monomials",
    "height_rationals",
    "cofactor_of",
    "find_darboux",
    "find_exp_elements",
    "find_parameter_conditions",
    "verify_pair",
    "format_pair",
]

DEFAULT_HEIGHT = 12
DEFAULT_MAX_CANDIDATES = 2_000_000

# rank-deficiency thresholds for the floating point prefilter
_PREFILTER_TOL = 1e-9
_PENCIL_TOL = 1e-6


class AnsatzTooLarge(ValueError):
    """The requested search would enumerate too many candidates."""


@dataclass(frozen=True)
class ExpElement:
    """The element ``exp(g/h)``; ``h`` is itself a Darboux polynomial."""

    g: MPoly
    h: MPoly

    def __post_init__(self):
        if self.h.is_zero():
            raise ValueError("exponential element with zero denominator")

    def __str__(self):
        return f"exp(({self.g})/({self.h}))"


@dataclass(frozen=True)
class DarbouxPair:
    f: Union[MPoly, ExpElement]
    k: MPoly
    certified: bool = False
    reducible: bool = False

    @property
    def is_exponential(self) -> bool:
        return isinstance(self.f, ExpElement)


@dataclass(frozen=True)
class ParameterCondition:
    """A polynomial condition on the parameter for a cofactor to admit ``F``.

    ``condition`` is the gcd of the sampled maximal minors of the linear
    system ``D F = K F`` with ``K`` fixed to ``cofactor``; ``roots`` are its
    rational roots that were certified by substitution, ``pairs`` the
    matching Darboux pairs and ``unresolved`` the part of ``condition``
    without rational roots.
    """

    parameter: str
    condition: UPoly
    roots: tuple
    cofactor: MPoly
    pairs: tuple = ()
    unresolved: UPoly = field(default_factory=lambda: UPoly((1,)))


def monomials(nvars: int, deg: int, exact: bool = False) -> list[tuple]:
    """Exponent vectors of total degree ``<= deg`` (or ``== deg``), graded-lex ascending."""
    out = []
    lo = deg if exact else 0
    for d in range(lo, deg + 1):
        for combo in itertools.combinations_with_replacement(range(nvars), d):
            e = [0] * nvars
            for i in combo:
                e[i] += 1
            out.append(tuple(e))
    return sorted(set(out), key=grlex_key)


def height_rationals(height: int) -> list[Fraction]:
    """All rationals ``p/q`` with ``|p| <= height`` and ``1 <= q <= height``."""
    vals = {Fraction(p, q) for p in range(-height, height + 1) for q in range(1, height + 1)}
    return sorted(vals)


def cofactor_of(D: Derivation, f: MPoly) -> MPoly | None:
    """``D f / f`` if it is a polynomial, else ``None``."""
    if f.is_zero():
        return None
    return exact_divide(apply_derivation(D, f), f)


def verify_pair(D: Derivation, p: DarbouxPair) -> bool:
    """Exact check of the defining identity of a Darboux pair."""
    if isinstance(p.f, ExpElement):
        g, h = p.f.g, p.f.h
        lhs = h * apply_derivation(D, g) - g * apply_derivation(D, h)
        return (lhs - p.k * h * h).is_zero()
    return (apply_derivation(D, p.f) - p.k * p.f).is_zero()


def format_pair(p: DarbouxPair) -> str:
    return f"F = {p.f} ; K = {p.k} ; reducible={str(p.reducible).lower()}"


# --------------------------------------------------------------------------
# the linear system D F - K F = 0
# --------------------------------------------------------------------------


class _System:
    """Coefficient matrices of ``D F - K F`` for an ansatz of degree ``deg_f``.

    Rows are monomials of the product, columns the monomials of ``F``.
    ``M(K) = A - sum_i K_i * B_i`` where ``A`` carries ``D`` applied to each
    column monomial and ``B_i`` is multiplication by the ``i``-th cofactor
    monomial.  Entries of ``A`` may be :class:`UPoly` in parametric mode.
    """

    def __init__(self, D: Derivation, deg_f: int):
        nv = len(D.variables)
        self.D = D
        self.deg_f = deg_f
        self.kdeg = max(D.degree - 1, 0)
        self.fmonos = monomials(nv, deg_f)
        self.kmonos = monomials(nv, self.kdeg)
        self.rows = monomials(nv, deg_f + self.kdeg)
        self.row_index = {e: i for i, e in enumerate(self.rows)}
        self.A = [[Fraction(0)] * len(self.fmonos) for _ in self.rows]
        for j, m in enumerate(self.fmonos):
            dm = apply_derivation(D, MPoly.monomial(D.variables, m))
            for e, c in dm.terms.items():
                self.A[self.row_index[e]][j] = c
        self.B = []
        for km in self.kmonos:
            b = np.zeros((len(self.rows), len(self.fmonos)))
            for j, m in enumerate(self.fmonos):
                b[self.row_index[tuple(a + c for a, c in zip(km, m))], j] = 1.0
            self.B.append(b)
        self.B = np.array(self.B)
        self.A0, self.A1 = _split_affine(self.A)

    def top_rows(self) -> list[int]:
        d = self.deg_f + self.kdeg
        return [i for i, e in enumerate(self.rows) if sum(e) == d]

    def top_cols(self) -> list[int]:
        return [j for j, m in enumerate(self.fmonos) if sum(m) == self.deg_f]

    def top_kidx(self) -> list[int]:
        return [i for i, m in enumerate(self.kmonos) if sum(m) == self.kdeg]

    def low_kidx(self) -> list[int]:
        return [i for i, m in enumerate(self.kmonos) if sum(m) < self.kdeg]

    def exact_matrix(self, kvals: Sequence[Fraction], rows=None, cols=None, lam=None):
        rows = range(len(self.rows)) if rows is None else rows
        cols = range(len(self.fmonos)) if cols is None else cols
        out = []
        for r in rows:
            line = []
            for c in cols:
                v = self.A[r][c]
                if lam is not None and isinstance(v, UPoly):
                    v = v(lam)
                for i, km in enumerate(self.kmonos):
                    if kvals[i] and self.B[i, r, c]:
                        v = v - kvals[i]
                line.append(v)
            out.append(line)
        return out

    def cofactor_poly(self, kvals: Sequence[Fraction]) -> MPoly:
        return MPoly(self.D.variables, dict(zip(self.kmonos, kvals)))

    def poly_from_vector(self, vec: Sequence[Fraction]) -> MPoly:
        return MPoly(self.D.variables, dict(zip(self.fmonos, vec)))


def _split_affine(A):
    """Split a matrix with entries in Q or Q[lam] (degree <= 1) as ``A0 + lam*A1``."""
    a0 = np.zeros((len(A), len(A[0]) if A else 0))
    a1 = np.zeros_like(a0)
    for i, row in enumerate(A):
        for j, v in enumerate(row):
            if isinstance(v, UPoly):
                if v.degree > 1:
                    raise ValueError("parameter must enter the derivation linearly")
                cs = v.coeffs + (Fraction(0),) * (2 - len(v.coeffs))
                a0[i, j] = float(cs[0])
                a1[i, j] = float(cs[1])
            else:
                a0[i, j] = float(v)
    return a0, a1


def _smallest_singular(mats: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Smallest and largest singular values of a stack, with rank padding.

    When a matrix has fewer rows than columns its kernel is never trivial;
    that is reported as a smallest singular value of zero.
    """
    n, r, c = mats.shape
    if n == 0:
        return np.zeros(0), np.zeros(0)
    s = np.linalg.svd(mats, compute_uv=False)
    smax = s[:, 0] if s.shape[1] else np.zeros(n)
    smin = s[:, -1] if r >= c else np.zeros(n)
    return smin, smax


def _rank_deficient(mats: np.ndarray, tol: float) -> np.ndarray:
    smin, smax = _smallest_singular(mats)
    return smin <= tol * np.maximum(1.0, smax)


def _candidate_grid(values: np.ndarray, count: int, cap: int) -> np.ndarray:
    total = len(values) ** count
    if total > cap:
        raise AnsatzTooLarge(
            f"{total} cofactor candidates exceed the cap of {cap}; lower height_bound or degree"
        )
    if count == 0:
        return np.zeros((1, 0), dtype=int)
    idx = np.indices((len(values),) * count).reshape(count, -1).T
    return idx


def _pencil_roots(a0: np.ndarray, a1: np.ndarray, rng: np.random.Generator):
    """Approximate real parameter values where ``a0[i] + lam*a1`` loses rank.

    Returns one entry per stack element: ``None`` when the pencil is
    singular (rank deficient for every value), else a list of candidate
    real roots.  Roots come from a random square compression of the
    rectangular pencil, so true roots are always included.
    """
    n, r, c = a0.shape
    if r < c:
        return [None] * n
    w = rng.standard_normal((c, r))
    shift = 0.3141592653589793
    s = np.einsum("cr,nrk->nck", w, a0 + shift * a1)
    t = w @ a1
    smin, smax = _smallest_singular(a0 + shift * a1)
    out: list = [None] * n
    singular = smin <= 1e-10 * np.maximum(1.0, smax)
    ok = ~singular
    if ok.any():
        x = np.linalg.solve(s[ok], np.broadcast_to(t, (int(ok.sum()), c, c)))
        mu = np.linalg.eigvals(x)
        for pos, i in enumerate(np.flatnonzero(ok)):
            lams = []
            for m in mu[pos]:
                if abs(m) > 1e-12 and abs(m.imag) <= 1e-6 * abs(m):
                    lams.append(shift - 1.0 / m.real)
            out[i] = lams
    return out


# --------------------------------------------------------------------------
# Darboux polynomial search
# --------------------------------------------------------------------------


def find_darboux(
    D: Derivation,
    deg_f: int,
    height_bound: int = DEFAULT_HEIGHT,
    max_candidates: int = DEFAULT_MAX_CANDIDATES,
    _cache: dict | None = None,
) -> list[DarbouxPair]:
    """Darboux polynomials of exact total degree ``deg_f`` with height-bounded cofactors.

    Each returned polynomial is monic in its graded-lex leading term and
    certified exactly.  A polynomial divisible by a Darboux polynomial of
    lower degree (found by the same search) is flagged ``reducible``.
    Absence from the result is not a proof of nonexistence: only cofactors
    within the height bound are scanned.
    """
    if deg_f < 1:
        raise ValueError("deg_f must be at least 1")
    if D.is_parametric():
        raise ValueError("substitute the parameter first, or use find_parameter_conditions")
    cache = {} if _cache is None else _cache
    key = (deg_f, height_bound)
    if key in cache:
        return cache[key]

    sysm = _System(D, deg_f)
    cands = height_rationals(height_bound)
    cvals = np.array([float(c) for c in cands])
    found: dict[MPoly, DarbouxPair] = {}
    for kvals in _scan_cofactors(sysm, cands, cvals, max_candidates):
        mat = sysm.exact_matrix(kvals)
        for vec in _linalg.nullspace(mat, len(sysm.fmonos)):
            F = sysm.poly_from_vector(vec)
            if F.degree() != deg_f:
                continue
            F = F.monic()
            K = sysm.cofactor_poly(kvals)
            if F not in found:
                found[F] = DarbouxPair(F, K, certified=verify_pair(D, DarbouxPair(F, K)))

    lower: list[DarbouxPair] = []
    for d in range(1, deg_f):
        lower.extend(find_darboux(D, d, height_bound, max_candidates, cache))
    out = []
    for F in sorted(found):
        p = found[F]
        red = any(exact_divide(F, q.f) is not None for q in lower)
        out.append(replace(p, reducible=red))
    cache[key] = out
    return out


def _scan_cofactors(sysm: _System, cands, cvals, cap):
    """Yield exact cofactor coefficient vectors that pass both scan layers."""
    top_k, low_k = sysm.top_kidx(), sysm.low_kidx()
    tr, tc = sysm.top_rows(), sysm.top_cols()
    a_top = sysm.A0[np.ix_(tr, tc)]
    b_top = sysm.B[np.ix_(top_k, tr, tc)] if top_k else np.zeros((0, len(tr), len(tc)))
    grid = _candidate_grid(cvals, len(top_k), cap)
    survivors = []
    for chunk in np.array_split(grid, max(1, len(grid) // 50_000)):
        mats = a_top[None] - np.einsum("nt,trc->nrc", cvals[chunk], b_top)
        survivors.extend(chunk[_rank_deficient(mats, _PREFILTER_TOL)])

    low_grid = _candidate_grid(cvals, len(low_k), cap)
    for top_idx in survivors:
        top_vals = [cands[i] for i in top_idx]
        kv = [Fraction(0)] * len(sysm.kmonos)
        for i, v in zip(top_k, top_vals):
            kv[i] = v
        if _linalg.rank(sysm.exact_matrix(kv, tr, tc)) == len(tc):
            continue
        base = sysm.A0 - np.einsum("t,trc->rc", np.array([float(v) for v in top_vals]), sysm.B[top_k])
        mats = base[None] - np.einsum("nl,lrc->nrc", cvals[low_grid], sysm.B[low_k])
        for li in low_grid[_rank_deficient(mats, _PREFILTER_TOL)]:
            kvals = list(kv)
            for i, c in zip(low_k, li):
                kvals[i] = cands[c]
            yield kvals


# --------------------------------------------------------------------------
# exponential elements
# --------------------------------------------------------------------------


def find_exp_elements(
    D: Derivation, known: Sequence[DarbouxPair], deg_g: int
) -> list[DarbouxPair]:
    """Exponential elements ``exp(g/h)`` with polynomial cofactor.

    Denominators ``h`` are the polynomial Darboux polynomials in ``known``
    plus the constant 1.  Writing ``D h = k h``, ``exp(g/h)`` has
    polynomial cofactor ``L`` iff ``D g - k g = L h``, a homogeneous
    linear system in the coefficients of ``g`` and ``L``; the trivial
    direction ``g ~ h`` is removed by fixing one coefficient of ``g``.
    """
    nv = len(D.variables)
    kdeg = max(D.degree - 1, 0)
    one = MPoly.constant(D.variables, 1)
    denominators = [(one, MPoly(D.variables))]
    denominators += [(p.f, p.k) for p in known if not p.is_exponential and not p.f.is_constant()]
    polys = [p.f for p in known if not p.is_exponential and not p.f.is_constant()]
    out: list[DarbouxPair] = []
    seen = set()
    for h, kh in denominators:
        gmonos = monomials(nv, deg_g)
        lmonos = monomials(nv, kdeg)
        cols: list[MPoly] = []
        for m in gmonos:
            g = MPoly.monomial(D.variables, m)
            cols.append(apply_derivation(D, g) - kh * g)
        for m in lmonos:
            cols.append(-(MPoly.monomial(D.variables, m) * h))
        rowkeys = sorted({e for c in cols for e in c.terms}, key=grlex_key)
        mat = [[c.coeff(e) for c in cols] for e in rowkeys]
        if h.degree() <= deg_g:
            pin = min(h.terms, key=grlex_key)
            mat.append([Fraction(int(m == pin)) for m in gmonos] + [Fraction(0)] * len(lmonos))
        if not mat:
            continue
        for vec in _linalg.nullspace(mat, len(cols)):
            g = MPoly(D.variables, dict(zip(gmonos, vec[: len(gmonos)])))
            L = MPoly(D.variables, dict(zip(lmonos, vec[len(gmonos):])))
            if g.is_zero() or g.is_constant():
                continue
            if any(exact_divide(g, q) is not None for q in polys if exact_divide(h, q) is not None):
                continue
            _, lc = g.leading_term()
            g, L = g * (1 / lc), L * (1 / lc)
            el = ExpElement(g, h)
            if el in seen:
                continue
            seen.add(el)
            pair = DarbouxPair(el, L)
            out.append(replace(pair, certified=verify_pair(D, pair)))
    return out


# --------------------------------------------------------------------------
# parameter conditions
# --------------------------------------------------------------------------


def _rational_roots(p: UPoly) -> list[tuple[Fraction, int]]:
    if p.degree <= 0:
        return []
    lam = sympy.Symbol("lam")
    poly = sympy.Poly([sympy.Rational(c.numerator, c.denominator) for c in reversed(p.coeffs)], lam)
    roots = []
    for fac, mult in poly.factor_list()[1]:
        if fac.degree() == 1:
            a, b = fac.all_coeffs()
            r = -sympy.Rational(b) / sympy.Rational(a)
            roots.append((Fraction(int(r.p), int(r.q)), mult))
    return sorted(roots)


def _condition_polynomial(mat: list[list[UPoly]], ncols: int, rng: random.Random) -> UPoly | None:
    """gcd of maximal minors; ``None`` when the rank is deficient for every value."""
    piv = _linalg.upoly_pivot_rows(mat)
    if len(piv) < ncols:
        return None
    g = _linalg.det_bareiss([mat[i] for i in piv])
    subsets = list(itertools.combinations(range(len(mat)), ncols))
    if len(subsets) > 24:
        subsets = rng.sample(subsets, 24)
    for sub in subsets:
        if g.degree <= 0:
            break
        d = _linalg.det_bareiss([mat[i] for i in sub])
        if d:
            g = g.gcd(d)
    return g.monic()


def find_parameter_conditions(
    D: Derivation,
    deg_f: int,
    height_bound: int = DEFAULT_HEIGHT,
    max_candidates: int = DEFAULT_MAX_CANDIDATES,
    seed: int = 0,
) -> list[ParameterCondition]:
    """Conditions on the single parameter of ``D`` for degree-``deg_f`` Darboux polynomials.

    Cofactors are scanned exactly as in :func:`find_darboux`; for each
    surviving cofactor the linear system is formed over Q[lam] and the
    gcd of its maximal minors gives the condition.  Rational roots are
    certified by substituting them and recomputing the nullspace exactly.
    Cofactors admitting a solution for every parameter value carry no
    condition and are omitted.
    """
    if not D.is_parametric():
        raise ValueError("derivation has no parameter")
    names = {c.name for P in D.components for c in P.terms.values() if isinstance(c, UPoly)}
    if len(names) != 1:
        raise ValueError(f"exactly one parameter is supported, found {sorted(names)}")
    pname = names.pop()
    sysm = _System(D, deg_f)
    cands = height_rationals(height_bound)
    cvals = np.array([float(c) for c in cands])
    rng = np.random.default_rng(seed)
    prng = random.Random(seed)

    top_k, low_k = sysm.top_kidx(), sysm.low_kidx()
    tr, tc = sysm.top_rows(), sysm.top_cols()
    a0t, a1t = sysm.A0[np.ix_(tr, tc)], sysm.A1[np.ix_(tr, tc)]
    b_top = sysm.B[np.ix_(top_k, tr, tc)]
    grid = _candidate_grid(cvals, len(top_k), max_candidates)
    low_grid = _candidate_grid(cvals, len(low_k), max_candidates)

    top_survivors = []
    for chunk in np.array_split(grid, max(1, len(grid) // 50_000)):
        mats = a0t[None] - np.einsum("nt,trc->nrc", cvals[chunk], b_top)
        if not a1t.any():
            for i in chunk[_rank_deficient(mats, _PREFILTER_TOL)]:
                top_survivors.append((i, None))
            continue
        for i, m, lams in zip(chunk, mats, _pencil_roots(mats, a1t, rng)):
            if lams is None:
                top_survivors.append((i, None))
                continue
            good = [lam for lam in lams if _rank_deficient((m + lam * a1t)[None], _PENCIL_TOL)[0]]
            if good:
                top_survivors.append((i, good))

    candidates = []
    for top_idx, lams in top_survivors:
        kv = [Fraction(0)] * len(sysm.kmonos)
        for i, c in zip(top_k, top_idx):
            kv[i] = cands[c]
        base = sysm.A0 - np.einsum("t,trc->rc", cvals[top_idx], sysm.B[top_k])
        mats = base[None] - np.einsum("nl,lrc->nrc", cvals[low_grid], sysm.B[low_k])
        if lams is None:
            roots = _pencil_roots(mats, sysm.A1, rng)
            keep = []
            for li, rs in zip(low_grid, roots):
                if rs is None:
                    keep.append(li)
                    continue
                m = base - np.einsum("l,lrc->rc", cvals[li], sysm.B[low_k])
                if any(_rank_deficient((m + lam * sysm.A1)[None], _PENCIL_TOL)[0] for lam in rs):
                    keep.append(li)
        else:
            ok = np.zeros(len(low_grid), dtype=bool)
            for lam in lams:
                ok |= _rank_deficient(mats + lam * sysm.A1[None], _PENCIL_TOL)
            keep = list(low_grid[ok])
        for li in keep:
            kvals = list(kv)
            for i, c in zip(low_k, li):
                kvals[i] = cands[c]
            candidates.append(kvals)

    out = []
    seen = set()
    for kvals in candidates:
        mat = [[v if isinstance(v, UPoly) else UPoly((v,), pname) for v in row]
               for row in sysm.exact_matrix(kvals)]
        cond = _condition_polynomial(mat, len(sysm.fmonos), prng)
        if cond is None or cond.degree <= 0:
            continue
        K = sysm.cofactor_poly(kvals)
        roots, pairs = [], []
        rest = cond
        for r, mult in _rational_roots(cond):
            rest = rest.exact_div(UPoly((-r, 1), pname) ** mult)
            Dr = D.subs_param(r)
            num = sysm.exact_matrix(kvals, lam=r)
            polys = []
            for vec in _linalg.nullspace(num, len(sysm.fmonos)):
                F = sysm.poly_from_vector(vec)
                if F.degree() == deg_f:
                    polys.append(F.monic())
            certified = [DarbouxPair(F, K, certified=True) for F in polys
                         if verify_pair(Dr, DarbouxPair(F, K))]
            if certified:
                roots.append(r)
                pairs.extend((r, p) for p in certified)
        if not roots and rest.degree <= 0:
            continue
        key = (tuple(cond.coeffs), str(K))
        if key in seen:
            continue
        seen.add(key)
        out.append(ParameterCondition(pname, cond, tuple(roots), K, tuple(pairs), rest))
    out.sort(key=lambda c: (c.roots, str(c.cofactor)))
    return out
