"""Command-line front end.

Usage: ``liouvillian <command> <action> [options]``.  Options may also
come from a flat ``key=value`` file given with ``--config``; flags on the
command line win over the file, and the file wins over the defaults.

Exit codes: 0 success, 2 precondition or domain error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import replace
from fractions import Fraction
from pathlib import Path

from . import constructions, darboux, oscillators as osc, portrait, specfun, verify
from .elements import StructureError
from .oscillators import DomainError

EXIT_OK, EXIT_DOMAIN, EXIT_NUMERIC = 0, 2, 3

_DEFAULT_DEG = {"duffing": 2, "dvdp": 1, "gen-dvdp": 1}


class CliError(Exception):
    def __init__(self, message: str, code: int = EXIT_DOMAIN):
        super().__init__(message)
        self.code = code


# --------------------------------------------------------------------------
# argument helpers
# --------------------------------------------------------------------------


def _rat(text: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from exc


def _pair(text: str) -> tuple[float, float]:
    parts = text.split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"expected 'a,b', got {text!r}")
    try:
        return float(parts[0]), float(parts[1])
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected two numbers, got {text!r}") from exc


def _int_list(text: str) -> list[int]:
    return [int(t) for t in text.split(",") if t.strip()]


class _AppendOverride(argparse.Action):
    """Like ``append``, but the first command-line use discards the default list."""

    def __call__(self, parser, namespace, values, option_string=None):
        seen = f"_{self.dest}_given"
        items = list(getattr(namespace, self.dest) or []) if getattr(namespace, seen, False) else []
        setattr(namespace, self.dest, items + [values])
        setattr(namespace, seen, True)


def read_config(path: str) -> dict:
    """Flat ``key = value`` file; ``#`` starts a comment, dashes in keys become underscores."""
    out = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise CliError(f"{path}:{lineno}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        out[key.replace("-", "_")] = value
    return out


def _add_model_args(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("model")
    g.add_argument("--family", choices=osc.FAMILIES, default="duffing")
    g.add_argument("--n", type=int, default=3)
    g.add_argument("--omega0sq", type=_rat, help="default: the family's special value")
    g.add_argument("--beta", type=_rat)
    g.add_argument("--phi", type=_rat)
    g.add_argument("--harmonic-sign", choices=("auto", "on", "off"), default="auto",
                   help="read u^n as |u|^(n-1) u (auto: on for even n)")


def model_from_args(a) -> osc.ModelParams:
    hs = {"auto": None, "on": True, "off": False}[a.harmonic_sign]
    try:
        m = osc.theorem_model(a.family, a.n, harmonic_sign=hs)
    except ValueError as exc:
        raise CliError(str(exc)) from exc
    kw = {k: getattr(a, k) for k in ("omega0sq", "beta", "phi") if getattr(a, k) is not None}
    if "omega0sq" in kw:
        kw["omega0_sq"] = kw.pop("omega0sq")
    return replace(m, **kw) if kw else m


# --------------------------------------------------------------------------
# commands
# --------------------------------------------------------------------------


def _csv_line(fields: list) -> str:
    buf = io.StringIO()
    csv.writer(buf, lineterminator="").writerow(fields)
    return buf.getvalue()


def _emit(out, fmt: str, record: dict, text: str) -> None:
    out.write((json.dumps(record, sort_keys=True) if fmt == "json-lines" else text) + "\n")


def _pair_record(p: darboux.DarbouxPair) -> dict:
    return {"F": str(p.f), "K": str(p.k), "reducible": p.reducible, "certified": p.certified}


def cmd_darboux_search(a, out) -> int:
    m = model_from_args(a)
    D = osc.derivation(m, coords=a.coords)
    deg = a.deg or _DEFAULT_DEG[m.family]
    try:
        pairs = darboux.find_darboux(D, deg, a.height, a.max_candidates)
    except darboux.AnsatzTooLarge as exc:
        raise CliError(str(exc)) from exc
    if a.format != "json-lines":
        out.write(f"# {m.describe()} ; P = {D.components[0]} ; Q = {D.components[1]}\n")
    for p in pairs:
        _emit(out, a.format, _pair_record(p), darboux.format_pair(p))
    # powers and products of lower-degree polynomials always exist once those do
    if a.expect_found and not any(not p.reducible for p in pairs):
        print(f"no irreducible Darboux polynomial of degree {deg} within height {a.height}",
              file=sys.stderr)
        return EXIT_DOMAIN
    return EXIT_OK


def _admits_exp_element(D, pairs) -> bool:
    return any(q.certified for q in darboux.find_exp_elements(D, pairs, 1))


def cmd_darboux_conditions(a, out) -> int:
    m = model_from_args(a)
    D = osc.derivation(m, coords=a.coords, param=a.param)
    deg = a.deg or _DEFAULT_DEG[m.family]
    conds = darboux.find_parameter_conditions(D, deg, a.height, a.max_candidates, seed=a.seed)
    rows = []
    for c in conds:
        for root, pair in c.pairs:
            if a.require_exp and not _admits_exp_element(D.subs_param(root), [pair]):
                continue
            rows.append((root, c, pair))
    rows.sort(key=lambda r: (r[0], str(r[2].k)))
    for root, c, pair in rows:
        rec = {"parameter": a.param, "value": str(root), "condition": str(c.condition),
               **_pair_record(pair)}
        _emit(out, a.format, rec, f"{a.param} = {root} ; {darboux.format_pair(pair)}")
    if a.expect_found and not rows:
        return EXIT_DOMAIN
    return EXIT_OK


def cmd_exp_elements(a, out) -> int:
    m = model_from_args(a)
    D = osc.derivation(m, coords=a.coords)
    known = darboux.find_darboux(D, a.deg_f, a.height)
    for p in darboux.find_exp_elements(D, known, a.deg_g):
        _emit(out, a.format, _pair_record(p), f"{p.f} ; K = {p.k}")
    return EXIT_OK


def cmd_integral_build(a, out) -> int:
    m = model_from_args(a)
    try:
        form = constructions.certified_form(m, seed=a.seed)
    except StructureError as exc:
        raise CliError(f"{m.describe()}: {exc}") from exc
    rec = {"family": m.family, "n": m.n, "coordinates": "x = u^(n-1), y = v/u", **form.to_record()}
    if m.family == "duffing":
        rec["v_variant"] = osc.v_variant(m.n)
    if a.format == "json-lines":
        out.write(json.dumps(rec, sort_keys=True) + "\n")
    else:
        for k in sorted(rec):
            out.write(f"{k}: {rec[k]}\n")
    return EXIT_OK


def cmd_integral_eval(a, out) -> int:
    m = model_from_args(a)
    names = [a.integral] if a.integral else list(osc.integral_names(m))
    if not a.at:
        raise CliError("give at least one point with --at u,v")
    status = EXIT_OK
    for u, v in a.at:
        emitted = 0
        for name in names:
            if name == "J":
                val = osc.time_dependent_J(m, u, v, a.time)
                region = "all"
            else:
                if name not in osc.integral_names(m):
                    raise CliError(f"{name} is not an integral of family {m.family}")
                region = osc.integral_region(m, name, u, v)
                val = None
                if region is not None and osc.boundary_distance(m, name, u, v) > 0:
                    try:
                        val = osc.integral(m, name, u, v)
                    except DomainError:
                        pass
                if val is None:
                    if a.integral:
                        print(f"{name} at ({u}, {v}): point on a region boundary or outside the "
                              f"real branch ({osc.classify_region(m, u, v)})", file=sys.stderr)
                        status = EXIT_DOMAIN
                    continue
            rec = {"u": u, "v": v, "integral": name, "region": region, "value": val}
            _emit(out, a.format, rec, _csv_line([f"{u:g}", f"{v:g}", name, region, f"{val:.17g}"]))
            emitted += 1
        if not emitted and not a.integral:
            print(f"({u}, {v}): no integral is real here, the point lies on a region boundary "
                  f"({osc.classify_region(m, u, v)})", file=sys.stderr)
            status = EXIT_DOMAIN
    return status


def cmd_verify_run(a, out) -> int:
    families = a.families.split(",") if a.families else list(osc.FAMILIES)
    hs = {"auto": None, "on": True, "off": False}[a.harmonic_sign]
    models = [osc.theorem_model(f, n, harmonic_sign=hs) for f in families for n in a.ns]
    res = verify.run_suite(models, per_region=a.trajectories, seed=a.seed, t_end=a.t_end, tol=a.tol,
                           threshold=a.threshold, j_threshold=a.j_threshold, j_tol=a.j_tol,
                           margin=a.margin)
    if a.format == "json-lines":
        for r in res.rows:
            out.write(json.dumps(r.__dict__, sort_keys=True) + "\n")
    else:
        out.write(res.csv())
    if res.escaped:
        print(f"{len(res.escaped)} initial points redrawn after finite-time escape", file=sys.stderr)
    return EXIT_OK if res.all_passed else EXIT_NUMERIC


def cmd_portrait_emit(a, out) -> int:
    m = model_from_args(a)
    grid = portrait.GridSpec(tuple(a.u_range), tuple(a.v_range), a.resolution)
    names = [a.integral] if a.integral else None
    p = portrait.compute_portrait(m, grid, names, mask_radius=a.mask_radius, levels=a.levels)
    if a.out_prefix:
        Path(f"{a.out_prefix}.csv").write_text(portrait.grid_csv(p))
        Path(f"{a.out_prefix}.svg").write_text(portrait.to_svg(p))
        print(f"wrote {a.out_prefix}.csv and {a.out_prefix}.svg", file=sys.stderr)
    elif a.format == "csv":
        out.write(portrait.grid_csv(p))
    else:
        out.write(portrait.to_svg(p))
    return EXIT_OK


def cmd_specfun_eval(a, out) -> int:
    params = [Fraction(x) for x in a.params.split(",")] if a.params else []
    need = {"2f1": 3, "1f1": 2, "inc-beta": 2, "inc-gamma": 1}[a.fn]
    if len(params) != need:
        raise CliError(f"{a.fn} takes {need} parameters")
    try:
        if a.fn == "2f1":
            val = specfun.gauss_2f1(*params, a.z)
        elif a.fn == "1f1":
            val = specfun.kummer_1f1(*params, a.z)
        elif a.fn == "inc-beta":
            val = specfun.inc_beta(a.z, *params)
        else:
            val = specfun.inc_gamma(params[0], a.z)
    except specfun.SeriesDivergence as exc:
        raise CliError(str(exc), EXIT_NUMERIC) from exc
    except ValueError as exc:
        raise CliError(str(exc)) from exc
    out.write(f"{val:.17g}\n")
    return EXIT_OK


def cmd_chebyshev_check(a, out) -> int:
    if a.family:
        try:
            p, q, r = constructions.chebyshev_triple(a.family, a.n)
        except ValueError as exc:
            raise CliError(str(exc)) from exc
    else:
        if None in (a.p, a.q, a.r):
            raise CliError("give --family/--n or all of --p --q --r")
        p, q, r = a.p, a.q, a.r
    try:
        ok = specfun.chebyshev_elementary(p, q, r)
    except ValueError as exc:
        raise CliError(str(exc)) from exc
    verdict = "elementary" if ok else "non-elementary"
    _emit(out, a.format, {"p": str(p), "q": str(q), "r": str(r), "elementary": ok},
          f"p={p} q={q} r={r} : {verdict}")
    return EXIT_OK


# --------------------------------------------------------------------------
# parser
# --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="liouvillian", description=__doc__.split("\n")[0],
                                     allow_abbrev=False)
    parser.add_argument("--config", help="flat key=value file of option defaults")
    cmds = parser.add_subparsers(dest="command", required=True)

    def action(group, name, func, fmt=("text", "json-lines"), model=True):
        p = group.add_parser(name)
        if model:
            _add_model_args(p)
        p.add_argument("--format", choices=fmt, default=fmt[0])
        p.add_argument("--seed", type=int, default=0)
        p.set_defaults(func=func)
        return p

    def search_opts(p):
        p.add_argument("--deg", type=int, help="degree of F (default depends on the family)")
        p.add_argument("--height", type=int, default=darboux.DEFAULT_HEIGHT)
        p.add_argument("--max-candidates", type=int, default=darboux.DEFAULT_MAX_CANDIDATES)
        p.add_argument("--coords", choices=("auto", "plain", "power"), default="auto")
        p.add_argument("--expect-found", action="store_true")

    dx = cmds.add_parser("darboux").add_subparsers(dest="action", required=True)
    search_opts(action(dx, "search", cmd_darboux_search))
    p = action(dx, "conditions", cmd_darboux_conditions)
    search_opts(p)
    p.add_argument("--param", choices=("omega0sq", "beta", "phi"), required=True)
    p.add_argument("--require-exp", action="store_true",
                   help="keep only values where the polynomial also carries an exponential element")

    p = action(cmds, "exp-elements", cmd_exp_elements)
    p.add_argument("--deg-f", type=int, default=1)
    p.add_argument("--deg-g", type=int, default=1)
    p.add_argument("--height", type=int, default=darboux.DEFAULT_HEIGHT)
    p.add_argument("--coords", choices=("auto", "plain", "power"), default="power")

    ix = cmds.add_parser("integral").add_subparsers(dest="action", required=True)
    action(ix, "build", cmd_integral_build, fmt=("json-lines", "text"))
    p = action(ix, "eval", cmd_integral_eval, fmt=("csv", "json-lines"))
    p.add_argument("--at", type=_pair, action=_AppendOverride, help="u,v (repeatable; ';'-separated in a config file)")
    p.add_argument("--integral", choices=("I1", "I2", "I3", "I4", "I5", "J"))
    p.add_argument("--time", type=float, default=0.0, help="time for the J quantity")

    vx = cmds.add_parser("verify").add_subparsers(dest="action", required=True)
    p = action(vx, "run", cmd_verify_run, fmt=("csv", "json-lines"), model=False)
    p.add_argument("--families", help="comma-separated (default: all)")
    p.add_argument("--ns", type=_int_list, default=[3, 4, 5])
    p.add_argument("--harmonic-sign", choices=("auto", "on", "off"), default="auto")
    p.add_argument("--trajectories", type=int, default=20, help="initial points per region")
    p.add_argument("--t-end", type=float, default=10.0)
    p.add_argument("--tol", type=float, default=1e-11)
    p.add_argument("--j-tol", type=float, default=1e-13)
    p.add_argument("--threshold", type=float, default=1e-7)
    p.add_argument("--j-threshold", type=float, default=1e-8)
    p.add_argument("--margin", type=float, default=verify.DEFAULT_MARGIN)

    px = cmds.add_parser("portrait").add_subparsers(dest="action", required=True)
    p = action(px, "emit", cmd_portrait_emit, fmt=("svg", "csv"))
    p.add_argument("--resolution", type=int, default=401)
    p.add_argument("--u-range", type=_pair, default=(-2.0, 2.0))
    p.add_argument("--v-range", type=_pair, default=(-2.0, 2.0))
    p.add_argument("--mask-radius", type=int, default=1)
    p.add_argument("--levels", type=int, default=16)
    p.add_argument("--integral", choices=("I1", "I2", "I3", "I4", "I5"))
    p.add_argument("--out-prefix", help="write <prefix>.csv and <prefix>.svg")

    sx = cmds.add_parser("specfun").add_subparsers(dest="action", required=True)
    p = action(sx, "eval", cmd_specfun_eval, model=False)
    p.add_argument("--fn", choices=("2f1", "1f1", "inc-beta", "inc-gamma"), required=True)
    p.add_argument("--params", help="comma-separated rationals, e.g. 1/2,1/4,5/4")
    p.add_argument("--z", type=float, required=True)

    cx = cmds.add_parser("chebyshev").add_subparsers(dest="action", required=True)
    p = action(cx, "check", cmd_chebyshev_check, model=False)
    p.add_argument("--family", choices=("duffing", "dvdp"))
    p.add_argument("--n", type=int, default=3)
    p.add_argument("--p", type=_rat)
    p.add_argument("--q", type=_rat)
    p.add_argument("--r", type=_rat)
    return parser


def _subparser_for(parser: argparse.ArgumentParser, argv: list[str]):
    """The innermost subparser selected by ``argv``."""
    node = parser
    for tok in argv:
        subs = [a for a in node._actions if isinstance(a, argparse._SubParsersAction)]
        if not subs or tok not in subs[0].choices:
            if subs:
                continue
            break
        node = subs[0].choices[tok]
    return node


def parse_args(argv: list[str]):
    parser = build_parser()
    # without allow_abbrev=False, "--c" of specfun would be taken for "--config"
    pre = argparse.ArgumentParser(add_help=False, allow_abbrev=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    if known.config:
        cfg = read_config(known.config)
        leaf = _subparser_for(parser, argv)
        dests = {a.dest: a for a in leaf._actions}
        defaults = {}
        for key, raw in cfg.items():
            act = dests.get(key)
            if act is None:
                raise CliError(f"unknown config key {key!r}")
            if act.const is True and act.nargs == 0:
                defaults[key] = raw.lower() in ("1", "true", "yes", "on")
            else:
                conv = act.type or str
                try:
                    if isinstance(act, _AppendOverride):
                        defaults[key] = [conv(part) for part in raw.split(";") if part.strip()]
                    else:
                        defaults[key] = conv(raw)
                except (ValueError, argparse.ArgumentTypeError) as exc:
                    raise CliError(f"config key {key!r}: {exc}") from exc
                if act.choices is not None and defaults[key] not in act.choices:
                    raise CliError(f"config key {key!r}: {raw!r} not in {list(act.choices)}")
        leaf.set_defaults(**defaults)
    return parser.parse_args(argv)


def main(argv: list[str] | None = None, out=None) -> int:
    out = out or sys.stdout
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = parse_args(argv)
        return args.func(args, out)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except (DomainError, StructureError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except (verify.NumericalFailure, specfun.SeriesDivergence, ArithmeticError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
