"""Command-line front end.

Every command prints a ``key = value`` report that starts with an echo of the
configuration, so a report alone is enough to rerun it.  Exit codes: 0 on
success, 1 on operational errors (bad input, not a unit, ...), 2 when a
requested check fails.
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction
from pathlib import Path

from . import _kernels
from .calculus import (ContourSpec, DEFAULT_SHRINK_DEPTHS, functional_calculus, growth_scan,
                       parse_depths, parse_phi, range_estimate, shrink_weight_search)
from .errors import DomainError, SpecParseError
from .gelfand import gelfand_transform, parse_character, parse_complex, spectral_min_estimate
from .lattice import make_box
from .series import CoeffTable, box_identity_residual, evaluate, invert_formal, read_series, weighted_p_norm, write_series
from .weights import (beurling_domar_partial, check_submultiplicative, growth_profile, is_admissible,
                      is_almost_monotone, parse_number, parse_weight)

EXIT_OK, EXIT_ERROR, EXIT_CHECK = 0, 1, 2

WEIGHT_CHECKS = ("admissible", "submultiplicative", "almost-monotone", "beurling-domar")


class _ArgError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on usage errors, which is reserved for failed checks
    def error(self, message):
        raise _ArgError(f"{self.prog}: {message}")


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, complex):
        return f"{v.real!r}{v.imag:+}j"
    if isinstance(v, Fraction):
        return str(v) if v.denominator == 1 else f"{v} ({float(v)!r})"
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(_fmt(x) for x in v) + "]"
    return str(v)


class Report:
    def __init__(self, out=None):
        self.lines = []
        self.out = out or sys.stdout

    def __setitem__(self, key, value):
        self.lines.append(f"{key} = {_fmt(value)}")

    def flush(self):
        self.out.write("\n".join(self.lines) + "\n")
        self.out.flush()


def _int_expr(text: str) -> int:
    """``1048576`` or ``2^20``."""
    base, sep, exp = text.partition("^")
    try:
        return int(base) ** int(exp) if sep else int(base)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer or b^e, got {text!r}") from None


def _positive_int(text: str) -> int:
    v = _int_expr(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    return v


def _p_value(text: str):
    try:
        return parse_number(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad p {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--in", dest="inp", type=Path, help="input series file")
    common.add_argument("--out", type=Path, help="output file (series or report)")
    common.add_argument("--box", type=_positive_int, help="square box side M (accepts b^e)")
    common.add_argument("--weight", help="weight spec, e.g. const:1, twoadic, mfpi:R1=3")
    common.add_argument("--p", type=_p_value, default=1, help="exponent p in (0, 1]")
    common.add_argument("--mode", choices=("exact", "float"), help="override the file's scalar mode")
    common.add_argument("--seed", type=int, default=0, help="RNG seed (default 0)")
    common.add_argument("--tol", type=float, help="tolerance for the command's check")
    common.add_argument("--nodes", type=int, default=256, help="contour node count")
    common.add_argument("--depths", help="depth list '2,4,8' or octave range '2^1..2^40'")
    common.add_argument("--require", action="append", default=[], help="check that must pass (repeatable)")
    common.add_argument("--verify", action="store_true", help="self-check the result")
    common.add_argument("--threads", type=int, default=1, help="accepted for scripting; kernels are serial")

    parser = _Parser(prog="wdirichlet", description="Weighted two-variable Dirichlet series toolkit")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("invert", parents=[common], help="formal inverse on a box")
    p.set_defaults(func=cmd_invert)

    p = sub.add_parser("eval", parents=[common], help="evaluate at a point or a semicharacter")
    p.add_argument("--point", help="s1,s2 in H^2 (complex, e.g. 0+2.5j,0)")
    p.add_argument("--char", help="point:/line:/rand:/explicit: character spec")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("norm", parents=[common], help="weighted p-norm")
    p.set_defaults(func=cmd_norm)

    p = sub.add_parser("check-weight", parents=[common], help="weight diagnostics")
    p.add_argument("--primes", type=int, default=4, help="primes per axis in the growth table")
    p.add_argument("--bd-terms", type=int, default=10_000, help="Beurling-Domar partial sum length")
    p.set_defaults(func=cmd_check_weight)

    p = sub.add_parser("spectral-min", parents=[common], help="sampled min of |Gel'fand transform|")
    p.add_argument("--samples", type=int, default=4000, help="Monte-Carlo characters")
    p.add_argument("--grid", type=int, default=4096, help="boundary grid points")
    p.set_defaults(func=cmd_spectral_min)

    p = sub.add_parser("growth", parents=[common], help="weighted norm partial sums of the inverse")
    p.set_defaults(func=cmd_growth)

    p = sub.add_parser("funcalc", parents=[common], help="contour functional calculus")
    p.add_argument("--phi", default="reciprocal", help="reciprocal | exp | log | identity | poly:c0,c1,...")
    p.add_argument("--center", help="contour center (default a(1,1))")
    p.add_argument("--radius", type=float, help="contour radius (default 1.5 x range radius)")
    p.add_argument("--compare", type=Path, help="series file to diff against")
    p.set_defaults(func=cmd_funcalc)

    p = sub.add_parser("shrink-weight", parents=[common], help="search a shrunk weight nu <= w")
    p.add_argument("--r-grid", default="1.25,1.5,1.75,1.9,2.5", help="candidate prime values")
    p.set_defaults(func=cmd_shrink_weight)
    return parser


# ------------------------------------------------------------------ helpers


def _load(args) -> tuple[CoeffTable, dict]:
    if args.inp is None:
        raise DomainError("--in is required")
    a, meta = read_series(args.inp)
    if args.mode and args.mode != a.mode:
        a = a.to_exact() if args.mode == "exact" else a.to_float()
    return a, meta


def _weight(args, meta=None, default="const:1"):
    if args.weight:
        return parse_weight(args.weight, Path.cwd())
    if meta and "weight" in meta:
        return meta["weight"]
    return parse_weight(default)


def _echo(rep: Report, args, **extra):
    rep["command"] = args.command
    for key in ("inp", "box", "weight", "p", "mode", "seed", "tol", "nodes", "depths", "threads"):
        val = getattr(args, key, None)
        if val is not None:
            rep[f"config.{'in' if key == 'inp' else key}"] = val
    if args.require:
        rep["config.require"] = ",".join(args.require)
    for k, v in extra.items():
        if v is not None:
            rep[f"config.{k}"] = v
    rep["backend"] = _kernels.backend()


# ------------------------------------------------------------------ commands


def cmd_invert(args, rep: Report) -> int:
    a, meta = _load(args)
    box = make_box(args.box or 64)
    w = _weight(args, meta)
    _echo(rep, args)
    b = invert_formal(a, box)
    rep["box"] = box.describe()
    rep["entries"] = len(b)
    rep["l1_norm"] = weighted_p_norm(b)
    rep["weighted_norm"] = weighted_p_norm(b, w, args.p)
    rep["weighted_norm.weight"] = w.spec()
    status = EXIT_OK
    if args.verify:
        res = box_identity_residual(a, b, box)
        ok = res == 0 if a.mode == "exact" else res <= (args.tol if args.tol is not None else 1e-9)
        rep["verify.residual"] = res
        rep["verify"] = "ok" if ok else "failed"
        status = EXIT_OK if ok else EXIT_CHECK
    if args.out:
        write_series(args.out, b, p=args.p, weight=w, extra={"box": box.describe()})
        rep["out"] = args.out
    return status


def cmd_eval(args, rep: Report) -> int:
    a, _ = _load(args)
    _echo(rep, args, point=args.point, char=args.char)
    if bool(args.point) == bool(args.char):
        raise DomainError("give exactly one of --point or --char")
    if args.point:
        parts = args.point.split(",")
        if len(parts) != 2:
            raise DomainError("--point expects s1,s2")
        v = evaluate(a, parse_complex(parts[0]), parse_complex(parts[1]))
    else:
        v = gelfand_transform(a, parse_character(args.char, Path.cwd()))
    rep["value"] = v
    rep["abs"] = abs(v)
    return EXIT_OK


def cmd_norm(args, rep: Report) -> int:
    a, meta = _load(args)
    w = _weight(args, meta)
    _echo(rep, args)
    if args.box:
        a = a.restrict(make_box(args.box))
    rep["weight"] = w.spec()
    rep["norm"] = weighted_p_norm(a, w, args.p)
    return EXIT_OK


def cmd_check_weight(args, rep: Report) -> int:
    if not args.weight:
        raise DomainError("--weight is required")
    w = parse_weight(args.weight, Path.cwd())
    bad = [r for r in args.require if r not in WEIGHT_CHECKS]
    if bad:
        raise DomainError(f"unknown check {bad[0]!r}; choose from {', '.join(WEIGHT_CHECKS)}")
    _echo(rep, args, primes=args.primes, bd_terms=args.bd_terms)
    rep["weight"] = w.spec()
    passed = {}

    sm = check_submultiplicative(w)
    rep["submultiplicative.ok"] = sm.ok
    rep["submultiplicative.worst_ratio"] = sm.worst_ratio
    rep["submultiplicative.witness"] = sm.witness
    passed["submultiplicative"] = sm.ok

    for axis, name in ((1, "rho"), (2, "mu")):
        for i in range(1, args.primes + 1):
            g = growth_profile(w, i, axis)
            rep[f"growth.{name}{i}"] = g.rho
    adm = is_admissible(w)
    rep["admissible"] = adm.verdict
    rep["admissible.max_growth"] = adm.max_rho
    rep["admissible.witness"] = adm.witness
    passed["admissible"] = adm.admissible

    am = is_almost_monotone(w, make_box(args.box or 16))
    rep["almost_monotone"] = am.verdict
    if am.K is not None:
        rep["almost_monotone.K"] = am.K
        rep["almost_monotone.witness"] = am.witness
        rep["almost_monotone.box"] = am.box
    passed["almost-monotone"] = am.verdict != "violated"

    bd_ok = True
    for l, k in ((2, 1), (1, 2), (2, 3)):
        bd = beurling_domar_partial(w, l, k, args.bd_terms)
        rep[f"beurling_domar.{l},{k}.partial"] = bd.partial
        rep[f"beurling_domar.{l},{k}.gamma"] = bd.growth_exponent
        rep[f"beurling_domar.{l},{k}"] = bd.verdict
        bd_ok &= bd.verdict == "convergent-evidence"
    passed["beurling-domar"] = bd_ok

    failed = [r for r in args.require if not passed[r]]
    rep["required_failed"] = ",".join(failed) or "none"
    return EXIT_CHECK if failed else EXIT_OK


def cmd_spectral_min(args, rep: Report) -> int:
    a, meta = _load(args)
    w = _weight(args, meta)
    _echo(rep, args, samples=args.samples, grid=args.grid)
    r = spectral_min_estimate(a, w, n_random=args.samples, grid=args.grid, seed=args.seed)
    rep["weight"] = w.spec()
    rep["min_abs"] = r.min_abs_value
    rep["method"] = r.method
    rep["grid_min"] = r.grid_min
    rep["mc_min"] = r.mc_min
    rep["argmin"] = r.argmin.describe()
    rep["samples"] = r.samples
    rep["caveat"] = r.caveat
    tol = args.tol if args.tol is not None else 1e-9
    if "bounded-away" in args.require:
        ok = r.min_abs_value > tol
        rep["bounded_away"] = ok
        return EXIT_OK if ok else EXIT_CHECK
    return EXIT_OK


def cmd_growth(args, rep: Report) -> int:
    a, meta = _load(args)
    w = _weight(args, meta)
    depths = parse_depths(args.depths or "2^1..2^40")
    _echo(rep, args)
    g = growth_scan(a, w, args.p, depths)
    rep["weight"] = w.spec()
    for d, s in zip(g.depths, g.sums):
        rep[f"sum.{d}"] = s
    rep["classification"] = g.classification
    rep["rate_per_octave"] = g.rate
    if "bounded" in args.require:
        return EXIT_OK if g.classification == "bounded-evidence" else EXIT_CHECK
    if "divergent" in args.require:
        return EXIT_OK if g.classification == "divergent-evidence" else EXIT_CHECK
    return EXIT_OK


def cmd_funcalc(args, rep: Report) -> int:
    a, _ = _load(args)
    a = a.to_float()
    box = make_box(args.box or 64)
    phi = parse_phi(args.phi)
    est = range_estimate(a, seed=args.seed)
    c0, r0 = est.center_disk
    center = parse_complex(args.center) if args.center else complex(c0)
    radius = args.radius if args.radius is not None else max(1.5 * r0, 0.5)
    contour = ContourSpec(center, radius, args.nodes)
    _echo(rep, args, phi=phi.describe(), center=center, radius=radius)
    res = functional_calculus(a, phi, contour, box, args.tol, est)
    rep["box"] = box.describe()
    rep["entries"] = len(res.table)
    rep["halving_error"] = res.halving_error
    rep["enclosure.max_sample_distance"] = res.enclosure.max_sample_distance
    rep["enclosure.certified"] = res.enclosure.certified
    status = EXIT_OK if res.converged else EXIT_CHECK
    if args.compare:
        ref, _ = read_series(args.compare)
        d = res.table - ref.to_float().restrict(box)
        diff = max((abs(complex(c)) for _, c in d.items()), default=0.0)
        rep["compare.file"] = args.compare
        rep["compare.max_entry_diff"] = diff
        if args.tol is not None and diff > args.tol:
            status = EXIT_CHECK
    if args.out:
        write_series(args.out, res.table, extra={"box": box.describe(), "phi": phi.describe()})
        rep["out"] = args.out
    return status


def cmd_shrink_weight(args, rep: Report) -> int:
    a, meta = _load(args)
    w = _weight(args, meta)
    grid = [float(parse_number(t)) for t in args.r_grid.split(",") if t.strip()]
    depths = parse_depths(args.depths) if args.depths else DEFAULT_SHRINK_DEPTHS
    box = make_box(args.box or 64)
    _echo(rep, args, r_grid=grid)
    res = shrink_weight_search(a, w, grid, box, depths, args.p)
    rep["weight"] = w.spec()
    if res.axis is not None:
        rep["perturbed"] = f"{'R' if res.axis == 1 else 'S'}{res.prime_index}"
    rep["rho"] = res.rho
    for c in res.candidates:
        rep[f"candidate.{c.r!r}"] = f"{c.report.classification} eligible={_fmt(c.eligible)} last_sum={float(c.report.sums[-1])!r}"
    rep["best_r"] = res.best_r if res.best_r is not None else "none"
    rep["nu"] = res.nu.spec() if res.nu is not None else "none"
    if res.nu is not None:
        rep["nu.between_1_and_w"] = res.nu_between_1_and_w
        rep["nu.constant"] = res.nu_constant
    for i, msg in enumerate(res.warnings):
        rep[f"warning.{i}"] = msg
    return EXIT_OK if res.nu is not None else EXIT_CHECK


# ------------------------------------------------------------------ entry points


def main(argv=None, out=None) -> int:
    rep = Report(out)
    try:
        args = build_parser().parse_args(argv)
    except _ArgError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    try:
        status = args.func(args, rep)
    except (DomainError, SpecParseError, OSError, ValueError, ZeroDivisionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    rep.flush()
    return status


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()
