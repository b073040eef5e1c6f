"""Command-line interface.

Exit codes: 0 success, 1 usage or parse error, 2 numerical failure.
"""

from __future__ import annotations

import argparse
import math
import os
import sys

from . import plotting
from .census import Rectangle, isolate_roots, rouche_rectangle, verify_all_real
from .certify import CertifyOptions, run_certification
from .config import RunConfig, build_config, load_config_file
from .critical import critical_values, critical_values_covering, find_critical_points
from .errors import MonodromyError, ParameterError
from .families import FunctionFamily
from .paths import LoopSpec, elementary_loop, paper_path, path_from_json, path_to_json, validate_path
from .tracker import initial_roots, track, trajectories_csv

EXIT_OK, EXIT_USAGE, EXIT_NUMERICAL = 0, 1, 2
# tracking needs simple roots at the start, so stay this far from critical values
BASEPOINT_GUARD = 0.05


class UsageError(ParameterError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# --- value parsing ---------------------------------------------------------------


def parse_complex(text: str) -> complex:
    """Accept ``re,im`` or Python-style literals with i or j (``-1+0.5i``)."""
    s = text.strip().replace(" ", "")
    try:
        if "," in s:
            re_, im_ = s.split(",")
            return complex(float(re_), float(im_))
        return complex(s.replace("i", "j"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a complex number: {text!r}") from None


def parse_pair(text: str) -> tuple[float, float]:
    try:
        u, v = (float(p) for p in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected two comma-separated numbers, got {text!r}") from None
    return u, v


def parse_tol(text: str) -> tuple[str, float]:
    name, sep, value = text.partition("=")
    if not sep or not name:
        raise argparse.ArgumentTypeError(f"expected name=value, got {text!r}")
    try:
        return name.strip(), float(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"tolerance {name} is not a number: {value!r}") from None


def _fmt(v) -> str:
    z = complex(v)
    # imaginary parts at rounding level are display noise
    if abs(z.imag) <= 1e-14 * max(1.0, abs(z.real)):
        return f"{z.real:.12g}"
    return f"{z.real:.12g}{z.imag:+.12g}i"


# --- config assembly ---------------------------------------------------------------


def _config(args) -> RunConfig:
    file_values = load_config_file(args.config) if args.config else {}
    over = {
        "family": args.family,
        "detour_radius": args.detour_radius,
        "loop_radius": args.loop_radius,
        "clearance": args.clearance,
        "jobs": args.jobs,
        "tolerances": dict(args.tol) if args.tol else None,
    }
    if args.window is not None:
        over["window_half_width"], over["window_half_height"] = args.window
    if args.basepoint is not None:
        over["basepoint"] = [args.basepoint.real, args.basepoint.imag]
    for name in ("n_max", "report", "trajectories", "figure"):
        over[name] = getattr(args, name, None)
    return build_config(file_values, over)


def _common(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("configuration")
    g.add_argument("--config", metavar="FILE", help="JSON file mirroring RunConfig; flags take precedence")
    g.add_argument("--family", help="tan (default), cubic or quintic")
    g.add_argument("--window", type=parse_pair, metavar="W,H", help="window half width and half height")
    g.add_argument("--basepoint", type=parse_complex, metavar="A", help="basepoint, e.g. -1 or -1,0")
    g.add_argument("--detour-radius", type=float)
    g.add_argument("--loop-radius", type=float)
    g.add_argument("--clearance", type=float)
    g.add_argument("--tol", type=parse_tol, action="append", metavar="NAME=VALUE",
                   help="tracker tolerance override (repeatable)")
    g.add_argument("--jobs", type=int, help="worker processes for independent loops")


def _default_basepoint(cfg: RunConfig) -> complex:
    if cfg.basepoint_value is not None:
        return cfg.basepoint_value
    return -1 + 0j if cfg.family_enum is FunctionFamily.TAN_MINUS_X else 0j


def _family_critical_values(family, points):
    if family is FunctionFamily.TAN_MINUS_X:
        return critical_values_covering(family, points)
    return critical_values(family)


def _check_basepoint(family, b: complex) -> None:
    cvs = _family_critical_values(family, [b])
    near = [c for c in cvs if abs(complex(c) - b) < BASEPOINT_GUARD]
    if near:
        raise UsageError(f"basepoint {_fmt(b)} is within {BASEPOINT_GUARD} of critical value {_fmt(near[0])}")


def _write(path: str, text: str) -> None:
    d = os.path.dirname(path)
    if d:
        os.makedirs(d, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


# --- commands -------------------------------------------------------------------------


def cmd_critical_points(args) -> int:
    cfg = _config(args)
    if args.kmax < 1:
        raise UsageError(f"--kmax must be >= 1, got {args.kmax}")
    cps = find_critical_points(cfg.family_enum, args.kmax)
    print(f"{'k':>4}  {'x_c':>24}  {'a_c':>24}  order")
    for cp in cps:
        print(f"{cp.index:>4}  {_fmt(cp.x_c):>24}  {_fmt(cp.a_c):>24}  {cp.order}")
    return EXIT_OK


def cmd_census(args) -> int:
    cfg = _config(args)
    family = cfg.family_enum
    a = args.a
    if args.verify_rouche is not None:
        k = args.verify_rouche
        if k < 1:
            raise UsageError(f"--verify-rouche must be >= 1, got {k}")
        M = args.M if args.M is not None else k + 3
        rect = rouche_rectangle(k, M)
    elif args.rect_center is not None or args.rect_half is not None:
        c = args.rect_center if args.rect_center is not None else 0j
        w, h = args.rect_half if args.rect_half is not None else (1.0, 1.0)
        rect = Rectangle(complex(c), w, h)
    else:
        rect = cfg.window()
    roots = isolate_roots(family, rect, a)
    print(f"a = {_fmt(a)}; rectangle center {_fmt(rect.center)}, half dims {rect.half_width:.12g} x "
          f"{rect.half_height:.12g}")
    print(f"{'location':>36}  mult  residual")
    for r in roots:
        print(f"{_fmt(r.location):>36}  {r.multiplicity:>4}  {r.residual:.3g}")
    total = sum(r.multiplicity for r in roots)
    nonreal = [r for r in roots if abs(r.location.imag) >= 1e-8]
    print(f"total with multiplicity: {total}")
    if nonreal:
        pairs = sum(1 for r in nonreal if r.location.imag > 0 and any(
            abs(s.location - r.location.conjugate()) < 1e-7 for s in nonreal))
        print(f"non-real roots: {len(nonreal)} ({pairs} conjugate pair{'s' if pairs != 1 else ''})")
    if args.verify_rouche is not None:
        ok = verify_all_real(family, args.verify_rouche, rect.half_height, a)
        expected = 2 * args.verify_rouche + 1
        print(f"rouche check k={args.verify_rouche}: expected {expected} roots, all real: {'yes' if ok else 'NO'}")
        if not ok:
            return EXIT_NUMERICAL
    return EXIT_OK


def _tan_window(cfg: RunConfig, points) -> Rectangle:
    if cfg.window_half_width is not None or cfg.family_enum is not FunctionFamily.TAN_MINUS_X:
        return cfg.window()
    reach = max(abs(complex(p).real) for p in points)
    n = max(cfg.n_max, math.ceil(reach / math.pi))
    return Rectangle(0j, (n + 2) * math.pi, cfg.window_half_height or 4.0)


def _track_and_emit(cfg, family, path, roots, cvs, csv_path, figure_path, title=None):
    rep = track(family, path, roots, cfg.track_options(), cvs)
    if csv_path:
        _write(csv_path, trajectories_csv(rep))
    if figure_path:
        table = plotting.read_trajectories(trajectories_csv(rep))
        svg = plotting.render_trajectories(table, cvs, title)
        _write(figure_path, svg)
    return rep


def cmd_track(args) -> int:
    cfg = _config(args)
    family = cfg.family_enum
    try:
        with open(args.path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read path file {args.path}: {exc.strerror}") from None
    try:
        path = path_from_json(text)
    except ParameterError as exc:
        raise UsageError(f"{args.path}: {exc}") from None
    _check_basepoint(family, path.basepoint)
    pts = path.sample(16)
    cvs = _family_critical_values(family, list(pts))
    problems = validate_path(path, cvs, clearance=min(cfg.clearance, BASEPOINT_GUARD))
    if problems:
        raise UsageError(f"{args.path}: " + "; ".join(str(p) for p in problems))
    window = _tan_window(cfg, pts)
    roots = initial_roots(family, window, path.basepoint, mode=args.labels)
    rep = _track_and_emit(cfg, family, path, roots, cvs, cfg.trajectories, cfg.figure, title=os.path.basename(args.path))
    if rep.permutation is None:
        print("open path: no permutation")
        for lab, z in zip(rep.final_roots().labels, rep.endpoints):
            print(f"{lab}: {_fmt(z)}")
    else:
        print(str(rep.permutation))
    return EXIT_OK


def cmd_loop(args) -> int:
    cfg = _config(args)
    family = cfg.family_enum
    b = _default_basepoint(cfg)
    _check_basepoint(family, b)
    if (args.target is None) == (args.critical_value is None):
        raise UsageError("give exactly one of --target N or --critical-value A")
    if args.target is not None:
        if family is not FunctionFamily.TAN_MINUS_X:
            raise UsageError("--target builds the real-axis loops of the tan family; use --critical-value")
        sides = tuple(args.sides.split(",")) if args.sides else None
        path = paper_path(args.target, args.winding, basepoint=b, detour_radius=cfg.detour_radius,
                          loop_radius=cfg.loop_radius, clearance=cfg.clearance, detour_sides=sides)
    else:
        c = args.critical_value
        cvs = _family_critical_values(family, [b, c])
        if not any(abs(complex(v) - c) < 1e-9 for v in cvs):
            raise UsageError(f"{_fmt(c)} is not a critical value of the {family.value} family")
        if family is FunctionFamily.TAN_MINUS_X:
            index = round(-c.real / math.pi)
        else:
            index = next(cp.index for cp in find_critical_points(family) if abs(cp.a_c - c) < 1e-9)
        sides = tuple(args.sides.split(",")) if args.sides else ()
        spec = LoopSpec(index, args.winding, cfg.detour_radius, cfg.loop_radius, sides)
        path = elementary_loop(c, b, spec, critical_values=cvs, clearance=cfg.clearance)
    text = path_to_json(path)
    if args.out:
        _write(args.out, text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_certify(args) -> int:
    cfg = _config(args)
    family = cfg.family_enum
    opts = CertifyOptions(basepoint=cfg.basepoint_value, detour_radius=cfg.detour_radius, loop_radius=cfg.loop_radius,
                          clearance=cfg.clearance, track=cfg.track_options(), jobs=cfg.jobs)
    if cfg.basepoint_value is not None:
        _check_basepoint(family, cfg.basepoint_value)
    window = cfg.window()
    report = run_certification(family, cfg.n_max, window, opts)
    if cfg.report:
        _write(cfg.report, report.to_json())
    if args.figures:
        roots = initial_roots(family, window, report.basepoint,
                              mode="conjugate" if family is FunctionFamily.TAN_MINUS_X else "auto")
        for rec in report.loops_used:
            stem = os.path.join(args.figures, f"loop_{rec.spec.target_index}")
            cvs = _family_critical_values(family, list(rec.path.sample(16)))
            _track_and_emit(cfg, family, rec.path, roots, cvs, stem + ".csv", stem + ".svg",
                            title=f"loop {rec.spec.target_index}: {rec.permutation}")
    v = report.verdict
    print(f"family: {family.value} ({family.description})")
    for rec in report.loops_used:
        sides = ",".join(s.value for s in rec.spec.detour_sides) or "-"
        print(f"loop {rec.spec.target_index}: around {_fmt(rec.critical_value)}, winding {rec.spec.winding}, "
              f"detours {sides}: {rec.permutation}")
    print("generators: " + ", ".join(str(g) for g in report.generators))
    print(f"group order: {report.group_order if report.group_order is not None else 'capped'}")
    if v is not None:
        print(f"derived series: {v.derived_chain_orders}")
        print(f"verdict: {'solvable' if v.solvable else 'not solvable'}")
        print(f"certificate: {v.certificate}")
    print(f"conclusion: {report.conclusion}")
    return EXIT_OK


def cmd_plot(args) -> int:
    cfg = _config(args)
    try:
        with open(args.csv, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {args.csv}: {exc.strerror}") from None
    try:
        table = plotting.read_trajectories(text)
    except plotting.CsvFormatError as exc:
        raise UsageError(f"{args.csv}: {exc}") from None
    cvs = _family_critical_values(cfg.family_enum, table.a)
    _write(args.svg, plotting.render_trajectories(table, cvs, args.title))
    return EXIT_OK


# --- entry point ---------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="tanmono", description="Numerical monodromy of tan(x) - x = a and its solvability verdict.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("critical-points", help="list critical points and values")
    _common(p)
    p.add_argument("--kmax", type=int, default=3, help="tan: |k| <= kmax (default 3)")
    p.set_defaults(func=cmd_critical_points)

    p = sub.add_parser("census", help="count and isolate roots at one parameter value")
    _common(p)
    p.add_argument("--a", type=parse_complex, default=0j, help="parameter value (default 0)")
    p.add_argument("--rect-center", type=parse_complex, metavar="RE,IM")
    p.add_argument("--rect-half", type=parse_pair, metavar="W,H")
    p.add_argument("--verify-rouche", type=int, metavar="K", help="check 2K+1 real roots in the K-th box")
    p.add_argument("--M", type=float, help="box half height for --verify-rouche (default K+3)")
    p.set_defaults(func=cmd_census)

    p = sub.add_parser("track", help="track all window roots along a path file")
    _common(p)
    p.add_argument("--path", required=True, help="path JSON (see the loop command)")
    p.add_argument("--csv", dest="trajectories", help="write trajectories CSV here")
    p.add_argument("--figure", help="write a two-panel SVG here")
    p.add_argument("--labels", default="auto", choices=["auto", "conjugate", "real", "generic"])
    p.set_defaults(func=cmd_track)

    p = sub.add_parser("loop", help="build a loop and print its JSON")
    _common(p)
    p.add_argument("--target", type=int, metavar="N", help="tan: loop around -N*pi along the real axis")
    p.add_argument("--critical-value", type=parse_complex, metavar="A")
    p.add_argument("--winding", type=int, default=1)
    p.add_argument("--sides", help="detour sides, e.g. ABOVE,BELOW")
    p.add_argument("--out", help="write JSON here instead of standard output")
    p.set_defaults(func=cmd_loop)

    p = sub.add_parser("certify", help="run the monodromy certification")
    _common(p)
    p.add_argument("--nmax", dest="n_max", type=int)
    p.add_argument("--report", help="write the certificate JSON here")
    p.add_argument("--figures", metavar="DIR", help="write per-loop trajectory CSV and SVG files here")
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("plot", help="render a trajectories CSV as SVG")
    _common(p)
    p.add_argument("csv")
    p.add_argument("svg")
    p.add_argument("--title")
    p.set_defaults(func=cmd_plot)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ParameterError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except MonodromyError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
