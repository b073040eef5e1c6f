"""End-to-end replay: critical points, basepoint census, loops, group, verdict.

For tan(x) - x = a the loops are the real-axis corridor loops around -n*pi
from the basepoint -1.  Consecutive loops n and n+1 compose to a 3-cycle on
(z_{n-1}, z_{n+1}, z_n); these 3-cycles are the generators whose closure is
tested for solvability.  The polynomial control families use one elementary
loop per critical value.

A solvable group is reported as "no obstruction found", never as a proof of
solvability.
"""

from __future__ import annotations

import concurrent.futures
import json
import math
from dataclasses import dataclass, field

from .census import Rectangle
from .critical import CriticalPoint, critical_values, find_critical_points
from .errors import CertificationError, MonodromyError, ParameterError
from .families import FunctionFamily
from .paths import (DEFAULT_CLEARANCE, DEFAULT_RADIUS, DEFAULT_BASEPOINT, LoopSpec, ParamPath, elementary_loop,
                    paper_path)
from .permutations import (DEFAULT_CAP, Permutation, SolvabilityVerdict, compose, contains_alternating,
                           derived_series, generate_group, is_transitive)
from .tracker import (REAL_TOL, LabeledRoots, TrackOptions, choose_detour_sides, conjugate_check, default_window,
                      initial_roots, track)

NO_ELEMENTARY_SOLUTION = "no elementary solution"
NO_OBSTRUCTION = "no obstruction found"
INDETERMINATE = "indeterminate"
# ratios above this only measure rounding noise in the endpoint distance
MATCH_QUALITY_CEILING = 1e12


@dataclass(frozen=True)
class CertifyOptions:
    basepoint: complex | None = None
    detour_radius: float = DEFAULT_RADIUS
    loop_radius: float = DEFAULT_RADIUS
    clearance: float = DEFAULT_CLEARANCE
    track: TrackOptions = field(default_factory=TrackOptions)
    cap: int = DEFAULT_CAP
    jobs: int = 1


@dataclass
class LoopRecord:
    spec: LoopSpec
    critical_value: complex
    permutation: Permutation
    matching_quality: float
    path: ParamPath | None = field(default=None, repr=False, compare=False)


@dataclass
class CertificateReport:
    family: FunctionFamily
    window: Rectangle
    basepoint: complex
    critical_points: list
    loops_used: list
    generators: list
    group_order: int | None
    verdict: SolvabilityVerdict | None
    conclusion: str
    checks: dict = field(default_factory=dict)
    tolerances: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "family": {"kind": self.family.name, "description": self.family.description},
            "window": {
                "center": _cv(self.window.center),
                "half_width": _num(self.window.half_width),
                "half_height": _num(self.window.half_height),
            },
            "basepoint": _cv(self.basepoint),
            "critical_points": [
                {"index": cp.index, "x_c": _cv(cp.x_c), "a_c": _cv(cp.a_c), "order": cp.order}
                for cp in self.critical_points
            ],
            "loops_used": [
                {
                    **{k: (_num(v) if isinstance(v, float) else v) for k, v in rec.spec.to_json().items()},
                    "critical_value": _cv(rec.critical_value),
                    "permutation": str(rec.permutation),
                    "matching_quality": _num(min(rec.matching_quality, MATCH_QUALITY_CEILING)),
                }
                for rec in self.loops_used
            ],
            "generators": [str(g) for g in self.generators],
            "group_order": self.group_order,
            "verdict": None if self.verdict is None else {
                "solvable": self.verdict.solvable,
                "derived_chain_orders": list(self.verdict.derived_chain_orders),
                "certificate": self.verdict.certificate,
            },
            "conclusion": self.conclusion,
            "checks": self.checks,
            "tolerances": {k: _num(v) for k, v in self.tolerances.items()},
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"


def _num(v: float) -> float:
    """Round to 12 significant digits (stable report text)."""
    v = float(v)
    if v == 0 or not math.isfinite(v):
        return 0.0 if v == 0 else v
    return float(f"{v:.12g}")


def _cv(z) -> list:
    z = complex(z)
    return [_num(z.real), _num(z.imag)]


def _tolerances(opts: CertifyOptions) -> dict:
    from . import census, critical
    tol = {
        "detour_radius": opts.detour_radius,
        "loop_radius": opts.loop_radius,
        "clearance": opts.clearance,
        "critical_vanish": critical.VANISH_TOL,
        "critical_nonvanish": critical.NONVANISH_TOL,
        "winding_abs_tol": census.WINDING_TOL,
        "winding_snap": census.SNAP_TOL,
        "boundary_margin": census.BOUNDARY_MARGIN,
        "real_root": REAL_TOL,
    }
    for k, v in opts.track.__dict__.items():
        tol[f"track_{k}"] = v
    return tol


# --- tan family ------------------------------------------------------------------


def _corridor_loop_job(args):
    n, sides, roots, opts = args
    last = None
    for w in (1, 2):
        path = paper_path(n, w, basepoint=roots.basepoint, detour_radius=opts.detour_radius,
                          loop_radius=opts.loop_radius, clearance=opts.clearance, detour_sides=sides[: n - 1])
        rep = track(FunctionFamily.TAN_MINUS_X, path, roots, opts.track)
        bad = conjugate_check(rep)
        if bad:
            raise CertificationError(f"loop {n}", "conjugation symmetry violated: " + bad[0])
        p = rep.permutation
        last = p
        # the lower root must come to rest on the n-th branch; c_1 must come home
        if p("c_2") == f"z_{n}" and (n == 1 or p("c_1") == "c_1"):
            return LoopRecord(path.loop, complex(-n * math.pi), p, rep.matching_quality, path)
    raise CertificationError(f"loop {n}", f"neither winding 1 nor 2 gives the expected configuration (last: {last})")


def _map_jobs(fn, jobs, n_workers):
    if n_workers <= 1:
        return [fn(j) for j in jobs]
    with concurrent.futures.ProcessPoolExecutor(max_workers=n_workers) as ex:
        return list(ex.map(fn, jobs))


def corridor_loops(n_max: int, roots: LabeledRoots, opts: CertifyOptions, window: Rectangle) -> list[LoopRecord]:
    sides = choose_detour_sides(n_max + 1, basepoint=roots.basepoint, detour_radius=opts.detour_radius,
                                clearance=opts.clearance, window=window, opts=opts.track)
    jobs = [(n, sides, roots, opts) for n in range(1, n_max + 2)]
    return _map_jobs(_corridor_loop_job, jobs, opts.jobs)


def expected_three_cycle(n: int) -> Permutation:
    return Permutation.cycle(f"z_{n - 1}", f"z_{n + 1}", f"z_{n}")


def _certify_tan(n_max, window, opts, checks):
    family = FunctionFamily.TAN_MINUS_X
    basepoint = DEFAULT_BASEPOINT if opts.basepoint is None else complex(opts.basepoint)
    try:
        roots = initial_roots(family, window, basepoint, mode="conjugate")
    except MonodromyError as exc:
        raise CertificationError("census", str(exc)) from exc
    try:
        loops = corridor_loops(n_max, roots, opts, window)
    except CertificationError:
        raise
    except MonodromyError as exc:
        raise CertificationError("tracking", str(exc)) from exc
    perms = {rec.spec.target_index: rec.permutation for rec in loops}
    generators = []
    confirmed = True
    for n in range(2, n_max + 1):
        comp = compose(perms[n], perms[n + 1])
        expected = expected_three_cycle(n)
        ok = comp in (expected, expected.inverse())
        confirmed &= ok
        generators.append(comp)
    checks["three_cycles"] = confirmed
    checks["complex_roots_restored"] = all(g("c_1") == "c_1" and g("c_2") == "c_2" for g in generators)
    points = [f"z_{k}" for k in range(1, n_max + 2)]
    return basepoint, loops, generators, points


# --- polynomial controls ------------------------------------------------------------


def _certify_polynomial(family, window, opts, checks):
    basepoint = 0j if opts.basepoint is None else complex(opts.basepoint)
    cps = find_critical_points(family)
    cvs = critical_values(family)
    try:
        roots = initial_roots(family, window, basepoint)
    except MonodromyError as exc:
        raise CertificationError("census", str(exc)) from exc
    loops = []
    for cp in cps:
        spec = LoopSpec(cp.index, 1, opts.detour_radius, opts.loop_radius, ())
        try:
            path = elementary_loop(cp.a_c, basepoint, spec, critical_values=cvs, clearance=opts.clearance)
            rep = track(family, path, roots, opts.track, cvs)
        except MonodromyError as exc:
            raise CertificationError(f"loop {cp.index}", str(exc)) from exc
        loops.append(LoopRecord(spec, cp.a_c, rep.permutation, rep.matching_quality, path))
    generators = [rec.permutation for rec in loops]
    return basepoint, loops, generators, list(roots.labels)


def run_certification(family: FunctionFamily, n_max: int = 4, window: Rectangle | None = None,
                      opts: CertifyOptions | None = None) -> CertificateReport:
    """Replay the monodromy argument and report whether the group is solvable."""
    opts = opts or CertifyOptions()
    if family is FunctionFamily.TAN_MINUS_X and n_max < 2:
        raise ParameterError(f"n_max must be >= 2, got {n_max}")
    window = window or default_window(family, n_max)
    checks: dict = {}
    if family is FunctionFamily.TAN_MINUS_X:
        cps: list[CriticalPoint] = find_critical_points(family, n_max + 1)
        basepoint, loops, generators, points = _certify_tan(n_max, window, opts, checks)
    else:
        cps = find_critical_points(family)
        basepoint, loops, generators, points = _certify_polynomial(family, window, opts, checks)

    group = generate_group(generators, cap=opts.cap)
    tolerances = _tolerances(opts)
    if group.capped:
        return CertificateReport(family, window, basepoint, cps, loops, generators, None, None, INDETERMINATE,
                                 checks, tolerances)
    verdict = derived_series(group, cap=opts.cap)
    notes = [verdict.certificate]
    support = [p for p in points if p in set(group.points)]
    if support:
        transitive = is_transitive(group, support)
        checks["transitive"] = transitive
        if transitive:
            notes.append("acts transitively on {" + ", ".join(support) + "}")
    if len(points) >= 3:
        alt = contains_alternating(generators, points, cap=opts.cap)
        checks["contains_alternating"] = alt.result
        if alt.result:
            notes.insert(0, alt.text)
        if alt.result and len(points) >= 5 and verdict.solvable:  # pragma: no cover - soundness hook
            raise CertificationError("verdict", "alternating group found but derived series reports solvable")
    verdict = SolvabilityVerdict(verdict.solvable, verdict.derived_chain_orders, "; ".join(notes))
    if verdict.solvable:
        conclusion = NO_OBSTRUCTION
    elif all(v is not False for v in checks.values() if isinstance(v, bool)):
        conclusion = NO_ELEMENTARY_SOLUTION
    else:
        conclusion = INDETERMINATE
    return CertificateReport(family, window, basepoint, cps, loops, generators, group.order, verdict, conclusion,
                             checks, tolerances)


# --- configuration replay ---------------------------------------------------------------


@dataclass(frozen=True)
class ConfigurationSnapshot:
    """Who sits where: real roots on positive branches (left to right) and the half-planes."""

    stage: str
    real: tuple
    upper: tuple
    lower: tuple

    @property
    def sequence(self) -> tuple:
        return self.real


def _snapshot(stage, labels, x):
    real = sorted((z.real, lab) for lab, z in zip(labels, x) if abs(z.imag) < REAL_TOL and z.real > math.pi / 2)
    upper = sorted((z.real, lab) for lab, z in zip(labels, x) if z.imag >= REAL_TOL)
    lower = sorted((z.real, lab) for lab, z in zip(labels, x) if z.imag <= -REAL_TOL)
    return ConfigurationSnapshot(stage, tuple(l for _, l in real), tuple(l for _, l in upper), tuple(l for _, l in lower))


def replay_configuration(n: int, opts: CertifyOptions | None = None) -> list[ConfigurationSnapshot]:
    """Root configurations along loop n followed by loop n+1.

    Stages: ``first`` (after passing the first critical value, or on arrival
    when n = 1), ``intermediate`` (arrival at -n*pi), ``last`` (after the
    circle), ``final`` (back at the basepoint) and ``composite`` (after the
    next loop as well).
    """
    if n < 2:
        raise ParameterError(f"n must be >= 2, got {n}")
    opts = opts or CertifyOptions()
    family = FunctionFamily.TAN_MINUS_X
    window = default_window(family, n)
    basepoint = DEFAULT_BASEPOINT if opts.basepoint is None else complex(opts.basepoint)
    roots = initial_roots(family, window, basepoint, mode="conjugate")
    sides = choose_detour_sides(n + 1, basepoint=basepoint, detour_radius=opts.detour_radius,
                                clearance=opts.clearance, window=window, opts=opts.track)
    first = _corridor_loop_job((n, sides, roots, opts))
    second = _corridor_loop_job((n + 1, sides, roots, opts))
    kw = dict(basepoint=basepoint, detour_radius=opts.detour_radius, loop_radius=opts.loop_radius,
              clearance=opts.clearance)
    p1 = paper_path(n, first.spec.winding, detour_sides=sides[: n - 1], **kw)
    p2 = paper_path(n + 1, second.spec.winding, detour_sides=sides[:n], **kw)
    rep = track(family, p1.then(p2), roots, opts.track)
    segs = p1.segments
    circle = next(i for i, s in enumerate(segs) if s.kind == "ARC" and abs(s.sweep) >= 2 * math.pi - 1e-9)
    first_arc = next(i for i, s in enumerate(segs) if s.kind == "ARC")
    stages = [
        ("first", rep.breakpoints[first_arc if first_arc < circle else circle - 1]),
        ("intermediate", rep.breakpoints[circle - 1]),
        ("last", rep.breakpoints[circle]),
        ("final", rep.breakpoints[len(segs) - 1]),
        ("composite", rep.breakpoints[-1]),
    ]
    labels = [tr.label for tr in rep.trajectories]
    return [_snapshot(name, labels, rep.positions(idx)) for name, idx in stages]
