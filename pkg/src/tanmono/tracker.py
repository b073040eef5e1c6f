"""Predictor-corrector continuation of all roots along a parameter path.

Roots advance in lockstep: an Euler predictor ``dx = -(g_a / g_x) da`` and a
Newton corrector at the new parameter value, with the step halved whenever
any root fails to converge, leaves its residual budget, or moves more than
half the distance to its nearest neighbour.  The induced permutation comes
from matching endpoints to the starting roots with a ratio test.
"""

from __future__ import annotations

import csv
import functools
import io
import math
from dataclasses import dataclass, field

import numpy as np

from .census import Rectangle, isolate_roots
from .critical import critical_values_covering
from .errors import (AmbiguousMatchError, GeometryError, LabelingError, ParameterError, ProbeError,
                     TrackingError)
from .families import FunctionFamily, g_and_partials, x_derivatives
from .paths import (DEFAULT_CLEARANCE, DEFAULT_RADIUS, DEFAULT_BASEPOINT, ArcSegment, LineSegment, ParamPath, Side,
                    _side_sign, validate_path)
from .permutations import Permutation, label_key

REAL_TOL = 1e-8


@dataclass(frozen=True)
class TrackOptions:
    step_factor: float = 0.2
    max_step: float = 0.05
    newton_tol: float = 1e-12
    residual_tol: float = 1e-10
    max_newton: int = 5
    min_dt: float = 1e-9
    match_ratio: float = 4.0
    collision_factor: float = 0.5
    simple_root_tol: float = 1e-6
    clearance: float = DEFAULT_CLEARANCE

    @classmethod
    def from_tolerances(cls, tolerances: dict | None) -> "TrackOptions":
        if not tolerances:
            return cls()
        known = cls.__dataclass_fields__
        bad = [k for k in tolerances if k not in known]
        if bad:
            raise ParameterError(f"unknown tolerance names {bad}; known: {sorted(known)}")
        vals = {}
        for k, v in tolerances.items():
            v = float(v)
            if not v > 0:
                raise ParameterError(f"tolerance {k} must be positive, got {v}")
            vals[k] = int(v) if k == "max_newton" else v
        return cls(**vals)


@dataclass
class LabeledRoots:
    """Roots at a basepoint together with their names.

    mode is ``"conjugate"`` (one conjugate pair c_1/c_2, real roots z_k),
    ``"real"`` (all real, z_1..z_n) or ``"generic"`` (r_1..r_n).
    """

    labels: list
    locations: np.ndarray
    mode: str
    basepoint: complex
    window: Rectangle | None = None

    @property
    def index_range(self):
        idx = [label_key(lab)[1] for lab in self.labels if lab.startswith("z_")]
        return (min(idx), max(idx)) if idx else None

    def location(self, label: str) -> complex:
        return complex(self.locations[self.labels.index(label)])


def _label_conjugate(family, real_locs, pair_re):
    if family is FunctionFamily.TAN_MINUS_X:
        # z_m is the real root on the branch (m*pi - pi/2, m*pi + pi/2); z_0 tends to 0 with a
        branches = [int(round(x.real / math.pi)) for x in real_locs]
        if len(set(branches)) != len(branches):
            raise LabelingError("two real roots on one branch of tan")
        return [f"z_{m}" for m in branches]
    labels = []
    right = [x for x in real_locs if x.real > pair_re + 1e-9]
    left = [x for x in real_locs if x.real < pair_re - 1e-9]
    for x in real_locs:
        if abs(x.real - pair_re) <= 1e-9:
            labels.append("z_0")
        elif x.real > pair_re:
            labels.append(f"z_{1 + sorted(right, key=lambda z: z.real).index(x)}")
        else:
            labels.append(f"z_-{1 + sorted(left, key=lambda z: -z.real).index(x)}")
    return labels


def initial_roots(family: FunctionFamily, window: Rectangle, basepoint: complex, mode: str = "auto") -> LabeledRoots:
    """Isolate and name the roots in window at the basepoint."""
    b = complex(basepoint)
    if mode not in ("auto", "conjugate", "real", "generic"):
        raise ParameterError(f"unknown labeling mode {mode!r}")
    recs = isolate_roots(family, window, b)
    multiple = [r for r in recs if r.multiplicity > 1]
    if multiple:
        raise LabelingError(f"multiple root at {multiple[0].location} (basepoint is a critical value)")
    locs = [r.location for r in recs]
    real = [x for x in locs if abs(x.imag) < REAL_TOL]
    nonreal = [x for x in locs if abs(x.imag) >= REAL_TOL]
    is_pair = (len(nonreal) == 2 and abs(nonreal[0] - nonreal[1].conjugate()) < 1e-7 and abs(b.imag) < 1e-12)
    if mode == "auto":
        mode = "real" if not nonreal and abs(b.imag) < 1e-12 else ("conjugate" if is_pair else "generic")
    if mode == "conjugate" and not is_pair:
        raise LabelingError(
            f"conjugate-pair labeling needs a real basepoint and exactly one conjugate pair; "
            f"found {len(nonreal)} non-real roots at a={b}"
        )
    if mode == "real" and nonreal:
        raise LabelingError(f"all-real labeling requested but {len(nonreal)} roots are non-real")
    if mode == "generic":
        order = sorted(locs, key=lambda z: (z.real, z.imag))
        return LabeledRoots([f"r_{i + 1}" for i in range(len(order))], np.array(order), "generic", b, window)
    if mode == "real":
        order = sorted(real, key=lambda z: z.real)
        return LabeledRoots([f"z_{i + 1}" for i in range(len(order))], np.array(order, dtype=complex), "real", b, window)
    upper = max(nonreal, key=lambda z: z.imag)
    lower = min(nonreal, key=lambda z: z.imag)
    real = sorted(real, key=lambda z: z.real)
    rl = _label_conjugate(family, real, upper.real)
    labels = ["c_1", "c_2"] + rl
    locations = [upper, lower] + real
    order = sorted(range(len(labels)), key=lambda i: label_key(labels[i]))
    return LabeledRoots([labels[i] for i in order], np.array([locations[i] for i in order]), "conjugate", b, window)


@dataclass
class RootTrajectory:
    label: str
    t: np.ndarray
    a: np.ndarray
    x: np.ndarray
    residual: np.ndarray

    @property
    def samples(self):
        return list(zip(self.t.tolist(), self.a.tolist(), self.x.tolist(), self.residual.tolist()))


@dataclass
class TrackingReport:
    trajectories: list
    permutation: Permutation | None
    matching_quality: float
    breakpoints: list = field(default_factory=list)
    path: ParamPath | None = None
    labels: LabeledRoots | None = None

    @property
    def t(self) -> np.ndarray:
        return self.trajectories[0].t if self.trajectories else np.array([0.0])

    @property
    def a(self) -> np.ndarray:
        return self.trajectories[0].a if self.trajectories else np.array([0j])

    def positions(self, index: int = -1) -> np.ndarray:
        return np.array([tr.x[index] for tr in self.trajectories])

    @property
    def endpoints(self) -> np.ndarray:
        return self.positions(-1)

    def by_label(self, label: str) -> RootTrajectory:
        for tr in self.trajectories:
            if tr.label == label:
                return tr
        raise KeyError(label)

    def final_roots(self) -> LabeledRoots:
        lr = self.labels
        return LabeledRoots(list(lr.labels), self.endpoints, lr.mode, complex(self.a[-1]), lr.window)


def _separation(x: np.ndarray) -> np.ndarray:
    if len(x) < 2:
        return np.full(len(x), np.inf)
    d = np.abs(x[:, None] - x[None, :])
    np.fill_diagonal(d, np.inf)
    return d.min(axis=1)


def _attempt(family, x, a, a_new, opts: TrackOptions):
    """One predictor-corrector step; returns (x_new, residuals) or (None, failing index)."""
    _, gx, ga = g_and_partials(family, x, a)
    xn = x - ga / gx * (a_new - a)
    converged = False
    for _ in range(opts.max_newton):
        g, gxn = x_derivatives(family, xn, a_new, order=1)
        dx = g / gxn
        xn = xn - dx
        if not np.all(np.isfinite(xn)):
            return None, int(np.argmax(~np.isfinite(xn)))
        if np.all(np.abs(dx) <= opts.newton_tol * np.maximum(1.0, np.abs(xn))):
            converged = True
            break
    if not converged:
        return None, int(np.argmax(np.abs(dx) / np.maximum(1.0, np.abs(xn))))
    res = np.abs(x_derivatives(family, xn, a_new, order=0)[0])
    bad = res >= opts.residual_tol * np.maximum(1.0, np.abs(xn))
    if np.any(bad):
        return None, int(np.argmax(bad))
    move = np.abs(xn - x)
    jump = move >= opts.collision_factor * _separation(x)
    if np.any(jump):
        return None, int(np.argmax(jump))
    return (xn, res), None


def _match(start: np.ndarray, end: np.ndarray, labels: list, ratio: float):
    if len(start) == 0:
        return Permutation(), math.inf
    d = np.abs(end[:, None] - start[None, :])
    mapping = {}
    quality = math.inf
    for i in range(len(end)):
        order = np.argsort(d[i])
        d1 = d[i, order[0]]
        d2 = d[i, order[1]] if len(order) > 1 else math.inf
        q = math.inf if d1 == 0 else d2 / d1
        quality = min(quality, q)
        if q < ratio:
            raise AmbiguousMatchError(f"endpoint of {labels[i]} matches ambiguously (ratio {q:.3g} < {ratio})")
        mapping[labels[i]] = labels[int(order[0])]
    if len(set(mapping.values())) != len(mapping):
        raise AmbiguousMatchError("endpoint matching is not a bijection")
    return Permutation(mapping), quality


def track(family: FunctionFamily, path: ParamPath, roots: LabeledRoots, opts: TrackOptions | None = None,
          critical_values=None) -> TrackingReport:
    """Continue every root in ``roots`` along ``path``.

    For closed paths the report carries the induced permutation
    (label -> label of the starting root whose position it ends at).
    """
    opts = opts or TrackOptions()
    if abs(path.start_point - roots.basepoint) > 1e-12:
        raise ParameterError(f"roots are given at {roots.basepoint} but the path starts at {path.start_point}")
    if critical_values is None:
        critical_values = critical_values_covering(family, path.sample(8))
    cvs = np.asarray(critical_values, dtype=complex)
    problems = validate_path(path, cvs, clearance=opts.clearance)
    if problems:
        raise GeometryError("; ".join(str(p) for p in problems))
    labels = list(roots.labels)
    x = np.asarray(roots.locations, dtype=complex).copy()
    a0 = complex(path.start_point)
    _, gx0, _ = g_and_partials(family, x, a0)
    if len(x) and np.any(np.abs(gx0) <= opts.simple_root_tol):
        i = int(np.argmin(np.abs(gx0)))
        raise ParameterError(f"root {labels[i]} is not simple at the basepoint (|g_x| = {abs(gx0[i]):.3g})")

    ts, As, Xs, Rs = [0.0], [a0], [x.copy()], [np.abs(x_derivatives(family, x, a0, order=0)[0])]
    breakpoints = []
    total = path.length
    done = 0.0
    for seg in path.segments:
        L = seg.length
        if L == 0:
            breakpoints.append(len(ts) - 1)
            continue
        tau = 0.0
        while tau < 1.0:
            a = complex(seg.point(tau))
            dist = float(np.min(np.abs(cvs - a))) if cvs.size else math.inf
            da = min(opts.max_step, opts.step_factor * dist)
            dtau = da / L
            while True:
                last = dtau >= 1.0 - tau
                tau_new = 1.0 if last else tau + dtau
                a_new = complex(seg.point(tau_new))
                result, fail = _attempt(family, x, a, a_new, opts)
                if result is not None:
                    break
                dtau *= 0.5
                if dtau * L / total < opts.min_dt:
                    t_now = (done + tau * L) / total
                    raise TrackingError(f"step size underflow at t={t_now:.9f} (a={a}) for root {labels[fail]}")
            x, res = result
            tau = tau_new
            ts.append((done + tau * L) / total)
            As.append(a_new)
            Xs.append(x.copy())
            Rs.append(res)
        done += L
        breakpoints.append(len(ts) - 1)

    X = np.array(Xs)
    R = np.array(Rs)
    T = np.array(ts)
    A = np.array(As)
    trajectories = [RootTrajectory(lab, T, A, X[:, i], R[:, i]) for i, lab in enumerate(labels)]
    perm, quality = None, math.nan
    if path.closed:
        perm, quality = _match(np.asarray(roots.locations, dtype=complex), X[-1], labels, opts.match_ratio)
    return TrackingReport(trajectories, perm, quality, breakpoints, path, roots)


def conjugate_check(report: TrackingReport, path: ParamPath | None = None, tol: float = 1e-7) -> list:
    """Samples with real parameter whose root multiset is not closed under conjugation."""
    path = path or report.path
    if abs(complex(path.basepoint).imag) > 1e-12:
        raise ParameterError(f"conjugate check needs a real basepoint, got {path.basepoint}")
    out = []
    A = report.a
    for k in np.nonzero(np.abs(A.imag) < 1e-12)[0]:
        x = report.positions(int(k))
        d = np.abs(np.conj(x)[:, None] - x[None, :])
        unused = set(range(len(x)))
        for i in range(len(x)):
            j = min(unused, key=lambda j: d[i, j]) if unused else None
            if j is None or d[i, j] > tol:
                out.append(f"t={report.t[k]:.9f}: root {report.trajectories[i].label} has no conjugate partner")
                break
            unused.discard(j)
    return out


def hausdorff(u, v) -> float:
    u, v = np.asarray(u, dtype=complex), np.asarray(v, dtype=complex)
    if u.size == 0 and v.size == 0:
        return 0.0
    if u.size == 0 or v.size == 0:
        return math.inf
    d = np.abs(u[:, None] - v[None, :])
    return float(max(d.min(axis=1).max(), d.min(axis=0).max()))


def endpoint_census_distance(family, report: TrackingReport, window: Rectangle) -> float:
    """Hausdorff distance between tracked endpoints and a fresh census at the end parameter."""
    fresh = [r.location for r in isolate_roots(family, window, complex(report.a[-1]))]
    return hausdorff(report.endpoints, fresh)


def trajectories_csv(report: TrackingReport) -> str:
    """CSV dump: ``t,a_re,a_im,label,x_re,x_im,residual`` ordered by t then label."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["t", "a_re", "a_im", "label", "x_re", "x_im", "residual"])
    trs = sorted(report.trajectories, key=lambda tr: label_key(tr.label))
    for k in range(len(report.t)):
        a = report.a[k]
        for tr in trs:
            x = tr.x[k]
            w.writerow([_g(tr.t[k]), _g(a.real), _g(a.imag), tr.label, _g(x.real), _g(x.imag), _g(tr.residual[k])])
    return buf.getvalue()


def _g(v) -> str:
    return f"{float(v):.12g}"


# --- corridor loop helpers -------------------------------------------------


def default_window(family: FunctionFamily, n_max: int = 4) -> Rectangle:
    """Window holding every root the loops up to -(n_max+1)*pi can move."""
    if family is FunctionFamily.TAN_MINUS_X:
        return Rectangle(0j, (n_max + 2) * math.pi, 4.0)
    return Rectangle(0j, 3.0, 3.0)


def _open(p, segs):
    return ParamPath(p, tuple(segs), closed=False)


@functools.lru_cache(maxsize=64)
def choose_detour_sides(n: int, basepoint: complex = DEFAULT_BASEPOINT, detour_radius: float = DEFAULT_RADIUS,
                        clearance: float = DEFAULT_CLEARANCE, window: Rectangle | None = None,
                        opts: TrackOptions | None = None) -> tuple:
    """Pick, for each -m*pi (m = 1..n-1), the semicircle that lifts the real root.

    BELOW is probed first; if the real root near m*pi does not end in the
    upper half-plane, ABOVE is probed.
    """
    if n < 2:
        raise ParameterError(f"n must be >= 2, got {n}")
    if detour_radius + clearance >= math.pi / 2:
        raise ProbeError(
            f"detour radius {detour_radius} plus clearance {clearance} exceeds half the spacing of critical values"
        )
    family = FunctionFamily.TAN_MINUS_X
    opts = opts or TrackOptions(clearance=clearance)
    window = window or default_window(family, n)
    roots = initial_roots(family, window, basepoint, mode="conjugate")
    cvs = critical_values_covering(family, [basepoint, -(n + 1) * math.pi])
    cur = complex(basepoint)
    sides = []
    for m in range(1, n):
        v = complex(-m * math.pi)
        rep = track(family, _open(cur, [LineSegment(cur, v + detour_radius)]), roots, opts, cvs)
        here = rep.final_roots()
        real = [i for i, z in enumerate(here.locations) if abs(z.imag) < REAL_TOL]
        idx = min(real, key=lambda i: abs(here.locations[i] - m * math.pi))
        for side in (Side.BELOW, Side.ABOVE):
            sgn = _side_sign(side, 0.0)
            arc = ArcSegment(v, detour_radius, 0.0, sgn * math.pi)
            after = track(family, _open(here.basepoint, [arc]), here, opts, cvs).final_roots()
            if after.locations[idx].imag > 1e-6:
                break
        else:
            raise ProbeError(f"neither semicircle at {v} sends the real root near {m}*pi upward")
        sides.append(side)
        roots = after
        cur = after.basepoint
    return tuple(sides)
