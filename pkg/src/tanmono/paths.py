"""Parameter-plane paths: line segments and circular arcs.

A path is traced by the parameter ``a``.  The builders here produce
elementary loops (corridor to a critical value, small circle, same
corridor back) with semicircular detours around critical values that lie
on the corridor.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import GeometryError, ParameterError

CONTINUITY_TOL = 1e-12
DEFAULT_CLEARANCE = 0.05
DEFAULT_RADIUS = 0.1
DEFAULT_BASEPOINT = -1.0 + 0j


class Side(str, enum.Enum):
    ABOVE = "ABOVE"
    BELOW = "BELOW"


@dataclass(frozen=True)
class LineSegment:
    start: complex
    end: complex

    kind = "LINE"

    @property
    def start_point(self) -> complex:
        return self.start

    @property
    def end_point(self) -> complex:
        return self.end

    @property
    def length(self) -> float:
        return abs(self.end - self.start)

    def point(self, tau):
        return self.start + np.asarray(tau, dtype=float) * (self.end - self.start)

    def reversed(self) -> "LineSegment":
        return LineSegment(self.end, self.start)

    def distance_to(self, p: complex) -> float:
        d = self.end - self.start
        L2 = abs(d) ** 2
        if L2 == 0:
            return abs(p - self.start)
        s = min(1.0, max(0.0, ((p - self.start) * d.conjugate()).real / L2))
        return abs(p - (self.start + s * d))

    def to_json(self) -> dict:
        return {"kind": "LINE", "start": _cv(self.start), "end": _cv(self.end)}


@dataclass(frozen=True)
class ArcSegment:
    center: complex
    radius: float
    angle_from: float
    angle_to: float

    kind = "ARC"

    def __post_init__(self):
        if not self.radius > 0:
            raise ParameterError(f"arc radius must be positive, got {self.radius}")

    @property
    def sweep(self) -> float:
        return self.angle_to - self.angle_from

    @property
    def start_point(self) -> complex:
        return self.center + self.radius * complex(math.cos(self.angle_from), math.sin(self.angle_from))

    @property
    def end_point(self) -> complex:
        return self.center + self.radius * complex(math.cos(self.angle_to), math.sin(self.angle_to))

    @property
    def length(self) -> float:
        return self.radius * abs(self.sweep)

    def point(self, tau):
        th = self.angle_from + np.asarray(tau, dtype=float) * self.sweep
        return self.center + self.radius * np.exp(1j * th)

    def reversed(self) -> "ArcSegment":
        return ArcSegment(self.center, self.radius, self.angle_to, self.angle_from)

    def distance_to(self, p: complex) -> float:
        v = p - self.center
        if abs(self.sweep) >= 2 * math.pi or abs(v) == 0:
            return abs(abs(v) - self.radius)
        lo = min(self.angle_from, self.angle_to)
        phi = math.atan2(v.imag, v.real)
        rel = (phi - lo) % (2 * math.pi)
        if rel <= abs(self.sweep):
            return abs(abs(v) - self.radius)
        return min(abs(p - self.start_point), abs(p - self.end_point))

    def to_json(self) -> dict:
        return {
            "kind": "ARC",
            "center": _cv(self.center),
            "radius": self.radius,
            "angle_from": self.angle_from,
            "angle_to": self.angle_to,
        }


PathSegment = LineSegment | ArcSegment


@dataclass(frozen=True)
class LoopSpec:
    target_index: int
    winding: int = 1
    detour_radius: float = DEFAULT_RADIUS
    loop_radius: float = DEFAULT_RADIUS
    detour_sides: tuple = ()

    def __post_init__(self):
        if self.winding == 0 or abs(self.winding) > 2:
            raise ParameterError(f"winding must be +-1 or +-2, got {self.winding}")
        if not (self.detour_radius > 0 and self.loop_radius > 0):
            raise ParameterError("radii must be positive")
        object.__setattr__(self, "detour_sides", tuple(Side(s) for s in self.detour_sides))

    def to_json(self) -> dict:
        return {
            "target_index": self.target_index,
            "winding": self.winding,
            "detour_radius": self.detour_radius,
            "loop_radius": self.loop_radius,
            "detour_sides": [s.value for s in self.detour_sides],
        }


@dataclass(frozen=True)
class ParamPath:
    basepoint: complex
    segments: tuple = ()
    closed: bool = True
    loop: LoopSpec | None = field(default=None, compare=False)

    @property
    def start_point(self) -> complex:
        return self.segments[0].start_point if self.segments else self.basepoint

    @property
    def end_point(self) -> complex:
        return self.segments[-1].end_point if self.segments else self.basepoint

    @property
    def length(self) -> float:
        return sum(s.length for s in self.segments)

    def reversed(self) -> "ParamPath":
        return ParamPath(self.end_point, tuple(s.reversed() for s in reversed(self.segments)), self.closed)

    def then(self, other: "ParamPath") -> "ParamPath":
        """Concatenation: this path first, then ``other``."""
        if abs(self.end_point - other.start_point) > CONTINUITY_TOL:
            raise GeometryError(f"cannot concatenate: {self.end_point} != {other.start_point}")
        closed = abs(other.end_point - self.basepoint) <= CONTINUITY_TOL
        return ParamPath(self.basepoint, self.segments + other.segments, closed)

    def sample(self, per_segment: int = 64) -> np.ndarray:
        if not self.segments:
            return np.array([self.basepoint])
        pts = [self.segments[0].point(0.0)]
        for seg in self.segments:
            n = per_segment if seg.kind == "LINE" else max(per_segment, int(per_segment * abs(seg.sweep) / math.pi))
            pts.append(seg.point(np.linspace(0, 1, n + 1)[1:]))
        return np.concatenate([np.atleast_1d(p) for p in pts])


def _cv(z: complex) -> list:
    return [float(z.real), float(z.imag)]


def _side_sign(side: Side, theta_back: float) -> int:
    # +1 is counterclockwise; the arc midpoint sits at theta_back + sign*pi/2
    up = math.cos(theta_back)
    ccw_is_above = up >= 0 if abs(up) > 1e-12 else True
    return 1 if (side is Side.ABOVE) == ccw_is_above else -1


def intermediate_critical_values(critical_value: complex, basepoint: complex, critical_values, radius: float) -> list:
    """Critical values strictly between basepoint and target, within ``radius`` of the corridor."""
    d = critical_value - basepoint
    L = abs(d)
    out = []
    for v in np.asarray(critical_values, dtype=complex):
        v = complex(v)
        if abs(v - critical_value) < 1e-12:
            continue
        s = ((v - basepoint) * d.conjugate()).real / L
        if 0 < s < L and LineSegment(basepoint, critical_value).distance_to(v) < radius:
            out.append((s, v))
    return [v for _, v in sorted(out, key=lambda t: t[0])]


def _line(segs, p, q):
    if abs(q - p) > 0:
        segs.append(LineSegment(p, q))


def elementary_loop(critical_value: complex, basepoint: complex, spec: LoopSpec, critical_values=None,
                    clearance: float = DEFAULT_CLEARANCE) -> ParamPath:
    """Corridor from basepoint to critical_value, full circle(s), same corridor back.

    ``critical_values`` defaults to those of the tan family near the
    corridor; intermediate ones are bypassed on the sides listed in
    ``spec.detour_sides`` (same sides on the way back).
    """
    c, b = complex(critical_value), complex(basepoint)
    if critical_values is None:
        from .critical import critical_values_covering
        from .families import FunctionFamily
        critical_values = critical_values_covering(FunctionFamily.TAN_MINUS_X, [b, c])
    if abs(c - b) <= spec.loop_radius + clearance:
        raise GeometryError(f"basepoint {b} is too close to critical value {c}")
    d = (c - b) / abs(c - b)
    inter = intermediate_critical_values(c, b, critical_values, spec.detour_radius)
    if len(inter) != len(spec.detour_sides):
        raise ParameterError(
            f"{len(inter)} critical values lie on the corridor but {len(spec.detour_sides)} detour sides were given"
        )
    back = -d
    theta_back = math.atan2(back.imag, back.real)
    r, R = spec.detour_radius, spec.loop_radius
    segs: list = []
    cur = b
    for v, side in zip(inter, spec.detour_sides):
        _line(segs, cur, v - r * d)
        sgn = _side_sign(side, theta_back)
        arc = ArcSegment(v, r, theta_back, theta_back + sgn * math.pi)
        segs.append(arc)
        cur = arc.end_point
    _line(segs, cur, c - R * d)
    circle = ArcSegment(c, R, theta_back, theta_back + 2 * math.pi * spec.winding)
    segs.append(circle)
    cur = circle.end_point
    for v, side in zip(reversed(inter), reversed(spec.detour_sides)):
        sgn = _side_sign(side, theta_back)
        arc = ArcSegment(v, r, theta_back + sgn * math.pi, theta_back)
        _line(segs, cur, arc.start_point)
        segs.append(arc)
        cur = arc.end_point
    _line(segs, cur, b)
    path = ParamPath(b, tuple(segs), True, spec)
    allowed = {r, R}
    problems = validate_path(path, critical_values, clearance=clearance, radii=allowed)
    if problems:
        raise GeometryError("; ".join(str(p) for p in problems))
    return path


def paper_path(n: int, winding: int = 1, *, basepoint: complex = DEFAULT_BASEPOINT, detour_radius: float = DEFAULT_RADIUS,
               loop_radius: float = DEFAULT_RADIUS, clearance: float = DEFAULT_CLEARANCE, detour_sides=None,
               **probe_opts) -> ParamPath:
    """Loop around the n-th negative critical value -n*pi of the tan family.

    The corridor runs left along the real axis from the basepoint.  Unless
    given, detour sides come from :func:`tanmono.tracker.choose_detour_sides`
    and are recorded in ``path.loop``.
    """
    if n < 1:
        raise ParameterError(f"n must be >= 1, got {n}")
    if detour_sides is None:
        if n == 1:
            detour_sides = ()
        else:
            from .tracker import choose_detour_sides
            detour_sides = choose_detour_sides(
                n, basepoint=basepoint, detour_radius=detour_radius, clearance=clearance, **probe_opts
            )
    spec = LoopSpec(n, winding, detour_radius, loop_radius, tuple(detour_sides)[: n - 1])
    return elementary_loop(complex(-n * math.pi), basepoint, spec, clearance=clearance)


@dataclass(frozen=True)
class Violation:
    kind: str
    message: str
    critical_value: complex | None = None

    def __str__(self):
        return f"{self.kind}: {self.message}"


def validate_path(path: ParamPath, critical_values, clearance: float = DEFAULT_CLEARANCE, radii=None) -> list[Violation]:
    """All clearance and continuity violations; an empty list means valid."""
    out = []
    cvs = [complex(v) for v in np.asarray(critical_values, dtype=complex).ravel()]
    segs = path.segments
    if segs and abs(segs[0].start_point - path.basepoint) > CONTINUITY_TOL:
        out.append(Violation("continuity", f"path starts at {segs[0].start_point}, not at basepoint {path.basepoint}"))
    for i in range(len(segs) - 1):
        gap = abs(segs[i].end_point - segs[i + 1].start_point)
        if gap > CONTINUITY_TOL:
            out.append(Violation("continuity", f"gap {gap:.3e} between segments {i} and {i + 1}"))
    if path.closed and abs(path.end_point - path.basepoint) > CONTINUITY_TOL:
        out.append(Violation("closure", f"closed path ends at {path.end_point}, not at {path.basepoint}"))
    for v in cvs:
        if not segs and abs(path.basepoint - v) < clearance:
            out.append(Violation("clearance", f"constant path sits at critical value {v}", v))
        for i, seg in enumerate(segs):
            if seg.kind == "ARC" and abs(seg.center - v) < 1e-12:
                if seg.radius < clearance:
                    out.append(Violation("clearance", f"arc {i} around {v} has radius {seg.radius} < {clearance}", v))
                elif radii is not None and not any(abs(seg.radius - r) < 1e-12 for r in radii):
                    out.append(Violation("radius", f"arc {i} around {v} has radius {seg.radius} not in {sorted(radii)}", v))
                continue
            dist = seg.distance_to(v)
            if dist < clearance:
                out.append(Violation("clearance", f"segment {i} passes within {dist:.3g} of critical value {v}", v))
    return out


def realized_clearance(path: ParamPath, critical_values) -> float:
    """Smallest distance from the path to any of the critical values."""
    cvs = [complex(v) for v in np.asarray(critical_values, dtype=complex).ravel()]
    if not cvs:
        return math.inf
    if not path.segments:
        return min(abs(path.basepoint - v) for v in cvs)
    return min(seg.distance_to(v) for seg in path.segments for v in cvs)


def jitter(path: ParamPath, magnitude: float, seed: int, critical_values=None,
           clearance: float = DEFAULT_CLEARANCE) -> ParamPath:
    """Perturb the interior vertices of the straight parts of a path.

    Each line segment is cut in three and every joint between two line
    pieces is moved by a random offset of size <= magnitude.  Joints with
    arcs and the path's endpoints stay put, so arcs around critical values
    are unchanged.  ``magnitude`` must stay below half the path's realized
    clearance; the result must still keep ``clearance``.
    """
    if critical_values is None:
        from .critical import critical_values_covering
        from .families import FunctionFamily
        critical_values = critical_values_covering(FunctionFamily.TAN_MINUS_X, path.sample(8))
    room = realized_clearance(path, critical_values)
    if magnitude < 0 or magnitude >= room / 2:
        raise ParameterError(f"jitter magnitude must be in [0, {room / 2:.6g}) (half the path clearance), "
                             f"got {magnitude}")
    if magnitude == 0:
        return path
    pieces: list = []
    for seg in path.segments:
        if seg.kind == "LINE":
            pts = [seg.start + (seg.end - seg.start) * k / 3 for k in range(4)]
            pieces.extend(LineSegment(pts[k], pts[k + 1]) for k in range(3))
        else:
            pieces.append(seg)
    rng = np.random.default_rng(seed)
    for i in range(len(pieces) - 1):
        if pieces[i].kind == "LINE" and pieces[i + 1].kind == "LINE":
            rho = magnitude * math.sqrt(rng.random())
            phi = 2 * math.pi * rng.random()
            off = rho * complex(math.cos(phi), math.sin(phi))
            joint = pieces[i].end + off
            pieces[i] = LineSegment(pieces[i].start, joint)
            pieces[i + 1] = LineSegment(joint, pieces[i + 1].end)
    out = ParamPath(path.basepoint, tuple(pieces), path.closed, path.loop)
    problems = validate_path(out, critical_values, clearance=clearance)
    if problems:
        raise GeometryError("jittered path invalid: " + "; ".join(str(p) for p in problems))
    return out


def winding_number(path: ParamPath, p: complex, per_segment: int = 256) -> int:
    """Winding number of a closed path around p, by angle summation."""
    total = 0.0
    for seg in path.segments:
        if seg.kind == "ARC" and abs(seg.center - p) < 1e-12:
            total += seg.sweep
            continue
        n = per_segment if seg.kind == "LINE" else max(per_segment, int(per_segment * abs(seg.sweep) / math.pi))
        z = seg.point(np.linspace(0.0, 1.0, n + 1)) - p
        total += float(np.sum(np.angle(z[1:] / z[:-1])))
    return int(round(total / (2 * math.pi)))


# --- JSON -----------------------------------------------------------------------


def path_to_dict(path: ParamPath) -> dict:
    out = {
        "basepoint": _cv(path.basepoint),
        "segments": [s.to_json() for s in path.segments],
        "closed": path.closed,
    }
    if path.loop is not None:
        out["loop"] = path.loop.to_json()
    return out


def path_to_json(path: ParamPath) -> str:
    return json.dumps(path_to_dict(path), indent=2)


def _parse_cv(obj, where):
    if isinstance(obj, (list, tuple)) and len(obj) == 2 and all(isinstance(v, (int, float)) for v in obj):
        return complex(float(obj[0]), float(obj[1]))
    if isinstance(obj, (int, float)) and not isinstance(obj, bool):
        return complex(float(obj))
    raise ParameterError(f"{where}: expected [re, im], got {obj!r}")


def _parse_real(obj, where):
    if isinstance(obj, (int, float)) and not isinstance(obj, bool):
        return float(obj)
    raise ParameterError(f"{where}: expected a number, got {obj!r}")


def path_from_dict(doc) -> ParamPath:
    if not isinstance(doc, dict):
        raise ParameterError("path document: expected a JSON object")
    for key in ("basepoint", "segments"):
        if key not in doc:
            raise ParameterError(f"path document: missing key {key!r}")
    base = _parse_cv(doc["basepoint"], "basepoint")
    if not isinstance(doc["segments"], list):
        raise ParameterError("segments: expected a list")
    segs = []
    for i, s in enumerate(doc["segments"]):
        where = f"segments[{i}]"
        if not isinstance(s, dict) or "kind" not in s:
            raise ParameterError(f"{where}: expected an object with a 'kind'")
        kind = str(s["kind"]).upper()
        try:
            if kind == "LINE":
                segs.append(LineSegment(_parse_cv(s["start"], f"{where}.start"), _parse_cv(s["end"], f"{where}.end")))
            elif kind == "ARC":
                segs.append(ArcSegment(
                    _parse_cv(s["center"], f"{where}.center"),
                    _parse_real(s["radius"], f"{where}.radius"),
                    _parse_real(s["angle_from"], f"{where}.angle_from"),
                    _parse_real(s["angle_to"], f"{where}.angle_to"),
                ))
            else:
                raise ParameterError(f"{where}.kind: expected LINE or ARC, got {s['kind']!r}")
        except KeyError as exc:
            raise ParameterError(f"{where}: missing field {exc.args[0]!r}") from None
    closed = doc.get("closed", True)
    if not isinstance(closed, bool):
        raise ParameterError("closed: expected true or false")
    loop = None
    if isinstance(doc.get("loop"), dict):
        ld = doc["loop"]
        loop = LoopSpec(int(ld["target_index"]), int(ld["winding"]), float(ld["detour_radius"]),
                        float(ld["loop_radius"]), tuple(ld.get("detour_sides", ())))
    return ParamPath(base, tuple(segs), closed, loop)


def path_from_json(text: str) -> ParamPath:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParameterError(f"invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    return path_from_dict(doc)
