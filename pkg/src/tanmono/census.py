"""Root counting by the argument principle and root isolation by subdivision."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import BoundaryRootError, ParameterError, SubdivisionError
from .families import FunctionFamily, x_derivatives
from .quadrature import QuadratureError, gk15

BOUNDARY_MARGIN = 1e-3
WINDING_TOL = 1e-6
SNAP_TOL = 1e-3
CLUSTER_DIAMETER = 1e-6
# a certified multi-root cell this small that no longer splits cleanly is
# reported as a cluster: cancellation in g near a multiple root makes g'/g
# noise long before CLUSTER_DIAMETER is reached
CLUSTER_FALLBACK_DIAMETER = 1e-3
MULTIPLICITY_RADIUS = 1e-3
MAX_DEPTH = 60
NUDGE = 1e-2
NUDGE_RETRIES = 3

# off-centre split fractions; exact halving would put cut lines through
# the symmetric root sets these families have
_SPLITS = [(0.5731, 0.5417), (0.4113, 0.3829), (0.6597, 0.6261), (0.4543, 0.4689), (0.7089, 0.2953), (0.3307, 0.7141)]


@dataclass(frozen=True)
class Rectangle:
    center: complex
    half_width: float
    half_height: float

    def __post_init__(self):
        if not (self.half_width > 0 and self.half_height > 0):
            raise ParameterError(f"rectangle half dimensions must be positive: {self}")

    @property
    def corners(self):
        c, w, h = self.center, self.half_width, self.half_height
        return (c + complex(-w, -h), c + complex(w, -h), c + complex(w, h), c + complex(-w, h))

    @property
    def diameter(self) -> float:
        return 2.0 * math.hypot(self.half_width, self.half_height)

    def contains(self, z: complex, slack: float = 0.0) -> bool:
        d = z - self.center
        return abs(d.real) <= self.half_width + slack and abs(d.imag) <= self.half_height + slack

    def split(self, fx: float, fy: float) -> list["Rectangle"]:
        c, w, h = self.center, self.half_width, self.half_height
        left, bottom = c.real - w, c.imag - h
        xs, ys = left + 2 * w * fx, bottom + 2 * h * fy
        xb = [(left, xs), (xs, c.real + w)]
        yb = [(bottom, ys), (ys, c.imag + h)]
        out = []
        for y0, y1 in yb:
            for x0, x1 in xb:
                out.append(Rectangle(complex(0.5 * (x0 + x1), 0.5 * (y0 + y1)), 0.5 * (x1 - x0), 0.5 * (y1 - y0)))
        return out


@dataclass(frozen=True)
class RootRecord:
    location: complex
    multiplicity: int
    residual: float


_EDGE_NAMES = ("bottom", "right", "top", "left")


def _log_derivative(family, a):
    def h(z):
        with np.errstate(all="ignore"):
            g, gx = x_derivatives(family, z, a, order=1)
            return gx / g
    return h


def _raw_winding(family, rect: Rectangle, a: complex, margin: float, tol: float):
    h = _log_derivative(family, a)
    limit = 1.0 / min(margin, 0.1 * min(rect.half_width, rect.half_height))
    corners = rect.corners
    total = 0j
    for i, name in enumerate(_EDGE_NAMES):
        z0, z1 = corners[i], corners[(i + 1) % 4]
        dz = z1 - z0

        def integrand(s, z0=z0, dz=dz, name=name):
            v = h(z0 + s * dz)
            peak = np.max(np.abs(v)) if v.size else 0.0
            if not np.isfinite(peak):
                raise BoundaryRootError(f"g'/g is not finite on {name} edge of {rect} (overflow or root on the edge)")
            if peak > limit:
                raise BoundaryRootError(f"root near boundary: |g'/g| = {peak:.3g} on {name} edge of {rect}")
            return v * dz

        try:
            val, _ = gk15(integrand, 0.0, 1.0, abs_tol=2 * math.pi * tol / 4)
        except QuadratureError as exc:
            raise BoundaryRootError(f"root near boundary: quadrature failed on {name} edge of {rect}: {exc}")
        total += val
    return total / (2j * math.pi)


def _count(family, rect, a, margin=BOUNDARY_MARGIN, tol=WINDING_TOL) -> int:
    raw = _raw_winding(family, rect, a, margin, tol)
    n = round(raw.real)
    if abs(raw - n) > SNAP_TOL:
        raise BoundaryRootError(f"root near boundary: winding {raw:.6g} is not near an integer for {rect}")
    return int(n)


def winding_count(family: FunctionFamily, rect: Rectangle, a: complex, *, boundary_margin: float = BOUNDARY_MARGIN,
                  tol: float = WINDING_TOL, retries: int = NUDGE_RETRIES) -> int:
    """Number of roots of g(., a) inside rect, counted with multiplicity.

    When the boundary passes too close to a root, the half dimensions are
    enlarged by 1e-2 and the count retried, up to ``retries`` times.
    """
    return winding_count_nudged(family, rect, a, boundary_margin=boundary_margin, tol=tol, retries=retries)[0]


def winding_count_nudged(family, rect, a, *, boundary_margin=BOUNDARY_MARGIN, tol=WINDING_TOL, retries=NUDGE_RETRIES):
    """Like :func:`winding_count` but also returns the rectangle actually used."""
    a = complex(a)
    current = rect
    for attempt in range(retries + 1):
        try:
            return _count(family, current, a, boundary_margin, tol), current
        except BoundaryRootError:
            if attempt == retries:
                raise
            current = replace(current, half_width=current.half_width + NUDGE, half_height=current.half_height + NUDGE)


def circle_winding(family: FunctionFamily, center: complex, radius: float, a: complex, tol: float = WINDING_TOL) -> int:
    """Root count inside a circle (used for multiplicities)."""
    h = _log_derivative(family, complex(a))

    def integrand(theta):
        e = np.exp(1j * theta)
        return h(center + radius * e) * (1j * radius * e)

    raw = gk15(integrand, 0.0, 2 * math.pi, abs_tol=2 * math.pi * tol)[0] / (2j * math.pi)
    n = round(raw.real)
    if abs(raw - n) > SNAP_TOL:
        raise BoundaryRootError(f"root near circle |x - {center}| = {radius}: winding {raw:.6g}")
    return int(n)


def _newton(family, x0, a, deriv=0, max_iter=50):
    x = complex(x0)
    for _ in range(max_iter):
        d = x_derivatives(family, x, a, order=deriv + 1)
        f, fp = complex(d[deriv]), complex(d[deriv + 1])
        if f == 0:
            return x
        if fp == 0 or not np.isfinite(fp):
            return None
        step = f / fp
        x -= step
        if not np.isfinite(x):
            return None
        if abs(step) <= 1e-15 * max(1.0, abs(x)):
            return x
    return x


def residual(family, x, a) -> float:
    return float(abs(x_derivatives(family, x, a, order=0)[0]))


def _accept_simple(family, cell, a):
    x = _newton(family, cell.center, a)
    if x is None or not cell.contains(x, slack=1e-9 * max(1.0, abs(x))):
        return None
    r = residual(family, x, a)
    if r >= 1e-10 * max(1.0, abs(x)):
        return None
    return RootRecord(x, 1, r)


def _cluster(family, cell, a, count):
    loc = cell.center
    if count - 1 <= 3:
        x = _newton(family, cell.center, a, deriv=count - 1)
        if x is not None and abs(x - cell.center) <= 10 * cell.diameter:
            loc = x
    return RootRecord(loc, count, residual(family, loc, a))


def _subdivide(family, cell, a, count, margin, tol):
    last = None
    for fx, fy in _SPLITS:
        children = cell.split(fx, fy)
        try:
            counts = [_count(family, ch, a, margin, tol) for ch in children]
        except BoundaryRootError as exc:
            last = exc
            continue
        if sum(counts) == count:
            return list(zip(children, counts))
    raise SubdivisionError(f"cannot separate roots in {cell}: no admissible split ({last})")


def isolate_roots(family: FunctionFamily, rect: Rectangle, a: complex, *, boundary_margin: float = BOUNDARY_MARGIN,
                  tol: float = WINDING_TOL) -> list[RootRecord]:
    """All roots of g(., a) in rect with multiplicities, sorted by (re, im)."""
    a = complex(a)
    total, rect = winding_count_nudged(family, rect, a, boundary_margin=boundary_margin, tol=tol)
    stack = [(rect, total, 0)]
    found = []
    while stack:
        cell, n, depth = stack.pop()
        if n == 0:
            continue
        if depth > MAX_DEPTH:
            raise SubdivisionError(f"cannot separate roots: depth {depth} exceeded at {cell}")
        if n == 1:
            rec = _accept_simple(family, cell, a)
            if rec is not None:
                found.append(rec)
                continue
        elif cell.diameter < CLUSTER_DIAMETER:
            found.append(_cluster(family, cell, a, n))
            continue
        try:
            children = _subdivide(family, cell, a, n, boundary_margin, tol)
        except SubdivisionError:
            if n >= 2 and cell.diameter < CLUSTER_FALLBACK_DIAMETER:
                found.append(_cluster(family, cell, a, n))
                continue
            raise
        for child, m in children:
            stack.append((child, m, depth + 1))
    found.sort(key=lambda r: (r.location.real, r.location.imag))
    if sum(r.multiplicity for r in found) != total:  # pragma: no cover - guarded by construction
        raise SubdivisionError("multiplicities do not add up to the winding count")
    return found


def rouche_rectangle(k: int, M: float) -> Rectangle:
    """Rectangle centred at 0 with upper-right corner pi*k + iM."""
    return Rectangle(0j, math.pi * k, float(M))


def verify_all_real(family: FunctionFamily, k: int, M: float, a: complex = 0.0) -> bool:
    """True iff g(., a) has 2k+1 roots (with multiplicity) in the rectangle, all real."""
    if k < 1 or M < 4:
        raise ParameterError(f"need k >= 1 and M >= 4, got k={k}, M={M}")
    roots = isolate_roots(family, rouche_rectangle(k, M), a)
    count = sum(r.multiplicity for r in roots)
    return count == 2 * k + 1 and all(abs(r.location.imag) < 1e-8 for r in roots)
