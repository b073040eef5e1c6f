"""Critical points (x_c, a_c): simultaneous zeros of g and dg/dx.

Because every family is affine in the parameter, a root x of g(., a)
determines ``a = -p(x)/q(x)``; eliminating a leaves the entire function

    W(x) = p'(x) q(x) - p(x) q'(x)

whose zeros are the critical points.  A critical point of order m is a zero
of W of multiplicity m - 1, so the solver uses the multiplicity-robust
Newton variant x <- x - W W' / (W'^2 - W W'') and snaps to the closed form
afterwards.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, OrderError, ParameterError
from .families import FunctionFamily, a_derivatives, x_derivatives

VANISH_TOL = 1e-8
NONVANISH_TOL = 1e-4
RESIDUAL_TOL = 1e-10
SNAP_TOL = 1e-6


@dataclass(frozen=True)
class CriticalPoint:
    x_c: complex
    a_c: complex
    order: int
    index: int


def _w_derivs(family, x):
    p = x_derivatives(family, x, 0.0, order=3)
    q = a_derivatives(family, x, order=3)
    w0 = p[1] * q[0] - p[0] * q[1]
    w1 = p[2] * q[0] - p[0] * q[2]
    w2 = p[3] * q[0] + p[2] * q[1] - p[1] * q[2] - p[0] * q[3]
    return complex(w0), complex(w1), complex(w2)


def _solve_from_seed(family, seed, max_iter=60):
    x = complex(seed)
    for _ in range(max_iter):
        w0, w1, w2 = _w_derivs(family, x)
        if w0 == 0:
            return x
        denom = w1 * w1 - w0 * w2
        if denom == 0 or not np.isfinite(denom):
            break
        step = w0 * w1 / denom
        x -= step
        if abs(step) <= 1e-15 * max(1.0, abs(x)):
            return x
    w0, *_ = _w_derivs(family, x)
    if abs(w0) < 1e-14 * max(1.0, abs(x)):
        return x
    raise ConvergenceError(f"critical-point Newton did not converge from seed {seed!r}")


def _closed_form(family, x):
    """Nearest closed-form critical point to x, as (x_c, index)."""
    if family is FunctionFamily.TAN_MINUS_X:
        k = int(round(x.real / math.pi))
        return complex(k * math.pi), k
    if family is FunctionFamily.CUBIC_VALIDATION:
        cands = [(1.0 + 0j, 0), (-1.0 + 0j, 1)]
    else:
        cands = [(1.0 + 0j, 0), (1j, 1), (-1.0 + 0j, 2), (-1j, 3)]
    return min(cands, key=lambda c: abs(c[0] - x))


def _seeds(family, k_max):
    if family is FunctionFamily.TAN_MINUS_X:
        return [k * math.pi + 0.3 for k in range(-k_max, k_max + 1)]
    # polynomial families: W = -p', seed from the companion-matrix roots, perturbed
    coeffs = [3.0, 0.0, -3.0] if family is FunctionFamily.CUBIC_VALIDATION else [5.0, 0.0, 0.0, 0.0, -5.0]
    return [complex(r) * (1.05 + 0.03j) for r in np.roots(coeffs)]


def _clean_zero(z):
    return complex(z.real + 0.0, z.imag + 0.0)


def critical_value(family, x_c):
    p0 = x_derivatives(family, x_c, 0.0, order=0)[0]
    q0 = a_derivatives(family, x_c, order=0)[0]
    return complex(-p0 / q0)


def classify_order(family: FunctionFamily, cp: CriticalPoint) -> int:
    """Smallest m >= 2 with a non-vanishing m-th x-derivative at (x_c, a_c)."""
    d = x_derivatives(family, cp.x_c, cp.a_c, order=4)
    if abs(d[0]) >= VANISH_TOL or abs(d[1]) >= VANISH_TOL:
        raise ParameterError(f"({cp.x_c}, {cp.a_c}) is not a critical point")
    for m in range(2, 5):
        mag = abs(complex(d[m]))
        if mag > NONVANISH_TOL:
            return m
        if mag >= VANISH_TOL:
            raise OrderError(f"derivative {m} at {cp.x_c} is in the ambiguous band: {mag:.3e}")
    raise OrderError(f"order at {cp.x_c} exceeds supported maximum 4")


def find_critical_points(family: FunctionFamily, k_max: int = 1) -> list[CriticalPoint]:
    """All critical points; for the tan family those with |k| <= k_max.

    Polynomial families have finitely many critical points and ignore k_max.
    """
    if k_max < 1:
        raise ParameterError(f"k_max must be >= 1, got {k_max}")
    found = {}
    for seed in _seeds(family, k_max):
        x = _solve_from_seed(family, seed)
        snapped, index = _closed_form(family, x)
        if abs(snapped - x) > SNAP_TOL:
            raise ConvergenceError(
                f"seed {seed!r} converged to {x!r}, which is not near a known critical point"
            )
        a_c = critical_value(family, snapped)
        if family is FunctionFamily.TAN_MINUS_X:
            a_c = complex(-snapped.real)  # g(pi k, -pi k) = sin(pi k) vanishes exactly in the reduced form
        g, gx = x_derivatives(family, snapped, a_c, order=1)
        if abs(g) >= RESIDUAL_TOL or abs(gx) >= RESIDUAL_TOL:
            raise ConvergenceError(f"residual too large at snapped point {snapped!r} (seed {seed!r})")
        snapped, a_c = _clean_zero(snapped), _clean_zero(a_c)
        cp = CriticalPoint(snapped, a_c, 0, index)
        found[index] = CriticalPoint(snapped, a_c, classify_order(family, cp), index)
    return [found[k] for k in sorted(found)]


def critical_values(family: FunctionFamily, k_max: int = 1) -> np.ndarray:
    return np.array([cp.a_c for cp in find_critical_points(family, k_max)], dtype=complex)


def critical_values_covering(family: FunctionFamily, points) -> np.ndarray:
    """Critical values relevant to parameter values ``points`` (all of them, plus one margin)."""
    if family is not FunctionFamily.TAN_MINUS_X:
        return critical_values(family)
    extent = float(np.max(np.abs(np.real(np.asarray(points, dtype=complex))), initial=0.0))
    return critical_values(family, max(1, int(math.ceil(extent / math.pi)) + 1))
