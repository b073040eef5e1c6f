"""Parametric equation families g(x, a) = 0 and their x/a derivatives.

Every family is affine in the parameter: ``g(x, a) = p(x) + a * q(x)``.
The transcendental family is kept in the entire form
``g(x, a) = sin x - (x + a) cos x`` so that no evaluation ever touches a
pole of tan.  Roots of g are exactly the solutions of ``tan x - x = a``.

All evaluators accept scalars or numpy arrays of complex numbers.
"""

from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, ParameterError, PoleError

MAX_ORDER = 4
POLE_TOLERANCE = 1e-8

# |u| below this uses the Taylor series of sin u - u cos u
_SERIES_RADIUS = 0.5
# coefficients of sin u - u cos u = sum_k c_k u^(2k+1), k >= 1
_SERIES_COEFFS = [
    (-1) ** (k + 1) * 2 * k / math.factorial(2 * k + 1) for k in range(1, 12)
]


class FunctionFamily(enum.Enum):
    TAN_MINUS_X = "tan"
    CUBIC_VALIDATION = "cubic"
    QUINTIC_VALIDATION = "quintic"

    @property
    def description(self) -> str:
        return _DESCRIPTIONS[self]

    @classmethod
    def from_name(cls, name: str) -> "FunctionFamily":
        key = name.strip().lower()
        for member in cls:
            if key in (member.value, member.name.lower()):
                return member
        raise ParameterError(f"unknown family {name!r}; expected one of tan, cubic, quintic")


_DESCRIPTIONS = {
    FunctionFamily.TAN_MINUS_X: "tan(x) - x = a, as sin x - (x + a) cos x = 0",
    FunctionFamily.CUBIC_VALIDATION: "x^3 - 3x - a = 0",
    FunctionFamily.QUINTIC_VALIDATION: "x^5 - 5x - a = 0",
}


@dataclass(frozen=True)
class EvalBundle:
    g: complex
    g_x: complex
    g_a: complex


def _check_finite(*values) -> None:
    for v in values:
        if not np.all(np.isfinite(v)):
            raise DomainError(f"non-finite input {v!r}")


def _sin_minus_u_cos(u):
    """sin u - u cos u with full relative accuracy for small |u|."""
    u = np.asarray(u, dtype=complex)
    small = np.abs(u) < _SERIES_RADIUS
    u2 = u * u
    series = np.zeros_like(u)
    for c in reversed(_SERIES_COEFFS):
        series = series * u2 + c
    series = series * u2 * u
    direct = np.sin(u) - u * np.cos(u)
    return np.where(small, series, direct)


def _tan_reduce(x, a):
    # x = k*pi + u with sign s = (-1)^k; returns u, s, and b = k*pi + a so that x + a = u + b
    k = np.round(np.real(x) / np.pi)
    kpi = k * np.pi
    u = x - kpi
    s = 1.0 - 2.0 * np.mod(k, 2)
    return u, s, kpi + a


def x_derivatives(family: FunctionFamily, x, a, order: int = MAX_ORDER) -> list:
    """Return ``[g, dg/dx, ..., d^order g/dx^order]`` at (x, a)."""
    x = np.asarray(x, dtype=complex)
    a = np.asarray(a, dtype=complex)
    if family is FunctionFamily.TAN_MINUS_X:
        u, s, b = _tan_reduce(x, a)
        w = u + b
        su, cu = np.sin(u), np.cos(u)
        out = [
            s * (_sin_minus_u_cos(u) - b * cu),
            s * w * su,
            s * (su + w * cu),
            s * (2.0 * cu - w * su),
            s * (-3.0 * su - w * cu),
        ]
    elif family is FunctionFamily.CUBIC_VALIDATION:
        x2 = x * x
        out = [x2 * x - 3.0 * x - a, 3.0 * x2 - 3.0, 6.0 * x, np.full_like(x, 6.0), np.zeros_like(x)]
    elif family is FunctionFamily.QUINTIC_VALIDATION:
        x2 = x * x
        out = [
            x2 * x2 * x - 5.0 * x - a,
            5.0 * x2 * x2 - 5.0,
            20.0 * x2 * x,
            60.0 * x2,
            120.0 * x,
        ]
    else:  # pragma: no cover
        raise ParameterError(f"unsupported family {family!r}")
    return out[: order + 1]


def a_derivatives(family: FunctionFamily, x, order: int = 3) -> list:
    """Return x-derivatives of ``q = dg/da``: ``[q, q', ..., q^(order)]``."""
    x = np.asarray(x, dtype=complex)
    if family is FunctionFamily.TAN_MINUS_X:
        u, s, _ = _tan_reduce(x, 0.0)
        su, cu = np.sin(u), np.cos(u)
        out = [-s * cu, s * su, s * cu, -s * su]
    else:
        out = [np.full_like(x, -1.0)] + [np.zeros_like(x)] * 3
    return out[: order + 1]


def g_and_partials(family: FunctionFamily, x, a):
    """Vectorized (g, g_x, g_a) without input validation; used in hot loops."""
    g, gx = x_derivatives(family, x, a, order=1)
    return g, gx, a_derivatives(family, x, order=0)[0]


def evaluate(family: FunctionFamily, x: complex, a: complex) -> EvalBundle:
    x, a = complex(x), complex(a)
    _check_finite(x, a)
    g, gx, ga = g_and_partials(family, x, a)
    return EvalBundle(complex(g), complex(gx), complex(ga))


def eval_higher(family: FunctionFamily, x: complex, a: complex, order: int) -> complex:
    """The order-th partial derivative of g in x, for order in 1..4."""
    if not isinstance(order, (int, np.integer)) or not 1 <= order <= MAX_ORDER:
        raise ParameterError(f"unsupported derivative order {order!r}; expected 1..{MAX_ORDER}")
    x, a = complex(x), complex(a)
    _check_finite(x, a)
    return complex(x_derivatives(family, x, a, order)[order])


def eval_f(x: complex) -> complex:
    """tan(x) - x, refusing points within 1e-8 (in |cos x|) of a pole."""
    x = complex(x)
    _check_finite(x)
    c = cmath.cos(x)
    if abs(c) < POLE_TOLERANCE:
        m = math.floor(x.real / math.pi)
        raise PoleError(x, (m + 0.5) * math.pi)
    return cmath.sin(x) / c - x
