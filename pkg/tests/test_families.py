import cmath
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from tanmono.errors import DomainError, ParameterError, PoleError
from tanmono.families import FunctionFamily, a_derivatives, eval_f, eval_higher, evaluate, x_derivatives

TAN = FunctionFamily.TAN_MINUS_X
FAMILIES = list(FunctionFamily)


def naive_g(family, x, a):
    if family is TAN:
        return cmath.sin(x) - (x + a) * cmath.cos(x)
    if family is FunctionFamily.CUBIC_VALIDATION:
        return x ** 3 - 3 * x - a
    return x ** 5 - 5 * x - a


def test_evaluate_at_origin():
    b = evaluate(TAN, 0, 0)
    assert b.g == 0 and b.g_x == 0 and b.g_a == -1


def test_higher_derivatives_at_origin():
    # third derivative is 2 cos x - (x + a) sin x, equal to 2 at the triple root
    assert eval_higher(TAN, 0, 0, 2) == 0
    assert eval_higher(TAN, 0, 0, 3) == pytest.approx(2.0)
    assert eval_higher(TAN, 0, 0, 4) == 0


def test_g_x_on_the_real_axis():
    assert evaluate(TAN, math.pi / 2, 0).g_x == pytest.approx(math.pi / 2)


def test_non_finite_input_rejected():
    with pytest.raises(DomainError):
        evaluate(TAN, float("nan"), 0)
    with pytest.raises(DomainError):
        evaluate(TAN, 0, complex(float("inf"), 0))


@pytest.mark.parametrize("order", [0, 5, 1.5])
def test_eval_higher_order_range(order):
    with pytest.raises(ParameterError):
        eval_higher(TAN, 0.3, 0.1, order)


def test_eval_f_pole():
    with pytest.raises(PoleError) as exc:
        eval_f(math.pi / 2)
    assert exc.value.pole == pytest.approx(math.pi / 2)
    with pytest.raises(PoleError) as exc:
        eval_f(-math.pi / 2)
    assert exc.value.pole == pytest.approx(-math.pi / 2)


def test_eval_f_value():
    assert eval_f(0.3) == pytest.approx(math.tan(0.3) - 0.3)


def test_family_from_name():
    assert FunctionFamily.from_name("TAN") is TAN
    assert FunctionFamily.from_name("quintic_validation") is FunctionFamily.QUINTIC_VALIDATION
    with pytest.raises(ParameterError):
        FunctionFamily.from_name("sin")


def test_series_near_triple_root():
    # sin u - u cos u = u^3/3 - u^5/30 + ...; the naive form loses everything near 0
    for u in [1e-3, 1e-5, 1e-7, 1e-3j, 3e-4 + 2e-4j]:
        got = complex(x_derivatives(TAN, u, 0.0, order=0)[0])
        expect = u ** 3 / 3 - u ** 5 / 30 + u ** 7 / 840
        assert abs(got - expect) <= 1e-14 * abs(expect)


def test_reduction_near_shifted_triple_roots():
    # g(k pi + u, -k pi) = (-1)^k (sin u - u cos u)
    for k in (-4, 3, 7):
        u = 2e-5
        got = complex(x_derivatives(TAN, k * math.pi + u, -k * math.pi, order=0)[0])
        expect = (-1) ** k * (u ** 3 / 3)
        assert abs(got - expect) <= 1e-8 * abs(expect)


def test_vectorized_matches_scalar():
    xs = np.array([0.1 + 0.2j, 3.0 - 1.0j, -7.5 + 0.01j])
    vec = x_derivatives(TAN, xs, -1.0, order=4)
    for i, x in enumerate(xs):
        sc = x_derivatives(TAN, x, -1.0, order=4)
        for m in range(5):
            assert complex(vec[m][i]) == pytest.approx(complex(sc[m]), rel=1e-15, abs=1e-300)


finite = st.floats(-30, 30, allow_nan=False)


@pytest.mark.parametrize("family", FAMILIES)
@given(xr=finite, xi=st.floats(-3, 3), ar=finite, ai=st.floats(-3, 3))
def test_matches_naive_formula(family, xr, xi, ar, ai):
    x, a = complex(xr, xi), complex(ar, ai)
    got = complex(x_derivatives(family, x, a, order=0)[0])
    ref = naive_g(family, x, a)
    scale = 1 + abs(x) + abs(a)
    if family is TAN:
        scale *= math.cosh(xi) + 1
    else:
        scale *= 1 + abs(x) ** (3 if family is FunctionFamily.CUBIC_VALIDATION else 5)
    assert abs(got - ref) <= 1e-12 * scale


def _central(f, h):
    return (f(h) - f(-h)) / (2 * h)


def test_finite_difference_agreement_1000_samples():
    """Derivatives agree with complex-step-free central differences (rel. err < 1e-6)."""
    rng = np.random.default_rng(20240601)
    worst = 0.0
    for i in range(1000):
        family = FAMILIES[i % 3]
        x = complex(rng.uniform(-12, 12), rng.uniform(-2, 2))
        a = complex(rng.uniform(-12, 12), rng.uniform(-2, 2))
        if family is not TAN:
            x, a = x / 6, a / 6
        d = x_derivatives(family, x, a, order=4)
        q = a_derivatives(family, x, order=3)
        h = 1e-5 * max(1.0, abs(x))
        checks = []
        for m in range(4):
            fd = _central(lambda t: complex(x_derivatives(family, x + t, a, order=m)[m]), h)
            checks.append((complex(d[m + 1]), fd))
        ha = 1e-5 * max(1.0, abs(a))
        fd_a = _central(lambda t: complex(x_derivatives(family, x, a + t, order=0)[0]), ha)
        checks.append((complex(q[0]), fd_a))
        for m in range(3):
            fd_q = _central(lambda t: complex(a_derivatives(family, x + t, order=m)[m]), h)
            checks.append((complex(q[m + 1]), fd_q))
        for exact, fd in checks:
            scale = max(abs(exact), 1e-3 * max(abs(complex(v)) for v in d))
            worst = max(worst, abs(exact - fd) / scale)
    assert worst < 1e-6


@given(x=st.complex_numbers(max_magnitude=20, allow_nan=False, allow_infinity=False),
       a=st.complex_numbers(max_magnitude=20, allow_nan=False, allow_infinity=False))
def test_affine_in_a(x, a):
    # g(x, a) = g(x, 0) + a * g_a(x)
    g = complex(x_derivatives(TAN, x, a, order=0)[0])
    g0 = complex(x_derivatives(TAN, x, 0.0, order=0)[0])
    q = complex(a_derivatives(TAN, x, order=0)[0])
    scale = (1 + abs(x) + abs(a)) * math.cosh(x.imag)
    assert abs(g - (g0 + a * q)) <= 1e-12 * scale


@given(x=st.complex_numbers(max_magnitude=20, allow_nan=False, allow_infinity=False),
       a=st.complex_numbers(max_magnitude=20, allow_nan=False, allow_infinity=False))
def test_conjugation_symmetry(x, a):
    g = complex(x_derivatives(TAN, x, a, order=0)[0])
    gc = complex(x_derivatives(TAN, x.conjugate(), a.conjugate(), order=0)[0])
    assert abs(g.conjugate() - gc) <= 1e-12 * (1 + abs(g))


def test_third_derivative_of_tan_minus_x_is_two():
    # oracle: five-point central difference of f''' for f = tan x - x at the critical points
    h = 1e-2
    for k in (0, 1, -2):
        x = k * math.pi
        f = [eval_f(x + j * h).real for j in (-2, -1, 1, 2)]
        fd = (-f[0] + 2 * f[1] - 2 * f[2] + f[3]) / (2 * h ** 3)
        assert fd == pytest.approx(2.0, rel=1e-3)
        # pole-free form carries the extra factor -cos x = -(-1)^k
        assert complex(eval_higher(TAN, x, -x, 3)) == pytest.approx(2.0 * (-1) ** k)
