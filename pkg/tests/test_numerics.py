import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gravicaustic import numerics as nm
from gravicaustic.errors import NonDifferentiableError, RootNotConverged
from gravicaustic.numerics import Bracket, Dual, minimize_1d, refine_root, scan_first_bracket


def dense_sign_change(g, lo, hi, n=200001):
    xs = np.linspace(lo, hi, n)
    gs = np.array([g(x) for x in xs])
    i = int(np.nonzero(np.sign(gs[:-1]) != np.sign(gs[1:]))[0][0])
    a, b = xs[i], xs[i + 1]
    while b - a > 1e-14:
        m = 0.5 * (a + b)
        if np.sign(g(m)) == np.sign(g(a)):
            a = m
        else:
            b = m
    return 0.5 * (a + b)


# -- Dual ---------------------------------------------------------------------


def test_dual_arithmetic_rules():
    a, b = Dual(2.0, 3.0), Dual(5.0, -1.0)
    assert (a + b).deriv == 2.0
    assert (a * b).deriv == 3.0 * 5.0 + 2.0 * -1.0
    q = a / b
    assert q.deriv == pytest.approx((3.0 * 5.0 - 2.0 * -1.0) / 25.0)
    assert (-a).deriv == -3.0
    assert (2.0 - a).value == 0.0


def test_dual_division_by_zero():
    with pytest.raises(ZeroDivisionError):
        Dual(1.0, 1.0) / Dual(0.0, 1.0)


def test_nested_dual_second_derivative():
    x = Dual(Dual(0.7, 1.0), Dual(1.0, 0.0))
    y = nm.sin(x) * x
    # (x sin x)'' = 2 cos x - x sin x
    assert y.deriv.deriv == pytest.approx(2 * math.cos(0.7) - 0.7 * math.sin(0.7), rel=1e-14)


def test_abs_at_zero_not_differentiable():
    with pytest.raises(NonDifferentiableError):
        nm.fabs(Dual(0.0, 1.0))
    assert nm.fabs(Dual(-2.0, 1.0)).deriv == -1.0


def test_dual_on_arrays():
    xs = np.linspace(0.1, 2.0, 7)
    y = nm.exp(Dual(xs, np.ones_like(xs)))
    np.testing.assert_allclose(y.deriv, np.exp(xs))


COMPOSITES = [
    lambda x: nm.sin(x) * nm.cos(x) + x**3,
    lambda x: nm.exp(x / 3) - nm.log(x * x + 1),
    lambda x: nm.sqrt(x * x + 2) / (1 + nm.tanh(x) ** 2),
    lambda x: nm.sinh(x / 2) * nm.cosh(x / 4) - nm.tan(x / 5),
    lambda x: (x * x + 1) ** 0.5 - 2 ** (x / 4),
]


@settings(max_examples=100, deadline=None)
@given(st.floats(-3.0, 3.0), st.sampled_from(range(len(COMPOSITES))))
def test_dual_matches_central_differences(x, i):
    fn = COMPOSITES[i]
    h = 1e-6
    fd = (fn(x + h) - fn(x - h)) / (2 * h)
    d = nm.derivative(fn, x)
    assert d == pytest.approx(fd, rel=1e-6, abs=1e-6)


# -- roots --------------------------------------------------------------------


def test_refine_root_examples():
    assert refine_root(lambda x: x * x - 4, Bracket.of(lambda x: x * x - 4, 0.0, 3.0)) == pytest.approx(2.0, abs=1e-12)
    assert refine_root(lambda x: x, Bracket.of(lambda x: x, -1.0, 1.0)) == 0.0
    want = dense_sign_change(math.cos, 1.0, 2.0)
    got = refine_root(math.cos, Bracket.of(math.cos, 1.0, 2.0))
    assert abs(got - want) <= 1e-12
    assert abs(got - math.pi / 2) <= 1e-12


def test_bracket_requires_sign_change():
    with pytest.raises(ValueError):
        Bracket(0.0, 1.0, 1.0, 2.0)


def test_refine_root_reports_last_bracket():
    g = lambda x: math.exp(x) - 1.5
    with pytest.raises(RootNotConverged) as exc:
        refine_root(g, Bracket.of(g, 0.0, 1.0), tol_x=1e-300, tol_f=1e-300, max_iter=3)
    b = exc.value.bracket
    assert b.lo <= math.log(1.5) <= b.hi and b.width < 1.0


@settings(max_examples=100, deadline=None)
@given(
    st.floats(-5.0, 5.0),
    st.lists(st.floats(-3.0, 3.0), min_size=0, max_size=3),
)
def test_polynomial_roots(r, others):
    # p(x) = (x - r) * prod (x - o)^2 keeps r as the only sign change
    def p(x):
        v = x - r
        for o in others:
            v *= (x - o) ** 2 + 0.5
        return v

    got = refine_root(p, Bracket.of(p, r - 1.3, r + 0.7))
    assert abs(got - r) <= 1e-12 * max(1.0, abs(r)) * 10


# -- scanning -----------------------------------------------------------------


def test_scan_examples():
    b = scan_first_bracket(lambda t: t - 1, 0.0, 0.1, 5.0)
    assert b.lo <= 1.0 <= b.hi
    assert scan_first_bracket(lambda t: 1.0, 0.0, 0.1, 5.0) is None
    b = scan_first_bracket(lambda t: (t - 0.5) * (t - 0.7), 0.0, 0.05, 2.0)
    assert b.lo <= 0.5 <= b.hi and not (b.lo <= 0.7 <= b.hi)


def test_scan_finds_narrow_dip():
    # the two roots are closer than the step; the dip probe must catch them
    g = lambda t: (t - 0.5) * (t - 0.5001)
    b = scan_first_bracket(g, 0.0, 0.01, 2.0)
    assert b is not None and b.lo <= 0.5001 and b.hi >= 0.5


@settings(max_examples=100, deadline=None)
@given(st.floats(-10.0, 10.0), st.floats(1e-3, 1.0), st.floats(0.1, 20.0))
def test_scan_never_starts_before_start(start, step, root_offset):
    root = start + root_offset
    b = scan_first_bracket(lambda t: math.sin(t - root) if abs(t - root) < 1 else t - root, start, step, 30.0)
    if b is not None:
        assert b.lo >= start


# -- minimisation -------------------------------------------------------------


def test_minimize_examples():
    x, v = minimize_1d(lambda x: (x - 2) ** 2, 0.0, 5.0)
    assert x == pytest.approx(2.0, abs=1e-8) and v == pytest.approx(0.0, abs=1e-15)
    x, v = minimize_1d(lambda x: x, 0.0, 1.0)
    assert x == 0.0 and v == 0.0
    xs = np.linspace(2, 4, 100001)
    oracle = xs[np.argmin(np.cos(xs))]
    x, _ = minimize_1d(math.cos, 2.0, 4.0)
    # a flat minimum pins x only to about sqrt(machine eps)
    assert x == pytest.approx(math.pi, abs=1e-7)
    assert abs(x - oracle) < 1e-4


def test_minimize_rejects_empty_interval():
    with pytest.raises(ValueError):
        minimize_1d(lambda x: x, 1.0, 1.0)
