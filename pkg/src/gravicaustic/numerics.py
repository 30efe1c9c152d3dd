"""Scalar numerics: forward-mode dual numbers, bracketed root finding,
first-sign-change scanning and golden-section minimization.

Dual numbers nest: a ``Dual`` whose components are themselves ``Dual``
carries second derivatives, which is how curvature of expression mirrors
is obtained.  The elementary functions below dispatch on their argument,
so the same code path serves floats, duals and numpy arrays.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import NonDifferentiableError, RootNotConverged

TOL_X = 1e-12
TOL_F = 1e-12
MAX_ITER = 200

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def _real(v):
    """Innermost real part of a (possibly nested) dual."""
    while isinstance(v, Dual):
        v = v.value
    return v


class Dual:
    """Value with an attached first derivative, ``value + deriv * eps``."""

    __slots__ = ("value", "deriv")

    def __init__(self, value, deriv=0.0):
        self.value = value
        self.deriv = deriv

    @classmethod
    def variable(cls, x):
        """Seed ``x`` as the independent variable (derivative one)."""
        return cls(x, 1.0)

    def __repr__(self):
        return f"Dual({self.value!r}, {self.deriv!r})"

    @staticmethod
    def _lift(o):
        return o if isinstance(o, Dual) else Dual(o, 0.0)

    def __add__(self, other):
        o = Dual._lift(other)
        return Dual(self.value + o.value, self.deriv + o.deriv)

    __radd__ = __add__

    def __sub__(self, other):
        o = Dual._lift(other)
        return Dual(self.value - o.value, self.deriv - o.deriv)

    def __rsub__(self, other):
        return Dual._lift(other) - self

    def __mul__(self, other):
        o = Dual._lift(other)
        return Dual(self.value * o.value, self.deriv * o.value + self.value * o.deriv)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = Dual._lift(other)
        if np.any(_real(o.value) == 0):
            raise ZeroDivisionError("dual division by zero")
        q = self.value / o.value
        return Dual(q, (self.deriv - q * o.deriv) / o.value)

    def __rtruediv__(self, other):
        return Dual._lift(other) / self

    def __neg__(self):
        return Dual(-self.value, -self.deriv)

    def __pos__(self):
        return self

    def __pow__(self, other):
        if isinstance(other, Dual):
            # a^b = exp(b ln a)
            return exp(other * log(self))
        p = other
        if p == 0:
            return Dual(_pow(self.value, 0.0), 0.0 * self.deriv)
        return Dual(_pow(self.value, p), p * _pow(self.value, p - 1) * self.deriv)

    def __rpow__(self, other):
        return exp(self * log(other))

    def __abs__(self):
        return fabs(self)

    # comparisons look at the innermost real part only
    def __lt__(self, other):
        return _real(self) < _real(other)

    def __le__(self, other):
        return _real(self) <= _real(other)

    def __gt__(self, other):
        return _real(self) > _real(other)

    def __ge__(self, other):
        return _real(self) >= _real(other)

    def __float__(self):
        return float(_real(self))


def _pow(a, p):
    if isinstance(a, Dual):
        return a**p
    if isinstance(a, np.ndarray):
        with np.errstate(invalid="raise", divide="raise"):
            return np.power(a, p)
    return math.pow(a, p)


def _unary(name: str, fn_math, fn_np, deriv):
    def f(x):
        if isinstance(x, Dual):
            return Dual(f(x.value), deriv(x.value) * x.deriv)
        if isinstance(x, np.ndarray):
            with np.errstate(invalid="raise", divide="raise", over="raise"):
                return fn_np(x)
        return fn_math(x)

    f.__name__ = name
    f.__qualname__ = name
    return f


sin = _unary("sin", math.sin, np.sin, lambda v: cos(v))
cos = _unary("cos", math.cos, np.cos, lambda v: -sin(v))
tan = _unary("tan", math.tan, np.tan, lambda v: 1.0 + tan(v) * tan(v))
exp = _unary("exp", math.exp, np.exp, lambda v: exp(v))
log = _unary("log", math.log, np.log, lambda v: 1.0 / v)
sinh = _unary("sinh", math.sinh, np.sinh, lambda v: cosh(v))
cosh = _unary("cosh", math.cosh, np.cosh, lambda v: sinh(v))
tanh = _unary("tanh", math.tanh, np.tanh, lambda v: 1.0 - tanh(v) * tanh(v))
sqrt = _unary("sqrt", math.sqrt, np.sqrt, lambda v: 0.5 / sqrt(v))


def fabs(x):
    """Absolute value; the derivative is refused at exactly zero."""
    if isinstance(x, Dual):
        r = _real(x.value)
        if np.any(r == 0):
            raise NonDifferentiableError(float(np.min(np.abs(r))), "abs is non-differentiable at 0")
        sign = np.sign(r) if isinstance(r, np.ndarray) else math.copysign(1.0, r)
        return Dual(fabs(x.value), sign * x.deriv)
    if isinstance(x, np.ndarray):
        return np.abs(x)
    return abs(x)


FUNCTIONS: dict[str, Callable] = {
    "sin": sin,
    "cos": cos,
    "tan": tan,
    "sqrt": sqrt,
    "abs": fabs,
    "exp": exp,
    "ln": log,
    "sinh": sinh,
    "cosh": cosh,
    "tanh": tanh,
}


def derivative(fn: Callable, x: float) -> float:
    """d fn / dx at ``x`` by one forward-mode pass."""
    out = fn(Dual.variable(x))
    return out.deriv if isinstance(out, Dual) else 0.0


# -- root finding -------------------------------------------------------------


@dataclass(frozen=True)
class Bracket:
    lo: float
    hi: float
    f_lo: float
    f_hi: float

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError(f"bracket has lo > hi: [{self.lo}, {self.hi}]")
        if self.f_lo * self.f_hi > 0:
            raise ValueError(
                f"bracket [{self.lo}, {self.hi}] encloses no sign change "
                f"(f_lo={self.f_lo}, f_hi={self.f_hi})"
            )

    @classmethod
    def of(cls, g: Callable[[float], float], lo: float, hi: float) -> "Bracket":
        return cls(lo, hi, g(lo), g(hi))

    @property
    def width(self) -> float:
        return self.hi - self.lo

    def __contains__(self, x: float) -> bool:
        return self.lo <= x <= self.hi


def refine_bracket(
    g: Callable[[float], float],
    b: Bracket,
    tol_x: float = TOL_X,
    tol_f: float = TOL_F,
    max_iter: int = MAX_ITER,
) -> tuple[float, Bracket]:
    """Shrink ``b`` around its root; return (best estimate, final bracket).

    Illinois-modified regula falsi.  Any step that fails to halve the
    bracket is followed by a forced bisection, so the bracket width is at
    least halved every two evaluations.
    """
    if tol_x <= 0 or tol_f <= 0:
        raise ValueError("tolerances must be positive")
    lo, hi, flo, fhi = b.lo, b.hi, b.f_lo, b.f_hi
    if flo == 0:
        return lo, Bracket(lo, lo, 0.0, 0.0)
    if fhi == 0:
        return hi, Bracket(hi, hi, 0.0, 0.0)
    # scaled copies for the Illinois update; flo/fhi keep true values
    wlo, whi = flo, fhi
    last_side = 0
    bisect_next = False
    for _ in range(max_iter):
        width = hi - lo
        mid = lo + 0.5 * width
        if width <= tol_x or not (lo < mid < hi):
            break
        if bisect_next:
            x = mid
        else:
            x = (lo * whi - hi * wlo) / (whi - wlo)
            if not (lo < x < hi):
                x = mid
        fx = g(x)
        if fx == 0 or abs(fx) <= tol_f:
            return x, Bracket(x, x, fx, fx) if fx == 0 else _tight(lo, hi, flo, fhi, x, fx)
        if (fx < 0) == (flo < 0):
            lo, flo, wlo = x, fx, fx
            if last_side == -1:
                whi *= 0.5
            last_side = -1
        else:
            hi, fhi, whi = x, fx, fx
            if last_side == 1:
                wlo *= 0.5
            last_side = 1
        bisect_next = (hi - lo) > 0.5 * width and not bisect_next
    else:
        raise RootNotConverged(
            f"root not converged after {max_iter} iterations", Bracket(lo, hi, flo, fhi)
        )
    best = lo if abs(flo) <= abs(fhi) else hi
    return best, Bracket(lo, hi, flo, fhi)


def _tight(lo, hi, flo, fhi, x, fx):
    if (fx < 0) == (flo < 0):
        return Bracket(x, hi, fx, fhi)
    return Bracket(lo, x, flo, fx)


def refine_root(
    g: Callable[[float], float],
    b: Bracket,
    tol_x: float = TOL_X,
    tol_f: float = TOL_F,
    max_iter: int = MAX_ITER,
) -> float:
    """Root of ``g`` inside ``b``; never evaluates outside the bracket.

    Stops when ``|g(x)| <= tol_f`` or the bracket is narrower than ``tol_x``
    (or than the float spacing at that magnitude).
    """
    return refine_bracket(g, b, tol_x, tol_f, max_iter)[0]


def scan_first_bracket(
    g: Callable[[float], float],
    start: float,
    initial_step: float,
    max_span: float,
    *,
    tol_f: float = TOL_F,
    max_step: float | None = None,
    growth: float = 1.0,
) -> Bracket | None:
    """Earliest sign-change bracket of ``g`` on ``(start, start + max_span]``.

    Steps forward monotonically.  Two situations trigger a closer look
    before moving on: a sample with ``|g| < tol_f`` (possible tangency:
    the step is halved down to ``initial_step / 2**10``) and a sampled
    interior minimum of ``|g|`` (possible thin dip between samples: the
    minimum is located by golden section).  ``growth > 1`` lets the step
    widen geometrically up to ``max_step``.
    """
    if initial_step <= 0 or max_span <= 0:
        raise ValueError("initial_step and max_span must be positive")
    end = start + max_span
    floor = initial_step / 2**10
    max_step = initial_step if max_step is None else max(max_step, initial_step)
    t0, g0 = start, g(start)
    if g0 == 0:
        return Bracket(start, start, 0.0, 0.0)
    step = initial_step
    prev = None  # (t, g) before t0, for dip detection
    while t0 < end:
        t1 = min(t0 + step, end)
        g1 = g(t1)
        if g0 * g1 <= 0:
            return Bracket(t0, t1, g0, g1)
        if abs(g1) < tol_f and step > floor:
            step *= 0.5
            continue
        if prev is not None and abs(g0) < abs(prev[1]) and abs(g0) < abs(g1):
            found = _probe_dip(g, prev[0], t1, g0, floor)
            if found is not None:
                return found
        prev = (t0, g0)
        t0, g0 = t1, g1
        step = min(step * growth, max_step) if growth > 1.0 else max(step, initial_step)
    return None


def _probe_dip(g, a, b, g_sample, floor):
    sign = 1.0 if g_sample > 0 else -1.0
    t_min, v_min = minimize_1d(lambda t: sign * g(t), a, b, max(floor, 1e-15 * max(1.0, abs(b))))
    if v_min > 0:
        return None
    ga = g(a)
    return Bracket(a, t_min, ga, sign * v_min)


# -- minimization -------------------------------------------------------------


def minimize_1d(
    g: Callable[[float], float], lo: float, hi: float, tol: float = 1e-10
) -> tuple[float, float]:
    """Golden-section search for a local minimum of ``g`` on ``[lo, hi]``.

    Endpoints are compared at the end, so monotone functions return the
    boundary.  Multimodal functions need a pre-grid from the caller.
    """
    if not lo < hi:
        raise ValueError(f"minimize_1d needs lo < hi, got [{lo}, {hi}]")
    a, b = lo, hi
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    gc, gd = g(c), g(d)
    while b - a > tol:
        if gc <= gd:
            b, d, gd = d, c, gc
            c = b - _GOLDEN * (b - a)
            gc = g(c)
        else:
            a, c, gc = c, d, gd
            d = a + _GOLDEN * (b - a)
            gd = g(d)
        if not (a < c < b and a < d < b):
            break
    best = min(((c, gc), (d, gd), (lo, g(lo)), (hi, g(hi))), key=lambda p: p[1])
    return best
