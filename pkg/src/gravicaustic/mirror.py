"""Reflecting boundaries ``y = f(x)``.

Three built-in shapes (parabola, straight line, hyperbola) have closed-form
height, slope and curvature.  Anything else is an :class:`ExpressionMirror`
whose derivatives come from (nested) dual-number evaluation of the parsed
expression.

Text forms accepted by :func:`parse_mirror`::

    parabola:fm=<focal length>      f(x) = x^2 / (4 fm)
    line:alpha_deg=<degrees>        f(x) = tan(alpha) x
    hyperbola                       f(x) = sqrt(1 + x^2)
    <infix expression in x>         e.g. "0.25*x^2", "cosh(x) - 1"
"""

from __future__ import annotations

import math
import re

import numpy as np

from . import numerics
from .errors import MirrorDomainError, MirrorEvaluationError
from .expr import Node, evaluate, parse_expression, to_text
from .numerics import Dual, _real
from .vec2 import Vec2

DEFAULT_DOMAIN = (-1e6, 1e6)


class Mirror:
    """Single-valued mirror graph on ``[x_min, x_max]``.

    ``height`` and ``slope`` accept floats or :class:`~gravicaustic.numerics.Dual`
    values; the ``*_array`` variants take numpy arrays.
    """

    kind = "abstract"

    def __init__(self, domain: tuple[float, float] = DEFAULT_DOMAIN):
        lo, hi = float(domain[0]), float(domain[1])
        if not lo < hi:
            raise ValueError(f"empty mirror domain [{lo}, {hi}]")
        self.x_min, self.x_max = lo, hi

    # subclasses implement these three on scalars/duals/arrays alike
    def _f(self, x):
        raise NotImplementedError

    def _df(self, x):
        raise NotImplementedError

    def _d2f(self, x):
        raise NotImplementedError

    @property
    def domain(self) -> tuple[float, float]:
        return (self.x_min, self.x_max)

    def in_domain(self, x: float) -> bool:
        return self.x_min <= x <= self.x_max

    def _check(self, x):
        r = _real(x)
        if isinstance(r, np.ndarray):
            bad = (r < self.x_min) | (r > self.x_max)
            if np.any(bad):
                raise MirrorDomainError(
                    f"outside mirror domain [{self.x_min}, {self.x_max}]", float(r[bad][0])
                )
        elif not (self.x_min <= r <= self.x_max):
            raise MirrorDomainError(f"outside mirror domain [{self.x_min}, {self.x_max}]", r)

    def height(self, x):
        self._check(x)
        return self._f(x)

    def slope(self, x):
        self._check(x)
        return self._df(x)

    def second_derivative(self, x):
        self._check(x)
        return self._d2f(x)

    def height_array(self, xs) -> np.ndarray:
        xs = np.asarray(xs, dtype=float)
        self._check(xs)
        return np.broadcast_to(np.asarray(self._f(xs), dtype=float), xs.shape).copy()

    def slope_array(self, xs) -> np.ndarray:
        xs = np.asarray(xs, dtype=float)
        self._check(xs)
        return np.broadcast_to(np.asarray(self._df(xs), dtype=float), xs.shape).copy()

    def second_derivative_array(self, xs) -> np.ndarray:
        xs = np.asarray(xs, dtype=float)
        self._check(xs)
        return np.broadcast_to(np.asarray(self._d2f(xs), dtype=float), xs.shape).copy()

    def unit_normal(self, x: float) -> Vec2:
        """Upward unit normal ``(-f', 1) / sqrt(1 + f'^2)``."""
        s = float(self.slope(x))
        h = math.hypot(1.0, s)
        return Vec2(-s / h, 1.0 / h)

    def tangent_angle(self, x: float) -> float:
        return math.atan(float(self.slope(x)))

    @property
    def text(self) -> str:
        raise NotImplementedError

    def __repr__(self):
        return f"<{type(self).__name__} {self.text!r} on [{self.x_min:g}, {self.x_max:g}]>"


class ParabolicMirror(Mirror):
    kind = "parabolic"

    def __init__(self, fm: float, domain=DEFAULT_DOMAIN):
        if not fm > 0:
            raise ValueError(f"parabolic mirror needs fm > 0, got {fm}")
        super().__init__(domain)
        self.fm = float(fm)

    def _f(self, x):
        return x * x / (4.0 * self.fm)

    def _df(self, x):
        return x / (2.0 * self.fm)

    def _d2f(self, x):
        return 0.0 * x + 1.0 / (2.0 * self.fm)

    @property
    def text(self):
        return f"parabola:fm={self.fm!r}"


class LineMirror(Mirror):
    """Straight mirror through the origin inclined at ``alpha`` radians."""

    kind = "line"

    def __init__(self, alpha: float, domain=DEFAULT_DOMAIN):
        if not -math.pi / 2 < alpha < math.pi / 2:
            raise ValueError("line mirror needs alpha in (-pi/2, pi/2); a vertical line is not a graph")
        super().__init__(domain)
        self.alpha = float(alpha)
        self._t = math.tan(self.alpha)

    def _f(self, x):
        return self._t * x

    def _df(self, x):
        return 0.0 * x + self._t

    def _d2f(self, x):
        return 0.0 * x

    @property
    def text(self):
        return f"line:alpha_deg={math.degrees(self.alpha)!r}"


class HyperbolicMirror(Mirror):
    """``f(x) = sqrt(1 + x^2)``."""

    kind = "hyperbolic"

    def _f(self, x):
        return numerics.sqrt(1.0 + x * x)

    def _df(self, x):
        return x / numerics.sqrt(1.0 + x * x)

    def _d2f(self, x):
        s = numerics.sqrt(1.0 + x * x)
        return 1.0 / (s * s * s)

    @property
    def text(self):
        return "hyperbola"


class ExpressionMirror(Mirror):
    kind = "expression"

    def __init__(self, ast: Node, source: str | None = None, domain=DEFAULT_DOMAIN):
        super().__init__(domain)
        self.ast = ast
        self.source = source if source is not None else to_text(ast)

    def _f(self, x):
        return evaluate(self.ast, x)

    def _df(self, x):
        seed = np.ones_like(x) if isinstance(x, np.ndarray) else 1.0
        out = evaluate(self.ast, Dual(x, seed))
        if isinstance(out, Dual):
            return out.deriv
        return 0.0 * x

    def _d2f(self, x):
        one = np.ones_like(x) if isinstance(x, np.ndarray) else 1.0
        out = evaluate(self.ast, Dual(Dual(x, one), Dual(one, 0.0 * one)))
        if isinstance(out, Dual) and isinstance(out.deriv, Dual):
            return out.deriv.deriv
        return 0.0 * x

    @property
    def text(self):
        return self.source


_NUM = r"[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?"
_PARABOLA = re.compile(rf"^\s*parabola\s*:\s*fm\s*=\s*({_NUM})\s*$")
_LINE = re.compile(rf"^\s*line\s*:\s*alpha_deg\s*=\s*({_NUM})\s*$")
_HYPERBOLA = re.compile(r"^\s*hyperbola\s*$")


def parse_mirror(text: str, domain: tuple[float, float] = DEFAULT_DOMAIN) -> Mirror:
    """Build a mirror from its text form (see module docstring)."""
    if m := _PARABOLA.match(text):
        return ParabolicMirror(float(m.group(1)), domain)
    if m := _LINE.match(text):
        return LineMirror(math.radians(float(m.group(1))), domain)
    if _HYPERBOLA.match(text):
        return HyperbolicMirror(domain)
    return ExpressionMirror(parse_expression(text), text.strip(), domain)


def height(m: Mirror, x: float) -> float:
    return m.height(x)


def slope(m: Mirror, x: float) -> float:
    return m.slope(x)


def unit_normal(m: Mirror, x: float) -> Vec2:
    return m.unit_normal(x)


__all__ = [
    "DEFAULT_DOMAIN",
    "ExpressionMirror",
    "HyperbolicMirror",
    "LineMirror",
    "Mirror",
    "MirrorEvaluationError",
    "ParabolicMirror",
    "height",
    "parse_mirror",
    "slope",
    "unit_normal",
]
