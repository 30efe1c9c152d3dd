"""Foci curves, flight-parabola envelopes and the confined domain.

For a mirror ``f`` and a level ``L`` the foci curve is the envelope of the
circles centred on ``(k, f(k))`` with radius ``L - f(k)``::

    x_F(k) = k + (L - f) * 2 f' / (1 + f'^2)
    y_F(k) = f + (L - f) * (f'^2 - 1) / (1 + f'^2)

Given a directrix height ``H``, the flight parabolas with foci on that curve
have two envelopes, parameterised by the same ``k``::

    J(k)   = (x_F' +- sqrt(x_F'^2 + y_F'^2)) / y_F'
    x_E(k) = x_F + (H - y_F) J
    y_E(k) = H (1 - J^2) / 2 + y_F (1 + J^2) / 2
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from .dynamics import State
from .errors import (
    FlatFociTangentError,
    FocusNotReachableError,
    InsufficientSamplingError,
    MirrorEvaluationError,
    UndefinedBranchError,
    UnsupportedMirrorError,
)
from .mirror import HyperbolicMirror, LineMirror, Mirror, ParabolicMirror
from .numerics import Bracket, Dual, refine_root
from .vec2 import Vec2

Branch = Literal["plus", "minus"]
BRANCHES: tuple[Branch, Branch] = ("plus", "minus")

# |y_F'| below this fraction of |F'| counts as a horizontal foci tangent
FLAT_TANGENT = 1e-14


@dataclass(frozen=True)
class FociCurve:
    mirror: Mirror
    L: float

    def point(self, k: float) -> Vec2:
        return foci_curve_point(self, k)

    def tangent(self, k: float) -> Vec2:
        return foci_tangent(self, k)


@dataclass(frozen=True)
class EnvelopePair:
    foci: FociCurve
    H: float

    @property
    def mirror(self) -> Mirror:
        return self.foci.mirror

    def point(self, k: float, branch: Branch) -> Vec2:
        return envelope_point(self, k, branch)


@dataclass
class SampledCurve:
    """Curve samples ordered by parameter; excluded parameters are listed
    in ``singularities`` together with the reason."""

    k: np.ndarray
    x: np.ndarray
    y: np.ndarray
    singularities: list[tuple[float, str]] = field(default_factory=list)

    def __len__(self):
        return len(self.k)

    def points(self) -> list[Vec2]:
        return [Vec2(float(a), float(b)) for a, b in zip(self.x, self.y)]


# -- foci curve ---------------------------------------------------------------


def _foci_xy(m: Mirror, L, k):
    """Foci-curve coordinates; works for floats, duals and arrays."""
    f = m.height(k)
    s = m.slope(k)
    d = 1.0 + s * s
    r = L - f
    return k + r * (2.0 * s) / d, f + r * (s * s - 1.0) / d


def domain_point(m: Mirror, L: float, k: float, theta: float) -> Vec2:
    """Point at angle ``theta`` on the circle of radius ``L - f(k)`` about ``(k, f(k))``."""
    f = float(m.height(k))
    r = L - f
    return Vec2(k + r * math.cos(theta), f + r * math.sin(theta))


def theta_star(m: Mirror, k: float) -> float:
    """Angle at which the circle about ``(k, f(k))`` touches the foci curve."""
    s = float(m.slope(k))
    return math.atan2(s * s - 1.0, 2.0 * s)


def foci_curve_point(c: FociCurve, k: float) -> Vec2:
    x, y = _foci_xy(c.mirror, c.L, k)
    return Vec2(float(x), float(y))


def foci_tangent(c: FociCurve, k: float) -> Vec2:
    """``(x_F'(k), y_F'(k))``, exact through nested dual numbers."""
    x, y = _foci_xy(c.mirror, c.L, Dual.variable(k))
    return Vec2(float(_d(x)), float(_d(y)))


def _d(v):
    return v.deriv if isinstance(v, Dual) else 0.0


def vertex_point(e: EnvelopePair, k: float) -> Vec2:
    """Vertex of the flight parabola whose focus is ``x_F(k), y_F(k)``."""
    F = foci_curve_point(e.foci, k)
    return Vec2(F.x, 0.5 * (e.H + F.y))


# -- matching L to an initial focus -------------------------------------------


@dataclass(frozen=True)
class LMatch:
    L: float
    k0: float
    solutions: tuple[tuple[float, float], ...]  # every (L, k) found, preferred first


def _match_residual(m: Mirror, F0: Vec2, k):
    # F0 = A(k) + (L - f) u(k) with u a unit vector, so F0 - A must be
    # parallel to u: the cross product vanishes and L follows from the dot.
    f = m.height(k)
    s = m.slope(k)
    d = 1.0 + s * s
    ux, uy = 2.0 * s / d, (s * s - 1.0) / d
    dx, dy = F0.x - k, F0.y - f
    return dx * uy - dy * ux, f + dx * ux + dy * uy


def match_L(
    m: Mirror,
    F0: Vec2,
    *,
    n_grid: int = 2048,
    k_max: float | None = None,
    tol: float = 1e-9,
) -> LMatch:
    """Find ``(L, k)`` with ``foci_curve_point(FociCurve(m, L), k) == F0``.

    The grid spans the mirror domain clipped to ``|k| <= k_max`` (default
    ``10 (1 + |F0|)``).  Solutions with a non-negative radius ``L - f(k)``
    come first, then by ascending ``k``.
    """
    K = 10.0 * (1.0 + F0.norm()) if k_max is None else k_max
    lo, hi = max(m.x_min, -K), min(m.x_max, K)
    ks = np.linspace(lo, hi, n_grid)
    r, _ = _match_residual(m, F0, ks)
    r = np.broadcast_to(r, ks.shape)
    scale = 1.0 + F0.norm() + np.abs(ks)
    near = np.abs(r) <= 1e-13 * scale

    def resid(k):
        return float(_match_residual(m, F0, k)[0])

    roots = []
    i = 0
    while i < n_grid:
        if near[i]:
            j = i
            while j + 1 < n_grid and near[j + 1]:
                j += 1
            roots.append(float(ks[(i + j) // 2]))
            i = j + 1
            continue
        if i + 1 < n_grid and not near[i + 1] and r[i] * r[i + 1] < 0:
            roots.append(refine_root(resid, Bracket(ks[i], ks[i + 1], r[i], r[i + 1])))
        i += 1

    sols = []
    for k in roots:
        L = float(_match_residual(m, F0, k)[1])
        P = foci_curve_point(FociCurve(m, L), k)
        if (P - F0).norm() <= tol:
            sols.append((L, k, L - float(m.height(k)) < 0))
    if not sols:
        raise FocusNotReachableError(
            f"focus {F0} not reachable: no foci curve through it for |k| <= {K:g}"
        )
    sols.sort(key=lambda s: (s[2], s[1]))
    return LMatch(sols[0][0], sols[0][1], tuple((L, k) for L, k, _ in sols))


# -- envelopes ----------------------------------------------------------------


def _j_pair(tx, ty):
    """Stable J+ and J- from the foci tangent (no cancellation)."""
    r = math.hypot(tx, ty)
    if tx >= 0:
        jp = (tx + r) / ty
        jm = -ty / (tx + r)
    else:
        jp = -ty / (tx - r)
        jm = (tx - r) / ty
    return jp, jm


def J_pm(c: FociCurve, k: float) -> tuple[float, float]:
    T = foci_tangent(c, k)
    if abs(T.y) <= FLAT_TANGENT * T.norm() or T.y == 0:
        raise FlatFociTangentError(
            f"foci tangent is horizontal at k={k}; use envelope_point, whose "
            "degenerate branch returns the flight vertex"
        )
    return _j_pair(T.x, T.y)


def envelope_point(e: EnvelopePair, k: float, branch: Branch) -> Vec2:
    """Point of the ``branch`` envelope touching the flight parabola labelled ``k``."""
    if branch not in BRANCHES:
        raise ValueError(f"branch must be 'plus' or 'minus', got {branch!r}")
    F = foci_curve_point(e.foci, k)
    if F.y > e.H:
        raise UndefinedBranchError(f"focus above the directrix at k={k} (y_F={F.y} > H={e.H})")
    T = foci_tangent(e.foci, k)
    if abs(T.y) <= FLAT_TANGENT * T.norm() or T.y == 0:
        if T.x == 0:
            raise UndefinedBranchError(f"foci curve is singular at k={k}")
        # t -> 0 on one branch (envelope at the vertex), t -> infinity on the other
        vanishing = "minus" if T.x > 0 else "plus"
        if branch == vanishing:
            return Vec2(F.x, 0.5 * (e.H + F.y))
        raise UndefinedBranchError(f"{branch} envelope escapes to infinity at k={k}")
    jp, jm = _j_pair(T.x, T.y)
    J = jp if branch == "plus" else jm
    return _envelope_from(F.x, F.y, e.H, J)


def _envelope_from(xF, yF, H, J) -> Vec2:
    return Vec2(xF + (H - yF) * J, 0.5 * H * (1.0 - J * J) + 0.5 * yF * (1.0 + J * J))


# -- vectorised sampling ------------------------------------------------------


def _grid_eval(m: Mirror, ks: np.ndarray):
    """Evaluate ``m`` on ``ks``; points the mirror rejects are dropped and reported."""
    ks = np.asarray(ks, dtype=float)
    try:
        m.height(ks)
        m.slope(Dual(ks, np.ones_like(ks)))
        return ks, []
    except MirrorEvaluationError:
        pass
    keep, bad = [], []
    for k in ks:
        try:
            m.height(float(k))
            m.slope(Dual(float(k), 1.0))
            keep.append(k)
        except MirrorEvaluationError as exc:
            bad.append((float(k), str(exc)))
    return np.asarray(keep, dtype=float), bad


def sample_foci(c: FociCurve, ks) -> SampledCurve:
    ks, bad = _grid_eval(c.mirror, ks)
    x, y = _foci_xy(c.mirror, c.L, ks)
    return SampledCurve(ks, np.broadcast_to(x, ks.shape).copy(), np.broadcast_to(y, ks.shape).copy(), bad)


def _foci_arrays(c: FociCurve, ks: np.ndarray):
    x, y = _foci_xy(c.mirror, c.L, Dual(ks, np.ones_like(ks)))
    shape = ks.shape

    def parts(v):
        if isinstance(v, Dual):
            return np.broadcast_to(v.value, shape), np.broadcast_to(v.deriv, shape)
        return np.broadcast_to(v, shape), np.zeros(shape)

    (xf, tx), (yf, ty) = parts(x), parts(y)
    return xf, yf, tx, ty


def sample_envelopes(e: EnvelopePair, ks) -> dict[str, SampledCurve]:
    """Both envelope branches on the grid ``ks``; undefined points become singularities."""
    ks, bad = _grid_eval(e.mirror, ks)
    xf, yf, tx, ty = _foci_arrays(e.foci, ks)
    H = e.H
    out = {}
    r = np.hypot(tx, ty)
    flat = (np.abs(ty) <= FLAT_TANGENT * r) | (ty == 0)
    above = yf > H
    with np.errstate(divide="ignore", invalid="ignore"):
        pos = tx >= 0
        jp = np.where(pos, (tx + r) / ty, -ty / (tx - r))
        jm = np.where(pos, -ty / (tx + r), (tx - r) / ty)
    for name, J in (("plus", jp), ("minus", jm)):
        vanishing = np.where(tx > 0, "minus", "plus") == name
        with np.errstate(invalid="ignore", over="ignore"):
            x = xf + (H - yf) * J
            y = 0.5 * H * (1.0 - J * J) + 0.5 * yf * (1.0 + J * J)
        vert = flat & vanishing & (tx != 0)
        x = np.where(vert, xf, x)
        y = np.where(vert, 0.5 * (H + yf), y)
        ok = ~above & (~flat | vert) & np.isfinite(x) & np.isfinite(y)
        sing = list(bad)
        for k, a, f in zip(ks[~ok], above[~ok], flat[~ok]):
            why = "focus above directrix" if a else ("horizontal foci tangent" if f else "non-finite")
            sing.append((float(k), why))
        sing.sort()
        out[name] = SampledCurve(ks[ok], x[ok], y[ok], sing)
    return out


def envelope_jacobian(e: EnvelopePair, k: float, t: float, h: float = 1e-6) -> float:
    """Jacobian determinant of the flight-parabola family ``(k, t) -> (x, y)``
    by central differences; it vanishes on the envelopes."""

    def family(kk, tt):
        F = foci_curve_point(e.foci, kk)
        return F.x + tt, 0.5 * (e.H + F.y) - tt * tt / (2.0 * (e.H - F.y))

    xk1, yk1 = family(k + h, t)
    xk0, yk0 = family(k - h, t)
    xt1, yt1 = family(k, t + h)
    xt0, yt0 = family(k, t - h)
    xk, yk = (xk1 - xk0) / (2 * h), (yk1 - yk0) / (2 * h)
    xt, yt = (xt1 - xt0) / (2 * h), (yt1 - yt0) / (2 * h)
    return xk * yt - yk * xt


# -- closed forms for the three reference mirrors -----------------------------


def closed_form_oracle(kind: str, quantity: str, params: dict, grid) -> SampledCurve | dict:
    """Closed-form reference curves for parabolic, line and hyperbolic mirrors.

    ``grid`` is the curve parameter: ``k`` for foci curves and hyperbolic
    quantities, ``x`` for the straight-line envelopes of the parabolic and
    line mirrors.  Envelope and ``"J"`` requests return ``{"plus": .., "minus": ..}``.
    """
    g = np.asarray(grid, dtype=float)
    if kind == "parabolic":
        fm, L = params["fm"], params["L"]
        R = fm + L
        if quantity == "foci":
            q = g * g / (4.0 * fm * fm)
            cphi = (g / fm) / (1.0 + q)
            sphi = (q - 1.0) / (1.0 + q)
            return SampledCurve(g, R * cphi, R * sphi + fm)
        if quantity == "envelope":
            H = params["H"]
            out = {}
            for name, sgn in (("plus", 1.0), ("minus", -1.0)):
                a = H - fm + sgn * R
                y = -g * g / (2.0 * a) + (H + fm + sgn * R) / 2.0
                out[name] = SampledCurve(g, g.copy(), y)
            return out
    elif kind == "line":
        alpha = params["alpha"]
        if quantity == "foci":
            if math.isclose(abs(alpha), math.pi / 2):
                xF0 = params["xF0"]
                return SampledCurve(g, np.full_like(g, xF0), g.copy())
            L = params["L"]
            return SampledCurve(g, g.copy(), g * math.tan(2 * alpha) - L / math.cos(2 * alpha))
        if quantity == "envelope":
            xF0, yF0, H = params["xF0"], params["yF0"], params["H"]
            out = {}
            # J+ = cot(alpha) for this curve, so "plus" is the tan^-1 line
            for name, sgn in (("minus", 1.0), ("plus", -1.0)):
                tp = math.tan(alpha) ** sgn
                y = sgn * (g - xF0) * tp + 0.5 * yF0 * (1.0 - tp * tp) + 0.5 * H * (1.0 + tp * tp)
                out[name] = SampledCurve(g, g.copy(), y)
            return out
    elif kind == "hyperbolic":
        L = params["L"]
        s = np.sqrt(1.0 + g * g)
        xF = g * (2.0 * L * s - 1.0) / (1.0 + 2.0 * g * g)
        yF = (2.0 * s**3 - L) / (1.0 + 2.0 * g * g)
        if quantity == "foci":
            return SampledCurve(g, xF, yF)
        if quantity in ("J", "envelope"):
            k2 = g * g
            inner = np.sqrt(
                (2 * k2 + 1) ** 2 * (4 * L * (L + s * (2 * k2 - 1)) + 4 * k2**3 - 3 * k2 + 1) / (k2 + 1)
            )
            den = 2 * g * (2 * L * s + 2 * k2 * k2 + k2 - 1)
            J = {
                "plus": (s * (2 * k2 - 1 + inner) + 2 * L) / den,
                "minus": (s * (2 * k2 - 1 - inner) + 2 * L) / den,
            }
            if quantity == "J":
                return {n: SampledCurve(g, g.copy(), j) for n, j in J.items()}
            H = params["H"]
            return {
                n: SampledCurve(g, xF + (H - yF) * j, 0.5 * H * (1 - j * j) + 0.5 * yF * (1 + j * j))
                for n, j in J.items()
            }
    else:
        raise UnsupportedMirrorError(f"no closed form for mirror kind {kind!r}")
    raise UnsupportedMirrorError(f"no closed form for {quantity!r} of a {kind} mirror")


def closed_form_params(m: Mirror) -> tuple[str, dict]:
    if isinstance(m, ParabolicMirror):
        return "parabolic", {"fm": m.fm}
    if isinstance(m, LineMirror):
        return "line", {"alpha": m.alpha}
    if isinstance(m, HyperbolicMirror):
        return "hyperbolic", {}
    raise UnsupportedMirrorError(f"no closed form for mirror kind {m.kind!r}")


# -- confined domain ----------------------------------------------------------

DEFAULT_SAMPLES = 4096
# default sampling reaches |k| = 1e4 (or the mirror domain, if smaller);
# further out the foci tangent loses too many digits to cancellation
K_FAR = 1e4
# end samples this close in height (relative) may be joined into one branch
CLOSE_GAP = 1e-6


@dataclass
class _BranchTable:
    k: np.ndarray
    x: np.ndarray
    y: np.ndarray
    side: np.ndarray  # +1 envelope bounds from above, -1 from below, 0 unknown
    sag: np.ndarray  # per segment: chord deviation at the parameter midpoint
    closed: bool = False  # last sample joins the first one (branch closes at |k| -> inf)


def _contact_side(e: EnvelopePair, c: SampledCurve) -> np.ndarray:
    """+1 where the branch is a ceiling, -1 where it is a floor, 0 if unclear.

    At fixed ``x = x_E(k)`` the family height ``F(x; k')`` is stationary in
    ``k'`` at ``k' = k``; a maximum makes the branch a ceiling for the
    family, a minimum a floor.  The second derivative comes from nested
    duals, so no neighbouring samples are involved.
    """
    one = np.ones_like(c.k)
    K = Dual(Dual(c.k, one), Dual(one, 0.0 * one))
    xF, yF = _foci_xy(e.mirror, e.foci.L, K)
    H = e.H
    d = xF - c.x  # dual on the left: ndarray - Dual would build an object array
    A = (yF + H) * 0.5
    B = d * d / ((yF - H) * (-2.0))
    a2, b2 = _d2(A, c.k.shape), _d2(B, c.k.shape)
    curv = a2 - b2
    clear = np.abs(curv) > 1e-8 * (np.abs(a2) + np.abs(b2))
    return np.where(clear, -np.sign(curv), 0).astype(int)


def _d2(v, shape) -> np.ndarray:
    if isinstance(v, Dual) and isinstance(v.deriv, Dual):
        return np.broadcast_to(np.asarray(v.deriv.deriv, dtype=float), shape)
    return np.zeros(shape)


class ConfinedDomain:
    """Sampled region above the mirror, below ``y = H`` and on the allowed
    side of both envelope branches.

    Which side of a branch is allowed is read off the family itself: the
    flight parabolas near contact ``k`` lie on the allowed side, so the
    sign of the family's second ``k``-derivative says whether the branch is
    a ceiling or a floor there (see :func:`_contact_side`).  Heights
    between samples come from linear interpolation, polished onto the
    exact envelope whenever the linear estimate is too close to call.
    """

    def __init__(self, e: EnvelopePair, ks):
        self.envelope = e
        self.curves = sample_envelopes(e, ks)
        self.tables = {name: self._table(name, c) for name, c in self.curves.items()}
        xs = [c.x for c in self.curves.values() if len(c)]
        if not xs:
            raise InsufficientSamplingError("no envelope samples are defined on this k-grid")
        allx = np.concatenate(xs)
        self.x_range = (float(allx.min()), float(allx.max()))

    def _table(self, name: str, c: SampledCurve) -> _BranchTable:
        n = len(c)
        side = np.zeros(n, dtype=int)
        sag = np.full(max(n - 1, 0), np.inf)
        if n >= 3:
            side = _contact_side(self.envelope, c)
        if n >= 2:
            kmid = 0.5 * (c.k[:-1] + c.k[1:])
            mid = sample_envelopes(self.envelope, kmid)[name]
            idx = np.searchsorted(kmid, mid.k)
            x0, x1, y0, y1 = c.x[idx], c.x[idx + 1], c.y[idx], c.y[idx + 1]
            with np.errstate(divide="ignore", invalid="ignore"):
                chord = np.where(x1 != x0, y0 + (mid.x - x0) / (x1 - x0) * (y1 - y0), np.nan)
            dev = np.abs(mid.y - chord)
            sag[idx] = np.where(np.isfinite(dev), dev, np.inf)
            # a chord whose midpoint strays by half its length does not
            # resolve the curve (typically it jumps across a singular k)
            seg_len = np.hypot(np.diff(c.x), np.diff(c.y))
            sag[sag > 0.5 * seg_len] = np.inf
        tab = _BranchTable(c.k, c.x, c.y, side, sag)
        if n >= 3 and self._closes(c, side):
            tab = _BranchTable(
                np.append(c.k, c.k[0]), np.append(c.x, c.x[0]), np.append(c.y, c.y[0]),
                np.append(side, side[0]), np.append(sag, 0.0), closed=True,
            )
        return tab

    def _closes(self, c: SampledCurve, side: np.ndarray) -> bool:
        # both grid ends far out along the mirror, bounding from the same
        # side, level with each other and with no sample in between them
        # (e.g. the apex of a parabolic ceiling, reached only as |k| -> inf)
        if c.k[0] >= 0 or c.k[-1] <= 0 or side[0] == 0 or side[0] != side[-1]:
            return False
        if abs(c.y[-1] - c.y[0]) > CLOSE_GAP * (1.0 + abs(c.y[0])):
            return False
        lo, hi = sorted((c.x[0], c.x[-1]))
        return not np.any((c.x[1:-1] > lo) & (c.x[1:-1] < hi))

    def _branch_height(self, name: str, tab: _BranchTable, i: int, px: float, py: float, tol: float):
        x0, x1 = tab.x[i], tab.x[i + 1]
        y0, y1 = tab.y[i], tab.y[i + 1]
        if x1 == x0:
            return max(y0, y1) if tab.side[i] > 0 else min(y0, y1)
        y_lin = y0 + (px - x0) / (x1 - x0) * (y1 - y0)
        if tab.closed and i == len(tab.k) - 2:
            return y_lin
        if abs(py - y_lin) > 2.0 * tab.sag[i] + tol:
            return y_lin

        def dx(k):
            return envelope_point(self.envelope, k, name).x - px

        try:
            k = refine_root(dx, Bracket(tab.k[i], tab.k[i + 1], x0 - px, x1 - px), tol_x=1e-15)
            return envelope_point(self.envelope, k, name).y
        except (ValueError, UndefinedBranchError, FlatFociTangentError):
            return y_lin

    def violation(self, p: Vec2, tol: float = 1e-6) -> float:
        """How far ``p`` lies outside the domain (``<= 0`` means inside)."""
        if not self.x_range[0] <= p.x <= self.x_range[1]:
            raise InsufficientSamplingError(
                f"insufficient envelope sampling: x={p.x} outside sampled range {self.x_range}"
            )
        m = self.envelope.mirror
        worst = max(float(m.height(p.x)) - p.y, p.y - self.envelope.H)
        for name, tab in self.tables.items():
            if len(tab.k) < 2:
                continue
            dx = tab.x - p.x
            segs = np.nonzero(dx[:-1] * dx[1:] <= 0)[0]
            for i in segs:
                s0, s1 = tab.side[i], tab.side[i + 1]
                if s0 == 0 or s0 != s1 or not np.isfinite(tab.sag[i]):
                    continue
                y_env = self._branch_height(name, tab, int(i), p.x, p.y, tol)
                v = (p.y - y_env) if s0 > 0 else (y_env - p.y)
                worst = max(worst, v)
        return worst

    def contains(self, p: Vec2, tol: float = 1e-6) -> bool:
        return self.violation(p, tol) <= tol


def in_confined_domain(domain: ConfinedDomain, p: Vec2, tol: float = 1e-6) -> bool:
    return domain.contains(p, tol)


def confined_domain(
    e: EnvelopePair,
    k_range: tuple[float, float] | None = None,
    n: int = DEFAULT_SAMPLES,
    k_max: float = K_FAR,
):
    """Sample ``e`` into a :class:`ConfinedDomain`.

    Without ``k_range`` the grid is spaced uniformly in ``asinh(k)`` out to
    ``|k| = k_max`` (clipped to the mirror domain), dense near the origin
    and still reaching far along the mirror.
    """
    m = e.mirror
    if k_range is None:
        lo, hi = max(m.x_min, -k_max), min(m.x_max, k_max)
        ks = np.sinh(np.linspace(math.asinh(lo), math.asinh(hi), n))
    else:
        ks = np.linspace(k_range[0], k_range[1], n)
    return ConfinedDomain(e, ks)


# -- launching onto a prescribed foci curve -----------------------------------


def launch_state(m: Mirror, L: float, H: float, k0: float, g: float = 1.0, direction: int = 1) -> State:
    """Particle at the vertex of the flight parabola whose focus is the foci-curve
    point at ``k0`` and whose directrix is ``y = H``."""
    F = foci_curve_point(FociCurve(m, L), k0)
    f = 0.5 * (H - F.y)
    if f <= 0:
        raise ValueError(f"focus {F} lies on or above the directrix y={H}")
    vertex = Vec2(F.x, F.y + f)
    if vertex.y < float(m.height(vertex.x)):
        raise ValueError(f"flight vertex {vertex} is below the mirror")
    v = math.sqrt(2.0 * g * f)
    return State(vertex, Vec2(v if direction >= 0 else -v, 0.0))
