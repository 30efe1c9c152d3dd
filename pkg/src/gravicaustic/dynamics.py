"""Parabolic flights under constant gravity and specular bounces off a mirror.

A flight is launched from ``start`` with velocity ``v`` and obeys::

    x(t) = x0 + vx t
    y(t) = y0 + vy t - g t^2 / 2

Its focus sits at ``start + (vx vy / g, (vy^2 - vx^2) / (2 g))``, its focal
length is ``vx^2 / (2 g)`` and the directrix ``y = H`` is fixed by energy,
``H = y0 + |v|^2 / (2 g)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import (
    MirrorDomainError,
    MirrorEvaluationError,
    NonIncidentImpactError,
    RootNotConverged,
)
from .mirror import Mirror
from .numerics import TOL_F, TOL_X, Bracket, refine_bracket, scan_first_bracket
from .vec2 import Vec2

SURFACE_EPS = 1e-9
GRAZING_EPS = 1e-10
HORIZON_FACTOR = 1e3
STUCK_LIMIT = 50
# flights shorter than this count towards the corner-accumulation limit
SHORT_FLIGHT = 1e3 * TOL_X
# fraction of the tangent-crossing time used as the scan step
_STEP_FRACTION = 1.0 / 16.0


@dataclass(frozen=True)
class State:
    pos: Vec2
    vel: Vec2


@dataclass(frozen=True)
class FlightParabola:
    start: State
    g: float = 1.0

    def __post_init__(self):
        if not self.g > 0:
            raise ValueError(f"gravity must be positive, got {self.g}")

    @property
    def is_degenerate(self) -> bool:
        """Vertical flight: focal length zero and the focus collapses to the apex."""
        return self.start.vel.x == 0.0

    def velocity_at(self, t: float) -> Vec2:
        v = self.start.vel
        return Vec2(v.x, v.y - self.g * t)

    def position_at(self, t: float) -> Vec2:
        return position_at(self, t)

    @property
    def focus(self) -> Vec2:
        return focus_of(self)

    @property
    def focal_length(self) -> float:
        return focal_length(self)

    @property
    def directrix(self) -> float:
        return directrix_of(self)

    @property
    def vertex(self) -> Vec2:
        return vertex_of(self)


def position_at(p: FlightParabola, t: float) -> Vec2:
    x0, y0 = p.start.pos
    vx, vy = p.start.vel
    return Vec2(x0 + vx * t, y0 + t * (vy - 0.5 * p.g * t))


def focal_length(p: FlightParabola) -> float:
    return p.start.vel.x ** 2 / (2.0 * p.g)


def focus_of(p: FlightParabola) -> Vec2:
    """Focus of the flight; for a vertical flight this is the apex."""
    vx, vy = p.start.vel
    g = p.g
    return Vec2(p.start.pos.x + vx * vy / g, p.start.pos.y + (vy * vy - vx * vx) / (2.0 * g))


def directrix_of(p: FlightParabola) -> float:
    """Height ``H`` of the common directrix line.

    Computed from energy and cross-checked against ``y_F + 2 f``.
    """
    H = p.start.pos.y + p.start.vel.norm2() / (2.0 * p.g)
    alt = focus_of(p).y + 2.0 * focal_length(p)
    scale = max(1.0, abs(H), abs(p.start.pos.y), p.start.vel.norm2() / p.g)
    assert abs(H - alt) <= 1e-14 * scale * 4, (H, alt)
    return H


def vertex_of(p: FlightParabola) -> Vec2:
    F = focus_of(p)
    return Vec2(F.x, 0.5 * (directrix_of(p) + F.y))


def reflect(v_in: Vec2, normal: Vec2) -> Vec2:
    """Specular reflection of ``v_in`` off a wall with unit ``normal``."""
    vn = v_in.dot(normal)
    if vn >= 0:
        raise NonIncidentImpactError(
            f"non-incident impact: velocity {v_in} does not point into the wall (v.n={vn})"
        )
    return Vec2(v_in.x - 2.0 * vn * normal.x, v_in.y - 2.0 * vn * normal.y)


def reflect_focus(F_rel: Vec2, alpha: float) -> Vec2:
    """Map the incoming focus to the outgoing one, both relative to the impact point.

    The map is a reflection across the line through the impact point at
    angle ``2 alpha + pi/2``; it is its own inverse.
    """
    c, s = math.cos(4.0 * alpha), math.sin(4.0 * alpha)
    return Vec2(-c * F_rel.x - s * F_rel.y, -s * F_rel.x + c * F_rel.y)


# -- impact search ------------------------------------------------------------


@dataclass(frozen=True)
class Impact:
    t: float
    point: Vec2


def characteristic_time(p: FlightParabola) -> float:
    """Free-fall time scale ``sqrt(2 h / g)`` of a flight."""
    H = directrix_of(p)
    h = max(abs(H), H - p.start.pos.y, 1.0)
    return math.sqrt(2.0 * h / p.g)


def _tangent_crossing_time(p: FlightParabola, m: Mirror) -> float:
    """When the flight would cross the mirror's tangent line at the launch abscissa."""
    x0, y0 = p.start.pos
    vx, vy = p.start.vel
    try:
        s = float(m.slope(x0))
    except MirrorEvaluationError:
        s = 0.0
    a = max(y0 - float(m.height(x0)), 0.0)
    b = vy - s * vx
    disc = b * b + 2.0 * p.g * a
    return max((b + math.sqrt(disc)) / p.g, 0.0)


def next_impact(
    p: FlightParabola,
    m: Mirror,
    *,
    tol_x: float = TOL_X,
    tol_f: float = TOL_F,
    horizon: float | None = None,
) -> Impact | None:
    """First time ``t* > 10 tol_x`` at which the flight meets the mirror.

    Returns ``None`` when the particle escapes: it leaves the mirror domain
    or nothing is hit within ``horizon`` (default ``1e3`` characteristic
    times).
    """
    x0, y0 = p.start.pos
    vx, vy = p.start.vel
    g = p.g

    def gap(t):
        return y0 + t * (vy - 0.5 * g * t) - m.height(x0 + vx * t)

    t_char = characteristic_time(p)
    span = HORIZON_FACTOR * t_char if horizon is None else horizon
    if vx > 0:
        span = min(span, (m.x_max - x0) / vx)
    elif vx < 0:
        span = min(span, (m.x_min - x0) / vx)

    t_start = 10.0 * tol_x
    if span <= t_start:
        return None
    if gap(t_start) <= 0:
        # Launched from (numerically) on the surface.  If moving away, skip
        # past the rounding layer; otherwise the particle hits immediately.
        outward = vy - float(m.slope(x0)) * vx
        if outward <= 0:
            return Impact(t_start, position_at(p, t_start))
        t = t_start
        while gap(t) <= 0:
            t *= 2.0
            if t >= span:
                return None
        t_start = t

    t_tan = _tangent_crossing_time(p, m)
    step = min(max(t_tan * _STEP_FRACTION, t_char * 1e-7), t_char * _STEP_FRACTION)
    try:
        bracket = scan_first_bracket(
            gap,
            t_start,
            step,
            span - t_start,
            tol_f=tol_f,
            max_step=t_char * _STEP_FRACTION,
            growth=1.0 if t_tan > 0 else 1.5,
        )
        if bracket is None:
            return None
        t_hit = _polish(gap, bracket, tol_x, tol_f)
    except MirrorDomainError:
        # rounding at the domain edge: the flight is leaving the mirror
        return None
    return Impact(t_hit, position_at(p, t_hit))


def _polish(gap, bracket: Bracket, tol_x, tol_f) -> float:
    t, b = refine_bracket(gap, bracket, tol_x, tol_f)
    # prefer the pre-impact side so the particle never starts inside the wall
    if gap(t) < 0 and b.f_lo > 0 and abs(b.f_lo) <= 100 * tol_f:
        return b.lo
    return t


# -- simulation ---------------------------------------------------------------


@dataclass(frozen=True)
class Bounce:
    impact: Vec2
    t_flight: float
    v_in: Vec2
    v_out: Vec2
    alpha: float
    focus_in: Vec2
    focus_out: Vec2


@dataclass(frozen=True)
class Termination:
    kind: str  # "max_bounces" | "escaped" | "stuck"
    reason: str | None = None

    def __str__(self):
        return self.kind if self.reason is None else f"{self.kind}({self.reason})"


@dataclass
class Trajectory:
    initial: State
    g: float
    mirror: Mirror
    bounces: list[Bounce] = field(default_factory=list)
    termination: Termination = Termination("max_bounces")
    grazings: int = 0

    def segments(self) -> list[FlightParabola]:
        """Flight parabolas in order: one before each bounce, plus the last one."""
        segs = [FlightParabola(self.initial, self.g)]
        for b in self.bounces:
            segs.append(FlightParabola(State(b.impact, b.v_out), self.g))
        return segs

    def arcs(self) -> list[tuple[FlightParabola, float]]:
        """``(segment, duration)`` for every completed flight."""
        segs = self.segments()
        return [(segs[i], b.t_flight) for i, b in enumerate(self.bounces)]

    @property
    def H(self) -> float:
        return directrix_of(FlightParabola(self.initial, self.g))


def simulate(initial: State, m: Mirror, g: float = 1.0, n: int = 100, **impact_kw) -> Trajectory:
    """Bounce the particle ``n`` times (or until it escapes or gets stuck)."""
    if n < 0:
        raise ValueError("bounce count must be non-negative")
    below = float(m.height(initial.pos.x)) - initial.pos.y
    if below > SURFACE_EPS:
        raise ValueError(f"initial position {initial.pos} is {below:g} below the mirror")
    traj = Trajectory(initial, g, m)
    seg = FlightParabola(initial, g)
    elapsed = 0.0  # time since the last recorded bounce (grazes extend a flight)
    short = 0
    while len(traj.bounces) < n:
        try:
            hit = next_impact(seg, m, **impact_kw)
        except MirrorDomainError:
            traj.termination = Termination("escaped")
            break
        except (MirrorEvaluationError, RootNotConverged) as exc:
            traj.termination = Termination("stuck", str(exc))
            break
        if hit is None:
            traj.termination = Termination("escaped")
            break
        v_in = seg.velocity_at(hit.t)
        try:
            normal = m.unit_normal(hit.point.x)
        except MirrorEvaluationError as exc:
            traj.termination = Termination("stuck", str(exc))
            break
        if v_in.dot(normal) > -GRAZING_EPS:
            # tangential touch: keep flying along the same parabola
            traj.grazings += 1
            elapsed += hit.t
            seg = FlightParabola(State(hit.point, v_in), g)
            short = short + 1 if hit.t < SHORT_FLIGHT else 0
            if short >= STUCK_LIMIT:
                traj.termination = Termination("stuck", "corner accumulation")
                break
            continue
        v_out = reflect(v_in, normal)
        nxt = FlightParabola(State(hit.point, v_out), g)
        traj.bounces.append(
            Bounce(
                impact=hit.point,
                t_flight=elapsed + hit.t,
                v_in=v_in,
                v_out=v_out,
                alpha=math.atan(-normal.x / normal.y),
                focus_in=focus_of(seg),
                focus_out=focus_of(nxt),
            )
        )
        elapsed = 0.0
        short = short + 1 if hit.t < SHORT_FLIGHT else 0
        if short >= STUCK_LIMIT:
            traj.termination = Termination("stuck", "corner accumulation")
            break
        seg = nxt
    return traj
