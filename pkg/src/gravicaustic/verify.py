"""Checks tying the simulator to the caustic theory.

Every check returns a :class:`CheckResult` carrying the largest residual it
saw, the tolerance it was held to and where the worst case occurred.  A
scenario (JSON document or dict) names a launch, a mirror and the checks
to run; :func:`run_suite` turns it into a :class:`VerificationReport`.

Scenario fields::

    mirror, x0, y0, vx, vy      required
    g (1), bounces (100)        optional
    checks                      list of names from CHECKS (default: all)
    tolerances                  per-check overrides
    id                          report label (default: file stem)
    domain                      [x_min, x_max] of the mirror
    L, H, k0                    launch at the vertex of the flight parabola
                                whose focus is the foci-curve point at k0;
                                replaces x0, y0, vx, vy
    samples_per_arc             confinement sampling (64)
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .caustics import (
    EnvelopePair,
    FociCurve,
    K_FAR,
    confined_domain,
    foci_curve_point,
    launch_state,
    match_L,
    sample_foci,
)
from .dynamics import (
    FlightParabola,
    State,
    Trajectory,
    directrix_of,
    next_impact,
    simulate,
)
from .errors import (
    ConfigError,
    FocusNotReachableError,
    InsufficientSamplingError,
    MirrorEvaluationError,
    MirrorSyntaxError,
)
from .mirror import DEFAULT_DOMAIN, HyperbolicMirror, LineMirror, Mirror, ParabolicMirror, parse_mirror
from .numerics import minimize_1d
from .vec2 import Vec2

SEED = 0xB177A4D

DEFAULT_TOLERANCES = {
    "directrix": 1e-9,
    "foci_circle": 1e-8,
    "foci_slope": 1e-8,
    "foci_on_curve": 1e-7,
    "confinement": 1e-6,
    "impact_oracle": 1e-7,
}
CHECKS = tuple(DEFAULT_TOLERANCES)

# grid used to find the nearest foci-curve sample before polishing
CURVE_SAMPLES = 8193
# impact_oracle compares at most this many flights per trajectory
ORACLE_FLIGHTS = 100


@dataclass(frozen=True)
class CheckResult:
    name: str
    max_residual: float
    tolerance: float
    passed: bool
    worst_location: tuple[float, float] | None = None
    note: str | None = None

    @classmethod
    def build(cls, name, residual, tol, where=None, note=None):
        return cls(name, float(residual), float(tol), bool(residual <= tol), where, note)

    @classmethod
    def skipped(cls, name, tol, why):
        return cls(name, 0.0, float(tol), True, None, f"skipped: {why}")

    @classmethod
    def failed(cls, name, tol, why):
        return cls(name, math.inf, float(tol), False, None, why)


@dataclass
class VerificationReport:
    scenario_id: str
    checks: list[CheckResult] = field(default_factory=list)
    seed: int = SEED
    info: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_dict(self) -> dict:
        checks = []
        for c in self.checks:
            d = asdict(c)
            # strict JSON has no infinity
            d["max_residual"] = c.max_residual if math.isfinite(c.max_residual) else None
            d["worst_location"] = list(c.worst_location) if c.worst_location else None
            checks.append(d)
        return {
            "scenario_id": self.scenario_id,
            "passed": self.passed,
            "seed": self.seed,
            "info": self.info,
            "checks": checks,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=False)


def _loc(p: Vec2) -> tuple[float, float]:
    return (float(p.x), float(p.y))


# -- invariant checks ---------------------------------------------------------


def check_directrix(t: Trajectory, tol: float = DEFAULT_TOLERANCES["directrix"]) -> CheckResult:
    """Relative drift of the directrix height over all flight segments."""
    segs = t.segments()
    H0 = directrix_of(segs[0])
    scale = max(1.0, abs(H0))
    worst, where = 0.0, None
    for s in segs[1:]:
        r = abs(directrix_of(s) - H0) / scale
        if r > worst:
            worst, where = r, _loc(s.start.pos)
    return CheckResult.build("directrix", worst, tol, where)


def check_foci_circle(t: Trajectory, tol: float = DEFAULT_TOLERANCES["foci_circle"]) -> CheckResult:
    """Both foci of every bounce sit at distance ``H - f(k)`` from the impact point."""
    if not t.bounces:
        return CheckResult.skipped("foci_circle", tol, "no bounces")
    H = t.H
    worst, where = 0.0, None
    for b in t.bounces:
        R = H - float(t.mirror.height(b.impact.x))
        for F in (b.focus_in, b.focus_out):
            r = abs((F - b.impact).norm() - R)
            if r > worst:
                worst, where = r, _loc(b.impact)
    return CheckResult.build("foci_circle", worst, tol, where)


def check_foci_slope(t: Trajectory, tol: float = DEFAULT_TOLERANCES["foci_slope"]) -> CheckResult:
    """Consecutive foci are joined by a line of slope ``tan(2 alpha)``.

    The residual is the sine of the angle between ``F_out - F_in`` and the
    direction ``(cos 2a, sin 2a)``, which stays finite where the slope does
    not (``alpha = +-45 deg``).  Bounces whose foci coincide are skipped.
    """
    worst, where, used = 0.0, None, 0
    for b in t.bounces:
        d = b.focus_out - b.focus_in
        n = d.norm()
        if n <= 1e-12 * (1.0 + b.focus_in.norm()):
            continue
        used += 1
        r = abs(d.cross(Vec2(math.cos(2.0 * b.alpha), math.sin(2.0 * b.alpha)))) / n
        if r > worst:
            worst, where = r, _loc(b.impact)
    if used == 0:
        return CheckResult.skipped("foci_slope", tol, "no bounce with distinct foci")
    return CheckResult.build("foci_slope", worst, tol, where)


def matched_L(t: Trajectory) -> tuple[float, float] | None:
    """``(L, k0)`` matched from the first segment with a proper focus, else ``None``."""
    for s in t.segments():
        if not s.is_degenerate:
            m = match_L(t.mirror, s.focus)
            return m.L, m.k0
    return None


def reach(points) -> float:
    """Sampling half-width for curves that must cover ``points``: ``K_FAR``
    or, for orbits that wander further along the mirror, twice their extent."""
    ext = max((abs(P.x) for P in points), default=0.0)
    return max(K_FAR, 2.0 * ext)


def _curve_grid(m: Mirror, n: int = CURVE_SAMPLES, k_max: float = K_FAR) -> np.ndarray:
    lo, hi = max(m.x_min, -k_max), min(m.x_max, k_max)
    return np.sinh(np.linspace(math.asinh(lo), math.asinh(hi), n))


def distances_to_curve(c: FociCurve, points: list[Vec2], n: int = CURVE_SAMPLES) -> np.ndarray:
    """Nearest-point distance from each point to the foci curve ``c``.

    A dense scan picks the closest sample, then a golden-section search on
    the two adjacent parameter intervals polishes it.
    """
    s = sample_foci(c, _curve_grid(c.mirror, n, reach(points)))
    out = np.empty(len(points))
    for j, P in enumerate(points):
        i = int(np.argmin(np.hypot(s.x - P.x, s.y - P.y)))
        lo, hi = s.k[max(i - 1, 0)], s.k[min(i + 1, len(s.k) - 1)]

        def dist(k, P=P):
            return (foci_curve_point(c, k) - P).norm()

        best = math.hypot(s.x[i] - P.x, s.y[i] - P.y)
        if lo < hi:
            best = min(best, minimize_1d(dist, lo, hi, tol=1e-13 * (1.0 + abs(lo) + abs(hi)))[1])
        out[j] = best
    return out


def check_foci_on_curve(
    t: Trajectory, tol: float = DEFAULT_TOLERANCES["foci_on_curve"], L: float | None = None
) -> CheckResult:
    """Every segment focus lies on the foci curve matched from the first one."""
    name = "foci_on_curve"
    if L is None:
        try:
            got = matched_L(t)
        except FocusNotReachableError as exc:
            return CheckResult.failed(name, tol, str(exc))
        if got is None:
            return CheckResult.skipped(name, tol, "all segments are vertical flights")
        L = got[0]
    foci = [s.focus for s in t.segments() if not s.is_degenerate]
    d = distances_to_curve(FociCurve(t.mirror, L), foci)
    i = int(np.argmax(d))
    return CheckResult.build(name, d[i], tol, _loc(foci[i]), f"L={L!r}")


def arc_samples(t: Trajectory, n: int = 64) -> list[Vec2]:
    pts = []
    for seg, dur in t.arcs():
        for tt in np.linspace(0.0, dur, n):
            pts.append(seg.position_at(float(tt)))
    return pts


def check_confinement(
    t: Trajectory,
    e: EnvelopePair,
    n_samples_per_arc: int = 64,
    tol: float = DEFAULT_TOLERANCES["confinement"],
) -> CheckResult:
    """All sampled arc points lie in the region bounded by mirror, envelopes and ``y = H``."""
    name = "confinement"
    if not t.bounces:
        return CheckResult.skipped(name, tol, "no completed flight")
    pts = arc_samples(t, n_samples_per_arc)
    D = confined_domain(e, k_max=reach(pts))
    worst, where, outside = -math.inf, None, 0
    for P in pts:
        try:
            v = D.violation(P, tol)
        except InsufficientSamplingError:
            return CheckResult(name, math.inf, tol, False, _loc(P), "insufficient envelope sampling")
        outside += v > tol
        if v > worst:
            worst, where = v, _loc(P)
    return CheckResult.build(name, max(worst, 0.0), tol, where, f"{outside} samples outside")


# -- independent impact oracle ------------------------------------------------


def oracle_next_impact(p: FlightParabola, m: Mirror, dt: float | None = None, t_min: float = 1e-11):
    """Brute-force first impact: fixed steps of ``dt`` then plain bisection.

    Deliberately independent of :func:`gravicaustic.dynamics.next_impact`:
    it only uses the mirror's array evaluation.  Returns ``(t, point)`` or
    ``None`` if nothing is hit before the horizon or the domain edge.
    """
    x0, y0 = p.start.pos
    vx, vy = p.start.vel
    g = p.g
    H = y0 + (vx * vx + vy * vy) / (2.0 * g)
    T = math.sqrt(2.0 * max(abs(H), H - y0, 1.0) / g)
    horizon = 1e3 * T
    if dt is None:
        dt = 1e-6 * horizon
    if vx > 0:
        horizon = min(horizon, (m.x_max - x0) / vx)
    elif vx < 0:
        horizon = min(horizon, (m.x_min - x0) / vx)

    def gap(tt):
        return y0 + vy * tt - 0.5 * g * tt * tt - m.height_array(x0 + vx * tt)

    chunk = 8192
    start = t_min
    lifted = False
    while start < horizon:
        ts = start + dt * np.arange(chunk)
        ts = ts[ts <= horizon]
        if ts.size == 0:
            break
        gs = gap(ts)
        if not lifted:
            pos = np.nonzero(gs > 0)[0]
            if pos.size == 0:
                start = ts[-1] + dt
                continue
            lifted = True
            ts, gs = ts[pos[0]:], gs[pos[0]:]
        hit = np.nonzero(gs <= 0)[0]
        if hit.size:
            j = int(hit[0])
            lo, hi = (ts[j - 1], ts[j]) if j > 0 else (ts[0] - dt, ts[0])
            while hi - lo > 1e-12:
                mid = 0.5 * (lo + hi)
                if mid <= lo or mid >= hi:
                    break
                if gap(np.array([mid]))[0] > 0:
                    lo = mid
                else:
                    hi = mid
            tt = 0.5 * (lo + hi)
            return tt, Vec2(x0 + vx * tt, y0 + vy * tt - 0.5 * g * tt * tt)
        start = ts[-1] + dt
    return None


def compare_impact(p: FlightParabola, m: Mirror) -> float:
    """Largest of ``|dt|`` and ``|dP|`` between the simulator and the oracle."""
    a = next_impact(p, m)
    b = oracle_next_impact(p, m)
    if a is None and b is None:
        return 0.0
    if a is None or b is None:
        return math.inf
    return max(abs(a.t - b[0]), (a.point - b[1]).norm())


def check_impact_oracle(
    t: Trajectory, tol: float = DEFAULT_TOLERANCES["impact_oracle"], limit: int = ORACLE_FLIGHTS
) -> CheckResult:
    """The first ``limit`` flights of ``t`` re-solved by the brute-force oracle."""
    worst, where = 0.0, None
    for seg in t.segments()[:limit]:
        r = compare_impact(seg, t.mirror)
        if r > worst:
            worst, where = r, _loc(seg.start.pos)
    return CheckResult.build("impact_oracle", worst, tol, where)


def random_scenarios(n: int = 100, seed: int = SEED) -> list[tuple[FlightParabola, Mirror]]:
    """Seeded launches above the built-in mirrors, all of which get hit."""
    rng = random.Random(seed)
    out = []
    for _ in range(n):
        kind = rng.choice(("parabola", "line", "hyperbola"))
        if kind == "parabola":
            m = ParabolicMirror(rng.uniform(0.25, 2.0))
        elif kind == "line":
            m = LineMirror(math.radians(rng.uniform(-60.0, 60.0)))
        else:
            m = HyperbolicMirror()
        x0 = rng.uniform(-2.0, 2.0)
        y0 = float(m.height(x0)) + rng.uniform(0.05, 3.0)
        speed = rng.uniform(0.0, 3.0)
        ang = rng.uniform(0.0, 2.0 * math.pi)
        v = Vec2(speed * math.cos(ang), speed * math.sin(ang))
        out.append((FlightParabola(State(Vec2(x0, y0), v)), m))
    return out


def check_random_impacts(
    n: int = 100, seed: int = SEED, tol: float = DEFAULT_TOLERANCES["impact_oracle"]
) -> CheckResult:
    worst, where = 0.0, None
    for p, m in random_scenarios(n, seed):
        r = compare_impact(p, m)
        if r > worst:
            worst, where = r, _loc(p.start.pos)
    return CheckResult.build("impact_oracle_random", worst, tol, where, f"{n} scenarios, seed {seed:#x}")


# -- scenario files -----------------------------------------------------------


@dataclass
class Scenario:
    id: str
    mirror: Mirror
    initial: State
    g: float = 1.0
    bounces: int = 100
    checks: tuple[str, ...] = CHECKS
    tolerances: dict = field(default_factory=dict)
    L: float | None = None
    samples_per_arc: int = 64

    def tol(self, name: str) -> float:
        return float(self.tolerances.get(name, DEFAULT_TOLERANCES[name]))


def _num(doc: dict, key: str, default=None) -> float:
    if key not in doc:
        if default is None:
            raise ConfigError(f"scenario field {key!r} is required")
        return default
    v = doc[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(f"scenario field {key!r} must be a number, got {v!r}")
    return float(v)


def load_scenario(source: str | Path | dict) -> Scenario:
    if isinstance(source, dict):
        doc, default_id = source, "scenario"
    else:
        path = Path(source)
        try:
            doc = json.loads(path.read_text())
        except OSError as exc:
            raise ConfigError(f"cannot read scenario {path}: {exc}") from None
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None
        default_id = path.stem
    if not isinstance(doc, dict):
        raise ConfigError("scenario must be a JSON object")
    if "mirror" not in doc or not isinstance(doc["mirror"], str):
        raise ConfigError("scenario field 'mirror' is required and must be a string")
    domain = tuple(doc.get("domain", DEFAULT_DOMAIN))
    try:
        m = parse_mirror(doc["mirror"], domain)
    except (MirrorSyntaxError, ValueError) as exc:
        raise ConfigError(f"scenario field 'mirror': {exc}") from None
    g = _num(doc, "g", 1.0)
    L = None
    if "k0" in doc:
        L, H, k0 = _num(doc, "L"), _num(doc, "H"), _num(doc, "k0")
        try:
            initial = launch_state(m, L, H, k0, g)
        except (ValueError, MirrorEvaluationError) as exc:
            raise ConfigError(f"cannot launch from k0={k0}: {exc}") from None
    else:
        initial = State(Vec2(_num(doc, "x0"), _num(doc, "y0")), Vec2(_num(doc, "vx"), _num(doc, "vy")))
    checks = tuple(doc.get("checks", CHECKS))
    unknown = [c for c in checks if c not in DEFAULT_TOLERANCES]
    if unknown:
        raise ConfigError(f"unknown check(s) {unknown}; known: {list(CHECKS)}")
    tols = dict(doc.get("tolerances", {}))
    bad = [k for k in tols if k not in DEFAULT_TOLERANCES]
    if bad:
        raise ConfigError(f"tolerance override for unknown check(s) {bad}")
    bounces = doc.get("bounces", 100)
    if isinstance(bounces, bool) or not isinstance(bounces, int) or bounces < 0:
        raise ConfigError(f"scenario field 'bounces' must be a non-negative integer, got {bounces!r}")
    return Scenario(
        id=str(doc.get("id", default_id)),
        mirror=m,
        initial=initial,
        g=g,
        bounces=bounces,
        checks=checks,
        tolerances=tols,
        L=L,
        samples_per_arc=int(doc.get("samples_per_arc", 64)),
    )


def run_scenario(sc: Scenario) -> VerificationReport:
    try:
        t = simulate(sc.initial, sc.mirror, sc.g, sc.bounces)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    report = VerificationReport(sc.id)
    report.info = {
        "mirror": sc.mirror.text,
        "bounces": len(t.bounces),
        "termination": str(t.termination),
        "H": t.H,
    }
    L = sc.L
    if L is None and ({"foci_on_curve", "confinement"} & set(sc.checks)):
        try:
            got = matched_L(t)
        except FocusNotReachableError:
            got = None
        L = got[0] if got else None
    report.info["L"] = L
    for name in sc.checks:
        tol = sc.tol(name)
        if name == "directrix":
            r = check_directrix(t, tol)
        elif name == "foci_circle":
            r = check_foci_circle(t, tol)
        elif name == "foci_slope":
            r = check_foci_slope(t, tol)
        elif name == "foci_on_curve":
            r = check_foci_on_curve(t, tol, L)
        elif name == "confinement":
            if L is None:
                r = CheckResult.failed(name, tol, "no foci curve could be matched")
            else:
                r = check_confinement(t, EnvelopePair(FociCurve(sc.mirror, L), t.H), sc.samples_per_arc, tol)
        else:
            r = check_impact_oracle(t, tol)
        report.checks.append(r)
    return report


def run_suite(source: str | Path | dict) -> VerificationReport:
    """Load a scenario, simulate it and run its checks."""
    return run_scenario(load_scenario(source))
