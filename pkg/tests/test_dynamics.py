import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gravicaustic.dynamics import (
    FlightParabola,
    State,
    directrix_of,
    focal_length,
    focus_of,
    next_impact,
    position_at,
    reflect,
    reflect_focus,
    simulate,
    vertex_of,
)
from gravicaustic.errors import NonIncidentImpactError
from gravicaustic.mirror import LineMirror, ParabolicMirror, parse_mirror
from gravicaustic.vec2 import Vec2
from gravicaustic.verify import oracle_next_impact


def flight(x, y, vx, vy, g=1.0):
    return FlightParabola(State(Vec2(x, y), Vec2(vx, vy)), g)


# -- kinematics ---------------------------------------------------------------


def test_position_at():
    assert position_at(flight(0, 0, 1, 1), 2.0) == Vec2(2.0, 0.0)
    p = flight(0.3, -1.0, 2.0, 5.0)
    assert position_at(p, 0.0) == Vec2(0.3, -1.0)
    q = position_at(flight(0, 0, 3, 4, g=9.81), 0.5)
    assert q.x == 1.5 and q.y == pytest.approx(4 * 0.5 - 9.81 * 0.125, rel=1e-15)


def test_focal_length():
    assert focal_length(flight(0, 0, 1, 1)) == 0.5
    assert focal_length(flight(0, 0, 0, 5)) == 0.0
    b = math.radians(60)
    assert focal_length(flight(0, 0, 2 * math.cos(b), 2 * math.sin(b))) == pytest.approx(0.5)


def test_focus_of():
    assert focus_of(flight(0, 0, 1, 1)) == Vec2(1.0, 0.0)
    assert focus_of(flight(0, 0, 1, 0)) == Vec2(0.0, -0.5)
    assert focus_of(flight(2, 3, 1, 1)) == Vec2(3.0, 3.0)


def test_directrix_of():
    assert directrix_of(flight(0, 0, 1, 1)) == 1.0
    assert directrix_of(flight(0, 2, 1, 0)) == 2.5
    p = flight(0, 0, 1, 1)
    assert focus_of(p).y + 2 * focal_length(p) == directrix_of(p)


def test_vertex_of():
    assert vertex_of(flight(0, 0, 1, 1)) == Vec2(1.0, 0.5)
    assert vertex_of(flight(0, 0, 1, 0)) == Vec2(0.0, 0.0)
    # vertical flight: the apex
    assert vertex_of(flight(1, 0, 0, 2)) == Vec2(1.0, 2.0)


@settings(max_examples=200, deadline=None)
@given(st.floats(-3, 3), st.floats(-3, 3), st.floats(-4, 4), st.floats(-4, 4), st.floats(0.1, 10))
def test_focus_directrix_relation(x, y, vx, vy, g):
    p = flight(x, y, vx, vy, g)
    assert focus_of(p).y + 2 * focal_length(p) == pytest.approx(directrix_of(p), abs=1e-12 * (1 + abs(y) + 16 / g))


# -- reflection ---------------------------------------------------------------


def test_reflect_examples():
    assert reflect(Vec2(1, -1), Vec2(0, 1)) == Vec2(1, 1)
    assert reflect(Vec2(0, -1), Vec2(0, 1)) == Vec2(0, 1)
    n = LineMirror(math.pi / 4).unit_normal(0.0)
    # (-1, 0) leaves this wall (v.n > 0), so the incident mirror image is used
    v = reflect(Vec2(1, 0), n)
    assert v.x == pytest.approx(0.0, abs=1e-15) and v.y == pytest.approx(1.0)
    with pytest.raises(NonIncidentImpactError):
        reflect(Vec2(-1, 0), n)


def test_reflect_rejects_outgoing_velocity():
    with pytest.raises(NonIncidentImpactError, match="non-incident impact"):
        reflect(Vec2(1, 1), Vec2(0, 1))
    with pytest.raises(NonIncidentImpactError):
        reflect(Vec2(1, 0), Vec2(0, 1))


def test_reflect_focus_examples():
    assert reflect_focus(Vec2(1, 2), 0.0) == Vec2(-1, 2)
    F = reflect_focus(Vec2(1, 0), math.pi / 4)
    assert F.x == pytest.approx(1.0) and F.y == pytest.approx(0.0, abs=1e-15)


@settings(max_examples=200, deadline=None)
@given(st.floats(-1.5, 1.5), st.floats(-10, 10), st.floats(-10, 10))
def test_reflect_focus_is_involution(alpha, x, y):
    back = reflect_focus(reflect_focus(Vec2(x, y), alpha), alpha)
    assert back.x == pytest.approx(x, abs=1e-12 * (1 + abs(x) + abs(y)))
    assert back.y == pytest.approx(y, abs=1e-12 * (1 + abs(x) + abs(y)))


def test_reflect_focus_agrees_with_one_bounce_off_45_degree_line():
    m = LineMirror(math.pi / 4)
    s = State(Vec2(-1.0, 0.0), Vec2(0.5, 0.3))
    t = simulate(s, m, n=1)
    b = t.bounces[0]
    F_out = reflect_focus(b.focus_in - b.impact, b.alpha) + b.impact
    assert (F_out - b.focus_out).norm() < 1e-12


@settings(max_examples=100, deadline=None)
@given(st.floats(-3, 3), st.floats(-2, 2), st.floats(-2, 2))
def test_reflection_preserves_speed_and_directrix(x, vx, vy):
    m = ParabolicMirror(1.0)
    s = State(Vec2(x, m.height(x) + 1.0), Vec2(vx, vy))
    t = simulate(s, m, n=3)
    H = t.H
    for b in t.bounces:
        assert b.v_out.norm() == pytest.approx(b.v_in.norm(), rel=1e-13)
        assert directrix_of(FlightParabola(State(b.impact, b.v_out))) == pytest.approx(H, rel=1e-11, abs=1e-11)


# -- impacts ------------------------------------------------------------------


def test_next_impact_free_fall():
    hit = next_impact(flight(0, 1, 0, 0), parse_mirror("0"))
    assert hit.t == pytest.approx(math.sqrt(2), abs=1e-12)
    assert hit.point.x == 0.0 and hit.point.y == pytest.approx(0.0, abs=1e-12)


def test_next_impact_range():
    hit = next_impact(flight(0, 1e-12, 1, 1), parse_mirror("0"))
    assert hit.t == pytest.approx(2.0, abs=1e-9)
    assert hit.point.x == pytest.approx(2.0, abs=1e-9)


def test_next_impact_matches_oracle_on_parabola():
    p, m = flight(0, 2, 1, 0), ParabolicMirror(1.0)
    hit = next_impact(p, m)
    t_ref, _ = oracle_next_impact(p, m)
    assert abs(hit.t - t_ref) < 1e-7


def test_next_impact_escape():
    m = parse_mirror("0", domain=(-5, 5))
    assert next_impact(flight(0, 1, 10, 0), m) is None


def test_next_impact_skips_start_point():
    # launched from the surface, moving away: the hit is the landing, not t=0
    hit = next_impact(flight(0, 0, 1, 1), parse_mirror("0"))
    assert hit.t == pytest.approx(2.0, abs=1e-9)


# -- simulate -----------------------------------------------------------------


def test_simulate_flat_hops():
    t = simulate(State(Vec2(0, 1), Vec2(1, 0)), parse_mirror("0"), n=3)
    xs = [b.impact.x for b in t.bounces]
    r2 = math.sqrt(2)
    assert xs == pytest.approx([r2, 3 * r2, 5 * r2], abs=1e-9)
    assert str(t.termination) == "max_bounces"


def test_simulate_zero_bounces():
    t = simulate(State(Vec2(0, 1), Vec2(1, 0)), parse_mirror("0"), n=0)
    assert t.bounces == [] and len(t.segments()) == 1


def test_simulate_rejects_start_below_mirror():
    with pytest.raises(ValueError):
        simulate(State(Vec2(0, -1), Vec2(1, 0)), parse_mirror("0"), n=1)


def test_vertical_drop_period_two():
    t = simulate(State(Vec2(0.5, 1), Vec2(0, 0)), parse_mirror("0"), n=50)
    assert len(t.bounces) == 50
    for b in t.bounces:
        assert b.impact.x == 0.5
        assert b.t_flight == pytest.approx(math.sqrt(2) * (1 if b is t.bounces[0] else 2), rel=1e-9)


def test_wedge_gets_stuck():
    t = simulate(State(Vec2(0.0, 1.0), Vec2(0.0, 0.0)), parse_mirror("abs(x)"), n=10)
    assert t.termination.kind == "stuck"
    assert "non-differentiable" in t.termination.reason


def test_escape_termination():
    m = parse_mirror("0", domain=(-5, 5))
    t = simulate(State(Vec2(0, 1), Vec2(3, 0)), m, n=10)
    assert t.termination.kind == "escaped"
