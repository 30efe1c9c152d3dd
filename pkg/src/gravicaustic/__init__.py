"""Point mass bouncing under gravity inside a mirror ``y = f(x)``.

Modules: ``numerics`` (duals, root finding), ``mirror`` (boundaries),
``dynamics`` (flights and bounces), ``caustics`` (foci curves, envelopes,
confined domain), ``verify`` (checks and oracles) and ``cli``.
"""

from .caustics import EnvelopePair, FociCurve, confined_domain, envelope_point, foci_curve_point, match_L
from .dynamics import FlightParabola, State, next_impact, simulate
from .mirror import parse_mirror
from .vec2 import Vec2

__version__ = "0.1.0"

__all__ = [
    "EnvelopePair",
    "FlightParabola",
    "FociCurve",
    "State",
    "Vec2",
    "confined_domain",
    "envelope_point",
    "foci_curve_point",
    "match_L",
    "next_impact",
    "parse_mirror",
    "simulate",
]
