"""Exception hierarchy shared by all gravicaustic modules."""

from __future__ import annotations


class GravicausticError(Exception):
    """Base class for every error raised by this package."""


# -- numerics -----------------------------------------------------------------


class RootNotConverged(GravicausticError):
    """Root refinement exhausted its iteration budget.

    ``bracket`` holds the last enclosing interval so callers can inspect
    how far the search got (typically a near-tangent residual).
    """

    def __init__(self, message: str, bracket):
        super().__init__(message)
        self.bracket = bracket


# -- mirror -------------------------------------------------------------------


class MirrorSyntaxError(GravicausticError):
    """Base for problems found while reading mirror text."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class MirrorLexError(MirrorSyntaxError):
    def __init__(self, char: str, position: int):
        super().__init__(f"unexpected character {char!r}", position)
        self.char = char


class MirrorParseError(MirrorSyntaxError):
    def __init__(self, found: str, expected: set[str] | frozenset[str], position: int):
        exp = ", ".join(sorted(expected))
        super().__init__(f"unexpected {found}; expected one of: {exp}", position)
        self.found = found
        self.expected = frozenset(expected)


class UnknownIdentifierError(MirrorSyntaxError):
    def __init__(self, name: str, position: int):
        super().__init__(f"unknown identifier {name!r}", position)
        self.name = name


class MirrorEvaluationError(GravicausticError):
    """Mirror height or slope could not be evaluated at ``x``."""

    def __init__(self, message: str, x=None):
        where = "" if x is None else f" at x={x!r}"
        super().__init__(f"{message}{where}")
        self.x = x


class MirrorDomainError(MirrorEvaluationError):
    pass


class NonDifferentiableError(MirrorEvaluationError):
    def __init__(self, x=None, detail: str = "non-differentiable point"):
        super().__init__(detail, x)


# -- dynamics -----------------------------------------------------------------


class NonIncidentImpactError(GravicausticError):
    """Reflection requested for a velocity that is not heading into the wall."""


# -- caustics -----------------------------------------------------------------


class FlatFociTangentError(GravicausticError):
    """J+/J- are undefined because the foci curve tangent is horizontal."""


class UndefinedBranchError(GravicausticError):
    """The requested envelope branch does not exist at this parameter."""


class FocusNotReachableError(GravicausticError):
    pass


class InsufficientSamplingError(GravicausticError):
    pass


class UnsupportedMirrorError(GravicausticError):
    pass


# -- cli / scenarios ----------------------------------------------------------


class ConfigError(GravicausticError):
    """Bad run configuration or scenario file."""
