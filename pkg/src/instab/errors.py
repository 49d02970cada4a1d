"""Exception hierarchy shared by every module."""


class InstabError(Exception):
    """Base class for all errors raised by this package."""


class IncompatibleNorm(InstabError, TypeError):
    """A norm kind was requested for a state that cannot carry it."""


class TruncationOverflow(InstabError, ArithmeticError):
    """A sequence operation would write past the truncation length."""


class WindowEdgeError(InstabError):
    """Mass of a grid state reached the boundary of the computational window."""


class EmptyUnstable(InstabError, ValueError):
    """No spectral value reaches the requested modulus threshold."""


class DivergentAlpha(InstabError, ValueError):
    """The remainder profile fails the integrability condition (no solution)."""


class ConfigError(InstabError, ValueError):
    """Malformed or out-of-range experiment configuration."""
