"""Exception types raised across the package."""

from __future__ import annotations


class HodgeError(Exception):
    """Base class for all package errors."""


class InvalidMultiIndex(HodgeError, ValueError):
    pass


class DegreeOverflow(HodgeError, ValueError):
    pass


class DegreeUnderflow(HodgeError, ValueError):
    pass


class GridMismatch(HodgeError, ValueError):
    pass


class InvalidGrid(HodgeError, ValueError):
    pass


class NonFiniteInput(HodgeError, ValueError):
    pass


class GridTooCoarse(HodgeError, ValueError):
    pass


class InvalidOrder(HodgeError, ValueError):
    pass


class PrereqViolated(HodgeError, ValueError):
    pass


class ZeroModeIncompatible(HodgeError):
    """The tangential mean of the data violates a solvability condition.

    Attributes
    ----------
    component : tuple of int or None
        Form component in which the violation occurred (``None`` for scalars).
    value : float
        The offending moment.
    threshold : float
        The tolerance it exceeded.
    """

    def __init__(self, message, component=None, value=float("nan"), threshold=float("nan")):
        super().__init__(message)
        self.component = component
        self.value = value
        self.threshold = threshold


class NotInDomain(HodgeError):
    """A form failed a boundary condition of the adjoint domain."""

    def __init__(self, membership):
        comps = ", ".join(str(c.indices) for c in membership.offending_components)
        super().__init__(f"boundary condition violated in components {comps}")
        self.membership = membership


class ConfigError(HodgeError, ValueError):
    """Invalid run configuration (CLI exit code 3)."""


class SingularSystem(HodgeError):
    """A linear system that should be uniquely solvable is numerically singular."""
