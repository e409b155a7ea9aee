"""Exception types raised by roofscale."""


class RoofscaleError(ValueError):
    """Base class for domain errors (bad states, violated invariants)."""


class DegenerateStateError(RoofscaleError):
    """A state vector or operator is zero or singular where it must not be."""


class DimensionError(RoofscaleError):
    """Local dimensions of two objects do not match."""


class InvariantViolation(RoofscaleError):
    """A constructed object fails one of its type invariants."""


class NotApplicableError(RoofscaleError):
    """A theorem or closed form is used outside its domain of validity."""
