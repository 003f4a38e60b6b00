"""Exception hierarchy shared by all modules."""


class UdrandError(ValueError):
    """Base class for every error raised by this package."""


class ValidationError(UdrandError):
    """An object violates a structural invariant (Hermiticity, trace, completeness...)."""


class DomainError(UdrandError):
    """A parameter lies outside the range where a formula or construction is valid."""


class FeasibilityError(UdrandError):
    """A primal point or dual certificate violates its SDP constraints."""


class UnsupportedInstanceError(UdrandError):
    """No closed-form certificate is known for the requested instance."""
