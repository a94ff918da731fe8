"""Exception types raised across the package."""


class WiretapError(Exception):
    """Base class for all package errors."""


class FullSpace(WiretapError):
    """The given columns already span the whole space."""


class RangeError(WiretapError, ValueError):
    """An argument lies outside the range where a bound is asserted."""


class ZeroSdof(WiretapError):
    """The configuration has zero secure degrees of freedom."""


class DegenerateChannel(WiretapError):
    """A channel draw violates a genericity condition (probability zero)."""


class PowerTooSmall(WiretapError):
    """Power too small for a nontrivial structured constellation."""


class BudgetViolation(WiretapError):
    """Average transmit power exceeds the budget."""


class SingularMatrix(WiretapError):
    """Matrix is rank deficient under the rank tolerance."""


class AmbiguousPoint(WiretapError):
    """Two constellation points tie as nearest to the observation."""


class TooLarge(WiretapError):
    """Enumeration would exceed the configured size guard."""


class AlignmentBroken(WiretapError):
    """Precoders do not satisfy the eavesdropper alignment certificate."""


class InsufficientGrid(WiretapError):
    """Power grid too small or too narrow for slope regression."""
