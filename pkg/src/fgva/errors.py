"""Exception hierarchy shared by every fgva module."""


class FGVAError(Exception):
    """Base class for all library errors."""


class PrecisionExhausted(FGVAError):
    """The requested result is not determined by the precision of the inputs."""


class DivisionByIndeterminate(PrecisionExhausted):
    """Divisor is zero modulo its order, so no leading coefficient is known."""


class InsufficientPrecision(PrecisionExhausted):
    pass


class DomainViolation(FGVAError, ValueError):
    pass


class ResidueObstruction(DomainViolation):
    """Antiderivative requested for a series with a nonzero x^-1 term."""


class ZeroDenominator(FGVAError, ZeroDivisionError):
    pass


class ConventionMismatch(FGVAError, TypeError):
    pass


class UnboundedPrincipalPart(FGVAError):
    """A substitution would need infinitely many terms for one output coefficient."""


class GroupMismatch(FGVAError, ValueError):
    pass


class OverflowBeyondCap(FGVAError):
    """A product left the finite (degree- or weight-capped) state space."""


class IncompatiblePair(FGVAError, ValueError):
    pass


class BasisExplosion(FGVAError):
    pass


class LiteralError(FGVAError, ValueError):
    """Malformed series literal."""
