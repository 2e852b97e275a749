"""Exception hierarchy shared by all kgstar modules."""


class KGStarError(Exception):
    """Base class for every error raised by kgstar."""


class ValidationError(KGStarError):
    """Input data violates a documented constraint."""


class BranchCountTooSmall(ValidationError):
    pass


class NonPositiveSpeed(ValidationError):
    pass


class UnsortedPotentials(ValidationError):
    pass


class NegativePotential(ValidationError):
    pass


class BandIndexOutOfRange(ValidationError):
    pass


class AtThreshold(ValidationError):
    """Energy lies within the guard distance of a threshold a_l."""


class ThresholdOnGrid(AtThreshold):
    pass


class EmptyInterval(ValidationError):
    pass


class ComponentIndexTooLarge(ValidationError):
    pass


class BumpOutsideBand(ValidationError):
    pass


class BranchHypothesisViolated(ValidationError):
    """Observation branch r must satisfy r <= j and r != k."""


class BandViolation(ValidationError):
    pass


class ParameterViolation(ValidationError):
    pass


class OutsideLightCone(ValidationError):
    """c_r t^2 <= x^2: the phase has no stationary point."""


class OutsideCone(ValidationError):
    """The stationary point is not strictly inside the spectral support."""


class NonPositiveSample(ValidationError):
    pass


class ParseError(KGStarError):
    """Malformed configuration text."""

    def __init__(self, message, line=None, field=None):
        self.line = line
        self.field = field
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field {field!r}")
        prefix = f"[{', '.join(where)}] " if where else ""
        super().__init__(prefix + message)


class BudgetExceeded(KGStarError):
    """An oscillatory quadrature would need more panels than allowed."""
