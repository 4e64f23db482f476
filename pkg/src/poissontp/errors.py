"""Exception hierarchy."""


class PoissonTPError(Exception):
    """Base class for all errors raised by this package."""


class ConvergenceFailure(PoissonTPError, ArithmeticError):
    pass


class NotHermitian(PoissonTPError, ValueError):
    pass


class ZeroVector(PoissonTPError, ValueError):
    pass


class DimensionMismatch(PoissonTPError, ValueError):
    pass


class ClassicalStateNotSupported(PoissonTPError, TypeError):
    pass


class SpaceMismatch(PoissonTPError, ValueError):
    pass


class SectorMismatch(PoissonTPError, ValueError):
    pass


class NotATransitionProbability(PoissonTPError, ValueError):
    pass


class DegeneratePair(PoissonTPError, ValueError):
    pass


class InsufficientSignal(PoissonTPError, ValueError):
    pass


class InconsistentBracket(PoissonTPError, ValueError):
    pass


class ComplexCoefficients(PoissonTPError, ValueError):
    pass


class MultiSector(PoissonTPError, ValueError):
    pass


class RankDeficient(PoissonTPError, ArithmeticError):
    pass


class NotComparable(PoissonTPError, ValueError):
    pass


class AtomInside(PoissonTPError, ValueError):
    pass


class InvalidSpace(PoissonTPError, ValueError):
    pass
