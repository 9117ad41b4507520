"""Exception hierarchy shared by the solver pipeline."""


class QSolveError(Exception):
    """Base class for all errors raised by qsolve."""


class NonMonicDivisor(QSolveError):
    pass


class BadPartition(QSolveError):
    pass


class BadInhomogeneityCount(QSolveError):
    pass


class RegionExcludesPath(QSolveError):
    pass


class StuckPropagation(QSolveError):
    pass


class NotZeroDimensional(QSolveError):
    pass


class PrecisionExhausted(QSolveError):
    pass


class ShapePositionFailure(QSolveError):
    pass


class UndecidableAtPrecision(QSolveError):
    pass


class SectorTooLarge(QSolveError):
    pass


class ConvergenceFailure(QSolveError):
    pass


class MismatchedSpectrum(QSolveError):
    pass


class MalformedInput(QSolveError):
    pass


class Cancelled(QSolveError):
    pass


class ComponentSplit(Exception):
    """Raised inside an etale-algebra computation when a zero divisor shows up.

    Carries the nontrivial monic factor ``factor`` of the current modulus; the
    driver in :mod:`qsolve.algebra.rings` restarts the computation on both
    sides of the splitting.
    """

    def __init__(self, factor):
        super().__init__("modulus splits")
        self.factor = factor
