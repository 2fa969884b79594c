"""Exception hierarchy.

Three families map onto the CLI exit codes: malformed input (2), numerical
failure (3) and violated preconditions (4).
"""

from __future__ import annotations


class BuresGeoError(Exception):
    """Base class for every error raised by this package."""

    exit_code = 1


class InputError(BuresGeoError, ValueError):
    exit_code = 2


class NumericalError(BuresGeoError, ArithmeticError):
    exit_code = 3


class PreconditionError(BuresGeoError, ValueError):
    exit_code = 4


class NotHermitian(InputError):
    pass


class NotPSD(InputError):
    pass


class DimensionMismatch(InputError):
    pass


class NotNormalized(InputError):
    pass


class ConvergenceFailure(NumericalError):
    pass


class RankDeficient(PreconditionError):
    pass


class SingularState(PreconditionError):
    pass


class AncillaTooSmall(PreconditionError):
    pass


class RankDeficientSchmidt(PreconditionError):
    pass


class DegenerateLambda(PreconditionError):
    """Raised when sign choices are ambiguous on a degenerate spectrum of Lambda.

    ``clusters`` holds the index groups (into the ascending spectrum) whose
    eigenvalues coincide within the degeneracy threshold.
    """

    def __init__(self, message: str, clusters: list[list[int]] | None = None):
        super().__init__(message)
        self.clusters = clusters or []


class StatesEqual(PreconditionError):
    pass


class NonCommuting(PreconditionError):
    pass


class OrthogonalTarget(PreconditionError):
    pass


class AtBoundary(PreconditionError):
    pass


class NotHorizontal(PreconditionError):
    pass


class NotOrthogonal(PreconditionError):
    pass


class NotProductBase(PreconditionError):
    pass


class DimensionNotPowerOfTwo(PreconditionError):
    pass


class TooManyQubits(PreconditionError):
    pass


class DegenerateLikelihood(PreconditionError):
    pass


class DegenerateExtremes(PreconditionError):
    pass
