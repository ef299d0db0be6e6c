"""Exception types raised across the package."""


class TorusHomError(Exception):
    """Base class for all package errors."""


class GridMismatch(TorusHomError):
    """The oscillation period is not commensurate with the grid."""


class RankDeficient(TorusHomError):
    """The symbol b(xi) loses rank on the unit sphere."""


class NotPositive(TorusHomError):
    """A matrix that must be positive definite is not."""


class NoConvergence(TorusHomError):
    """An iterative solver stopped before reaching its tolerance."""

    def __init__(self, message, iterations=None, residual=None):
        super().__init__(message)
        self.iterations = iterations
        self.residual = residual


class InvalidAngle(TorusHomError):
    """A shift lies on the non-negative real axis."""


class InvalidTime(TorusHomError):
    """A non-positive time was passed to the contour path."""


class SingularBlock(TorusHomError):
    """A per-mode block of A0 - zeta is numerically singular."""


class AdjointMismatch(TorusHomError):
    """Forward and adjoint maps of an error operator disagree."""


class ConfigInvalid(TorusHomError):
    """An experiment configuration failed validation."""

    def __init__(self, problems):
        if isinstance(problems, str):
            problems = [problems]
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))


class InsufficientPoints(TorusHomError):
    """Too few sweep points for a fit or a uniformity check."""


class MissingMetrics(TorusHomError):
    """Records lack the metrics needed for a constants report."""
