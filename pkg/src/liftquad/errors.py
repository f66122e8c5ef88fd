"""Exception types shared across the package."""


class LiftquadError(Exception):
    """Base class for package-specific failures."""


class NonSkewError(LiftquadError):
    """Matrix expected to be skew-symmetric is not, within tolerance."""


class InvalidRotationError(LiftquadError):
    """Matrix fails the orthogonality/determinant checks for a rotation."""


class TruncationOrderError(LiftquadError):
    """Truncation order too small for the requested operation."""


class SingularInertiaError(LiftquadError):
    """Inertia matrix is singular or numerically close to singular."""


class RankDeficientError(LiftquadError):
    """State-dependent input matrix lost full column rank."""


class InfeasibleBoundsError(LiftquadError):
    """Box constraints define an empty feasible set."""


class NumericalBlowupError(LiftquadError):
    """A propagated state exceeded the configured magnitude guard."""


class ConfigError(LiftquadError):
    """Experiment configuration could not be parsed or validated."""
