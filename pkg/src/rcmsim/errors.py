"""Exception types shared across the package."""


class CutLocusError(ValueError):
    """A logarithm was requested at (or too close to) the cut locus.

    On SO(3) this means a relative rotation angle within ``margin`` of pi.
    Solvers treat this as divergence and abort rather than clamping.
    """


class DegenerateMatrixError(ValueError):
    """A matrix handed to the orthogonal projection is rank-deficient."""


class GroupMismatchError(ValueError):
    """Operands live in different groups (or algebras of different dimension)."""


class GenerationError(RuntimeError):
    """Random graph generation failed to produce a connected graph."""


class NoConvergenceError(RuntimeError):
    """An iterative routine exhausted its iteration budget."""


class NumericalError(RuntimeError):
    """A numerical verification step failed (eigensolver, instability, ...)."""


class SolverError(RuntimeError):
    """A solver run aborted; carries the iteration at which it happened."""

    def __init__(self, message, iteration=None):
        super().__init__(message)
        self.iteration = iteration


class ConfigError(ValueError):
    """A scenario configuration file failed validation."""


class VerificationError(RuntimeError):
    """A numerical verification sweep found a failing case."""
