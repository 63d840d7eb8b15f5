"""Exception hierarchy for the solver.

Every error raised intentionally by this package derives from SolverError, so
callers can catch the package's failures without masking programming bugs.
"""


class SolverError(Exception):
    """Base class for all solver errors."""


class ConfigError(SolverError):
    """A field configuration, CLI flag set, or config file is invalid."""


class VerificationFailure(SolverError):
    """At least one self-check in the verification suite failed."""


class SingularPoint(SolverError):
    """A potential was evaluated at a point where it diverges."""


class DiscontinuityPoint(SolverError):
    """A derivative was requested exactly at a jump of a piecewise profile."""


class UnsupportedRegime(SolverError):
    """The requested proportionality regime has no solver in this package."""


class OutsideAdmissibleBand(SolverError):
    """(k, epsilon) violates a condition required for a bound state."""


class UnboundedStateRequest(SolverError):
    """Matching was requested where an exterior region cannot decay."""


class NotAnEigenvalue(SolverError):
    """State assembly was attempted at an epsilon that is not a root."""


class DegenerateRoot(SolverError):
    """The matching system has a null space of dimension greater than one."""


class DegenerateMomentum(SolverError):
    """An operation that divides by k was requested at k = 0."""


class NotConjugatePair(SolverError):
    """The two spinor components are not related by complex conjugation."""


class BrokenPTSymmetry(SolverError):
    """A state is not an eigenfunction of the parity-conjugation operation."""


class MismatchedMomentum(SolverError):
    """An inner product was requested between states of different k."""


class InvalidLevel(SolverError):
    """A negative oscillator level index was requested."""


class NonDecayingExterior(SolverError):
    """The asymptotic system admits no decaying direction on one side."""


class GridTooCoarse(SolverError):
    """Halving the grid spacing moved an eigenvalue more than the tolerance."""
