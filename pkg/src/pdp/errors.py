"""Domain error types shared across the solver modules."""


class PdpError(Exception):
    """Base class for all domain errors."""


class NoBoundState(PdpError):
    """The discretized operator has no negative eigenvalue."""


class ResonanceBelowCutoff(PdpError):
    """lambda + mu <= 0: the forced state does not couple to the continuum."""


class SolverFailure(PdpError):
    """A linear solve failed or produced non-finite values."""


class InfeasiblePoint(PdpError):
    """A constraint margin is non-positive at the evaluation point."""


class InfeasibleStart(PdpError):
    """The optimizer was started outside the strictly feasible region."""


class ConfigError(PdpError):
    """A run configuration file is missing, malformed, or inconsistent."""
