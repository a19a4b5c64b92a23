"""Exception types shared across the library."""


class PeriodicGamesError(Exception):
    """Base class for all library-specific errors."""


class ConstraintViolation(PeriodicGamesError):
    """A constructor precondition failed (carries the offending residual/value)."""


class NonSmoothWaveform(PeriodicGamesError):
    """Closed-form machinery was asked to integrate a square/triangle wave."""


class WrongRegime(PeriodicGamesError):
    """A resonant-only formula was called off resonance, or vice versa."""


class DegenerateGame(PeriodicGamesError):
    """alpha = 0: the 2x2 closed forms are undefined."""


class BoundaryEquilibrium(PeriodicGamesError):
    """The mean game's equilibrium is not strictly interior."""


class RealnessViolation(PeriodicGamesError):
    """An eigenvalue of the learning operator had a real part above tolerance.

    Signals a non-zero-sum payoff or an assembly bug, not a numerical quirk.
    """


class InsufficientData(PeriodicGamesError):
    """A series is too short for the requested window."""


class QuadratureRefinement(PeriodicGamesError):
    """Halving the quadrature spacing moved the result more than tolerated."""


class IntegrationAborted(PeriodicGamesError):
    """The integrator hit a non-finite state and stopped early."""


class ConfigError(PeriodicGamesError):
    """An experiment configuration failed to parse or validate."""
