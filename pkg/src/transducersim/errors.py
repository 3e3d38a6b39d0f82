"""Exception types shared across the package."""
from __future__ import annotations


class TransducerError(Exception):
    """Base class for all package-specific errors."""


class ConfigError(TransducerError):
    """Invalid or incomplete configuration (bad field, missing section)."""


class DetuningError(TransducerError):
    """Operation requested with the wrong pump detuning sign."""


class StepSizeError(TransducerError):
    """Integrator step too coarse for the fastest rate in the system."""


class FitConvergenceError(TransducerError):
    """Least-squares fit failed to converge.

    Carries the last iterate so the caller can inspect where it stalled.
    """

    def __init__(self, message: str, last_iterate: dict | None = None):
        super().__init__(message)
        self.last_iterate = last_iterate or {}


class RankDeficiencyError(TransducerError):
    """Fit Jacobian is rank deficient.

    The message names the unidentifiable parameter combination.
    """


class InconsistentCountsError(TransducerError):
    """Count rates that admit no physical occupation solution."""


class NegativeNoiseError(TransducerError):
    """Noise inversion produced an unphysical negative occupation.

    Carries the raw solution for diagnosis.
    """

    def __init__(self, message: str, raw_solution: dict | None = None):
        super().__init__(message)
        self.raw_solution = raw_solution or {}


class NoSignalError(TransducerError):
    """Demodulation or fit input carries no usable signal."""
