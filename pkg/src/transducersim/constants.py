"""Physical constants (CODATA 2018) and small helpers built on them."""
from __future__ import annotations

import math

HBAR = 1.054571817e-34  # J s
KB = 1.380649e-23       # J / K
TWO_PI = 2.0 * math.pi


def bose_occupation(omega: float, temperature: float) -> float:
    """Thermal occupation 1 / (exp(hbar w / kB T) - 1) of a mode at omega (rad/s).

    Uses expm1 so the high-temperature limit kB T / hbar w stays accurate.
    """
    if omega <= 0.0:
        raise ValueError("omega must be positive")
    if temperature <= 0.0:
        return 0.0
    x = HBAR * omega / (KB * temperature)
    return 1.0 / math.expm1(x)
