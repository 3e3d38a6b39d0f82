"""Simulation and analysis toolkit for a piezo-optomechanical transducer.

The package is organized by measurement domain: model holds the mode
parameters and closed-form rates, scattering the frequency-domain
responses and fitting, temporal the pulsed readout and noise Monte
Carlo, herald the photon-counting statistics, calib the receiver
calibration chains, and circuit the lumped-element readout model.
"""

__version__ = "0.1.0"

from .config import FullConfig, bundled_config_path, load_config
from .errors import (
    ConfigError,
    DetuningError,
    FitConvergenceError,
    InconsistentCountsError,
    NegativeNoiseError,
    NoSignalError,
    RankDeficiencyError,
    StepSizeError,
    TransducerError,
)
from .model import (
    DerivedRates,
    EfficiencyBudget,
    MechanicalMode,
    MicrowaveMode,
    NoiseBudget,
    OpticalMode,
    PumpConfig,
    TransducerParams,
    budget_products,
    derive_rates,
    pair_probability,
    peak_efficiency,
)
from .scattering import (
    FitResult,
    conversion_bandwidth,
    fit_spectrum,
    s_conversion,
    s_mumu,
    s_oo,
    susceptibility,
)
from .temporal import (
    AddedNoiseResult,
    DemodFilter,
    HeatingBath,
    JitterResult,
    TemporalMode,
    added_noise_mc,
    demod_efficiency,
    efficiency_under_jitter,
    emit_single_phonon,
    heating_trajectory,
    mode_eigenvalues,
    optimal_delay,
    window_means,
)

__all__ = [
    "AddedNoiseResult",
    "ConfigError",
    "DemodFilter",
    "DerivedRates",
    "DetuningError",
    "EfficiencyBudget",
    "FitConvergenceError",
    "FitResult",
    "FullConfig",
    "HeatingBath",
    "InconsistentCountsError",
    "JitterResult",
    "MechanicalMode",
    "MicrowaveMode",
    "NegativeNoiseError",
    "NoSignalError",
    "NoiseBudget",
    "OpticalMode",
    "PumpConfig",
    "RankDeficiencyError",
    "StepSizeError",
    "TemporalMode",
    "TransducerError",
    "TransducerParams",
    "added_noise_mc",
    "budget_products",
    "bundled_config_path",
    "conversion_bandwidth",
    "demod_efficiency",
    "derive_rates",
    "efficiency_under_jitter",
    "emit_single_phonon",
    "fit_spectrum",
    "heating_trajectory",
    "load_config",
    "mode_eigenvalues",
    "optimal_delay",
    "pair_probability",
    "peak_efficiency",
    "s_conversion",
    "s_mumu",
    "s_oo",
    "susceptibility",
    "window_means",
]
