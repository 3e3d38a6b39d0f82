"""Mode parameters and coupled-mode rate algebra for the transducer.

The device is a three-mode chain: an optical cavity (a) coupled to a
mechanical mode (b) by radiation pressure, and the same mechanical mode
coupled piezoelectrically to a microwave resonance (c). A red-detuned
optical pump converts the single-photon optomechanical rate g0 into the
pump-enhanced beamsplitter rate G_o = sqrt(n_photons) * g0. Both cavities
are fast compared to the enhanced couplings, so each mediates an induced
mechanical decay channel:

    gamma_om = 4 G_o^2 / kappa_o      (optically induced)
    gamma_mu = 4 g_mu^2 / kappa_mu    (microwave induced)

All rates in this package are angular (rad/s). Constructors that take
ordinary frequencies in Hz are provided separately and multiply by 2 pi
at the boundary, never implicitly.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace

from .constants import TWO_PI
from .errors import ConfigError, DetuningError

# Ratio of enhanced coupling to cavity linewidth above which the
# fast-cavity (adiabatic) description starts to degrade.
FAST_CAVITY_RATIO = 0.1


def _require_positive(name: str, value: float) -> None:
    if not (value > 0.0) or not math.isfinite(value):
        raise ConfigError(f"{name} must be positive and finite, got {value!r}")


@dataclass(frozen=True)
class OpticalMode:
    """Optical cavity parameters, all rates in rad/s.

    omega: cavity resonance
    kappa: total energy decay rate
    kappa_ext: decay into the coupling waveguide (kappa_ext <= kappa)
    g0: single-photon optomechanical coupling rate
    """

    omega: float
    kappa: float
    kappa_ext: float
    g0: float

    def __post_init__(self) -> None:
        _require_positive("optical omega", self.omega)
        _require_positive("optical kappa", self.kappa)
        _require_positive("optical kappa_ext", self.kappa_ext)
        _require_positive("optical g0", self.g0)
        if self.kappa_ext > self.kappa:
            raise ConfigError(
                f"optical kappa_ext ({self.kappa_ext}) exceeds kappa ({self.kappa})"
            )

    @classmethod
    def from_hz(cls, omega_hz: float, kappa_hz: float, kappa_ext_hz: float,
                g0_hz: float) -> "OpticalMode":
        return cls(
            omega=TWO_PI * omega_hz,
            kappa=TWO_PI * kappa_hz,
            kappa_ext=TWO_PI * kappa_ext_hz,
            g0=TWO_PI * g0_hz,
        )

    @property
    def eta(self) -> float:
        """External coupling efficiency kappa_ext / kappa."""
        return self.kappa_ext / self.kappa


@dataclass(frozen=True)
class MechanicalMode:
    """Mechanical mode parameters, all rates in rad/s.

    The intrinsic linewidth depends on whether the optical pump is
    illuminating the device (absorption heating broadens it), so both
    values are carried and callers must pick one explicitly.

    jitter_rms: RMS of slow mechanical frequency fluctuations, rad/s.
    """

    omega: float
    gamma_i_pump_on: float
    gamma_i_pump_off: float
    jitter_rms: float = 0.0

    def __post_init__(self) -> None:
        _require_positive("mechanical omega", self.omega)
        _require_positive("mechanical gamma_i_pump_on", self.gamma_i_pump_on)
        _require_positive("mechanical gamma_i_pump_off", self.gamma_i_pump_off)
        if self.jitter_rms < 0.0 or not math.isfinite(self.jitter_rms):
            raise ConfigError("mechanical jitter_rms must be >= 0 and finite")

    @classmethod
    def from_hz(cls, omega_hz: float, gamma_i_pump_on_hz: float,
                gamma_i_pump_off_hz: float, jitter_rms_hz: float = 0.0,
                ) -> "MechanicalMode":
        return cls(
            omega=TWO_PI * omega_hz,
            gamma_i_pump_on=TWO_PI * gamma_i_pump_on_hz,
            gamma_i_pump_off=TWO_PI * gamma_i_pump_off_hz,
            jitter_rms=TWO_PI * jitter_rms_hz,
        )

    def gamma_i(self, pump_on: bool) -> float:
        """Intrinsic linewidth for the selected pump state."""
        return self.gamma_i_pump_on if pump_on else self.gamma_i_pump_off


@dataclass(frozen=True)
class MicrowaveMode:
    """Microwave resonance parameters, all rates in rad/s.

    g: piezoelectric coupling rate to the mechanical mode.
    """

    omega: float
    kappa: float
    kappa_ext: float
    g: float

    def __post_init__(self) -> None:
        _require_positive("microwave omega", self.omega)
        _require_positive("microwave kappa", self.kappa)
        _require_positive("microwave kappa_ext", self.kappa_ext)
        _require_positive("microwave g", self.g)
        if self.kappa_ext > self.kappa:
            raise ConfigError(
                f"microwave kappa_ext ({self.kappa_ext}) exceeds kappa ({self.kappa})"
            )

    @classmethod
    def from_hz(cls, omega_hz: float, kappa_hz: float, kappa_ext_hz: float,
                g_hz: float) -> "MicrowaveMode":
        return cls(
            omega=TWO_PI * omega_hz,
            kappa=TWO_PI * kappa_hz,
            kappa_ext=TWO_PI * kappa_ext_hz,
            g=TWO_PI * g_hz,
        )

    @property
    def eta(self) -> float:
        """External coupling efficiency kappa_ext / kappa."""
        return self.kappa_ext / self.kappa

    @property
    def kappa_int(self) -> float:
        return self.kappa - self.kappa_ext


@dataclass(frozen=True)
class PumpConfig:
    """Optical pump pulse configuration.

    detuning: "red" (beamsplitter, conversion) or "blue" (two-mode squeezing,
        pair production). The intracavity photon number is the primary
        knob; optical power never enters the model.
    tau: pulse duration in seconds.
    rep_rate: pulse repetition rate in Hz.
    """

    detuning: str
    n_photons: float
    tau: float
    rep_rate: float

    def __post_init__(self) -> None:
        if self.detuning not in ("red", "blue"):
            raise ConfigError(f"pump detuning must be 'red' or 'blue', got {self.detuning!r}")
        if self.n_photons < 0.0 or not math.isfinite(self.n_photons):
            raise ConfigError("pump n_photons must be >= 0 and finite")
        _require_positive("pump tau", self.tau)
        _require_positive("pump rep_rate", self.rep_rate)


@dataclass(frozen=True)
class DerivedRates:
    """Pump-enhanced coupling and induced decay rates, rad/s."""

    G_o: float
    gamma_om: float
    gamma_mu: float


@dataclass(frozen=True)
class EfficiencyBudget:
    """Multiplicative efficiency factors along the detection paths.

    eta_o, eta_mu: cavity external coupling efficiencies.
    eta_in_fridge: optical transmission from the device to the fridge output.
    eta_filters: transmission of the pump-rejection filter stack.
    eta_spd: single photon detector quantum efficiency.
    eta_circ: microwave circulator / cabling transmission.
    eta_spd_path: measured combined filter plus detector path efficiency.
        Defaults to eta_filters * eta_spd when not measured separately.
    eta_d: microwave demodulation efficiency.
    eta_mum: phonon to propagating microwave photon conversion efficiency.
    eta_herald: fraction of heralds that correspond to a real pair event.
    """

    eta_o: float
    eta_mu: float
    eta_in_fridge: float
    eta_filters: float
    eta_spd: float
    eta_circ: float
    eta_spd_path: float | None = None
    eta_d: float = 1.0
    eta_mum: float = 1.0
    eta_herald: float = 1.0

    def __post_init__(self) -> None:
        for name in ("eta_o", "eta_mu", "eta_in_fridge", "eta_filters",
                     "eta_spd", "eta_circ", "eta_d", "eta_mum", "eta_herald"):
            v = getattr(self, name)
            if not (0.0 < v <= 1.0):
                raise ConfigError(f"{name} must lie in (0, 1], got {v!r}")
        if self.eta_spd_path is not None and not (0.0 < self.eta_spd_path <= 1.0):
            raise ConfigError(f"eta_spd_path must lie in (0, 1], got {self.eta_spd_path!r}")

    @property
    def spd_path(self) -> float:
        if self.eta_spd_path is not None:
            return self.eta_spd_path
        return self.eta_filters * self.eta_spd


@dataclass(frozen=True)
class NoiseBudget:
    """Measured noise occupations, all in quanta.

    n_th: mechanical thermal occupation before the pulse
    n_n: noise added to the emitted microwave mode by pulse heating
    n_m: noise added by the microwave measurement chain
    n_ex: total excess noise referred to the demodulated mode
    dark_rate: optical detector dark count rate, Hz
    """

    n_th: float
    n_n: float
    n_m: float
    n_ex: float
    dark_rate: float = 0.0

    def __post_init__(self) -> None:
        for name in ("n_th", "n_n", "n_m", "n_ex", "dark_rate"):
            v = getattr(self, name)
            if v < 0.0 or not math.isfinite(v):
                raise ConfigError(f"{name} must be >= 0 and finite, got {v!r}")


@dataclass(frozen=True)
class TransducerParams:
    """Complete parameter bundle for one device and operating point."""

    optical: OpticalMode
    mechanical: MechanicalMode
    microwave: MicrowaveMode
    pump: PumpConfig
    budget: EfficiencyBudget | None = None
    noise: NoiseBudget | None = None

    def resonant_copy(self) -> "TransducerParams":
        """Copy with the microwave resonance aligned to the mechanical mode.

        The closed-form peak efficiency assumes triple resonance; the
        measured device carries a small offset between the two.
        """
        mw = replace(self.microwave, omega=self.mechanical.omega)
        return replace(self, microwave=mw)


def derive_rates(optical: OpticalMode, microwave: MicrowaveMode,
                 pump: PumpConfig) -> DerivedRates:
    """Pump-enhanced coupling G_o and the two induced mechanical decay rates.

    G_o = sqrt(n_photons) * g0
    gamma_om = 4 G_o^2 / kappa_o
    gamma_mu = 4 g^2 / kappa_mu

    Warns (does not fail) when either cavity is not fast compared to the
    coupling it mediates, since the adiabatic rate formulas degrade there.
    """
    G_o = math.sqrt(pump.n_photons) * optical.g0
    gamma_om = 4.0 * G_o**2 / optical.kappa
    gamma_mu = 4.0 * microwave.g**2 / microwave.kappa
    if G_o > FAST_CAVITY_RATIO * optical.kappa:
        warnings.warn(
            f"optical cavity not fast: G_o/kappa_o = {G_o / optical.kappa:.3g}",
            stacklevel=2,
        )
    if microwave.g > FAST_CAVITY_RATIO * microwave.kappa:
        warnings.warn(
            f"microwave cavity not fast: g/kappa_mu = {microwave.g / microwave.kappa:.3g}",
            stacklevel=2,
        )
    return DerivedRates(G_o=G_o, gamma_om=gamma_om, gamma_mu=gamma_mu)


def peak_efficiency(params: TransducerParams, rates: DerivedRates,
                    gamma_i: float) -> float:
    """On-resonance photon number conversion efficiency.

    eta = eta_o * eta_mu * 4 gamma_om gamma_mu / (gamma_i + gamma_om + gamma_mu)^2

    Valid on triple resonance (microwave resonance aligned with the
    mechanical frequency and the pump parked one mechanical frequency
    below the optical cavity). gamma_i must be chosen for the pump state
    under study; there is no default.
    """
    _require_positive("gamma_i", gamma_i)
    gamma_sum = gamma_i + rates.gamma_om + rates.gamma_mu
    internal = 4.0 * rates.gamma_om * rates.gamma_mu / gamma_sum**2
    return params.optical.eta * params.microwave.eta * internal


def pair_probability(rates: DerivedRates, pump: PumpConfig) -> float:
    """Photon-phonon pair probability for one blue-detuned pump pulse.

    p = gamma_om * tau, the short-pulse limit of two-mode squeezing.
    Requires a blue-detuned pump; warns when p grows beyond the
    perturbative regime.
    """
    if pump.detuning != "blue":
        raise DetuningError("pair production requires a blue-detuned pump")
    p = rates.gamma_om * pump.tau
    if p > 0.1:
        warnings.warn(
            f"pair probability {p:.3g} is outside the perturbative regime",
            stacklevel=2,
        )
    return p


def budget_products(budget: EfficiencyBudget) -> tuple[float, float]:
    """Collapse the efficiency budget into the two path products.

    Returns (eta_sys, eta_setup):
    eta_sys = eta_o * eta_in_fridge * eta_filters * eta_spd
        cavity photon to detector click, used for heralding.
    eta_setup = eta_in_fridge * eta_spd_path * eta_circ
        waveguide photon to detector click, used for flux calibration.
    """
    eta_sys = budget.eta_o * budget.eta_in_fridge * budget.eta_filters * budget.eta_spd
    eta_setup = budget.eta_in_fridge * budget.spd_path * budget.eta_circ
    return eta_sys, eta_setup
