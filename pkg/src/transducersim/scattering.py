"""Frequency-domain scattering responses and spectrum fitting.

All spectra are functions of the probe frequency expressed in the
microwave domain (Hz, near the mechanical frequency). For the optical
reflection this axis is the pump-probe beat frequency; the pump is
assumed parked exactly one mechanical frequency below the cavity, so
the cavity response is centered on the mechanical frequency in this
frame. Susceptibilities follow

    chi(w) = 1 / (i (w0 - w) + rate / 2)

with everything in rad/s internally.

Mechanical response dressing: each coupled cavity adds a self-energy
term to the inverse mechanical susceptibility,

    1 / chi_m_eff = 1 / chi_m + G_o^2 chi_o + g_mu^2 chi_mu,

which on resonance reduces to the induced decay rates gamma_om / 2 and
gamma_mu / 2.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import least_squares

from .constants import TWO_PI
from .errors import FitConvergenceError, NoSignalError, RankDeficiencyError
from .model import TransducerParams

# Parameters fitted in log space to stay positive.
_POSITIVE = frozenset({
    "g_mu", "kappa_mu", "kappa_mu_ext", "gamma_i", "g0",
    "kappa_o", "kappa_o_ext",
})
# Parameters fitted as linear shifts.
_LINEAR = frozenset({"omega_m", "omega_mu"})

_DEFAULT_FREE = {
    "mumu": ("g_mu", "kappa_mu", "kappa_mu_ext", "gamma_i", "omega_m"),
    "oo": ("g0", "gamma_i", "omega_m"),
    "conversion": ("g_mu", "gamma_i", "omega_m"),
}


def susceptibility(omega: np.ndarray, center: float, rate: float) -> np.ndarray:
    """chi(w) = 1 / (i (center - w) + rate / 2)."""
    return 1.0 / (1j * (center - omega) + 0.5 * rate)


def _flat_params(params: TransducerParams, gamma_i: float) -> dict[str, float]:
    return {
        "omega_m": params.mechanical.omega,
        "gamma_i": gamma_i,
        "g_mu": params.microwave.g,
        "kappa_mu": params.microwave.kappa,
        "kappa_mu_ext": params.microwave.kappa_ext,
        "omega_mu": params.microwave.omega,
        "g0": params.optical.g0,
        "n_photons": params.pump.n_photons,
        "kappa_o": params.optical.kappa,
        "kappa_o_ext": params.optical.kappa_ext,
    }


def _s_oo_flat(p: dict[str, float], w: np.ndarray,
               include_microwave_loading: bool) -> np.ndarray:
    G_o = math.sqrt(p["n_photons"]) * p["g0"]
    chi_o = susceptibility(w, p["omega_m"], p["kappa_o"])
    inv_chi_m = 1j * (p["omega_m"] - w) + 0.5 * p["gamma_i"]
    if include_microwave_loading:
        chi_mu = susceptibility(w, p["omega_mu"], p["kappa_mu"])
        inv_chi_m = inv_chi_m + p["g_mu"] ** 2 * chi_mu
    chi_m_eff = 1.0 / inv_chi_m
    return 1.0 - p["kappa_o_ext"] * chi_o / (1.0 + G_o**2 * chi_o * chi_m_eff)


def _s_mumu_flat(p: dict[str, float], w: np.ndarray, pump_on: bool) -> np.ndarray:
    chi_mu = susceptibility(w, p["omega_mu"], p["kappa_mu"])
    inv_chi_m = 1j * (p["omega_m"] - w) + 0.5 * p["gamma_i"]
    if pump_on:
        G_o = math.sqrt(p["n_photons"]) * p["g0"]
        chi_o = susceptibility(w, p["omega_m"], p["kappa_o"])
        inv_chi_m = inv_chi_m + G_o**2 * chi_o
    chi_m_eff = 1.0 / inv_chi_m
    return 1.0 - p["kappa_mu_ext"] * chi_mu / (1.0 + p["g_mu"] ** 2 * chi_mu * chi_m_eff)


def _s_conversion_flat(p: dict[str, float], w: np.ndarray) -> np.ndarray:
    G_o = math.sqrt(p["n_photons"]) * p["g0"]
    chi_o = susceptibility(w, p["omega_m"], p["kappa_o"])
    chi_mu = susceptibility(w, p["omega_mu"], p["kappa_mu"])
    inv_chi_m = (1j * (p["omega_m"] - w) + 0.5 * p["gamma_i"]
                 + G_o**2 * chi_o + p["g_mu"] ** 2 * chi_mu)
    amp = math.sqrt(p["kappa_o_ext"] * p["kappa_mu_ext"]) * G_o * p["g_mu"]
    return amp * chi_o * chi_mu / inv_chi_m


def s_oo(params: TransducerParams, freqs_hz: np.ndarray, gamma_i: float,
         include_microwave_loading: bool = True) -> np.ndarray:
    """Optical reflection vs pump-probe beat frequency (Hz).

    With the pump on, the mechanical response opens a transparency
    window of width gamma_i + gamma_om + gamma_mu in the cavity
    reflection dip. The microwave self-energy term can be dropped to
    model a device with the microwave port far detuned.
    """
    w = TWO_PI * np.asarray(freqs_hz, dtype=float)
    return _s_oo_flat(_flat_params(params, gamma_i), w, include_microwave_loading)


def s_mumu(params: TransducerParams, freqs_hz: np.ndarray, gamma_i: float,
           pump_on: bool = False) -> np.ndarray:
    """Microwave reflection vs probe frequency (Hz).

    The mechanical mode appears as a narrow feature inside the microwave
    resonance; turning the pump on adds the optically induced damping to
    that feature. Choose gamma_i consistently with pump_on.
    """
    w = TWO_PI * np.asarray(freqs_hz, dtype=float)
    return _s_mumu_flat(_flat_params(params, gamma_i), w, pump_on)


def s_conversion(params: TransducerParams, freqs_hz: np.ndarray,
                 gamma_i: float) -> np.ndarray:
    """Microwave-optical conversion amplitude vs probe frequency (Hz).

    Identical in both directions. On triple resonance the squared
    magnitude equals the closed-form peak conversion efficiency.
    """
    w = TWO_PI * np.asarray(freqs_hz, dtype=float)
    return _s_conversion_flat(_flat_params(params, gamma_i), w)


def conversion_bandwidth(params: TransducerParams, gamma_i: float,
                         span_hz: float = 30e6, points: int = 20001,
                         ) -> tuple[float, float]:
    """Full width at half maximum of |S_conversion|^2.

    Returns (bandwidth_hz, peak_freq_hz), located on a dense grid around
    the mechanical frequency with linear interpolation of the half-power
    crossings.
    """
    f_m = params.mechanical.omega / TWO_PI
    freqs = np.linspace(f_m - span_hz / 2, f_m + span_hz / 2, points)
    power = np.abs(s_conversion(params, freqs, gamma_i)) ** 2
    k_pk = int(np.argmax(power))
    if k_pk == 0 or k_pk == len(freqs) - 1:
        raise NoSignalError("conversion peak outside the scanned span")
    half = power[k_pk] / 2.0

    def crossing(lo_side: bool) -> float:
        idx = range(k_pk, 0, -1) if lo_side else range(k_pk, len(freqs) - 1)
        for k in idx:
            k2 = k - 1 if lo_side else k + 1
            if power[k2] <= half <= power[k] or power[k] <= half <= power[k2]:
                frac = (half - power[k]) / (power[k2] - power[k])
                return freqs[k] + frac * (freqs[k2] - freqs[k])
        raise NoSignalError("half-power crossing outside the scanned span")

    return crossing(False) - crossing(True), freqs[k_pk]


@dataclass(frozen=True)
class FitResult:
    """Outcome of a spectrum fit.

    values and stderr are keyed by parameter name in rad/s (frequencies
    included); cov is the covariance over the same order as free.
    """

    kind: str
    free: tuple[str, ...]
    values: dict[str, float]
    stderr: dict[str, float]
    cov: np.ndarray
    residual_rms: float
    cost: float
    nfev: int
    success: bool
    message: str


def _model_eval(kind: str, p: dict[str, float], w: np.ndarray,
                include_microwave_loading: bool, pump_on: bool) -> np.ndarray:
    if kind == "mumu":
        return _s_mumu_flat(p, w, pump_on)
    if kind == "oo":
        return _s_oo_flat(p, w, include_microwave_loading)
    if kind == "conversion":
        return _s_conversion_flat(p, w)
    raise ValueError(f"unknown model kind {kind!r}")


def fit_spectrum(freqs_hz: np.ndarray, data: np.ndarray, kind: str,
                 params0: TransducerParams, gamma_i0: float,
                 free: tuple[str, ...] | None = None,
                 include_microwave_loading: bool = True,
                 pump_on: bool = True,
                 max_nfev: int | None = None) -> FitResult:
    """Fit a measured complex spectrum with one of the scattering models.

    Damped least squares (trust-region) on the stacked real and
    imaginary residuals. Rate-like parameters are fitted in log space so
    they stay positive; frequencies are fitted as linear shifts. The
    covariance is the Gauss-Newton estimate scaled by the residual
    variance, and a rank-deficient Jacobian raises an error naming the
    unidentifiable parameter combination rather than returning garbage.
    """
    w = TWO_PI * np.asarray(freqs_hz, dtype=float)
    y = np.asarray(data, dtype=complex)
    if w.size == 0 or y.size != w.size:
        raise NoSignalError("spectrum data empty or mismatched with the frequency axis")
    if free is None:
        free = _DEFAULT_FREE[kind]
    free = tuple(free)
    for name in free:
        if name not in _POSITIVE and name not in _LINEAR:
            raise ValueError(f"unknown free parameter {name!r}")
    if 2 * w.size <= len(free):
        raise NoSignalError("fewer data points than free parameters")

    base = _flat_params(params0, gamma_i0)
    x0_phys = np.array([base[name] for name in free])
    # Frequency shifts are scaled by a megahertz so the trust region sees
    # order-one steps in every coordinate.
    f_scale = TWO_PI * 1e6

    def to_phys(x: np.ndarray) -> dict[str, float]:
        p = dict(base)
        for name, u, v0 in zip(free, x, x0_phys):
            p[name] = v0 * math.exp(u) if name in _POSITIVE else v0 + u * f_scale
        return p

    def residual(x: np.ndarray) -> np.ndarray:
        model = _model_eval(kind, to_phys(x), w, include_microwave_loading, pump_on)
        r = model - y
        return np.concatenate([r.real, r.imag])

    if max_nfev is None:
        max_nfev = 400 * (len(free) + 1)
    res = least_squares(residual, np.zeros(len(free)), method="trf",
                        x_scale="jac", max_nfev=max_nfev)
    p_fit = to_phys(res.x)
    if not res.success or not np.all(np.isfinite(res.x)):
        raise FitConvergenceError(
            f"fit did not converge: {res.message}",
            last_iterate={name: p_fit[name] for name in free},
        )

    jac = res.jac
    u_sv, sv, vt = np.linalg.svd(jac, full_matrices=False)
    if sv[0] == 0.0 or sv[-1] / sv[0] < 1e-10:
        worst = vt[-1]
        terms = ", ".join(
            f"{c:+.2f}*{name}" for c, name in zip(worst, free) if abs(c) > 0.05
        )
        raise RankDeficiencyError(
            f"unidentifiable parameter combination: {terms}")

    dof = max(2 * w.size - len(free), 1)
    s2 = 2.0 * res.cost / dof
    cov_u = s2 * (vt.T / sv**2) @ vt
    # Map covariance from internal coordinates to physical rad/s.
    scale = np.array([
        p_fit[name] if name in _POSITIVE else f_scale for name in free
    ])
    cov = cov_u * np.outer(scale, scale)
    stderr = {name: math.sqrt(max(cov[k, k], 0.0)) for k, name in enumerate(free)}
    rms = math.sqrt(2.0 * res.cost / (2 * w.size))
    return FitResult(
        kind=kind, free=free,
        values={name: p_fit[name] for name in free},
        stderr=stderr, cov=cov, residual_rms=rms, cost=float(res.cost),
        nfev=int(res.nfev), success=True, message=str(res.message),
    )
