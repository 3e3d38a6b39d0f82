"""Calibration chains: thermometry, amplifier gain, and noise budgets.

Variance conventions: quantities named var_* are total two-quadrature
second moments in symmetrized units, where an ideal vacuum mode at unit
gain contributes 1 (a mode of occupation n contributes 2 n + 1).
Quantities named I_* or power_* are Q-function second moments, where a
mode of occupation n contributes n + 1. Both appear in real receiver
chains; every function states which it uses.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .constants import HBAR, bose_occupation
from .errors import NegativeNoiseError, NoSignalError


def sideband_asymmetry_thermometry(r_blue: float, r_red: float,
                                   r_blue_err: float = 0.0,
                                   r_red_err: float = 0.0,
                                   ) -> tuple[float, float]:
    """Mechanical occupation from the sideband count-rate asymmetry.

    r_blue and r_red are the ratios of sideband count rate to background
    for the two pump detunings; the background subtracts out in

        A = (r_blue - 1) / (r_red - 1) = n / (n + 1),

    which needs no detector efficiency calibration. Returns (n, stderr);
    the error propagates the supplied ratio errors linearly.
    """
    if abs(r_red - 1.0) < 1e-12:
        raise NoSignalError("red-sideband ratio is at background level")
    asym = (r_blue - 1.0) / (r_red - 1.0)
    if not 0.0 < asym < 1.0:
        raise NegativeNoiseError(
            f"asymmetry {asym:.4f} outside (0, 1); occupation undefined",
            raw_solution={"asymmetry": asym})
    n = asym / (1.0 - asym)
    da_db = 1.0 / (r_red - 1.0)
    da_dr = -(r_blue - 1.0) / (r_red - 1.0) ** 2
    a_err = math.hypot(da_db * r_blue_err, da_dr * r_red_err)
    n_err = a_err / (1.0 - asym) ** 2
    return n, n_err


@dataclass(frozen=True)
class CalibratedChain:
    """Receiver gain and transducer efficiency from the two-path method."""

    gain: float
    efficiency: float
    microwave_input_flux: float


def gain_and_efficiency(p_refl_w: float, p_conv_w: float, n_in_opt: float,
                        n_out_opt: float, s_mumu_mag: float,
                        omega_mu: float) -> CalibratedChain:
    """Solve the receiver gain and conversion efficiency jointly.

    Inputs: p_refl_w is the amplified microwave power from the known
    reflection |S_mumu|^2 of a microwave drive; p_conv_w the amplified
    microwave power when driving optically with photon rate n_in_opt;
    n_out_opt the upconverted optical photon rate under the microwave
    drive. The microwave drive strength never needs to be known; it is
    returned as a consistency diagnostic.
    """
    if min(p_refl_w, p_conv_w, n_in_opt, n_out_opt) <= 0.0 or s_mumu_mag <= 0.0:
        raise NoSignalError("calibration inputs must be positive")
    quantum = HBAR * omega_mu
    eta = math.sqrt(n_out_opt * p_conv_w * s_mumu_mag**2
                    / (n_in_opt * p_refl_w))
    gain = math.sqrt(p_conv_w * p_refl_w
                     / (n_in_opt * n_out_opt * s_mumu_mag**2)) / quantum
    flux_mu = p_refl_w / (gain * quantum * s_mumu_mag**2)
    return CalibratedChain(gain=gain, efficiency=eta,
                           microwave_input_flux=flux_mu)


def added_noise_referred(n_out: float, eta_end_to_end: float) -> float:
    """Output-referred added noise divided back to the transducer input."""
    if eta_end_to_end <= 0.0:
        raise NoSignalError("end-to-end efficiency must be positive")
    return n_out / eta_end_to_end


def excess_noise_decomposition(eta_mum: float, eta_d: float, n_n: float,
                               n_m: float) -> float:
    """Predicted amplifier-referred excess noise from the budget terms.

    Collects the mode-mismatch noise weighted by the temporal-mode
    leakage, the receiver added noise divided by the full capture, and
    the vacuum penalty of both inefficiencies:

        n_ex = (1 - eta_mum) / eta_mum * n_n
             + n_m / (eta_d * eta_mum)
             + ((1 - eta_mum) / eta_mum + 1 / (eta_d * eta_mum) - 1) / 2.
    """
    if not 0.0 < eta_mum <= 1.0 or not 0.0 < eta_d <= 1.0:
        raise NoSignalError("efficiencies must lie in (0, 1]")
    leak = (1.0 - eta_mum) / eta_mum
    return (leak * n_n + n_m / (eta_d * eta_mum)
            + 0.5 * (leak + 1.0 / (eta_d * eta_mum) - 1.0))


@dataclass(frozen=True)
class NoiseInversion:
    """Gain and noise terms recovered from the three measured variances."""

    gain: float
    mode_gain: float
    n_m: float
    n_n: float
    gain_err: float = 0.0
    n_m_err: float = 0.0
    n_n_err: float = 0.0


def _invert_noise_point(var_ps: float, var_all: float, var_ctrl: float,
                        n_th_heated: float, n_th_pre: float, eta_herald: float,
                        eta_d: float, eta_mum: float) -> tuple[float, float, float, float]:
    g_bar = (var_ps - var_all) / (eta_herald * (2.0 * n_th_heated + 2.0))
    gain = g_bar / (eta_d * eta_mum)
    n_m = ((var_ctrl - eta_d * gain * (2.0 * n_th_pre + 1.0)) / gain - 1.0) / 2.0
    resid = (var_all - eta_d * eta_mum * gain * (2.0 * n_th_heated + 1.0)
             - gain * (2.0 * n_m + 1.0))
    n_n = (resid / (eta_d * (1.0 - eta_mum) * gain) - 1.0) / 2.0
    return gain, g_bar, n_m, n_n


def invert_noise(var_ps: float, var_all: float, var_ctrl: float,
                 n_th_heated: float, n_th_pre: float, eta_herald: float,
                 eta_d: float, eta_mum: float,
                 var_ps_err: float = 0.0, var_all_err: float = 0.0,
                 var_ctrl_err: float = 0.0) -> NoiseInversion:
    """Recover chain gain and the two noise terms from measured variances.

    Inputs are symmetrized two-quadrature second moments (vacuum = 1 at
    unit gain): var_ps over heralded shots, var_all over all shots with
    the pump on, var_ctrl over a pump-off control where only the directly
    reflected mode (occupation n_th_pre) and the receiver noise
    contribute. The heralded minus unheralded contrast pins the signal
    path gain, the control pins the receiver noise n_m, and the remainder
    of var_all is attributed to the mode-mismatch noise n_n.

    Raises when any recovered quantity is negative, attaching the raw
    solution so a marginally negative value can still be inspected.
    """
    if not 0.0 < eta_mum < 1.0:
        raise NoSignalError("eta_mum must lie in (0, 1) to attribute leakage noise")
    if var_ps <= var_all:
        raise NegativeNoiseError(
            "heralded variance does not exceed the unheralded variance",
            raw_solution={"var_ps": var_ps, "var_all": var_all})
    gain, g_bar, n_m, n_n = _invert_noise_point(
        var_ps, var_all, var_ctrl, n_th_heated, n_th_pre, eta_herald,
        eta_d, eta_mum)
    raw = {"gain": gain, "mode_gain": g_bar, "n_m": n_m, "n_n": n_n}
    if gain <= 0.0 or n_m < 0.0 or n_n < 0.0:
        raise NegativeNoiseError(
            "noise inversion produced a negative term", raw_solution=raw)

    errs = [0.0, 0.0, 0.0]
    meas = [var_ps, var_all, var_ctrl]
    meas_err = [var_ps_err, var_all_err, var_ctrl_err]
    for k, err in enumerate(meas_err):
        if err == 0.0:
            continue
        hi = list(meas)
        lo = list(meas)
        hi[k] += err
        lo[k] -= err
        p_hi = _invert_noise_point(*hi, n_th_heated, n_th_pre, eta_herald,
                                   eta_d, eta_mum)
        p_lo = _invert_noise_point(*lo, n_th_heated, n_th_pre, eta_herald,
                                   eta_d, eta_mum)
        for j, (a, b) in enumerate(((p_hi[0], p_lo[0]), (p_hi[2], p_lo[2]),
                                    (p_hi[3], p_lo[3]))):
            errs[j] = math.hypot(errs[j], (a - b) / 2.0)
    return NoiseInversion(gain=gain, mode_gain=g_bar, n_m=n_m, n_n=n_n,
                          gain_err=errs[0], n_m_err=errs[1], n_n_err=errs[2])


def excess_noise_two_thermal(power_1: float, power_2: float,
                             n_1: float, n_2: float) -> tuple[float, float]:
    """Excess noise from two known thermal loads (Q-unit powers).

    With I_k = G (n_k + 1 + n_ex) the gain drops out of

        n_ex = (I_1 (n_2 + 1) - I_2 (n_1 + 1)) / (I_2 - I_1).

    Returns (n_ex, gain). An independent cross-check of the heralded
    ratio route; report both rather than arbitrating between them.
    """
    if power_2 == power_1:
        raise NoSignalError("equal powers: thermal loads are indistinguishable")
    n_ex = (power_1 * (n_2 + 1.0) - power_2 * (n_1 + 1.0)) / (power_2 - power_1)
    gain = (power_2 - power_1) / (n_2 - n_1) if n_2 != n_1 else float("nan")
    if n_ex < 0.0:
        raise NegativeNoiseError("two-load inversion gave negative excess noise",
                                 raw_solution={"n_ex": n_ex, "gain": gain})
    return n_ex, gain


def coherent_drive_occupation(photon_flux: float, kappa_ext: float,
                              kappa_total: float) -> float:
    """Steady occupation of a resonantly driven mode, 4 k_ext flux / k^2."""
    if kappa_total <= 0.0 or kappa_ext < 0.0:
        raise NoSignalError("rates must be positive")
    return 4.0 * kappa_ext * photon_flux / kappa_total**2


def room_temp_reference(omega: float, temperature: float = 295.0) -> float:
    """Bose occupation of a room-temperature load at the given frequency.

    A resistor at ambient temperature is the absolute noise reference the
    cryogenic chain is compared against.
    """
    return bose_occupation(omega, temperature)
