"""Time-domain readout of the mechanical mode through the microwave port.

A phonon prepared in the mechanical mode leaks into the microwave
resonator and out the feedline. The two-mode amplitude equations

    db/dt = -(i delta + gamma_i / 2) b - i g c
    dc/dt = -i g b - (kappa / 2) c

are integrated with classical RK4 from b(0) = 1, c(0) = 0; the output
amplitude is A(t) = sqrt(kappa_ext) c(t). Cumulative external and
internal energies are carried as two extra ODE states so the energy
balance closes to integrator accuracy instead of quadrature accuracy.

Demodulation overlaps are plain rectangle-rule inner products with a
unit-energy filter, so the matched filter at zero delay returns the
total extracted energy. The heating model drives the same pair of modes
with a decaying thermal bath on the mechanical side.
"""
from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import NoSignalError, StepSizeError

# RK4 and Euler-Maruyama step-size guard, in units of the fastest rate.
MAX_STEP_RATE = 0.05
# Warn when the integration window is shorter than this many amplitude
# decay times of the slow eigenmode.
MIN_DECAY_TIMES = 5.0


def mode_eigenvalues(g: float, kappa: float, gamma_i: float) -> tuple[complex, complex]:
    """Eigenvalues of the coupled mechanical-microwave amplitude pair.

    Returns (slow, fast) by magnitude of the real part. Below the
    strong-coupling threshold both are purely real (overdamped); above
    it they form a conjugate pair split by the vacuum Rabi frequency.
    """
    mean = -(gamma_i + kappa) / 4.0
    disc = ((kappa - gamma_i) / 4.0) ** 2 - g**2
    root = cmath.sqrt(disc)
    lam_a = mean + root
    lam_b = mean - root
    if abs(lam_a.real) <= abs(lam_b.real):
        return lam_a, lam_b
    return lam_b, lam_a


@dataclass(frozen=True)
class TemporalMode:
    """Integrated emission record on a uniform time grid.

    output is the feedline amplitude sqrt(kappa_ext) c(t); cum_ext and
    cum_int are the running external and internal energies, so
    extraction_efficiency is the fraction of the initial phonon that
    made it into the feedline by the end of the record.
    """

    times: np.ndarray
    mech: np.ndarray
    cav: np.ndarray
    output: np.ndarray
    cum_ext: np.ndarray
    cum_int: np.ndarray

    @property
    def dt(self) -> float:
        return float(self.times[1] - self.times[0])

    @property
    def extraction_efficiency(self) -> float:
        return float(self.cum_ext[-1])

    @property
    def energy_total(self) -> float:
        """Remaining plus dissipated energy; 1 for a lossless bookkeeping."""
        return float(abs(self.mech[-1]) ** 2 + abs(self.cav[-1]) ** 2
                     + self.cum_ext[-1] + self.cum_int[-1])


def _check_step(dt: float, kappa: float, gamma_i: float) -> None:
    fastest = max(kappa, gamma_i)
    if dt * fastest >= MAX_STEP_RATE:
        raise StepSizeError(
            f"dt * kappa = {dt * fastest:.3g} exceeds {MAX_STEP_RATE}; "
            "reduce dt or the integrator is inaccurate")


def emit_single_phonon(g: float, kappa: float, kappa_ext: float, gamma_i: float,
                       t_max: float = 3e-6, dt: float = 1e-9,
                       detuning: float = 0.0) -> TemporalMode:
    """Integrate the release of one phonon into the feedline.

    All rates in rad/s, detuning is the mechanical-microwave frequency
    mismatch in rad/s. Warns when t_max is too short for the slow
    eigenmode to ring down, since truncated records bias every overlap
    computed from them.
    """
    _check_step(dt, kappa, gamma_i)
    lam_slow, _ = mode_eigenvalues(g, kappa, gamma_i)
    if lam_slow.real != 0.0 and t_max < MIN_DECAY_TIMES / abs(lam_slow.real):
        warnings.warn(
            f"t_max = {t_max:.3g} s truncates the emission "
            f"(slow amplitude decay time {1.0 / abs(lam_slow.real):.3g} s)",
            stacklevel=2)
    kappa_int = kappa - kappa_ext
    n_steps = int(round(t_max / dt))
    times = dt * np.arange(n_steps + 1)
    mech = np.empty(n_steps + 1, dtype=complex)
    cav = np.empty(n_steps + 1, dtype=complex)
    cum_ext = np.empty(n_steps + 1)
    cum_int = np.empty(n_steps + 1)

    def deriv(y: np.ndarray) -> np.ndarray:
        b, c = y[0], y[1]
        return np.array([
            -(1j * detuning + gamma_i / 2.0) * b - 1j * g * c,
            -1j * g * b - kappa / 2.0 * c,
            kappa_ext * abs(c) ** 2,
            gamma_i * abs(b) ** 2 + kappa_int * abs(c) ** 2,
        ], dtype=complex)

    y = np.array([1.0, 0.0, 0.0, 0.0], dtype=complex)
    mech[0], cav[0], cum_ext[0], cum_int[0] = 1.0, 0.0, 0.0, 0.0
    for k in range(n_steps):
        k1 = deriv(y)
        k2 = deriv(y + 0.5 * dt * k1)
        k3 = deriv(y + 0.5 * dt * k2)
        k4 = deriv(y + dt * k3)
        y = y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        mech[k + 1], cav[k + 1] = y[0], y[1]
        cum_ext[k + 1], cum_int[k + 1] = y[2].real, y[3].real
    return TemporalMode(times=times, mech=mech, cav=cav,
                        output=math.sqrt(kappa_ext) * cav,
                        cum_ext=cum_ext, cum_int=cum_int)


class DemodFilter:
    """Demodulation filter shape, evaluated on a mode's time grid.

    kind is one of "matched", "exponential", "custom". Bandwidth of the
    exponential filter is the full width at half maximum of its power
    spectrum, so the amplitude impulse response is exp(-pi * bw * t).
    """

    def __init__(self, kind: str, template_times: np.ndarray | None = None,
                 template: np.ndarray | None = None,
                 bandwidth_hz: float | None = None):
        if kind not in ("matched", "exponential", "custom"):
            raise ValueError(f"unknown filter kind {kind!r}")
        if kind == "exponential" and (bandwidth_hz is None or bandwidth_hz <= 0):
            raise ValueError("exponential filter needs a positive bandwidth_hz")
        if kind in ("matched", "custom") and (template is None or template_times is None):
            raise ValueError(f"{kind} filter needs template_times and template")
        self.kind = kind
        self.bandwidth_hz = bandwidth_hz
        self.template_times = (None if template_times is None
                               else np.asarray(template_times, dtype=float))
        self.template = None if template is None else np.asarray(template, dtype=complex)

    @classmethod
    def matched(cls, mode: TemporalMode) -> "DemodFilter":
        return cls("matched", template_times=mode.times, template=mode.output)

    @classmethod
    def exponential(cls, bandwidth_hz: float) -> "DemodFilter":
        return cls("exponential", bandwidth_hz=bandwidth_hz)

    @classmethod
    def custom(cls, times: np.ndarray, values: np.ndarray) -> "DemodFilter":
        return cls("custom", template_times=times, template=values)

    def sample(self, times: np.ndarray, delay: float = 0.0) -> np.ndarray:
        """Unit-energy samples of the delayed filter on the given grid."""
        t = np.asarray(times, dtype=float)
        if self.kind == "exponential":
            rate = math.pi * self.bandwidth_hz
            shifted = t - delay
            f = np.where(shifted >= 0.0, np.exp(-rate * np.clip(shifted, 0.0, None)),
                         0.0).astype(complex)
        else:
            shifted = t - delay
            f = (np.interp(shifted, self.template_times, self.template.real,
                           left=0.0, right=0.0)
                 + 1j * np.interp(shifted, self.template_times, self.template.imag,
                                  left=0.0, right=0.0))
            f[shifted < self.template_times[0]] = 0.0
        dt = t[1] - t[0]
        norm_sq = float(np.sum(np.abs(f) ** 2) * dt)
        if norm_sq == 0.0:
            raise NoSignalError("filter has no support on the record")
        return f / math.sqrt(norm_sq)


def demod_efficiency(mode: TemporalMode, filt: DemodFilter, delay: float = 0.0,
                     relative_to_matched: bool = False) -> float:
    """Squared overlap of the emission record with a unit-energy filter.

    The raw value is the fraction of the initial phonon captured in the
    filter's temporal mode; the matched filter at zero delay returns the
    full extracted energy. With relative_to_matched the raw value is
    divided by that matched-filter bound, isolating the shape penalty of
    a practical filter.
    """
    f = filt.sample(mode.times, delay)
    z = np.sum(np.conj(f) * mode.output) * mode.dt
    raw = float(abs(z) ** 2)
    if not relative_to_matched:
        return raw
    bound = float(np.sum(np.abs(mode.output) ** 2) * mode.dt)
    if bound == 0.0:
        raise NoSignalError("emission record carries no energy")
    return raw / bound


def optimal_delay(mode: TemporalMode, filt: DemodFilter,
                  max_delay: float | None = None,
                  coarse_points: int = 61) -> tuple[float, float]:
    """Delay maximizing the demodulation overlap; returns (delay, overlap).

    Coarse scan followed by a golden-section refine between the coarse
    neighbors. Warns when the optimum sits at the scan boundary, which
    usually means max_delay was chosen too small.
    """
    if max_delay is None:
        max_delay = float(mode.times[-1]) / 2.0
    grid = np.linspace(0.0, max_delay, coarse_points)
    vals = np.array([demod_efficiency(mode, filt, d) for d in grid])
    k = int(np.argmax(vals))
    if k in (0, coarse_points - 1):
        warnings.warn("optimal delay at the scan boundary; widen max_delay",
                      stacklevel=2)
        return float(grid[k]), float(vals[k])
    res = minimize_scalar(
        lambda d: -demod_efficiency(mode, filt, d),
        bracket=(grid[k - 1], grid[k], grid[k + 1]), method="golden",
        options={"xtol": 1e-12})
    return float(res.x), float(-res.fun)


@dataclass(frozen=True)
class JitterResult:
    """Ensemble demodulation efficiency under mechanical frequency jitter."""

    mean_overlap: float
    std_overlap: float
    n_samples: int
    jitter_rms_hz: float


def efficiency_under_jitter(g: float, kappa: float, kappa_ext: float,
                            gamma_i: float, jitter_rms_hz: float,
                            filt: DemodFilter, n_samples: int = 400,
                            seed: int = 0, t_max: float = 3e-6, dt: float = 1e-9,
                            record_stride: int = 4,
                            n_delays: int = 64) -> JitterResult:
    """Mean demodulation overlap when the mechanical frequency jitters.

    Each ensemble member gets a Gaussian detuning held fixed over the
    shot (jitter slow compared with one emission). The overlap is
    evaluated per member at its own best delay from a coarse scan with
    parabolic refinement, then averaged. All members share the RK4 grid
    so the scan is a single matrix product.
    """
    _check_step(dt, kappa, gamma_i)
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    detunings = 2.0 * math.pi * jitter_rms_hz * rng.standard_normal(n_samples)

    n_steps = int(round(t_max / dt))
    b = np.ones(n_samples, dtype=complex)
    c = np.zeros(n_samples, dtype=complex)
    rec = [np.zeros(n_samples, dtype=complex)]
    rec_t = [0.0]

    def deriv(bv, cv):
        return (-(1j * detunings + gamma_i / 2.0) * bv - 1j * g * cv,
                -1j * g * bv - kappa / 2.0 * cv)

    for k in range(n_steps):
        kb1, kc1 = deriv(b, c)
        kb2, kc2 = deriv(b + 0.5 * dt * kb1, c + 0.5 * dt * kc1)
        kb3, kc3 = deriv(b + 0.5 * dt * kb2, c + 0.5 * dt * kc2)
        kb4, kc4 = deriv(b + dt * kb3, c + dt * kc3)
        b = b + (dt / 6.0) * (kb1 + 2.0 * kb2 + 2.0 * kb3 + kb4)
        c = c + (dt / 6.0) * (kc1 + 2.0 * kc2 + 2.0 * kc3 + kc4)
        if (k + 1) % record_stride == 0:
            rec.append(c.copy())
            rec_t.append((k + 1) * dt)
    times = np.array(rec_t)
    outputs = math.sqrt(kappa_ext) * np.array(rec).T  # (n_samples, n_rec)
    dt_rec = times[1] - times[0]

    delays = np.linspace(0.0, t_max / 2.0, n_delays)
    bank = np.stack([filt.sample(times, d) for d in delays])  # (n_delays, n_rec)
    overlaps = np.abs(outputs @ bank.conj().T) ** 2 * dt_rec**2  # (n_samples, n_delays)

    best = np.argmax(overlaps, axis=1)
    peak = overlaps[np.arange(n_samples), best]
    interior = (best > 0) & (best < n_delays - 1)
    if np.any(interior):
        idx = np.nonzero(interior)[0]
        lo = overlaps[idx, best[idx] - 1]
        hi = overlaps[idx, best[idx] + 1]
        mid = overlaps[idx, best[idx]]
        denom = lo - 2.0 * mid + hi
        safe = denom < 0.0
        corr = np.zeros_like(mid)
        corr[safe] = (lo - hi)[safe] ** 2 / (-8.0 * denom[safe])
        peak[idx] = mid + corr
    vals = peak
    return JitterResult(mean_overlap=float(np.mean(vals)),
                        std_overlap=float(np.std(vals, ddof=1)) if n_samples > 1 else 0.0,
                        n_samples=n_samples, jitter_rms_hz=jitter_rms_hz)


@dataclass(frozen=True)
class HeatingBath:
    """Pump-induced thermal bath seen by the mechanical mode.

    Occupation n_bath(t) = n_bath_peak * exp(-decay_rate (t - t0)) for
    t >= t0, zero before. decay_rate is 1/s (not angular).
    """

    n_bath_peak: float
    decay_rate: float
    t0: float = 0.0

    def occupation(self, times: np.ndarray) -> np.ndarray:
        t = np.asarray(times, dtype=float)
        tau = t - self.t0
        return np.where(tau >= 0.0,
                        self.n_bath_peak * np.exp(-self.decay_rate * np.clip(tau, 0.0, None)),
                        0.0)


def heating_trajectory(gamma_i: float, gamma_readout: float, bath: HeatingBath,
                       times: np.ndarray) -> np.ndarray:
    """Mean phonon occupation driven by a decaying bath, closed form.

    Solves dn/dt = -(gamma_i + gamma_readout) n + gamma_i n_bath(t) with
    n(t0) = 0. gamma_readout collects whatever extra damping acts during
    the record (microwave-induced swap rate, optical damping if the pump
    stays on); pass 0 for a free mode.
    """
    g_tot = gamma_i + gamma_readout
    t = np.asarray(times, dtype=float)
    tau = np.clip(t - bath.t0, 0.0, None)
    drive = gamma_i * bath.n_bath_peak
    if abs(g_tot - bath.decay_rate) < 1e-9 * max(g_tot, bath.decay_rate, 1.0):
        n = drive * tau * np.exp(-bath.decay_rate * tau)
    else:
        n = drive * (np.exp(-bath.decay_rate * tau) - np.exp(-g_tot * tau)) / (
            g_tot - bath.decay_rate)
    return np.where(t >= bath.t0, n, 0.0)


def window_means(times: np.ndarray, values: np.ndarray,
                 window: float) -> tuple[np.ndarray, np.ndarray]:
    """Means of a sampled trajectory over consecutive windows.

    Returns (window_centers, means). Trailing samples that do not fill a
    whole window are dropped.
    """
    t = np.asarray(times, dtype=float)
    v = np.asarray(values, dtype=float)
    dt = t[1] - t[0]
    per = int(round(window / dt))
    if per < 1:
        raise ValueError("window shorter than the sample spacing")
    n_win = v.size // per
    if n_win == 0:
        raise NoSignalError("record shorter than one window")
    chunk = v[:n_win * per].reshape(n_win, per)
    centers = t[0] + window * (np.arange(n_win) + 0.5)
    return centers, chunk.mean(axis=1)


@dataclass(frozen=True)
class AddedNoiseResult:
    """Monte Carlo added-noise estimate in the demodulated mode."""

    n_added: float
    stderr: float
    n_traj: int


def added_noise_mc(g: float, kappa: float, kappa_ext: float, gamma_i: float,
                   bath: HeatingBath, filt: DemodFilter, t_max: float = 3e-6,
                   dt: float = 1e-9, n_traj: int = 2000, seed: int = 0,
                   delay: float = 0.0, chunk_size: int = 512) -> AddedNoiseResult:
    """Added noise quanta in the demodulated temporal mode, by Monte Carlo.

    Euler-Maruyama integration of the two-mode amplitudes driven by the
    thermal bath on the mechanical side; each trajectory is demodulated
    with the same filter used for the signal, and the added noise is the
    ensemble mean of |z|^2. Trajectories run in fixed-size chunks, each
    chunk drawing from its own child of the seed, so the result depends
    only on (seed, n_traj).
    """
    _check_step(dt, kappa, gamma_i)
    n_steps = int(round(t_max / dt))
    times = dt * np.arange(n_steps + 1)
    f = filt.sample(times, delay)
    n_bath = bath.occupation(times)
    root_ext = math.sqrt(kappa_ext)

    children = np.random.SeedSequence(seed).spawn(math.ceil(n_traj / chunk_size))
    z_all = np.empty(n_traj, dtype=complex)
    done = 0
    for child in children:
        n = min(chunk_size, n_traj - done)
        rng = np.random.default_rng(child)
        b = np.zeros(n, dtype=complex)
        c = np.zeros(n, dtype=complex)
        z = np.zeros(n, dtype=complex)
        z += np.conj(f[0]) * root_ext * c * dt
        for k in range(n_steps):
            noise = rng.standard_normal((2, chunk_size))[:, :n]
            amp = math.sqrt(gamma_i * n_bath[k] * dt / 2.0)
            db = (-(gamma_i / 2.0) * b - 1j * g * c) * dt + amp * (noise[0] + 1j * noise[1])
            dc = (-1j * g * b - (kappa / 2.0) * c) * dt
            b = b + db
            c = c + dc
            z += np.conj(f[k + 1]) * root_ext * c * dt
        z_all[done:done + n] = z
        done += n
    occ = np.abs(z_all) ** 2
    return AddedNoiseResult(
        n_added=float(np.mean(occ)),
        stderr=float(np.std(occ, ddof=1) / math.sqrt(n_traj)) if n_traj > 1 else 0.0,
        n_traj=n_traj)
