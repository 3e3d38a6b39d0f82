"""Heralded quadrature statistics of the microwave output.

Models the pulsed experiment: each shot may create a photon-phonon
pair, the optical detector may herald it (or fire darkly), and the
microwave chain measures both quadratures of the readout mode. States
are represented by their Husimi Q distributions, so a thermal mode with
occupation n has per-quadrature variance (n + 1) / 2 and a heralded
(photon-added) thermal mode has density

    Q(alpha) = |alpha|^2 exp(-|alpha|^2 / (n + 1)) / (pi (n + 1)^2).

Amplifier excess noise rides on top as an independent circular Gaussian
with total occupation n_ex, and the chain gain only rescales the record,
so second-moment ratios are gain-free.

All sampling is chunked with one child seed per fixed-size chunk, so a
result depends only on (seed, n_shots) and never on how the chunks were
scheduled.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import io
from .errors import ConfigError, InconsistentCountsError, NoSignalError

DEFAULT_CHUNK = 1 << 16


def q_thermal(alpha: np.ndarray, n_mean: float) -> np.ndarray:
    """Q density of a thermal state with occupation n_mean."""
    s = n_mean + 1.0
    a2 = np.abs(np.asarray(alpha)) ** 2
    return np.exp(-a2 / s) / (math.pi * s)


def q_added(alpha: np.ndarray, n_mean: float) -> np.ndarray:
    """Q density of a single-photon-added thermal state."""
    s = n_mean + 1.0
    a2 = np.abs(np.asarray(alpha)) ** 2
    return a2 * np.exp(-a2 / s) / (math.pi * s**2)


def sample_q_thermal(n_mean: float, n_samples: int,
                     rng: np.random.Generator) -> np.ndarray:
    """Draw complex points from the thermal Q distribution."""
    scale = math.sqrt((n_mean + 1.0) / 2.0)
    pts = rng.standard_normal((2, n_samples))
    return scale * (pts[0] + 1j * pts[1])


def sample_q_added(n_mean: float, n_samples: int,
                   rng: np.random.Generator) -> np.ndarray:
    """Draw complex points from the photon-added thermal Q distribution.

    The radial density of |alpha|^2 is a Gamma(2) with scale n_mean + 1,
    the phase is uniform.
    """
    r2 = rng.gamma(2.0, n_mean + 1.0, n_samples)
    phase = rng.uniform(0.0, 2.0 * math.pi, n_samples)
    return np.sqrt(r2) * np.exp(1j * phase)


@dataclass(frozen=True)
class ExperimentConfig:
    """Per-shot probabilities and noise levels of the pulsed experiment.

    p_pair is the pair-creation probability per pulse, eta_sys the
    optical herald path efficiency, dark_prob the dark-count probability
    inside the coincidence window. n_th is the mechanical occupation at
    readout, n_ex the amplifier excess noise in quanta, gain_scale an
    arbitrary overall scale of the recorded voltages.
    """

    p_pair: float
    eta_sys: float
    dark_prob: float
    n_th: float
    n_ex: float
    gain_scale: float = 1.0

    def __post_init__(self):
        for name in ("p_pair", "eta_sys", "dark_prob"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ConfigError(f"{name} = {v} outside [0, 1]")
        if self.n_th < 0.0 or self.n_ex < 0.0:
            raise ConfigError("occupations must be nonnegative")
        if self.gain_scale <= 0.0:
            raise ConfigError("gain_scale must be positive")

    @property
    def click_prob(self) -> float:
        """Probability that a shot is heralded (true or dark)."""
        return 1.0 - (1.0 - self.p_pair * self.eta_sys) * (1.0 - self.dark_prob)

    @property
    def eta_herald(self) -> float:
        """Fraction of heralds backed by a real pair."""
        p_click = self.click_prob
        if p_click == 0.0:
            raise NoSignalError("herald probability is zero")
        return self.p_pair * self.eta_sys / p_click


def heralding_rate(rep_rate: float, p_pair: float, eta_sys: float,
                   dark_prob: float, duty_factor: float = 1.0) -> float:
    """Herald events per second, including dark counts.

    duty_factor accounts for dead time between pulse trains; 1 means the
    pulser runs continuously at rep_rate.
    """
    cfg = ExperimentConfig(p_pair=p_pair, eta_sys=eta_sys, dark_prob=dark_prob,
                           n_th=0.0, n_ex=0.0)
    return rep_rate * cfg.click_prob * duty_factor


@dataclass
class QuadratureDataset:
    """Shot record: complex quadrature samples plus herald flags."""

    z: np.ndarray
    heralded: np.ndarray
    true_click: np.ndarray

    def __post_init__(self):
        if not (len(self.z) == len(self.heralded) == len(self.true_click)):
            raise InconsistentCountsError("column lengths differ")

    @property
    def n_shots(self) -> int:
        return len(self.z)

    @property
    def z_heralded(self) -> np.ndarray:
        return self.z[self.heralded]

    def to_csv(self, path) -> None:
        io.write_table_csv(path, {
            "z_re": self.z.real, "z_im": self.z.imag,
            "heralded": self.heralded, "true_click": self.true_click,
        })

    @classmethod
    def from_csv(cls, path) -> "QuadratureDataset":
        cols = io.read_table_csv(path, expected=("z_re", "z_im", "heralded",
                                                 "true_click"))
        return cls(z=cols["z_re"] + 1j * cols["z_im"],
                   heralded=cols["heralded"] != 0.0,
                   true_click=cols["true_click"] != 0.0)


def _chunk_shots(cfg: ExperimentConfig, n: int, rng: np.random.Generator,
                 ) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """One chunk of the experiment; returns (z, heralded, true_click).

    Draw order is fixed (decisions, thermal, added, amplifier noise) so
    the stream layout is part of the reproducibility contract.
    """
    pair = rng.random(n) < cfg.p_pair
    detected = rng.random(n) < cfg.eta_sys
    dark = rng.random(n) < cfg.dark_prob
    true_click = pair & detected
    heralded = true_click | dark
    alpha = sample_q_thermal(cfg.n_th, n, rng)
    n_true = int(np.count_nonzero(true_click))
    if n_true:
        alpha[true_click] = sample_q_added(cfg.n_th, n_true, rng)
    noise = math.sqrt(cfg.n_ex / 2.0) * (rng.standard_normal(n)
                                         + 1j * rng.standard_normal(n))
    return cfg.gain_scale * (alpha + noise), heralded, true_click


def simulate_experiment(cfg: ExperimentConfig, n_shots: int, seed: int = 0,
                        chunk_size: int = DEFAULT_CHUNK) -> QuadratureDataset:
    """Full shot record of the pulsed experiment.

    Memory scales with n_shots; for moment-level results at large shot
    counts use simulate_experiment_moments instead.
    """
    z = np.empty(n_shots, dtype=complex)
    heralded = np.empty(n_shots, dtype=bool)
    true_click = np.empty(n_shots, dtype=bool)
    children = np.random.SeedSequence(seed).spawn(
        max(1, math.ceil(n_shots / chunk_size)))
    done = 0
    for child in children:
        n = min(chunk_size, n_shots - done)
        zc, hc, tc = _chunk_shots(cfg, n, np.random.default_rng(child))
        z[done:done + n] = zc
        heralded[done:done + n] = hc
        true_click[done:done + n] = tc
        done += n
    return QuadratureDataset(z=z, heralded=heralded, true_click=true_click)


@dataclass
class MomentAccumulator:
    """Streaming mean and variance of a scalar sample (chunk-mergeable)."""

    count: int = 0
    mean: float = 0.0
    m2: float = 0.0

    def update(self, values: np.ndarray) -> None:
        v = np.asarray(values, dtype=float)
        if v.size == 0:
            return
        n_b = v.size
        mean_b = float(np.mean(v))
        m2_b = float(np.sum((v - mean_b) ** 2))
        delta = mean_b - self.mean
        total = self.count + n_b
        self.m2 += m2_b + delta**2 * self.count * n_b / total
        self.mean += delta * n_b / total
        self.count = total

    def merge(self, other: "MomentAccumulator") -> None:
        if other.count == 0:
            return
        delta = other.mean - self.mean
        total = self.count + other.count
        self.m2 += other.m2 + delta**2 * self.count * other.count / total
        self.mean += delta * other.count / total
        self.count = total

    @property
    def variance(self) -> float:
        if self.count < 2:
            return 0.0
        return self.m2 / (self.count - 1)

    @property
    def stderr_of_mean(self) -> float:
        if self.count < 2:
            return 0.0
        return math.sqrt(self.variance / self.count)


def simulate_experiment_moments(cfg: ExperimentConfig, n_shots: int, seed: int = 0,
                                chunk_size: int = DEFAULT_CHUNK,
                                ) -> tuple[MomentAccumulator, MomentAccumulator, int]:
    """Streamed second-moment statistics of the experiment.

    Returns (heralded |z|^2 accumulator, all-shot |z|^2 accumulator,
    herald count). Identical shot stream to simulate_experiment for the
    same seed and chunk size, without storing the record.
    """
    acc_ps = MomentAccumulator()
    acc_all = MomentAccumulator()
    children = np.random.SeedSequence(seed).spawn(
        max(1, math.ceil(n_shots / chunk_size)))
    done = 0
    for child in children:
        n = min(chunk_size, n_shots - done)
        zc, hc, _ = _chunk_shots(cfg, n, np.random.default_rng(child))
        p2 = np.abs(zc) ** 2
        acc_all.update(p2)
        acc_ps.update(p2[hc])
        done += n
    return acc_ps, acc_all, acc_ps.count


def draw_populations(cfg: ExperimentConfig, n_heralded: int, n_unheralded: int,
                     seed: int = 0, chunk_size: int = DEFAULT_CHUNK,
                     ) -> tuple[MomentAccumulator, MomentAccumulator]:
    """Draw the heralded and unheralded populations at given sizes.

    Samples the post-click mixture (eta_herald photon-added, the rest
    thermal) and the plain thermal background directly, so rare-herald
    statistics can be studied without simulating billions of shots.
    Returns streaming |z|^2 accumulators (heralded, unheralded).
    """
    eta_h = cfg.eta_herald
    root_noise = math.sqrt(cfg.n_ex / 2.0)
    acc_ps = MomentAccumulator()
    acc_all = MomentAccumulator()
    n_chunks_ps = max(1, math.ceil(n_heralded / chunk_size))
    n_chunks_all = max(1, math.ceil(n_unheralded / chunk_size))
    children = np.random.SeedSequence(seed).spawn(n_chunks_ps + n_chunks_all)

    done = 0
    for child in children[:n_chunks_ps]:
        n = min(chunk_size, n_heralded - done)
        rng = np.random.default_rng(child)
        added = rng.random(n) < eta_h
        alpha = sample_q_thermal(cfg.n_th, n, rng)
        n_add = int(np.count_nonzero(added))
        if n_add:
            alpha[added] = sample_q_added(cfg.n_th, n_add, rng)
        noise = root_noise * (rng.standard_normal(n) + 1j * rng.standard_normal(n))
        acc_ps.update(np.abs(cfg.gain_scale * (alpha + noise)) ** 2)
        done += n

    done = 0
    for child in children[n_chunks_ps:]:
        n = min(chunk_size, n_unheralded - done)
        rng = np.random.default_rng(child)
        alpha = sample_q_thermal(cfg.n_th, n, rng)
        noise = root_noise * (rng.standard_normal(n) + 1j * rng.standard_normal(n))
        acc_all.update(np.abs(cfg.gain_scale * (alpha + noise)) ** 2)
        done += n
    return acc_ps, acc_all


@dataclass(frozen=True)
class ExcessNoiseResult:
    """Excess amplifier noise recovered from heralded second moments."""

    n_ex: float
    n_ex_stderr: float
    ratio: float
    ratio_stderr: float
    n_heralded: int
    n_total: int


def extract_excess_noise(ps: MomentAccumulator, all_: MomentAccumulator,
                         n_th: float, eta_herald: float,
                         ps_within_all: bool = False) -> ExcessNoiseResult:
    """Excess noise from the heralded / unheralded power ratio.

    The photon addition raises the heralded second moment by one thermal
    quantum times the herald purity, so with R = <|z|^2>_her / <|z|^2>_all,

        n_ex = eta_herald (n_th + 1) / (R - 1) - (n_th + 1).

    Gain cancels in R. Error bars propagate the empirical variances of
    |z|^2 through R; set ps_within_all when the heralded shots are a
    subset of the all-shot average so the covariance is subtracted.
    """
    if ps.count < 2 or all_.count < 2:
        raise NoSignalError("need at least two samples in each population")
    m_ps, m_all = ps.mean, all_.mean
    if m_all <= 0.0:
        raise NoSignalError("all-shot power is not positive")
    ratio = m_ps / m_all
    var_r = ratio**2 * (ps.variance / (ps.count * m_ps**2)
                        + all_.variance / (all_.count * m_all**2))
    if ps_within_all:
        var_r -= ratio**2 * 2.0 * ps.variance / (all_.count * m_ps * m_all)
    ratio_stderr = math.sqrt(max(var_r, 0.0))
    if ratio <= 1.0:
        raise NoSignalError(
            f"heralded power ratio {ratio:.4f} <= 1; no photon-addition signal")
    n_ex = eta_herald * (n_th + 1.0) / (ratio - 1.0) - (n_th + 1.0)
    dn_dr = eta_herald * (n_th + 1.0) / (ratio - 1.0) ** 2
    return ExcessNoiseResult(
        n_ex=n_ex, n_ex_stderr=dn_dr * ratio_stderr,
        ratio=ratio, ratio_stderr=ratio_stderr,
        n_heralded=ps.count, n_total=all_.count)


def excess_noise_from_samples(z_ps: np.ndarray, z_all: np.ndarray, n_th: float,
                              eta_herald: float,
                              ps_within_all: bool = False) -> ExcessNoiseResult:
    """Convenience wrapper of extract_excess_noise for in-memory samples."""
    acc_ps = MomentAccumulator()
    acc_ps.update(np.abs(np.asarray(z_ps)) ** 2)
    acc_all = MomentAccumulator()
    acc_all.update(np.abs(np.asarray(z_all)) ** 2)
    return extract_excess_noise(acc_ps, acc_all, n_th, eta_herald,
                                ps_within_all=ps_within_all)


def histogram2d_with_overflow(z: np.ndarray, extent: float, bins: int = 41,
                              ) -> tuple[np.ndarray, int]:
    """Square quadrature histogram plus the count that fell outside."""
    zz = np.asarray(z)
    edges = np.linspace(-extent, extent, bins + 1)
    counts, _, _ = np.histogram2d(zz.real, zz.imag, bins=(edges, edges))
    overflow = zz.size - int(counts.sum())
    return counts.astype(np.int64), overflow


@dataclass(frozen=True)
class RadialDiff:
    """Radial histogram difference between two quadrature populations."""

    r_centers: np.ndarray
    diff: np.ndarray
    sigma: np.ndarray
    counts_a: np.ndarray
    counts_b: np.ndarray
    n_a: int
    n_b: int

    def chi2_null(self, min_count: int = 5) -> tuple[float, int]:
        """Chi-squared of diff against zero, skipping starved bins."""
        keep = (self.counts_a + self.counts_b) >= min_count
        keep &= self.sigma > 0.0
        dof = int(np.count_nonzero(keep))
        if dof == 0:
            raise NoSignalError("no radial bins with enough counts")
        chi2 = float(np.sum((self.diff[keep] / self.sigma[keep]) ** 2))
        return chi2, dof


def histogram_diff_radial(z_a: np.ndarray, z_b: np.ndarray, r_max: float,
                          n_bins: int = 40) -> RadialDiff:
    """Per-shot radial density difference of two populations.

    diff is the per-bin probability difference between populations a and
    b; sigma is the Poisson error of that difference. The heralded minus
    unheralded version of this curve shows the photon-addition dip at the
    origin and the excess ring at one thermal radius.
    """
    za, zb = np.asarray(z_a), np.asarray(z_b)
    if za.size == 0 or zb.size == 0:
        raise NoSignalError("empty population")
    edges = np.linspace(0.0, r_max, n_bins + 1)
    c_a, _ = np.histogram(np.abs(za), bins=edges)
    c_b, _ = np.histogram(np.abs(zb), bins=edges)
    p_a = c_a / za.size
    p_b = c_b / zb.size
    sigma = np.sqrt(c_a / za.size**2 + c_b / zb.size**2)
    centers = 0.5 * (edges[:-1] + edges[1:])
    return RadialDiff(r_centers=centers, diff=p_a - p_b, sigma=sigma,
                      counts_a=c_a.astype(np.int64), counts_b=c_b.astype(np.int64),
                      n_a=int(za.size), n_b=int(zb.size))


def subsample_control(z: np.ndarray, n_pick: int, seed: int = 0,
                      ) -> tuple[np.ndarray, np.ndarray]:
    """Random split of one population into (picked, rest) for null tests.

    A radial difference between the two halves should be statistically
    flat; a structured difference flags an analysis artifact rather than
    a physical effect.
    """
    zz = np.asarray(z)
    if not 0 < n_pick < zz.size:
        raise InconsistentCountsError(
            f"cannot pick {n_pick} of {zz.size} samples")
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    idx = rng.permutation(zz.size)
    return zz[idx[:n_pick]], zz[idx[n_pick:]]
