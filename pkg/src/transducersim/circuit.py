"""Lumped and distributed circuit model of the microwave port.

The piezoelectric mechanical mode is represented by its motional RLC
equivalent; it couples through a small series capacitor and a wirebond
transition into a high-impedance transmission line read out at its far
end. Everything here works in engineering units (Hz, ohms, henries,
farads); conversion rates back into the rad/s world happen only in the
returned coupling figures, which are documented per function.

The wirebond transition is a symmetric pi network: half the pad shunt
capacitance on each side of a series branch with the bond inductance,
contact resistance, and contact capacitance. A zero-length bond with
ideal contacts reduces exactly to the identity two-port.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace

import numpy as np

from .constants import TWO_PI
from .errors import ConfigError


@dataclass(frozen=True)
class MechanicalRLC:
    """Motional equivalent of the mechanical resonance (parallel loss)."""

    l_m: float
    c_m: float
    r_m: float

    def __post_init__(self):
        if self.l_m <= 0.0 or self.c_m <= 0.0 or self.r_m <= 0.0:
            raise ConfigError("RLC elements must be positive")

    def resonance(self) -> tuple[float, float, float]:
        """Returns (f0_hz, quality_factor, linewidth_hz)."""
        f0 = 1.0 / (TWO_PI * math.sqrt(self.l_m * self.c_m))
        q = self.r_m * math.sqrt(self.c_m / self.l_m)
        return f0, q, f0 / q


@dataclass(frozen=True)
class TransmissionLine:
    """Uniform line of impedance z0 read out through z_term at one end."""

    z0: float
    length: float
    velocity: float
    z_term: float

    def __post_init__(self):
        if min(self.z0, self.length, self.velocity, self.z_term) <= 0.0:
            raise ConfigError("line parameters must be positive")

    @classmethod
    def from_fsr(cls, z0: float, length: float, fsr_hz: float,
                 z_term: float) -> "TransmissionLine":
        """Fix the phase velocity from the measured free spectral range."""
        if fsr_hz <= 0.0:
            raise ConfigError("free spectral range must be positive")
        return cls(z0=z0, length=length, velocity=2.0 * length * fsr_hz,
                   z_term=z_term)

    @property
    def fsr_hz(self) -> float:
        return self.velocity / (2.0 * self.length)

    def with_termination(self, z_term: float) -> "TransmissionLine":
        return replace(self, z_term=z_term)

    def electrical_angle(self, freq_hz: np.ndarray) -> np.ndarray:
        return TWO_PI * np.asarray(freq_hz, dtype=float) * self.length / self.velocity

    def input_impedance(self, freq_hz: np.ndarray,
                        z_load: complex | None = None) -> np.ndarray:
        """Impedance looking into the line terminated by z_load.

        z_load defaults to the stored termination; pass math.inf for an
        open far end.
        """
        if z_load is None:
            z_load = self.z_term
        theta = self.electrical_angle(freq_hz)
        c, s = np.cos(theta), np.sin(theta)
        if math.isinf(abs(z_load)):
            with np.errstate(divide="ignore"):
                return -1j * self.z0 * c / s
        return self.z0 * (z_load * c + 1j * self.z0 * s) / (
            self.z0 * c + 1j * z_load * s)

    def s11_open_far(self, freq_hz: np.ndarray) -> np.ndarray:
        """Reflection at the readout port with the far end open.

        Referenced to z_term. The form in sines and cosines stays finite
        through the cot singularities; a lossless stub keeps |S11| = 1 at
        all frequencies, only the phase winds through each resonance.
        """
        theta = self.electrical_angle(freq_hz)
        u = self.z0 * np.cos(theta)
        w = self.z_term * np.sin(theta)
        return (-1j * u - w) / (-1j * u + w)

    def group_delay(self, freq_hz: np.ndarray) -> np.ndarray:
        """Group delay of s11_open_far, closed form.

        tau(f) = 2 z0 z_term (l / v) / (z0^2 cos^2 + z_term^2 sin^2);
        a matched termination flattens it to the round-trip time 2 l / v,
        a mismatch piles delay onto the standing-wave resonances.
        """
        theta = self.electrical_angle(freq_hz)
        denom = (self.z0 * np.cos(theta)) ** 2 + (self.z_term * np.sin(theta)) ** 2
        return 2.0 * self.z0 * self.z_term * (self.length / self.velocity) / denom

    def resonances(self, f_lo: float, f_hi: float) -> np.ndarray:
        """Standing-wave frequencies (n + 1/2) FSR inside [f_lo, f_hi]."""
        fsr = self.fsr_hz
        n_lo = math.ceil(f_lo / fsr - 0.5)
        n_hi = math.floor(f_hi / fsr - 0.5)
        return (np.arange(max(n_lo, 0), n_hi + 1) + 0.5) * fsr


def kappa_line_leakage(line: TransmissionLine) -> float:
    """Microwave energy decay rate (rad/s) from termination mismatch.

    Each round trip a power fraction 1 - |Gamma|^2 leaks through the
    termination, so kappa = FSR (1 - |Gamma|^2). A matched line has no
    resonance to speak of; a strong mismatch traps the mode and this
    estimate should land near the measured microwave linewidth.
    """
    gamma = (line.z_term - line.z0) / (line.z_term + line.z0)
    return line.fsr_hz * (1.0 - gamma**2)


@dataclass(frozen=True)
class Wirebond:
    """Bond-wire transition between chip and board.

    Per-length inductance and pad capacitance scale with the bond span;
    c_pwb_per_m adds pad capacitance per extra parallel wire. Contact
    resistance r_contact and series contact capacitance c_contact model
    the joints; c_contact = inf means a direct galvanic contact.
    """

    l_per_m: float
    c_p_per_m: float
    c_pwb_per_m: float
    r_contact: float
    c_contact: float
    length: float
    n_wires: int = 1

    def __post_init__(self):
        if self.length < 0.0 or self.n_wires < 1:
            raise ConfigError("bond length must be >= 0 and n_wires >= 1")
        if min(self.l_per_m, self.c_p_per_m, self.r_contact) < 0.0:
            raise ConfigError("bond elements must be nonnegative")
        if self.c_contact <= 0.0:
            raise ConfigError("contact capacitance must be positive (inf allowed)")

    @property
    def shunt_capacitance(self) -> float:
        per_m = self.c_p_per_m + self.c_pwb_per_m * (self.n_wires - 1)
        return per_m * self.length

    def series_impedance(self, freq_hz: float) -> complex:
        w = TWO_PI * freq_hz
        z = 1j * w * self.l_per_m * self.length + self.r_contact
        if not math.isinf(self.c_contact):
            z += 1.0 / (1j * w * self.c_contact)
        return z

    def abcd(self, freq_hz: float) -> np.ndarray:
        """Chain matrix of the pi network; det is exactly 1."""
        y_half = 1j * TWO_PI * freq_hz * self.shunt_capacitance / 2.0
        z_s = self.series_impedance(freq_hz)
        shunt = np.array([[1.0, 0.0], [y_half, 1.0]], dtype=complex)
        series = np.array([[1.0, z_s], [0.0, 1.0]], dtype=complex)
        return shunt @ series @ shunt

    def transform(self, freq_hz: float, z_load: complex) -> complex:
        a, b, c, d = self.abcd(freq_hz).ravel()
        return (a * z_load + b) / (c * z_load + d)


@dataclass(frozen=True)
class CouplingResult:
    """External coupling of the mechanical mode through the chain."""

    g: float
    gamma_wg: float
    z_chain: complex
    freq_hz: float


def coupling_rate(rlc: MechanicalRLC, c_coupling: float, bond: Wirebond,
                  line: TransmissionLine, freq_hz: float | None = None,
                  topology: str = "c0_before_bond") -> CouplingResult:
    """Mechanical-microwave coupling through the full readout chain.

    The matched-impedance line absorbs whatever crosses the coupling
    capacitor and the bond, so the dissipated fraction of the motional
    energy sets a waveguide decay rate gamma_wg = Re(1 / Z_chain) / C_m
    (rad/s). Concentrating that continuum onto one standing-wave mode of
    spacing FSR gives the discrete coupling g = sqrt(gamma_wg FSR)
    (rad/s). Topology picks whether the coupling capacitor sits between
    resonator and bond ("c0_before_bond") or on the board side
    ("c0_after_bond").

    Warns when the evaluation frequency is more than a quarter FSR from
    any standing-wave resonance of the physical line, where a single
    discrete mode stops being a good description.
    """
    if c_coupling <= 0.0:
        raise ConfigError("coupling capacitance must be positive")
    if topology not in ("c0_before_bond", "c0_after_bond"):
        raise ConfigError(f"unknown topology {topology!r}")
    if freq_hz is None:
        freq_hz = rlc.resonance()[0]
    z_c0 = 1.0 / (1j * TWO_PI * freq_hz * c_coupling)
    z_line = complex(line.z0)
    if topology == "c0_before_bond":
        z_chain = z_c0 + bond.transform(freq_hz, z_line)
    else:
        z_chain = bond.transform(freq_hz, z_c0 + z_line)

    fsr = line.fsr_hz
    nearest = (math.floor(freq_hz / fsr - 0.5) + 0.5) * fsr
    dist = min(abs(freq_hz - nearest), abs(freq_hz - nearest - fsr))
    if dist > fsr / 4.0:
        warnings.warn(
            f"mode at {freq_hz:.4g} Hz is {dist:.3g} Hz from the nearest "
            "line resonance; single-mode coupling is unreliable there",
            stacklevel=2)

    gamma_wg = (1.0 / z_chain).real / rlc.c_m
    g = math.sqrt(max(gamma_wg, 0.0) * fsr)
    return CouplingResult(g=g, gamma_wg=gamma_wg, z_chain=z_chain,
                          freq_hz=freq_hz)


def coupling_vs_length(rlc: MechanicalRLC, c_coupling: float, bond: Wirebond,
                       line: TransmissionLine, lengths: np.ndarray,
                       freq_hz: float | None = None,
                       topology: str = "c0_before_bond") -> np.ndarray:
    """Coupling rate swept over the bond length (rad/s array)."""
    out = np.empty(len(lengths))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        for k, ell in enumerate(np.asarray(lengths, dtype=float)):
            b = replace(bond, length=float(ell))
            out[k] = coupling_rate(rlc, c_coupling, b, line, freq_hz,
                                   topology).g
    return out


def circuit_from_config(circ: dict) -> tuple[MechanicalRLC, float, Wirebond,
                                             TransmissionLine]:
    """Build the chain elements from a [circuit] config section."""
    try:
        rlc = MechanicalRLC(l_m=circ["l_m_h"], c_m=circ["c_m_f"],
                            r_m=circ["r_m_ohm"])
        bond = Wirebond(
            l_per_m=circ["bond_l_per_m"],
            c_p_per_m=circ["bond_c_p_per_m"],
            c_pwb_per_m=circ["bond_c_pwb_per_m"],
            r_contact=circ["bond_r_wb_ohm"],
            c_contact=circ["bond_c_wb_f"],
            length=circ["bond_length_m"],
            n_wires=int(circ["bond_n_wb"]),
        )
        line = TransmissionLine.from_fsr(
            z0=circ["line_z0_ohm"], length=circ["line_length_m"],
            fsr_hz=circ["line_fsr_hz"], z_term=circ["line_termination_ohm"])
        c_0 = circ["c_0_f"]
    except KeyError as exc:
        raise ConfigError(f"[circuit] missing key {exc.args[0]!r}") from exc
    return rlc, c_0, bond, line
