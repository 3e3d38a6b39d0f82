"""Lumped and distributed circuit model of the microwave readout chain."""
from __future__ import annotations

import math
import warnings

import numpy as np
import pytest

import transducersim as ts
from transducersim import circuit
from transducersim.constants import TWO_PI


@pytest.fixture(scope="module")
def chain(cfg):
    return circuit.circuit_from_config(cfg.circuit)


def test_rlc_resonance_frozen(chain):
    rlc, _, _, _ = chain
    f0, q, lw = rlc.resonance()
    assert f0 == pytest.approx(3596819695.525342, rel=1e-9)
    assert q == pytest.approx(10270.426203265763, rel=1e-9)
    assert lw == pytest.approx(350211.3373232393, rel=1e-9)
    assert lw == pytest.approx(f0 / q, rel=1e-12)


def test_rlc_validation():
    with pytest.raises(ts.ConfigError):
        circuit.MechanicalRLC(l_m=-1e-9, c_m=1e-15, r_m=1e6)
    with pytest.raises(ts.ConfigError):
        circuit.MechanicalRLC(l_m=1e-9, c_m=0.0, r_m=1e6)


def test_line_from_fsr(chain):
    _, _, _, line = chain
    assert line.velocity == pytest.approx(2.0 * 0.065 * 110e6, rel=1e-12)
    assert line.fsr_hz == pytest.approx(110e6, rel=1e-12)
    with pytest.raises(ts.ConfigError):
        circuit.TransmissionLine.from_fsr(1000.0, 0.065, 0.0, 50.0)
    with pytest.raises(ts.ConfigError):
        circuit.TransmissionLine(z0=-1.0, length=0.065, velocity=1e7,
                                 z_term=50.0)


def test_open_stub_reflection_is_unimodular(chain):
    _, _, _, line = chain
    freqs = np.linspace(3.3e9, 3.9e9, 4001)
    s11 = line.s11_open_far(freqs)
    assert np.max(np.abs(np.abs(s11) - 1.0)) < 1e-12


def test_group_delay_matches_phase_derivative(chain):
    _, _, _, line = chain
    df = 1e3
    for f in (3.575e9, 3.60e9, 3.62e9, 3.685e9):
        tau = float(line.group_delay(np.array([f]))[0])
        phases = np.angle(line.s11_open_far(np.array([f - df, f + df])))
        dphi = np.angle(np.exp(1j * (phases[1] - phases[0])))
        tau_num = -dphi / (TWO_PI * 2.0 * df)
        assert tau == pytest.approx(tau_num, rel=1e-4)


def test_group_delay_peaks_on_resonance(chain):
    _, _, _, line = chain
    # theta = pi (n + 1/2) kills the cosine, leaving 2 z0 (l/v) / z_term.
    tau_res = float(line.group_delay(np.array([3.575e9]))[0])
    expect = 2.0 * line.z0 * (line.length / line.velocity) / line.z_term
    assert tau_res == pytest.approx(expect, rel=1e-6)
    assert tau_res == pytest.approx(1.8181818181818182e-07, rel=1e-6)
    matched = line.with_termination(line.z0)
    taus = matched.group_delay(np.linspace(3.3e9, 3.9e9, 101))
    round_trip = 2.0 * line.length / line.velocity
    assert np.max(np.abs(taus - round_trip)) < 1e-20


def test_standing_wave_resonances(chain):
    _, _, _, line = chain
    res = line.resonances(3.5e9, 3.7e9)
    assert np.allclose(res, [3.575e9, 3.685e9], rtol=1e-12)
    low = line.resonances(-1e9, 2e8)
    assert np.allclose(low, [5.5e7, 1.65e8], rtol=1e-12)


def test_input_impedance_limits(chain):
    _, _, _, line = chain
    # Matched load is invisible at every frequency.
    z_matched = line.input_impedance(np.array([3.55e9, 3.62e9]),
                                     z_load=line.z0)
    assert np.allclose(z_matched, line.z0, rtol=1e-12)
    # Open quarter-wave stub shorts out on resonance.
    z_open = line.input_impedance(np.array([3.575e9]), z_load=math.inf)
    assert abs(z_open[0]) < 1e-9 * line.z0


def test_kappa_line_leakage_frozen(chain):
    _, _, _, line = chain
    kappa = circuit.kappa_line_leakage(line)
    assert kappa / TWO_PI == pytest.approx(3175880.9505865728, rel=1e-9)
    gamma = (line.z_term - line.z0) / (line.z_term + line.z0)
    assert kappa == pytest.approx(line.fsr_hz * (1.0 - gamma**2), rel=1e-12)
    matched = line.with_termination(line.z0)
    assert circuit.kappa_line_leakage(matched) == pytest.approx(
        line.fsr_hz, rel=1e-12)


def test_wirebond_chain_matrix(chain):
    _, _, bond, _ = chain
    abcd = bond.abcd(3.6e9)
    det = abcd[0, 0] * abcd[1, 1] - abcd[0, 1] * abcd[1, 0]
    assert abs(det - 1.0) < 1e-12
    z = bond.series_impedance(3.6e9)
    assert z.real == pytest.approx(0.4, rel=1e-12)


def test_ideal_zero_length_bond_is_identity():
    bond = circuit.Wirebond(l_per_m=1e-6, c_p_per_m=26.67e-12,
                            c_pwb_per_m=12e-12, r_contact=0.0,
                            c_contact=math.inf, length=0.0)
    for z_load in (50.0 + 0.0j, 17.0 - 4.0j):
        assert bond.transform(3.6e9, z_load) == pytest.approx(z_load,
                                                              rel=1e-12)


def test_wirebond_parallel_wires_add_pad_capacitance():
    kwargs = dict(l_per_m=1e-6, c_p_per_m=26.67e-12, c_pwb_per_m=12e-12,
                  r_contact=0.4, c_contact=20e-12, length=0.75e-3)
    one = circuit.Wirebond(**kwargs)
    three = circuit.Wirebond(**kwargs, n_wires=3)
    assert one.shunt_capacitance == pytest.approx(26.67e-12 * 0.75e-3,
                                                  rel=1e-12)
    assert three.shunt_capacitance == pytest.approx(
        (26.67e-12 + 2 * 12e-12) * 0.75e-3, rel=1e-12)


def test_wirebond_validation():
    good = dict(l_per_m=1e-6, c_p_per_m=26.67e-12, c_pwb_per_m=12e-12,
                r_contact=0.4, c_contact=20e-12, length=0.75e-3)
    with pytest.raises(ts.ConfigError):
        circuit.Wirebond(**{**good, "length": -1e-3})
    with pytest.raises(ts.ConfigError):
        circuit.Wirebond(**good, n_wires=0)
    with pytest.raises(ts.ConfigError, match="contact capacitance"):
        circuit.Wirebond(**{**good, "c_contact": 0.0})
    with pytest.raises(ts.ConfigError):
        circuit.Wirebond(**{**good, "l_per_m": -1e-6})


def test_coupling_rate_frozen(chain):
    rlc, c_0, bond, line = chain
    with warnings.catch_warnings():
        warnings.simplefilter("error")  # device point must not warn
        res = circuit.coupling_rate(rlc, c_0, bond, line)
    assert res.freq_hz == pytest.approx(rlc.resonance()[0], rel=1e-12)
    assert res.g / TWO_PI == pytest.approx(1197929.8928765662, rel=1e-9)
    assert res.gamma_wg == pytest.approx(515026.8327313077, rel=1e-9)
    assert res.g == pytest.approx(math.sqrt(res.gamma_wg * line.fsr_hz),
                                  rel=1e-12)
    # The lumped estimate lands within a factor of three of the measured
    # external coupling, which is as close as this chain model claims.
    assert res.g / TWO_PI / 424e3 < 3.0
    assert res.g / TWO_PI / 424e3 > 1.0


def test_coupling_topologies_differ(chain):
    rlc, c_0, bond, line = chain
    before = circuit.coupling_rate(rlc, c_0, bond, line,
                                   topology="c0_before_bond")
    after = circuit.coupling_rate(rlc, c_0, bond, line,
                                  topology="c0_after_bond")
    assert after.g / TWO_PI == pytest.approx(2754101.0705136717, rel=1e-9)
    assert after.g > before.g


def test_coupling_warns_off_resonance(chain):
    rlc, c_0, bond, line = chain
    with pytest.warns(UserWarning, match="single-mode coupling"):
        circuit.coupling_rate(rlc, c_0, bond, line, freq_hz=220e6)


def test_coupling_rate_guards(chain):
    rlc, c_0, bond, line = chain
    with pytest.raises(ts.ConfigError):
        circuit.coupling_rate(rlc, 0.0, bond, line)
    with pytest.raises(ts.ConfigError, match="topology"):
        circuit.coupling_rate(rlc, c_0, bond, line, topology="sideways")


def test_coupling_vs_length_sweep(chain):
    rlc, c_0, bond, line = chain
    lengths = np.linspace(0.1e-3, 2.0e-3, 8)
    with warnings.catch_warnings():
        warnings.simplefilter("error")  # sweep must swallow its warnings
        g = circuit.coupling_vs_length(rlc, c_0, bond, line, lengths)
    assert g.shape == (8,)
    assert np.all(np.isfinite(g)) and np.all(g > 0.0)
    k = int(np.searchsorted(lengths, 0.75e-3))
    ref = circuit.coupling_rate(rlc, c_0,
                                circuit.Wirebond(
                                    l_per_m=bond.l_per_m,
                                    c_p_per_m=bond.c_p_per_m,
                                    c_pwb_per_m=bond.c_pwb_per_m,
                                    r_contact=bond.r_contact,
                                    c_contact=bond.c_contact,
                                    length=float(lengths[k]),
                                    n_wires=bond.n_wires), line).g
    assert g[k] == pytest.approx(ref, rel=1e-12)


def test_circuit_from_config_missing_key(cfg):
    broken = dict(cfg.circuit)
    del broken["c_0_f"]
    with pytest.raises(ts.ConfigError, match=r"\[circuit\] missing key 'c_0_f'"):
        circuit.circuit_from_config(broken)


def test_circuit_from_config_types(chain):
    rlc, c_0, bond, line = chain
    assert isinstance(bond.n_wires, int) and bond.n_wires == 1
    assert c_0 == pytest.approx(0.11e-15, rel=1e-12)
    assert rlc.r_m == pytest.approx(45.4e6, rel=1e-12)
    assert line.z_term == pytest.approx(50.0, rel=1e-12)
