"""Mode containers, derived rates, and the closed-form efficiency."""
from __future__ import annotations

import math

import pytest
from hypothesis import given, strategies as st

import transducersim as ts
from transducersim.constants import TWO_PI, bose_occupation
from transducersim.model import (
    DerivedRates,
    EfficiencyBudget,
    MechanicalMode,
    MicrowaveMode,
    OpticalMode,
    PumpConfig,
    budget_products,
    derive_rates,
    pair_probability,
    peak_efficiency,
)


def test_from_hz_multiplies_by_two_pi():
    m = OpticalMode.from_hz(193.53e12, 1.122e9, 0.561e9, 413e3)
    assert m.omega == pytest.approx(TWO_PI * 193.53e12, rel=1e-15)
    assert m.kappa == pytest.approx(TWO_PI * 1.122e9, rel=1e-15)
    assert m.eta == pytest.approx(0.5, rel=1e-12)


@given(st.floats(min_value=1e3, max_value=1e15),
       st.floats(min_value=1e2, max_value=1e10))
def test_from_hz_scaling_property(omega_hz, kappa_hz):
    m = MicrowaveMode.from_hz(omega_hz, kappa_hz, kappa_hz / 2.0, kappa_hz / 10.0)
    assert m.omega / omega_hz == pytest.approx(TWO_PI, rel=1e-12)
    assert m.kappa / kappa_hz == pytest.approx(TWO_PI, rel=1e-12)
    assert m.kappa_int == pytest.approx(m.kappa - m.kappa_ext, rel=1e-12)


def test_mode_validation_rejects_bad_values():
    with pytest.raises(ts.ConfigError):
        OpticalMode(omega=-1.0, kappa=1.0, kappa_ext=0.5, g0=1.0)
    with pytest.raises(ts.ConfigError):
        OpticalMode(omega=1.0, kappa=1.0, kappa_ext=2.0, g0=1.0)
    with pytest.raises(ts.ConfigError):
        MechanicalMode(omega=1.0, gamma_i_pump_on=1.0, gamma_i_pump_off=1.0,
                       jitter_rms=-1.0)
    with pytest.raises(ts.ConfigError):
        MicrowaveMode(omega=1.0, kappa=1.0, kappa_ext=1.5, g=1.0)
    with pytest.raises(ts.ConfigError):
        PumpConfig(detuning="sideways", n_photons=1.0, tau=1e-9, rep_rate=1e3)
    with pytest.raises(ts.ConfigError):
        EfficiencyBudget(eta_o=0.5, eta_mu=1.2, eta_in_fridge=0.5,
                         eta_filters=0.5, eta_spd=0.5, eta_circ=0.5)


def test_gamma_i_selects_pump_state():
    m = MechanicalMode.from_hz(3.596e9, 1.07e6, 0.36e6)
    assert m.gamma_i(pump_on=True) == pytest.approx(TWO_PI * 1.07e6, rel=1e-15)
    assert m.gamma_i(pump_on=False) == pytest.approx(TWO_PI * 0.36e6, rel=1e-15)


def test_derived_rates_frozen_values(rates):
    assert rates.G_o / TWO_PI == pytest.approx(9597252.73190198, rel=1e-12)
    assert rates.gamma_om / TWO_PI == pytest.approx(328368.128342246, rel=1e-12)
    assert rates.gamma_mu / TWO_PI == pytest.approx(235001.30718954248, rel=1e-12)


def test_derive_rates_warns_when_cavity_not_fast(params):
    # The bundled microwave resonance sits at g / kappa = 0.139 > 0.1.
    with pytest.warns(UserWarning, match="microwave cavity not fast"):
        derive_rates(params.optical, params.microwave, params.pump)
    hot = PumpConfig(detuning="red", n_photons=1e6, tau=20e-9, rep_rate=170e3)
    with pytest.warns(UserWarning, match="optical cavity not fast"):
        derive_rates(params.optical, params.microwave, hot)


def test_peak_efficiency_algebra(params, rates):
    gamma_i = params.mechanical.gamma_i(pump_on=True)
    eta = peak_efficiency(params, rates, gamma_i)
    expected = (params.optical.eta * params.microwave.eta
                * 4.0 * rates.gamma_om * rates.gamma_mu
                / (gamma_i + rates.gamma_om + rates.gamma_mu) ** 2)
    assert eta == pytest.approx(expected, rel=1e-15)
    assert eta == pytest.approx(0.05747044754953244, rel=1e-12)
    with pytest.raises(ts.ConfigError):
        peak_efficiency(params, rates, 0.0)


def test_resonant_copy_moves_only_microwave_frequency(params):
    r = params.resonant_copy()
    assert r.microwave.omega == params.mechanical.omega
    assert r.microwave.kappa == params.microwave.kappa
    assert r.optical is params.optical
    # The measured device carries a 200 kHz offset.
    off = (params.microwave.omega - params.mechanical.omega) / TWO_PI
    assert off == pytest.approx(-200e3, rel=1e-6)


def test_pair_probability_requires_blue_pump(rates, params):
    with pytest.raises(ts.DetuningError):
        pair_probability(rates, params.pump)
    blue = PumpConfig(detuning="blue", n_photons=540.0, tau=20e-9,
                      rep_rate=170e3)
    p = pair_probability(rates, blue)
    assert p == pytest.approx(rates.gamma_om * 20e-9, rel=1e-15)
    long_pulse = PumpConfig(detuning="blue", n_photons=540.0, tau=100e-9,
                            rep_rate=170e3)
    with pytest.warns(UserWarning, match="perturbative"):
        pair_probability(rates, long_pulse)


def test_budget_products_frozen(params):
    eta_sys, eta_setup = budget_products(params.budget)
    assert eta_sys == pytest.approx(0.012382500000000001, rel=1e-12)
    assert eta_setup == pytest.approx(0.01936242, rel=1e-12)
    # spd_path falls back to the product when not measured separately.
    b = EfficiencyBudget(eta_o=0.5, eta_mu=0.9, eta_in_fridge=0.25,
                         eta_filters=0.2, eta_spd=0.6, eta_circ=0.8)
    assert b.spd_path == pytest.approx(0.12, rel=1e-12)


def test_bose_occupation_limits():
    omega = TWO_PI * 3.5958e9
    assert bose_occupation(omega, 0.0) == 0.0
    assert bose_occupation(omega, -4.0) == 0.0
    # High-temperature limit kB T / hbar w, good to the half-quantum term.
    n = bose_occupation(omega, 295.0)
    x = 1.054571817e-34 * omega / (1.380649e-23 * 295.0)
    assert n == pytest.approx(1.0 / x - 0.5, abs=0.1)
    with pytest.raises(ValueError):
        bose_occupation(0.0, 1.0)


def test_derived_rates_match_hand_formula():
    opt = OpticalMode.from_hz(193.53e12, 1.122e9, 0.561e9, 413e3)
    mw = MicrowaveMode.from_hz(3.5958e9, 3.06e6, 3.04e6, 200e3)
    pump = PumpConfig(detuning="red", n_photons=100.0, tau=20e-9, rep_rate=1e5)
    r = derive_rates(opt, mw, pump)
    assert r.G_o == pytest.approx(10.0 * opt.g0, rel=1e-15)
    assert r.gamma_om == pytest.approx(4.0 * r.G_o**2 / opt.kappa, rel=1e-15)
    assert r.gamma_mu == pytest.approx(4.0 * mw.g**2 / mw.kappa, rel=1e-15)
    assert isinstance(r, DerivedRates)
