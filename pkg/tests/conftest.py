"""Shared fixtures: the bundled device and quantities derived from it."""
from __future__ import annotations

import warnings

import pytest

import transducersim as ts
from transducersim.model import derive_rates


@pytest.fixture(scope="session")
def cfg() -> ts.FullConfig:
    return ts.load_config()


@pytest.fixture(scope="session")
def params(cfg) -> ts.TransducerParams:
    return cfg.params


@pytest.fixture(scope="session")
def rates(params) -> ts.DerivedRates:
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return derive_rates(params.optical, params.microwave, params.pump)


@pytest.fixture(scope="session")
def device_mode(params) -> ts.TemporalMode:
    """Single-phonon emission record of the bundled device, pump off."""
    p = params
    return ts.emit_single_phonon(p.microwave.g, p.microwave.kappa,
                                 p.microwave.kappa_ext,
                                 p.mechanical.gamma_i(pump_on=False))
