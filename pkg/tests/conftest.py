"""Shared fixtures: the standard-run parameter point and its long runs.

The long integrations are session-scoped so the acceptance criteria and
the diagnostics tests share them instead of re-integrating.
"""

import dataclasses

import pytest

import momentous as mm

PRESET_GRID = mm.IntegratorConfig(dt=1e-3, t_end=80.0, sample_every=100)
LONG_GRID = mm.IntegratorConfig(dt=1e-3, t_end=200.0, sample_every=100)


@pytest.fixture(scope="session")
def params():
    """Standard run: gamma=0.08, omega=omega'=Omega=1.5, lambda=0.04,
    m=hbar=1, n=3 (the package defaults)."""
    p = mm.ModelParams()
    assert p.equivalence_mode
    return p


@pytest.fixture(scope="session")
def sbth_run(params):
    means0, cov0 = mm.coherent_initial_state(params)
    return mm.integrate(mm.build_sbth(params), means0, cov0, PRESET_GRID)


@pytest.fixture(scope="session")
def sbth_run_long(params):
    means0, cov0 = mm.coherent_initial_state(params)
    return mm.integrate(mm.build_sbth(params), means0, cov0, LONG_GRID)


@pytest.fixture(scope="session")
def lindblad_runs_long(params):
    """Thermal runs to t=200 keyed by nbar."""
    out = {}
    for nbar in (0.0, 1.0, 2.0):
        p = dataclasses.replace(params, nbar=nbar)
        means0, cov0 = mm.coherent_initial_state(p, mm.L1)
        out[nbar] = mm.integrate(mm.build_lindblad(p), means0, cov0, LONG_GRID)
    return out


@pytest.fixture(scope="session")
def lindblad_run(params):
    """nbar=0 thermal run on the standard grid (matches sbth_run)."""
    means0, cov0 = mm.coherent_initial_state(params, mm.L1)
    return mm.integrate(mm.build_lindblad(params), means0, cov0, PRESET_GRID)
