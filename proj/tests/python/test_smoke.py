"""Smoke tests for the python bindings: thin checks that the main operations
are reachable and self-consistent, not a re-test of the numerics."""

import math

import pytest

import gompertzopt as go


@pytest.fixture(scope="module")
def params():
    return go.ModelParams(r=0.01, delta=0.01, beta=0.077, gamma=0.67, zeta=0.5,
                          m0=0.00019)


@pytest.fixture(scope="module")
def efficacy():
    return go.EfficacyModel.isoelastic(0.1, 0.46)


@pytest.fixture(scope="module")
def curve(params, efficacy):
    grid = go.GridSpec()
    grid.n_points = 96
    return go.solve_u_star(params, efficacy, grid, 1e-8)


def test_params_roundtrip(params):
    assert params.beta == 0.077
    assert params.cbar() == pytest.approx(0.01)
    with pytest.raises(go.ValidationError):
        go.ModelParams(r=0.01, delta=0.01, beta=0.077, gamma=1.0, zeta=0.5)


def test_baselines(params):
    assert go.c0(0.0, params) == pytest.approx(0.01)
    for m in (1e-4, 0.01, 1.0):
        assert go.u0(m, params) == pytest.approx(go.u0_gamma_form(m, params),
                                                 rel=1e-8)


def test_solver_and_policy(params, efficacy, curve):
    assert len(curve) == 96
    u = curve.u
    assert all(b > a for a, b in zip(u, u[1:]))
    assert 0.0 < curve.beta_g < params.beta
    c, h = go.controls(0.01, curve, params, efficacy)
    assert c > 0 and h > 0
    assert go.value_function(2.0, params.m0, curve, params, efficacy) == \
        pytest.approx(2 ** 0.33 * go.value_function(1.0, params.m0, curve,
                                                    params, efficacy))


def test_age_profile(params, efficacy, curve):
    prof = go.endogenous_mortality(params, efficacy, curve, 0.0, 90.0, 0.0,
                                   params.m0, 91)
    assert prof.mortality[0] == pytest.approx(params.m0)
    assert prof.mortality[80] < params.m0 * math.exp(params.beta * 80)


def test_simulation(params, efficacy, curve):
    cfg = go.SimConfig()
    cfg.n_paths = 2000
    cfg.horizon = 150.0
    cfg.seed = 1
    out = go.simulate_analytic(params, efficacy, curve, cfg)
    v = go.value_function(1.0, params.m0, curve, params, efficacy)
    assert abs(out.mean - v) < 4 * out.std_err + out.truncation_bound
    rerun = go.simulate_analytic(params, efficacy, curve, cfg)
    assert rerun.welfare == out.welfare


def test_gompertz_fit():
    table = go.CohortTable()
    table.ages = [float(a) for a in range(30, 80)]
    table.hazards = [2e-4 * math.exp(0.08 * a) for a in range(30, 80)]
    fit = go.fit_gompertz(table, 0.0)
    assert fit.values["beta"] == pytest.approx(0.08, rel=1e-9)
    assert fit.values["m0"] == pytest.approx(2e-4, rel=1e-9)
    assert fit.converged
