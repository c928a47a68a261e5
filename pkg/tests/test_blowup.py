"""Comparison-ODE oracle, zero-mode identities, lifespan detection and fits."""

from __future__ import annotations

import math
import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.special import beta

from liewave import kernels
from liewave._kernels_py import integrate_blowup as integrate_py
from liewave.blowup import (U1_POSITIVE, U1_ZERO, LifespanRecord, OracleDisagreement,
                            blowup_time_integration, blowup_time_quadrature, detect_lifespan,
                            epsilon_grid, fit_lifespan_scaling, jensen_check, kato_blowup_time,
                            leading_tail, oracle_records, predicted_exponent, zero_mode_series)
from liewave.groups import GroupSpec
from liewave.solver import SolverConfig, integrate

PS = (1.5, 2.0, 3.0, 5.0)
T1 = GroupSpec.torus(1, 16)


def closed_form_velocity(p):
    """T*(p, 0, 1) = c^(-1/m) B(1/m, 1/2 - 1/m) / m with m = p + 1, c = 2/m."""
    m = p + 1
    return (2 / m) ** (-1 / m) * beta(1 / m, 0.5 - 1 / m) / m


def closed_form_position(p):
    """T*(p, 1, 0) = sqrt(m/2) B(1/2 - 1/m, 1/2) / m."""
    m = p + 1
    return math.sqrt(m / 2) * beta(0.5 - 1 / m, 0.5) / m


# Frozen reference values (closed forms above evaluated once).
FROZEN = {
    (2.0, 0.0, 1.0): 3.2101956532389258,
    (3.0, 1.0, 0.0): 1.8540746773013719,
    (2.0, 0.0, 0.5): 4.044593077796748,
    (5.0, 0.0, 1.0): 1.6839323081718283,
}


@pytest.mark.parametrize("p", PS)
def test_oracle_matches_beta_closed_forms(p):
    assert kato_blowup_time(p, 0.0, 1.0) == pytest.approx(closed_form_velocity(p), rel=1e-12)
    assert kato_blowup_time(p, 1.0, 0.0) == pytest.approx(closed_form_position(p), rel=1e-12)


@pytest.mark.parametrize("args", sorted(FROZEN))
def test_frozen_values(args):
    assert kato_blowup_time(*args) == pytest.approx(FROZEN[args], rel=1e-12)


@given(st.sampled_from(PS), st.floats(0, 1e3), st.floats(0, 1e3))
def test_two_oracle_paths_agree(p, a, b):
    if a == 0 and b == 0:
        return
    q = blowup_time_quadrature(p, a, b)
    r = blowup_time_integration(p, a, b)
    assert abs(q - r) <= 1e-8 * q


@pytest.mark.parametrize("p", PS)
def test_paths_agree_over_six_decades(p):
    for e in np.logspace(-3, 3, 7):
        for a, b in ((0.0, e), (e, 0.0), (e, e)):
            q = blowup_time_quadrature(p, a, b)
            assert abs(blowup_time_integration(p, a, b) - q) <= 1e-8 * q


@given(st.sampled_from(PS), st.floats(-3, 3))
def test_velocity_scaling_identity(p, log_eps):
    eps = 10.0**log_eps
    ref = kato_blowup_time(p, 0.0, 1.0)
    assert kato_blowup_time(p, 0.0, eps) * eps ** ((p - 1) / (p + 1)) == pytest.approx(ref, rel=1e-8)


@given(st.sampled_from(PS), st.floats(-3, 3))
def test_position_scaling_identity(p, log_eps):
    eps = 10.0**log_eps
    ref = kato_blowup_time(p, 0.7, 0.0) * 1.0
    val = kato_blowup_time(p, 0.7 * eps, 0.0) * eps ** ((p - 1) / 2)
    assert val == pytest.approx(ref, rel=1e-8)


@pytest.mark.parametrize("p", PS)
def test_decade_ratio(p):
    r = kato_blowup_time(p, 0.0, 1e-2) / kato_blowup_time(p, 0.0, 1e-1)
    assert r == pytest.approx(10 ** ((p - 1) / (p + 1)), rel=1e-8)


@given(st.sampled_from(PS), st.floats(0, 10), st.floats(0, 10), st.floats(0, 5))
def test_monotone_in_each_argument(p, a, b, d):
    if a == 0 and b == 0:
        return
    t = kato_blowup_time(p, a, b)
    assert kato_blowup_time(p, a + d, b) <= t * (1 + 1e-12)
    assert kato_blowup_time(p, a, b + d) <= t * (1 + 1e-12)


def test_zero_data_never_blows_up():
    assert kato_blowup_time(2.0, 0.0, 0.0) == math.inf


def test_invalid_oracle_inputs():
    with pytest.raises(ValueError):
        kato_blowup_time(1.0, 0.0, 1.0)
    with pytest.raises(ValueError):
        kato_blowup_time(2.0, -1.0, 1.0)


def test_disagreement_is_raised():
    with pytest.raises(OracleDisagreement):
        kato_blowup_time(2.0, 0.0, 1.0, rtol=1e-30)


@pytest.mark.parametrize("p", PS)
def test_leading_tail_asymptotics(p):
    """Far along the trajectory the closed-form tail equals the exact remaining time."""
    U = 1e6
    V = math.sqrt(1.0 + 2 * U ** (p + 1) / (p + 1))  # energy E = 1
    exact = blowup_time_quadrature(p, U, V)
    assert leading_tail(p, U, 1.0) == pytest.approx(exact, rel=1e-9)


def test_compiled_and_python_kernels_agree():
    if kernels.BACKEND != "compiled":
        pytest.skip("extension not built")
    from liewave._kernels import integrate_blowup as integrate_c

    for p, a, b in ((2.0, 0.0, 1.0), (3.0, 1.0, 0.0), (1.5, 0.2, 0.3)):
        args = (p, a, b, 1e-3, 1e-3, 1e10, 10**7)
        assert integrate_c(*args) == integrate_py(*args)


def test_pure_python_fallback_selected_by_environment():
    env = dict(os.environ, LIEWAVE_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", "from liewave import kernels; print(kernels.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"


# zero-mode series and Jensen

def test_linear_zero_mode_is_exact():
    cfg = SolverConfig(T1, 2.0, 0.3, "constant(0)", "constant(2)", dt=0.1, t_end=5.0,
                       nonlinear=False, guard=False)
    s = zero_mode_series(integrate(cfg))
    assert np.max(np.abs(s.values - 0.6 * s.times)) <= 1e-13
    np.testing.assert_allclose(s.derivatives, 0.6, rtol=0, atol=1e-15)


def test_initial_zero_mode_values():
    cfg = SolverConfig(T1, 2.0, 0.3, "constant(0.5)+0.2*cosine(2)", "constant(2)", dt=0.1,
                       t_end=1.0, guard=False)
    s = zero_mode_series(integrate(cfg))
    assert s.values[0] == pytest.approx(0.15)
    assert s.derivatives[0] == pytest.approx(0.6)


@pytest.mark.parametrize("u0", ["constant(0)", "constant(0.5)+0.1*cosine(1)", "random(5, 3)"])
def test_jensen_and_identity_along_blowup(u0):
    dt = 0.01
    cfg = SolverConfig(T1, 2.0, 0.5, u0, "constant(1)", dt=dt, t_end=50.0, guard=False)
    traj = integrate(cfg, keep_every=0)
    assert traj.outcome == "blowup"
    chk = jensen_check(zero_mode_series(traj), 2.0)
    assert chk.identity_residual <= dt**2
    assert chk.jensen_margin >= -(dt**2)
    assert chk.integrated_residual <= dt**2


def test_constant_run_matches_oracle_zero_mode():
    cfg = SolverConfig(T1, 3.0, 1.0, "constant(0.5)", "constant(0.2)", dt=0.005, t_end=1.0,
                       guard=False, adaptive=False)
    traj = integrate(cfg, keep_every=0)
    _, U, _, _ = integrate_py(3.0, 0.5, 0.2, 1e-4, 1.0, math.inf, 10_000)
    # reference: fine RK4 to t = 1 (10000 steps of 1e-4)
    assert traj.final.u.zero_mode.real == pytest.approx(U, rel=1e-4)


# detection

def test_linear_run_has_no_lifespan():
    cfg = SolverConfig(T1, 2.0, 1.0, "constant(0)", "constant(1)", dt=0.1, t_end=10.0,
                       nonlinear=False, guard=False)
    traj = integrate(cfg)
    assert traj.outcome == "completed"
    assert detect_lifespan(traj) is None


def test_threshold_stability_and_tail_extrapolation():
    cfg = SolverConfig(T1, 2.0, 0.5, "constant(0)", "constant(1)", dt=0.005, t_end=20, guard=False)
    rec = integrate(cfg, keep_every=0).record
    oracle = kato_blowup_time(2.0, 0.0, 0.5)
    assert rec.stable and rec.resolved
    assert abs(rec.check_T - rec.detected_T) < 0.01 * rec.detected_T
    assert rec.detected_T < rec.check_T <= oracle * (1 + 1e-4)
    assert abs(rec.extrapolated_T - oracle) < abs(rec.detected_T - oracle)
    assert rec.case == U1_POSITIVE and rec.group == "T1"


def test_record_case_for_zero_velocity():
    cfg = SolverConfig(T1, 3.0, 1.0, "constant(1)", "constant(0)", dt=0.01, t_end=20, guard=False)
    assert integrate(cfg, keep_every=0).record.case == U1_ZERO


# fits

def test_predicted_exponents():
    assert predicted_exponent(2.0, U1_POSITIVE) == pytest.approx(-1 / 3)
    assert predicted_exponent(3.0, U1_ZERO) == pytest.approx(-1.0)
    with pytest.raises(ValueError):
        predicted_exponent(2.0, "other")


@pytest.mark.parametrize("p", PS)
@pytest.mark.parametrize("u0, u1", [(0.0, 1.0), (1.0, 0.0)])
def test_fitter_on_oracle_records(p, u0, u1):
    fit = fit_lifespan_scaling(oracle_records(p, epsilon_grid(1e-2, 1e2, 8), u0, u1))
    assert fit.deviation <= 1e-6
    assert fit.decades == pytest.approx(4.0)


def _rec(eps, **kw):
    base = dict(epsilon=eps, p=2.0, profile="x", detected_T=eps ** (-1 / 3), threshold=1e8,
                dt_policy="d", resolved=True)
    base.update(kw)
    return LifespanRecord(**base)


def test_fit_rejects_mixed_configurations():
    recs = [_rec(e) for e in (1e-2, 1e0)] + [_rec(e, profile="y") for e in (1e1, 1e2)]
    with pytest.raises(ValueError, match="mix"):
        fit_lifespan_scaling(recs)


def test_fit_rejects_unresolved_records():
    recs = [_rec(e) for e in (1e-2, 1e0, 1e2)] + [_rec(10.0, resolved=False)]
    with pytest.raises(ValueError, match="unresolved"):
        fit_lifespan_scaling(recs)


def test_fit_needs_four_decades():
    with pytest.raises(ValueError, match="decades"):
        fit_lifespan_scaling([_rec(e) for e in np.logspace(-1, 2, 5)])
    with pytest.raises(ValueError):
        fit_lifespan_scaling([])


def test_epsilon_grid():
    g = epsilon_grid(1e-2, 1e2, 8)
    assert len(g) == 8 and g[0] == pytest.approx(1e-2) and g[-1] == pytest.approx(1e2)
    assert np.allclose(np.diff(np.log(g)), np.log(1e4) / 7)


def test_jensen_skips_steps_below_roundoff():
    from liewave.blowup import RESOLVABLE, ZeroModeSeries

    t = np.linspace(0.0, 1.0, 101)
    h = np.diff(t)
    U = 1e-6 * t
    f = np.full_like(t, 1e-30)  # far below eps * |U| / h^2
    f[60:] = 1.0
    chk = jensen_check(ZeroModeSeries(t, U, np.full_like(t, 1e-6), f, h), 2.0)
    assert chk.excluded == 59
    assert RESOLVABLE * np.finfo(float).eps * 1e-6 / 1e-4 < 1.0
