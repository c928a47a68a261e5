from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, strategies as st

from liewave.fourier import SpectralField, random_field
from liewave.gn import (AdmissibilityError, check_gn_admissible, check_local_existence,
                        gn_ratio, gn_ratio_sweep, q_max, theta)
from liewave.groups import GroupSpec

T3 = GroupSpec.torus(3, 4)


@pytest.mark.parametrize("n, q, expected", [(3, 2, 0.0), (3, 6, 1.0), (4, 4, 1.0), (3, 4, 0.75),
                                            (5, 10 / 3, 1.0)])
def test_theta_values(n, q, expected):
    assert theta(n, q) == pytest.approx(expected, abs=1e-15)


def test_q_above_window_rejected_with_bound():
    with pytest.raises(AdmissibilityError, match="= 6 for n = 3"):
        theta(3, 7)
    with pytest.raises(AdmissibilityError, match="n >= 3"):
        theta(2, 4)
    with pytest.raises(AdmissibilityError):
        theta(3, 1.5)


def test_constant_and_q2_ratios_are_one():
    F = SpectralField.zeros(T3)
    F.data[0] = 1.0
    assert gn_ratio(F, 4.0, theta(3, 4.0)) == pytest.approx(1.0, rel=1e-14)
    G = random_field(T3, np.random.default_rng(0), decay=1.0, normalize=True)
    assert gn_ratio(G, 2.0, 0.0) == pytest.approx(1.0, rel=1e-12)


@given(st.floats(1e-3, 1e3), st.sampled_from([3.0, 4.0, 6.0]), st.integers(0, 10**6),
       st.booleans())
def test_ratio_is_scale_invariant(c, q, seed, homogeneous):
    spec = T3.with_dealias(q / 2)
    F = random_field(spec, np.random.default_rng(seed), decay=1.0)
    th = theta(3, q)
    r = gn_ratio(F, q, th, homogeneous)
    assert gn_ratio(F * c, q, th, homogeneous) == pytest.approx(r, rel=1e-11)


@given(st.floats(2.0, 6.0), st.floats(2.0, 6.0))
def test_theta_is_nondecreasing_in_q(q1, q2):
    lo, hi = sorted((q1, q2))
    assert theta(3, lo) <= theta(3, hi)


@given(st.integers(3, 12), st.floats(1.01, 8.0))
def test_local_existence_window_is_q_equals_2p(n, p):
    inside_gn = 2 * p <= q_max(n) + 1e-12
    try:
        check_local_existence(n, p)
        ok = True
    except AdmissibilityError:
        ok = False
    assert ok == inside_gn
    if ok:
        check_gn_admissible(n, 2 * p)


def test_local_existence_messages():
    with pytest.raises(AdmissibilityError, match="n >= 3"):
        check_local_existence(1, 2.0)
    with pytest.raises(AdmissibilityError, match="exceeds n/\\(n-2\\) = 3"):
        check_local_existence(3, 3.5)
    with pytest.raises(AdmissibilityError, match="exceed 1"):
        check_local_existence(3, 1.0)


def test_full_norm_ratio_bounded_by_homogeneous_ratio():
    spec = T3.with_dealias(2)
    for seed in range(20):
        F = random_field(spec, np.random.default_rng(seed), decay=1.0)
        F.data[0] = 0.0
        assert gn_ratio(F, 4.0, 0.75) <= gn_ratio(F, 4.0, 0.75, homogeneous=True)


def test_sweep_deterministic_and_reports_argmax():
    a = gn_ratio_sweep(T3, 4.0, 30, seed=3)
    b = gn_ratio_sweep(T3, 4.0, 30, seed=3)
    np.testing.assert_array_equal(a.ratios, b.ratios)
    assert a.max_ratio == a.ratios.max()
    assert a.argmax_seed == a.seeds[np.argmax(a.ratios)]
    assert a.theta == 0.75 and a.n == 3
    assert 0 < a.max_ratio < 10


def test_sweep_on_su2_uses_dimension_three():
    r = gn_ratio_sweep(GroupSpec.su2(3), 6.0, 10, seed=0)
    assert r.theta == pytest.approx(1.0) and r.n == 3


@given(st.floats(1.0, 1e3), st.integers(0, 10**6), st.booleans())
def test_full_norm_ratio_nonincreasing_for_large_scalings(c, seed, negate):
    F = random_field(T3.with_dealias(2), np.random.default_rng(seed), decay=1.0)
    c = -c if negate else c
    base = gn_ratio(F, 4.0, 0.75)
    assert gn_ratio(F * c, 4.0, 0.75) <= base * (1 + 1e-12)


@given(st.integers(3, 10), st.floats(2.0, 6.0), st.floats(1e-6, 1.0))
def test_theta_is_strictly_increasing(n, q, gap):
    hi = min(q + gap, q_max(n))
    if hi > q:
        assert theta(n, q) < theta(n, hi)
