from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, strategies as st

from liewave.fourier import plancherel_norm, reality_defect, synthesize
from liewave.groups import GroupSpec
from liewave.profiles import ProfileError, build_profile, parse_profile


def test_parse_terms():
    assert parse_profile("constant(1) + 0.25*cosine(1, 2) - random(3)") == [
        (1.0, "constant", (1.0,)),
        (0.25, "cosine", (1.0, 2.0)),
        (-1.0, "random", (3.0,)),
    ]
    assert parse_profile("lowest-nontrivial") == [(1.0, "lowest-nontrivial", ())]
    assert parse_profile("1e-3*constant(2)") == [(1e-3, "constant", (2.0,))]


@pytest.mark.parametrize("expr", ["", "constant(1) constant(2)", "constant(x)", "2**constant(1)"])
def test_parse_errors(expr):
    with pytest.raises(ProfileError):
        parse_profile(expr)


@pytest.mark.parametrize("expr, spec, needle", [
    ("nope(1)", GroupSpec.torus(1, 4), "unknown profile"),
    ("cosine(1)", GroupSpec.su2(2), "tori only"),
    ("cosine(9)", GroupSpec.torus(1, 16), "band limit"),
    ("cosine(0.5)", GroupSpec.torus(1, 16), "integer"),
    ("lowest-nontrivial", GroupSpec.torus(3, 4), r"SU\(2\) only"),
    ("constant(1, 2)", GroupSpec.torus(1, 4), "one argument"),
])
def test_build_errors(expr, spec, needle):
    with pytest.raises(ProfileError, match=needle):
        build_profile(expr, spec)


def test_cosine_values_on_torus():
    spec = GroupSpec.torus(2, 8)
    f = synthesize(build_profile("constant(0.5) + 2*cosine(1, 2)", spec))
    x = spec.grid.points
    np.testing.assert_allclose(f.values, 0.5 + 2 * np.cos(x[:, 0] + 2 * x[:, 1]), atol=1e-13)


def test_lowest_nontrivial_closed_form():
    spec = GroupSpec.su2(2)
    f = synthesize(build_profile("lowest-nontrivial", spec))
    a, b, g = spec.grid.points.T
    np.testing.assert_allclose(f.values, np.cos(b / 2) * np.cos((a + g) / 2), atol=1e-13)


def test_random_is_deterministic_real_and_normalized(spec):
    F = build_profile("random(5, 2)", spec)
    G = build_profile("random(5, 2)", spec)
    np.testing.assert_array_equal(F.data, G.data)
    assert plancherel_norm(F) == pytest.approx(1.0, rel=1e-14)
    assert reality_defect(F) < 1e-13
    assert not np.array_equal(F.data, build_profile("random(6, 2)", spec).data)


@given(st.floats(-5, 5), st.floats(-5, 5))
def test_profiles_are_linear(c1, c2):
    spec = GroupSpec.torus(1, 9)
    combo = build_profile(f"{c1!r}*cosine(2) + {c2!r}*random(1)".replace("+ -", "- "), spec)
    expect = build_profile("cosine(2)", spec) * c1 + build_profile("random(1)", spec) * c2
    np.testing.assert_allclose(combo.data, expect.data, atol=1e-12)
