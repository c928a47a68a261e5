from __future__ import annotations

import pytest
from hypothesis import given, strategies as st

from liewave.config import (ConfigError, RunConfig, load_config, parse_config, spec_from_name,
                            write_resolved)
from liewave.groups import GroupSpec


def test_defaults_are_valid():
    cfg = parse_config("")
    assert cfg.seed == 0 and cfg.workers == 1
    assert cfg.group_spec().name == GroupSpec.torus(1, 16).name
    assert len(cfg.epsilons()) == 8


def test_unknown_key_reports_line():
    text = "seed: 1\nsolver:\n  p: 2\n  epsilonn: 0.5\n"
    with pytest.raises(ConfigError, match=r"run\.yaml:4: unknown key solver\.'epsilonn'"):
        parse_config(text, "run.yaml")
    with pytest.raises(ConfigError, match=r"run\.yaml:2: unknown key 'bogus'"):
        parse_config("seed: 1\nbogus: 2\n", "run.yaml")


def test_duplicate_key_reports_line():
    with pytest.raises(ConfigError, match=r"c\.yaml:3: duplicate key 'p'"):
        parse_config("solver:\n  p: 2\n  p: 3\n", "c.yaml")


@pytest.mark.parametrize("text, needle", [
    ("solver:\n  guard: 1\n", "true or false"),
    ("seed: 1.5\n", "an integer"),
    ("solver:\n  p: two\n", "a number"),
    ("workers: 0\n", "workers must be"),
    ("command: run\n", "command must be"),
    ("output:\n  format: xml\n", "output.format"),
    ("group:\n  kind: sphere\n", "group.kind"),
    ("verify:\n  groups: [T1, S3]\n", "unknown group"),
    ("solver: 3\n", "must be a mapping"),
    ("- 1\n", "top level"),
])
def test_type_and_value_errors(text, needle):
    with pytest.raises(ConfigError, match=needle):
        parse_config(text, "x.yaml")


def test_numeric_strings_are_coerced():
    cfg = parse_config("solver:\n  threshold: '1e8'\n  max_steps: 1e5\n")
    assert cfg["solver"]["threshold"] == 1e8
    assert cfg["solver"]["max_steps"] == 100000


def test_sweep_list_and_grid():
    cfg = parse_config("sweep:\n  epsilons: [0.1, 1]\n")
    assert cfg.epsilons() == [0.1, 1.0]
    cfg = parse_config("sweep:\n  eps_min: 0.01\n  eps_max: 1\n  points: 3\n")
    assert cfg.epsilons() == pytest.approx([0.01, 0.1, 1.0])


def test_group_names():
    assert spec_from_name("T3", 4).name == GroupSpec.torus(3, 4).name
    assert spec_from_name("su(2)", 2).name == GroupSpec.su2(2).name
    with pytest.raises(ConfigError):
        spec_from_name("T0", 4)


def test_override_and_solver_config():
    cfg = parse_config("group:\n  kind: su2\n  band_limit: 2\n")
    cfg.override("solver.guard", False)
    cfg.override("seed", 9)
    sc = cfg.solver_config()
    assert sc.guard is False and cfg.seed == 9
    with pytest.raises(ConfigError):
        cfg.override("solver", 1)


def test_sidecar_round_trip(tmp_path):
    cfg = parse_config("command: simulate\nseed: 4\nsolver:\n  p: 3\n  epsilon: 0.25\n")
    path = write_resolved(cfg, tmp_path)
    again = load_config(path)
    assert again.data == cfg.data
    assert again.to_yaml() == path.read_text()


@given(st.integers(0, 2**31), st.floats(1.01, 9, allow_nan=False), st.booleans())
def test_yaml_round_trip_property(seed, p, guard):
    cfg = RunConfig()
    cfg.override("seed", seed)
    cfg.override("solver.p", p)
    cfg.override("solver.guard", guard)
    assert parse_config(cfg.to_yaml()).data == cfg.data


def test_shipped_configs_parse():
    from pathlib import Path

    paths = sorted((Path(__file__).parent.parent / "configs").glob("*.yaml"))
    assert paths
    for path in paths:
        cfg = load_config(path)
        assert cfg.command is not None
