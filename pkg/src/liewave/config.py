"""YAML run configuration with line-precise validation.

A config file has the sections below; every key is optional and unknown keys
are rejected with ``file:line`` messages::

    command: simulate
    seed: 0
    workers: 1
    group:  {kind: torus, n: 1, band_limit: 16, dealias: 2}
    solver: {p: 2, epsilon: 0.5, u0: constant(0), u1: constant(1), dt: 0.01, ...}
    sweep:  {epsilons: [...]} or {eps_min: 0.01, eps_max: 100, points: 8}
    gn:     {group: T3, q: [3, 4, 6], samples: 500, decay: 1, band_limits: [16, 64]}
    verify: {groups: [T1, T3, SU2], samples: 100, t_max: 10}
    output: {dir: runs/out, format: csv, snapshot_every: 0}

``output.format`` selects CSV or JSON for the verify and GN report tables;
time series and lifespan records are always CSV.
"""

from __future__ import annotations

import copy
from dataclasses import dataclass, field
from pathlib import Path

import yaml

from .groups import SU2, TORUS, GroupSpec

COMMANDS = ("verify", "simulate", "lifespan-sweep", "gn")

DEFAULTS: dict = {
    "command": None,
    "seed": 0,
    "workers": 1,
    "group": {"kind": TORUS, "n": 1, "band_limit": 16.0, "dealias": 2.0},
    "solver": {
        "p": 2.0, "epsilon": 0.5, "u0": "constant(0)", "u1": "constant(1)",
        "dt": 0.01, "adaptive": True, "t_end": 10.0, "dealias_margin": 1.0,
        "guard": True, "threshold": 1e8, "check_threshold": 1e10,
        "nonlinear": True, "max_steps": 2_000_000,
    },
    "sweep": {"epsilons": None, "eps_min": 0.01, "eps_max": 100.0, "points": 8,
              "oracle_only": False},
    "gn": {"group": "T3", "q": [3.0, 4.0, 6.0], "samples": 500, "decay": 1.0,
           "band_limits": [16.0, 64.0]},
    "verify": {"groups": ["T1", "T3", "SU2"], "samples": 100, "t_max": 10.0,
               "band_limits": {"T1": 16.0, "T3": 4.0, "SU2": 6.0}},
    "output": {"dir": "runs/out", "format": "csv", "snapshot_every": 0},
}

# Expected scalar types per key; (float,) accepts ints and numeric strings.
_TYPES = {
    "command": str, "seed": int, "workers": int,
    "group.kind": str, "group.n": int, "group.band_limit": float, "group.dealias": float,
    "solver.p": float, "solver.epsilon": float, "solver.u0": str, "solver.u1": str,
    "solver.dt": float, "solver.adaptive": bool, "solver.t_end": float,
    "solver.dealias_margin": float, "solver.guard": bool, "solver.threshold": float,
    "solver.check_threshold": float, "solver.nonlinear": bool, "solver.max_steps": int,
    "sweep.epsilons": "floats?", "sweep.eps_min": float, "sweep.eps_max": float,
    "sweep.points": int, "sweep.oracle_only": bool,
    "gn.group": str, "gn.q": "floats", "gn.samples": int, "gn.decay": float, "gn.band_limits": "floats",
    "verify.groups": "strs", "verify.samples": int, "verify.t_max": float,
    "verify.band_limits": "group-map",
    "output.dir": str, "output.format": str, "output.snapshot_every": int,
}


class ConfigError(ValueError):
    pass


def spec_from_name(name: str, band_limit: float, dealias: float = 2.0) -> GroupSpec:
    """``"T<n>"`` for the n-torus or ``"SU2"``."""
    key = name.strip().upper().replace("(", "").replace(")", "")
    if key == "SU2":
        return GroupSpec.su2(band_limit, dealias)
    if key.startswith("T") and key[1:].isdigit() and int(key[1:]) >= 1:
        return GroupSpec.torus(int(key[1:]), band_limit, dealias)
    raise ConfigError(f"unknown group {name!r}; use T<n> or SU2")


class _LineLoader(yaml.SafeLoader):
    """SafeLoader that remembers the source line of every mapping key."""


def _construct_mapping(loader, node, deep=False):
    mapping = {}
    lines = {}
    for key_node, value_node in node.value:
        key = loader.construct_object(key_node, deep=deep)
        if key in mapping:
            raise ConfigError(f"{loader.name}:{key_node.start_mark.line + 1}: duplicate key {key!r}")
        mapping[key] = loader.construct_object(value_node, deep=True)
        lines[key] = key_node.start_mark.line + 1
    mapping["__lines__"] = lines
    return mapping


_LineLoader.add_constructor(yaml.resolver.BaseResolver.DEFAULT_MAPPING_TAG, _construct_mapping)


def _coerce(value, kind, where):
    def fail(what):
        raise ConfigError(f"{where}: expected {what}, got {value!r}")

    if kind is bool:
        if not isinstance(value, bool):
            fail("true or false")
        return value
    if kind is int:
        if isinstance(value, bool):
            fail("an integer")
        if isinstance(value, float) and value.is_integer():
            return int(value)
        if isinstance(value, str):
            try:
                f = float(value)
            except ValueError:
                fail("an integer")
            if not f.is_integer():
                fail("an integer")
            return int(f)
        if not isinstance(value, int):
            fail("an integer")
        return value
    if kind is float:
        if isinstance(value, bool):
            fail("a number")
        if isinstance(value, (int, float)):
            return float(value)
        if isinstance(value, str):
            try:
                return float(value)
            except ValueError:
                fail("a number")
        fail("a number")
    if kind is str:
        if not isinstance(value, str):
            fail("a string")
        return value
    if kind in ("floats", "floats?"):
        if value is None and kind == "floats?":
            return None
        if not isinstance(value, list):
            value = [value]
        return [_coerce(v, float, where) for v in value]
    if kind == "strs":
        if not isinstance(value, list):
            value = [value]
        return [_coerce(v, str, where) for v in value]
    if kind == "group-map":
        if not isinstance(value, dict):
            fail("a mapping of group name to band limit")
        return {k: _coerce(v, float, where) for k, v in value.items() if k != "__lines__"}
    raise AssertionError(kind)


def _merge(raw: dict, source: str) -> dict:
    out = copy.deepcopy(DEFAULTS)
    lines = raw.get("__lines__", {})
    for key, value in raw.items():
        if key == "__lines__":
            continue
        where = f"{source}:{lines.get(key, '?')}"
        if key not in DEFAULTS:
            raise ConfigError(f"{where}: unknown key {key!r}; known: {', '.join(DEFAULTS)}")
        if isinstance(DEFAULTS[key], dict):
            if not isinstance(value, dict):
                raise ConfigError(f"{where}: section {key!r} must be a mapping")
            sub_lines = value.get("__lines__", {})
            for sub, sv in value.items():
                if sub == "__lines__":
                    continue
                sw = f"{source}:{sub_lines.get(sub, '?')}"
                if sub not in DEFAULTS[key]:
                    raise ConfigError(
                        f"{sw}: unknown key {key}.{sub!r}; known: {', '.join(DEFAULTS[key])}"
                    )
                out[key][sub] = _coerce(sv, _TYPES[f"{key}.{sub}"], f"{sw}: {key}.{sub}")
        else:
            out[key] = _coerce(value, _TYPES[key], f"{where}: {key}") if value is not None else None
    return out


@dataclass
class RunConfig:
    """Resolved configuration: defaults merged with a file and CLI overrides."""

    data: dict = field(default_factory=lambda: copy.deepcopy(DEFAULTS))
    source: str = "<defaults>"

    def __getitem__(self, key):
        return self.data[key]

    @property
    def command(self) -> str | None:
        return self.data["command"]

    @property
    def seed(self) -> int:
        return self.data["seed"]

    @property
    def workers(self) -> int:
        return self.data["workers"]

    @property
    def out_dir(self) -> Path:
        return Path(self.data["output"]["dir"])

    def group_spec(self) -> GroupSpec:
        g = self.data["group"]
        kind = g["kind"].lower()
        if kind in (TORUS, "t"):
            return GroupSpec.torus(g["n"], g["band_limit"], g["dealias"])
        if kind in (SU2, "su(2)"):
            return GroupSpec.su2(g["band_limit"], g["dealias"])
        raise ConfigError(f"{self.source}: group.kind must be 'torus' or 'su2', got {g['kind']!r}")

    def solver_config(self, spec: GroupSpec | None = None, **overrides):
        from .solver import SolverConfig

        s = dict(self.data["solver"])
        s.update(overrides)
        return SolverConfig(spec or self.group_spec(), **s)

    def epsilons(self) -> list[float]:
        from .blowup import epsilon_grid

        sw = self.data["sweep"]
        if sw["epsilons"]:
            return [float(e) for e in sw["epsilons"]]
        return [float(e) for e in epsilon_grid(sw["eps_min"], sw["eps_max"], sw["points"])]

    def override(self, dotted: str, value) -> None:
        """Set a scalar field such as ``solver.guard`` (command-line override)."""
        section, _, key = dotted.rpartition(".")
        target = self.data[section] if section else self.data
        if key not in target or isinstance(target[key], dict):
            raise ConfigError(f"cannot override {dotted!r}")
        target[key] = value

    def validate(self) -> RunConfig:
        d = self.data
        if d["command"] is not None and d["command"] not in COMMANDS:
            raise ConfigError(f"{self.source}: command must be one of {', '.join(COMMANDS)}")
        if d["workers"] < 1:
            raise ConfigError(f"{self.source}: workers must be >= 1")
        if d["output"]["format"] not in ("csv", "json"):
            raise ConfigError(f"{self.source}: output.format must be 'csv' or 'json'")
        self.group_spec()
        for name in list(d["verify"]["groups"]) + [d["gn"]["group"]]:
            spec_from_name(name, 1)
        return self

    def to_yaml(self) -> str:
        return yaml.safe_dump(self.data, sort_keys=True, default_flow_style=False)


def _strip_lines(obj):
    if isinstance(obj, dict):
        return {k: _strip_lines(v) for k, v in obj.items() if k != "__lines__"}
    if isinstance(obj, list):
        return [_strip_lines(v) for v in obj]
    return obj


def parse_config(text: str, source: str = "<string>") -> RunConfig:
    loader = _LineLoader(text)
    loader.name = source
    try:
        raw = loader.get_single_data()
    except yaml.MarkedYAMLError as exc:
        line = exc.problem_mark.line + 1 if exc.problem_mark else "?"
        raise ConfigError(f"{source}:{line}: {exc.problem}") from None
    finally:
        loader.dispose()
    if raw is None:
        raw = {}
    if not isinstance(raw, dict):
        raise ConfigError(f"{source}:1: top level must be a mapping")
    merged = _merge(raw, source)
    return RunConfig(_strip_lines(merged), source).validate()


def load_config(path) -> RunConfig:
    path = Path(path)
    return parse_config(path.read_text(), str(path))


def write_resolved(config: RunConfig, directory) -> Path:
    """Write ``config.yaml`` next to a run's outputs; loading it reproduces the run."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    path = directory / "config.yaml"
    path.write_text(config.to_yaml())
    return path
