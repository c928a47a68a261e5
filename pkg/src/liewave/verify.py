"""Invariant checks bundled for the ``verify`` command.

Each check returns a :class:`CheckResult` with the measured value, its
tolerance and the backend (group) it ran on.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .blowup import (blowup_time_integration, blowup_time_quadrature, jensen_check,
                     zero_mode_series)
from .fourier import analyze, plancherel_norm, random_field, synthesize
from .groups import GroupSpec
from .propagator import evolve_linear, linear_energy, random_state, verify_l2_estimates

TOL = 1e-10
ORACLE_TOL = 1e-8
CHECK_COLUMNS = ("check", "backend", "value", "tolerance", "passed")


@dataclass
class CheckResult:
    check: str
    backend: str
    value: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return bool(np.isfinite(self.value) and self.value <= self.tolerance)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status} {self.check}[{self.backend}] value={self.value:.3e} tol={self.tolerance:.1e}"

    def csv_row(self) -> dict:
        return {"check": self.check, "backend": self.backend, "value": self.value,
                "tolerance": self.tolerance, "passed": self.passed}


def plancherel_defect(spec: GroupSpec, samples: int, seed: int) -> float:
    """Worst relative gap between grid-side and coefficient-side ``L^2`` norms."""
    rng = np.random.default_rng(seed)
    w = spec.grid.weights
    worst = 0.0
    for _ in range(samples):
        F = random_field(spec, rng, real=False)
        f = synthesize(F).values
        grid_sq = float(np.sum(w * np.abs(f) ** 2))
        coef_sq = plancherel_norm(F) ** 2
        worst = max(worst, abs(grid_sq - coef_sq) / coef_sq)
    return worst


def roundtrip_defect(spec: GroupSpec, samples: int, seed: int) -> float:
    """Worst relative error of ``analyze(synthesize(F))`` and of the grid-side round trip."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(samples):
        F = random_field(spec, rng, real=False)
        f = synthesize(F)
        G = analyze(f)
        worst = max(worst, plancherel_norm(G - F) / plancherel_norm(F))
        g = synthesize(G).values
        worst = max(worst, float(np.max(np.abs(g - f.values)) / np.max(np.abs(f.values))))
    return worst


def schur_defect(spec: GroupSpec) -> float:
    """``max |sum_i w_i conj(B_ie) B_ie' - delta_ee' / d_e|`` over basis columns."""
    B = spec.basis
    w = spec.grid.weights
    gram = (B.conj() * w[:, None]).T @ B
    target = np.diag(1.0 / spec.layout.entry_dims)
    return float(np.max(np.abs(gram - target)))


def energy_drift(spec: GroupSpec, samples: int, seed: int, t_max: float) -> float:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(samples):
        s = random_state(spec, rng)
        e0 = linear_energy(s)
        if e0 == 0:
            continue
        for t in np.linspace(0, t_max, 11)[1:]:
            worst = max(worst, abs(linear_energy(evolve_linear(s, float(t))) - e0) / e0)
    return worst


def cocycle_defect(spec: GroupSpec, samples: int, seed: int, t_max: float) -> float:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(samples):
        s0 = random_state(spec, rng)
        a, b = rng.uniform(0, t_max / 2, size=2)
        two = evolve_linear(evolve_linear(s0, a), b)
        one = evolve_linear(s0, a + b)
        scale = plancherel_norm(one.u) + plancherel_norm(one.ut)
        err = plancherel_norm(two.u - one.u) + plancherel_norm(two.ut - one.ut)
        worst = max(worst, err / scale)
    return worst


def jensen_results(dt: float = 0.01) -> list[CheckResult]:
    """Zero-mode identity and Jensen margin on two short blow-up runs on T1."""
    from .solver import SolverConfig, integrate

    spec = GroupSpec.torus(1, 64)
    out = []
    for name, u0, u1 in (("constant", "constant(0)", "constant(1)"),
                         ("perturbed", "constant(0.5)+0.1*cosine(1)", "constant(1)")):
        cfg = SolverConfig(spec, 2.0, 0.5, u0, u1, dt=dt, t_end=50.0, guard=False)
        chk = jensen_check(zero_mode_series(integrate(cfg, keep_every=0)), cfg.p)
        # O(dt^2) tolerance with unit constant.
        out.append(CheckResult(f"zero_mode_identity:{name}", "T1", chk.identity_residual, dt**2))
        out.append(CheckResult(f"jensen:{name}", "T1", max(0.0, -chk.jensen_margin), dt**2))
    return out


def oracle_results() -> list[CheckResult]:
    out = []
    for p in (1.5, 2.0, 3.0, 5.0):
        worst = 0.0
        for a, b in ((0.0, 1.0), (1.0, 0.0), (0.3, 0.7), (1e-3, 0.0), (0.0, 1e3)):
            q = blowup_time_quadrature(p, a, b)
            r = blowup_time_integration(p, a, b)
            worst = max(worst, abs(q - r) / q)
        out.append(CheckResult(f"oracle_agreement:p={p:g}", "ode", worst, ORACLE_TOL))
    return out


def spec_checks(spec: GroupSpec, samples: int = 100, seed: int = 0,
                t_max: float = 10.0, reports: dict | None = None) -> list[CheckResult]:
    """Transform and linear-flow checks on one group.

    The estimate sweep's report is stored in ``reports[spec.name]`` when given.
    """
    name = spec.name
    report = verify_l2_estimates(samples, t_max, spec, seed)
    if reports is not None:
        reports[name] = report
    return [
        CheckResult("plancherel", name, plancherel_defect(spec, samples, seed), TOL),
        CheckResult("roundtrip", name, roundtrip_defect(spec, samples, seed + 1), TOL),
        CheckResult("schur_orthogonality", name, schur_defect(spec), TOL),
        CheckResult("l2_estimates", name, max(0.0, report.max_ratio - 1.0), TOL),
        CheckResult("energy_conservation", name, energy_drift(spec, 10, seed + 2, t_max), TOL),
        CheckResult("cocycle", name, cocycle_defect(spec, 10, seed + 3, t_max), TOL),
    ]


def run_checks(specs, samples: int = 100, seed: int = 0, t_max: float = 10.0,
               include_blowup: bool = True, reports: dict | None = None) -> list[CheckResult]:
    results = []
    for spec in specs:
        results.extend(spec_checks(spec, samples, seed, t_max, reports))
    if include_blowup:
        results.extend(jensen_results())
        results.extend(oracle_results())
    return results

