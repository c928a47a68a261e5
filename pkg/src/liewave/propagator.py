"""Exact mode-wise evolution of the free wave equation ``u_tt - L u = 0``.

Each coefficient entry obeys ``u'' + lambda^2 u = 0``, so
``u(t) = G0(t) u0 + G1(t) u1`` with ``G0 = cos(lambda t)`` and
``G1 = sin(lambda t) / lambda`` (``1`` and ``t`` on the trivial mode). The
fundamental solutions are never formed on the grid; convolution with them is
this multiplication.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .fourier import SpectralField, plancherel_norm, random_field, sobolev_norm
from .groups import GroupSpec


@dataclass(frozen=True)
class PropagatorFactors:
    g0: float
    g1: float


def propagator_factors(t: float, eigenvalue: float) -> PropagatorFactors:
    if eigenvalue < 0:
        raise ValueError("Laplace-Beltrami eigenvalues are nonnegative")
    if eigenvalue == 0:
        return PropagatorFactors(1.0, float(t))
    lam = math.sqrt(eigenvalue)
    return PropagatorFactors(math.cos(lam * t), math.sin(lam * t) / lam)


def factor_arrays(t: float, lam2: np.ndarray):
    """Vectorized ``(G0, G1, lambda^2 G1)`` with the exact zero-eigenvalue branch."""
    lam = np.sqrt(lam2)
    zero = lam2 == 0
    safe = np.where(zero, 1.0, lam)
    g0 = np.where(zero, 1.0, np.cos(lam * t))
    g1 = np.where(zero, t, np.sin(lam * t) / safe)
    return g0, g1, lam2 * g1


@dataclass
class WaveState:
    """Coefficients of ``u`` and ``u_t`` at one time."""

    time: float
    u: SpectralField
    ut: SpectralField

    def __post_init__(self):
        if not self.u.spec.same_modes(self.ut.spec):
            raise ValueError("u and u_t must share one group spec")

    @property
    def spec(self) -> GroupSpec:
        return self.u.spec

    @classmethod
    def zeros(cls, spec: GroupSpec, time: float = 0.0) -> WaveState:
        return cls(time, SpectralField.zeros(spec), SpectralField.zeros(spec))


def evolve_linear(state: WaveState, t: float) -> WaveState:
    """Advance ``state`` by ``t`` under the free flow (time-translation invariant)."""
    if t < 0:
        raise ValueError("evolution time must be nonnegative")
    spec = state.u.spec
    g0, g1, lg1 = factor_arrays(t, spec.layout.entry_eigenvalues)
    u, v = state.u.data, state.ut.data
    return WaveState(
        state.time + t,
        SpectralField(spec, g0 * u + g1 * v),
        SpectralField(spec, -lg1 * u + g0 * v),
    )


def linear_energy(state: WaveState) -> float:
    """``sum_xi d_xi sum_kl (lambda^2 |u_kl|^2 + |u_t,kl|^2)``."""
    layout = state.u.spec.layout
    return float(np.sum(layout.entry_dims * (
        layout.entry_eigenvalues * np.abs(state.u.data) ** 2 + np.abs(state.ut.data) ** 2
    )))


def random_state(spec: GroupSpec, rng: np.random.Generator, decay: float = 0.0) -> WaveState:
    """Gaussian coefficients for ``(u0, u1)``, symmetrized to real functions."""
    return WaveState(0.0, random_field(spec, rng, decay), random_field(spec, rng, decay))


ESTIMATE_NAMES = ("L2_u", "H1_homogeneous_u", "L2_ut")


def estimate_ratios(state: WaveState, times) -> np.ndarray:
    """Ratios of each side of the three L^2 estimates, shape ``(3, len(times))``.

    Denominators are ``||u0|| + t ||u1||`` for ``u`` and
    ``||u0||_{H^1} + ||u1||`` for ``(-L)^{1/2} u`` and ``u_t``; ratios with a
    vanishing denominator are reported as 0 (the numerator vanishes too).
    """
    times = np.asarray(times, dtype=float)
    spec = state.u.spec
    u0_l2 = plancherel_norm(state.u)
    u0_h1 = sobolev_norm(state.u, 1.0)[1] if spec.layout.size else 0.0
    u1_l2 = plancherel_norm(state.ut)
    out = np.zeros((3, len(times)))
    for j, t in enumerate(times):
        s = evolve_linear(state, float(t))
        nums = (plancherel_norm(s.u), sobolev_norm(s.u, 1.0)[0], plancherel_norm(s.ut))
        dens = (u0_l2 + t * u1_l2, u0_h1 + u1_l2, u0_h1 + u1_l2)
        for i in range(3):
            out[i, j] = nums[i] / dens[i] if dens[i] > 0 else 0.0
    return out


@dataclass
class EstimateRow:
    name: str
    max_ratio: float
    argmax_time: float
    seed: int


@dataclass
class EstimateReport:
    spec_name: str
    samples: int
    t_max: float
    seed: int
    rows: list[EstimateRow] = field(default_factory=list)

    @property
    def max_ratio(self) -> float:
        return max(r.max_ratio for r in self.rows)

    def csv_rows(self) -> list[dict]:
        return [
            {"name": r.name, "max_ratio": r.max_ratio, "argmax_time": r.argmax_time, "seed": r.seed}
            for r in self.rows
        ]


def verify_l2_estimates(samples: int, t_max: float, spec: GroupSpec, rng_seed: int,
                        n_times: int = 101) -> EstimateReport:
    """Sweep random data over ``[0, t_max]`` and report the worst ratio per estimate."""
    rng = np.random.default_rng(rng_seed)
    times = np.linspace(0.0, t_max, n_times)
    best = np.zeros(3)
    best_t = np.zeros(3)
    for _ in range(samples):
        r = estimate_ratios(random_state(spec, rng), times)
        j = r.argmax(axis=1)
        for i in range(3):
            if r[i, j[i]] > best[i]:
                best[i] = r[i, j[i]]
                best_t[i] = times[j[i]]
    report = EstimateReport(spec.name, samples, t_max, rng_seed)
    for i, name in enumerate(ESTIMATE_NAMES):
        report.rows.append(EstimateRow(name, float(best[i]), float(best_t[i]), rng_seed))
    return report
