"""Mild solutions of ``u_tt - L u = |u|^p`` on a compact group.

The state is advanced by the exact linear flow plus a trapezoidal Duhamel
quadrature of the pseudospectral nonlinearity. Per coefficient entry, with
``F_n`` the coefficients of ``|u_n|^p``:

    u_{n+1} = G0(h) u_n + G1(h) v_n + h/2 G1(h) F_n
    v_{n+1} = -lambda^2 G1(h) u_n + G0(h) v_n + h/2 (G0(h) F_n + F_{n+1})

which is explicit (``u_{n+1}`` does not need ``F_{n+1}``), second order, and
reduces to velocity Verlet on the trivial mode.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .fourier import (GridField, SpectralField, analyze, plancherel_norm, spectral_tail,
                      synthesize)
from .gn import check_local_existence
from .groups import GroupSpec
from .profiles import build_profile
from .propagator import WaveState, evolve_linear, factor_arrays, linear_energy

DIAGNOSTIC_COLUMNS = (
    "step", "time", "dt", "sup_norm", "l2_norm", "energy", "U0", "U0_prime",
    "mean_abs_pow", "tail_fraction",
)

TAIL_LIMIT = 1e-6


@dataclass
class SolverConfig:
    """Parameters of one run; ``guard`` enforces the local-existence range."""

    spec: GroupSpec
    p: float
    epsilon: float
    u0: str = "constant(0)"
    u1: str = "constant(1)"
    dt: float = 0.01
    adaptive: bool = True
    t_end: float = 10.0
    dealias_margin: float = 1.0
    guard: bool = True
    threshold: float = 1e8
    check_threshold: float = 1e10
    nonlinear: bool = True
    max_steps: int = 2_000_000

    def __post_init__(self):
        if not self.p > 1:
            raise ValueError(f"p must exceed 1, got {self.p}")
        if self.epsilon < 0:
            raise ValueError("epsilon must be nonnegative")
        if not self.dt > 0 or not self.t_end > 0:
            raise ValueError("dt and t_end must be positive")
        if self.dealias_margin < 1:
            raise ValueError("dealias_margin must be >= 1")
        if self.guard:
            check_local_existence(self.spec.topological_dim, self.p)

    @property
    def dt_policy(self) -> str:
        return f"{'adaptive' if self.adaptive else 'fixed'}(dt={self.dt!r})"

    @property
    def profile(self) -> str:
        return f"u0={self.u0};u1={self.u1}"


@lru_cache(maxsize=64)
def _with_dealias(spec: GroupSpec, dealias: float) -> GroupSpec:
    return spec if dealias <= spec.dealias else spec.with_dealias(dealias)


def solver_spec(spec: GroupSpec, p: float, dealias_margin: float = 1.0) -> GroupSpec:
    """Grid wide enough that ``|u|^p`` is dealiased exactly for integer ``p``.

    Products of ``ceil(p) + 1`` band-limited factors must integrate exactly,
    which is degree ``(ceil(p) + 1) L``; non-integer ``p`` keeps a residual
    aliasing error that :func:`aliasing_residual` measures.
    """
    need = (math.ceil(p) + 1) / 2 * dealias_margin
    return _with_dealias(spec, float(need))


def initial_state(config: SolverConfig, spec: GroupSpec | None = None) -> WaveState:
    spec = spec or solver_spec(config.spec, config.p, config.dealias_margin)
    eps = config.epsilon
    return WaveState(0.0, build_profile(config.u0, spec) * eps, build_profile(config.u1, spec) * eps)


def _nonlinear_term(u: SpectralField, p: float):
    g = synthesize(u).values
    a = np.abs(g)
    F = analyze(GridField(u.spec, a**p))
    return F, float(a.max(initial=0.0))


def apply_nonlinearity(u: SpectralField, p: float) -> SpectralField:
    """Coefficients of ``|u|^p`` computed on the grid of ``u.spec``."""
    if not p > 1:
        raise ValueError("p must exceed 1")
    return _nonlinear_term(u, p)[0]


def aliasing_residual(u: SpectralField, p: float) -> float:
    """Relative change of ``|u|^p`` coefficients when the grid is doubled."""
    coarse = apply_nonlinearity(u, p)
    fine_spec = u.spec.with_dealias(2 * u.spec.dealias)
    fine = apply_nonlinearity(SpectralField(fine_spec, u.data), p)
    ref = plancherel_norm(fine)
    return plancherel_norm(SpectralField(fine_spec, fine.data - coarse.data)) / ref if ref else 0.0


def _advance(u, v, Fn, h, lam2, nonlinear):
    g0, g1, lg1 = factor_arrays(h, lam2)
    u1 = g0 * u + g1 * v
    v1 = -lg1 * u + g0 * v
    if nonlinear:
        u1 = u1 + 0.5 * h * g1 * Fn
        v1 = v1 + 0.5 * h * g0 * Fn
    return u1, v1


def step(state: WaveState, dt: float, p: float, nonlinear: bool = True) -> WaveState:
    """One trapezoidal Duhamel step of length ``dt``."""
    if not dt > 0:
        raise ValueError("dt must be positive")
    spec = state.u.spec
    lam2 = spec.layout.entry_eigenvalues
    Fn = _nonlinear_term(state.u, p)[0].data if nonlinear else None
    u1, v1 = _advance(state.u.data, state.ut.data, Fn, dt, lam2, nonlinear)
    U1 = SpectralField(spec, u1)
    if nonlinear:
        v1 = v1 + 0.5 * dt * _nonlinear_term(U1, p)[0].data
    return WaveState(state.time + dt, U1, SpectralField(spec, v1))


@dataclass
class Trajectory:
    """States and per-step diagnostics of one run.

    ``outcome`` is ``"completed"`` (reached ``t_end``), ``"blowup"`` (sup
    norm passed the stop threshold or overflowed) or ``"max_steps"``.
    ``record`` carries the lifespan detection for blow-up runs.
    """

    config: SolverConfig
    spec: GroupSpec
    states: list[WaveState]
    state_steps: list[int]
    diagnostics: dict[str, np.ndarray]
    outcome: str
    record: object = None
    aliasing: float = 0.0
    extra: dict = field(default_factory=dict)

    @property
    def times(self) -> np.ndarray:
        return self.diagnostics["time"]

    @property
    def resolved(self) -> bool:
        return bool(np.max(self.diagnostics["tail_fraction"], initial=0.0) <= TAIL_LIMIT)

    @property
    def final(self) -> WaveState:
        return self.states[-1]


def integrate(config: SolverConfig, keep_every: int = 1) -> Trajectory:
    """Step from ``t = 0`` to ``t_end`` or until the blow-up stop threshold.

    Steps are ``dt / max(1, ||u||_inf^((p-1)/2))`` when adaptive. States are
    kept every ``keep_every`` steps (0 keeps only the first and last).
    """
    from .blowup import detect_lifespan

    spec = solver_spec(config.spec, config.p, config.dealias_margin)
    lam2 = spec.layout.entry_eigenvalues
    p = config.p
    state = initial_state(config, spec)
    u, v = state.u.data, state.ut.data
    F, sup = _nonlinear_term(state.u, p)
    rows = []
    states = [state]
    steps = [0]
    stop = max(config.threshold, config.check_threshold)

    def record(n, t, h, u, v, F, sup):
        uf = SpectralField(spec, u)
        ws = WaveState(t, uf, SpectralField(spec, v))
        rows.append((n, t, h, sup, plancherel_norm(uf), linear_energy(ws), u[0].real,
                     v[0].real, F.data[0].real, spectral_tail(uf)))
        return ws

    record(0, 0.0, 0.0, u, v, F, sup)
    t = 0.0
    n = 0
    outcome = "completed"
    while True:
        if not math.isfinite(sup) or sup >= stop:
            outcome = "blowup"
            break
        if t >= config.t_end * (1 - 1e-14):
            break
        if n >= config.max_steps:
            outcome = "max_steps"
            break
        h = config.dt
        if config.adaptive:
            h /= max(1.0, sup ** ((p - 1) / 2))
        # absorb round-off remainders instead of taking a sliver step
        if config.t_end - t - h < 1e-9 * h:
            h = config.t_end - t
        u, v = _advance(u, v, F.data, h, lam2, config.nonlinear)
        F, sup = _nonlinear_term(SpectralField(spec, u), p)
        if config.nonlinear:
            v = v + 0.5 * h * F.data
        t += h
        n += 1
        ws = record(n, t, h, u, v, F, sup)
        if keep_every and n % keep_every == 0:
            states.append(ws)
            steps.append(n)
    if steps[-1] != n:
        states.append(WaveState(t, SpectralField(spec, u), SpectralField(spec, v)))
        steps.append(n)
    diag = {name: np.array(col) for name, col in zip(DIAGNOSTIC_COLUMNS, zip(*rows))}
    diag["step"] = diag["step"].astype(int)
    traj = Trajectory(config, spec, states, steps, diag, outcome)
    # |u|^p is a polynomial only for even integer p, so aliasing is measured for every p.
    traj.aliasing = aliasing_residual(state.u if plancherel_norm(state.u) else states[-1].u, p)
    if outcome == "blowup":
        traj.record = detect_lifespan(traj)
    return traj


def x_norm_terms(u: np.ndarray, v: np.ndarray, spec: GroupSpec) -> np.ndarray:
    """``||u|| + ||(-L)^{1/2} u|| + ||u_t||`` for stacked coefficient rows."""
    w = spec.layout.entry_dims
    lam2 = spec.layout.entry_eigenvalues
    u = np.atleast_2d(u)
    v = np.atleast_2d(v)
    l2 = np.sqrt(np.sum(w * np.abs(u) ** 2, axis=-1))
    h1 = np.sqrt(np.sum(w * lam2 * np.abs(u) ** 2, axis=-1))
    vt = np.sqrt(np.sum(w * np.abs(v) ** 2, axis=-1))
    return l2 + h1 + vt


def state_distance(a: WaveState, b: WaveState) -> float:
    """Energy-space distance between two states on one group."""
    return float(x_norm_terms(a.u.data - b.u.data, a.ut.data - b.ut.data, a.u.spec)[0])


@dataclass
class ConvergenceStudy:
    dts: list[float]
    errors: list[float]
    orders: list[float]


def self_convergence(config: SolverConfig, dts) -> ConvergenceStudy:
    """Successive-refinement errors at ``t_end`` in the energy norm."""
    from dataclasses import replace

    finals = [integrate(replace(config, dt=float(h)), keep_every=0).final for h in dts]
    errors = [state_distance(finals[i], finals[i + 1]) for i in range(len(finals) - 1)]
    ratios = [dts[i] / dts[i + 1] for i in range(len(dts) - 1)]
    orders = [math.log(errors[i] / errors[i + 1]) / math.log(ratios[i + 1])
              for i in range(len(errors) - 1)]
    return ConvergenceStudy(list(map(float, dts)), errors, orders)


@dataclass
class ContractionReport:
    """Picard iteration ``u_{m+1} = N(u_m)`` started from the linear part."""

    epsilon: float
    T: float
    p: float
    norms: list[float]
    differences: list[float]
    ratios: list[float]
    contracted: bool
    message: str


def picard_diagnostic(config: SolverConfig, T: float, iterations: int,
                      n_times: int = 41) -> ContractionReport:
    """Iterate the mild-solution operator on a time grid over ``[0, T]``.

    The Duhamel integral is the trapezoid rule on the grid; the ``X(T)`` norm
    is the sup over grid times of ``||u|| + ||(-L)^{1/2} u|| + ||u_t||``.
    """
    check_local_existence(config.spec.topological_dim, config.p)
    if not T > 0 or iterations < 1:
        raise ValueError("need T > 0 and at least one iteration")
    spec = solver_spec(config.spec, config.p, config.dealias_margin)
    lam2 = spec.layout.entry_eigenvalues
    s0 = initial_state(config, spec)
    times = np.linspace(0.0, T, n_times)
    h = times[1] - times[0]
    g0, g1, lg1 = factor_arrays(times[:, None], lam2[None, :])
    U_lin = g0 * s0.u.data + g1 * s0.ut.data
    V_lin = -lg1 * s0.u.data + g0 * s0.ut.data

    lag = times[:, None] - times[None, :]
    tri = lag >= 0
    w = np.where(tri, h, 0.0)
    w[np.arange(n_times), np.arange(n_times)] = h / 2
    w[:, 0] = np.where(tri[:, 0], h / 2, 0.0)
    w[0, 0] = 0.0
    k0, k1, _ = factor_arrays(np.where(tri, lag, 0.0)[..., None], lam2[None, None, :])
    K1 = w[..., None] * k1
    K0 = w[..., None] * k0

    def N(U):
        F = np.stack([_nonlinear_term(SpectralField(spec, row), config.p)[0].data for row in U])
        return U_lin + np.einsum("jie,ie->je", K1, F), V_lin + np.einsum("jie,ie->je", K0, F)

    def xnorm(U, V):
        with np.errstate(over="ignore", invalid="ignore"):  # diverging iterates are an outcome
            return float(np.max(x_norm_terms(U, V, spec)))

    U, V = U_lin, V_lin
    norms = [xnorm(U, V)]
    diffs = []
    for _ in range(iterations):
        U1, V1 = N(U)
        diffs.append(xnorm(U1 - U, V1 - V))
        U, V = U1, V1
        norms.append(xnorm(U, V))
        if not math.isfinite(norms[-1]):
            break
    floor = 1e-13 * max(norms[0], 1e-300)
    ratios = [diffs[i] / diffs[i - 1] for i in range(1, len(diffs))
              if diffs[i - 1] > floor and diffs[i] > floor]
    if all(d <= floor for d in diffs):
        ok, msg = True, "fixed point reached"
    elif all(math.isfinite(r) and r < 1 for r in ratios) and math.isfinite(norms[-1]):
        ok, msg = True, "contraction"
    else:
        ok, msg = False, f"no contraction at this (eps, T) = ({config.epsilon:g}, {T:g})"
    return ContractionReport(config.epsilon, float(T), config.p, norms, diffs, ratios, ok, msg)


__all__ = [
    "SolverConfig", "Trajectory", "ContractionReport", "ConvergenceStudy",
    "apply_nonlinearity", "aliasing_residual", "step", "integrate", "picard_diagnostic",
    "self_convergence", "solver_spec", "initial_state", "state_distance", "evolve_linear",
]
