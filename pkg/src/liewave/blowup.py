"""Zero-mode functional, comparison ODE oracle and lifespan scaling.

The mean ``U0(t) = int u(t, x) dx`` is the trivial-mode coefficient. It obeys
``U0'' = int |u|^p dx >= |U0|^p`` by Jensen, so it is dominated by the
comparison problem ``U'' = |U|^p``, whose blow-up time is available in closed
(quadrature) form.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np
from scipy import integrate as _quad

from .fourier import plancherel_norm
from .kernels import integrate_blowup

ORACLE_RTOL = 1e-8


class OracleDisagreement(RuntimeError):
    pass


@dataclass
class ZeroModeSeries:
    times: np.ndarray
    values: np.ndarray
    derivatives: np.ndarray
    forcing: np.ndarray
    steps: np.ndarray

    def second_difference(self) -> tuple[np.ndarray, np.ndarray]:
        """Nonuniform central second difference at interior times.

        Uses the recorded step sizes; differencing accumulated times loses
        digits once steps shrink near blow-up.
        """
        t, U = self.times, self.values
        h0 = self.steps[:-1]
        h1 = self.steps[1:]
        d2 = 2 * ((U[2:] - U[1:-1]) / h1 - (U[1:-1] - U[:-2]) / h0) / (h0 + h1)
        return t[1:-1], d2


def zero_mode_series(traj) -> ZeroModeSeries:
    d = traj.diagnostics
    return ZeroModeSeries(d["time"], d["U0"], d["U0_prime"], d["mean_abs_pow"], d["dt"][1:])


@dataclass
class JensenCheck:
    identity_residual: float
    jensen_margin: float
    integrated_residual: float
    excluded: int = 0

    def passed(self, tol: float) -> bool:
        return self.identity_residual <= tol and self.jensen_margin >= -tol


# Forcing must exceed the round-off floor of the second difference by this
# factor, which bounds the round-off share of the residuals near 1/RESOLVABLE.
RESOLVABLE = 1e5


def jensen_check(series: ZeroModeSeries, p: float) -> JensenCheck:
    """Compare the discrete ``U0''`` with ``int |u|^p`` and with ``|U0|^p``.

    ``identity_residual`` is ``max |U0'' - int|u|^p| / int|u|^p``;
    ``jensen_margin`` is ``min (U0'' - |U0|^p) / int|u|^p`` (nonnegative when
    Jensen holds); ``integrated_residual`` checks
    ``U0'(t) - U0'(0) = int_0^t int |u|^p`` with the trapezoid rule,
    relative to ``max |U0'|``.

    Pointwise checks skip times where ``int|u|^p`` is within ``RESOLVABLE``
    of the round-off floor ``eps |U0| / (h0 h1)`` of the second difference;
    their count is ``excluded``.
    """
    t, d2 = series.second_difference()
    f = series.forcing[1:-1]
    U = series.values
    u = U[1:-1]
    h0 = series.steps[:-1]
    h1 = series.steps[1:]
    near = np.maximum(np.maximum(np.abs(U[:-2]), np.abs(u)), np.abs(U[2:]))
    floor = np.finfo(float).eps * near / (h0 * h1)
    ok = np.abs(f) > RESOLVABLE * floor
    f, d2, u = f[ok], d2[ok], u[ok]
    identity = float(np.max(np.abs(d2 - f) / np.abs(f), initial=0.0))
    margin = float(np.min((d2 - np.abs(u) ** p) / np.abs(f), initial=0.0))
    cum = np.concatenate([[0.0], np.cumsum(series.steps
                                            * (series.forcing[1:] + series.forcing[:-1]) / 2)])
    lhs = series.derivatives - series.derivatives[0]
    ref = max(float(np.max(np.abs(series.derivatives))), 1e-300)
    return JensenCheck(identity, margin, float(np.max(np.abs(lhs - cum)) / ref),
                       int(np.count_nonzero(~ok)))


# Comparison ODE U'' = |U|^p, U(0) = a, U'(0) = b.

def _natural_scale(p: float, a: float, b: float) -> float:
    return max(a, b ** (2 / (p + 1)))


def leading_tail(p: float, U: float, energy: float = 0.0) -> float:
    """Remaining time to blow-up from level ``U`` of ``U'' = U^p``.

    Leading term of ``int_U^inf (E + 2 s^(p+1)/(p+1))^(-1/2) ds`` plus the
    first correction in the conserved ``E = U'^2 - 2 U^(p+1)/(p+1)``.
    """
    c = math.sqrt((p + 1) / 2)
    return c * (2 / (p - 1) * U ** (-(p - 1) / 2)
                - energy * (p + 1) / (2 * (3 * p + 1)) * U ** (-(3 * p + 1) / 2))


def _validate(p, a, b):
    if not p > 1:
        raise ValueError("p must exceed 1")
    if a < 0 or b < 0:
        raise ValueError("comparison data must be nonnegative")


def _rescale(p: float, a: float, b: float):
    """``(tau, a', b')`` with ``T*(p, a, b) = tau T*(p, a', b')`` and unit natural scale.

    ``U = s W``, ``t = tau r`` with ``tau = s^(-(p-1)/2)`` maps ``U'' = U^p``
    to itself; both oracle paths then work with O(1) data, so tiny or huge
    inputs neither underflow nor overflow. ``None`` when both data vanish.
    """
    scale = _natural_scale(p, a, b)
    if scale == 0:
        return None
    ls = math.log(scale)
    try:
        tau = math.exp(-(p - 1) / 2 * ls)
    except OverflowError:
        tau = math.inf
    bh = math.exp(math.log(b) - (p + 1) / 2 * ls) if b > 0 else 0.0
    return tau, a / scale, bh


def blowup_time_quadrature(p: float, a: float, b: float) -> float:
    """``int_a^inf dU / sqrt(b^2 + 2 (U^(p+1) - a^(p+1)) / (p+1))``.

    Split at ``2 x`` natural scale; the lower piece uses ``U = a + s y^2``
    to remove the square-root endpoint singularity when ``b = 0``, the upper
    piece ``U = U_a z^(-2/(p-1))`` maps the algebraic tail onto a smooth
    integrand on ``(0, 1]``.
    """
    _validate(p, a, b)
    r = _rescale(p, a, b)
    if r is None:
        return math.inf
    tau, a, b = r
    if math.isinf(tau):
        return tau
    scale = _natural_scale(p, a, b)
    q = p + 1
    top = 2 * scale
    span = top - a

    def lower(y):
        d = span * y * y
        if 0 < d <= a:
            diff = a**q * math.expm1(q * math.log1p(d / a))
        else:
            # no cancellation once d > a (and no overflow for tiny a)
            diff = (a + d) ** q - a**q
        return 2 * span * y / math.sqrt(b * b + 2 * diff / q)

    c = 2 / (p - 1) * top ** ((1 - p) / 2)
    e = 2 * q / (p - 1)
    A = math.exp(2 * math.log(b) - q * math.log(top)) if b > 0 else 0.0
    B = (a / top) ** q

    def upper(z):
        r = z**e
        return c / math.sqrt(A * r + 2 * (1 - B * r) / q)

    opts = dict(epsabs=0.0, epsrel=1e-13, limit=200)
    # With b > 0 the lower integrand turns from linear to flat near
    # y* = b / sqrt(2 a^p span), and adaptive quadrature can step over that.
    # The layer is resolved by decade-spaced cuts y*, 10 y*, ... below 1.
    cuts = [0.0]
    if a > 0 and b > 0:
        log_ystar = math.log(b) - 0.5 * (math.log(2 * span) + p * math.log(a))
        y = math.exp(min(max(log_ystar, math.log(1e-12)), 0.0))
        while y < 0.5:
            cuts.append(y)
            y *= 10
    cuts.append(1.0)
    low = sum(_quad.quad(lower, lo, hi, **opts)[0] for lo, hi in zip(cuts[:-1], cuts[1:]))
    return tau * (low + _quad.quad(upper, 0.0, 1.0, **opts)[0])


def blowup_time_integration(p: float, a: float, b: float, eta: float = 1e-3,
                            u_stop: float = 1e12) -> float:
    """RK4 with rate-matched steps until ``U >= u_stop`` in natural units, plus tail.

    Data are first rescaled to unit natural scale (see :func:`_rescale`), so
    ``u_stop`` is measured in multiples of ``max(a, b^(2/(p+1)))``.
    """
    _validate(p, a, b)
    r = _rescale(p, a, b)
    if r is None:
        return math.inf
    tau, a, b = r
    if math.isinf(tau):
        return tau
    t, U, _, _ = integrate_blowup(float(p), float(a), float(b), eta, eta, u_stop, 10**9)
    energy = b * b - 2 * a ** (p + 1) / (p + 1)
    return tau * (t + leading_tail(p, U, energy))


def kato_blowup_time(p: float, U_init: float, V_init: float, rtol: float = ORACLE_RTOL) -> float:
    """Blow-up time of ``U'' = |U|^p``, cross-checked by two independent routes.

    Returns ``inf`` when both data vanish. Raises :class:`OracleDisagreement`
    if integration and quadrature differ by more than ``rtol``.
    """
    quad = blowup_time_quadrature(p, U_init, V_init)
    if math.isinf(quad):
        return quad
    ode = blowup_time_integration(p, U_init, V_init)
    if abs(ode - quad) > rtol * quad:
        raise OracleDisagreement(
            f"p={p}: integration {ode!r} vs quadrature {quad!r} (rel {abs(ode - quad) / quad:.2e})"
        )
    return quad


# Lifespan records and scaling fits.

U1_POSITIVE = "u1_positive"
U1_ZERO = "u1_zero"

RECORD_COLUMNS = ("epsilon", "p", "profile", "detected_T", "threshold", "dt_policy", "resolved",
                  "slope", "predicted_exponent", "residual")


@dataclass
class LifespanRecord:
    epsilon: float
    p: float
    profile: str
    detected_T: float
    threshold: float
    dt_policy: str
    resolved: bool
    case: str = U1_POSITIVE
    extrapolated_T: float = math.nan
    check_T: float = math.nan
    stable: bool = True
    group: str = ""

    def csv_row(self) -> dict:
        row = {k: getattr(self, k) for k in RECORD_COLUMNS[:7]}
        row.update(slope="", predicted_exponent="", residual="")
        return row

    def as_dict(self) -> dict:
        return asdict(self)


def data_case(u1_mean: float, u1_norm: float) -> str:
    if u1_norm == 0:
        return U1_ZERO
    return U1_POSITIVE if u1_mean > 0 else "other"


def detect_lifespan(traj, threshold: float | None = None,
                    check_threshold: float | None = None) -> LifespanRecord | None:
    """First time the grid sup norm passes ``threshold``; ``None`` if never.

    The record also carries the crossing time of ``check_threshold``
    (``stable`` when the two differ by under 1%), the tail-extrapolated blow-up
    time ``t_n + leading_tail(p, ||u_n||_inf)`` and the resolution flag of the
    steps up to detection.
    """
    cfg = traj.config
    threshold = cfg.threshold if threshold is None else threshold
    check_threshold = cfg.check_threshold if check_threshold is None else check_threshold
    d = traj.diagnostics
    sup = d["sup_norm"]
    over = np.flatnonzero(~np.isfinite(sup) | (sup >= threshold))
    if len(over) == 0:
        return None
    i = int(over[0])
    T = float(d["time"][i])
    finite = math.isfinite(sup[i])
    ext = T + leading_tail(cfg.p, float(sup[i])) if finite else T
    over_c = np.flatnonzero(~np.isfinite(sup) | (sup >= check_threshold))
    check_T = float(d["time"][over_c[0]]) if len(over_c) else math.nan
    stable = bool(len(over_c)) and bool(abs(check_T - T) < 0.01 * T)
    resolved = bool(np.max(d["tail_fraction"][: i + 1]) <= 1e-6) and finite
    s0 = traj.states[0]
    eps = cfg.epsilon
    u1_mean = s0.ut.zero_mode.real / eps if eps else 0.0
    return LifespanRecord(
        epsilon=eps, p=cfg.p, profile=cfg.profile, detected_T=T, threshold=float(threshold),
        dt_policy=cfg.dt_policy, resolved=resolved, case=data_case(u1_mean, plancherel_norm(s0.ut)),
        extrapolated_T=ext, check_T=check_T, stable=stable, group=traj.spec.name,
    )


def predicted_exponent(p: float, case: str) -> float:
    if case == U1_POSITIVE:
        return -(p - 1) / (p + 1)
    if case == U1_ZERO:
        return -(p - 1) / 2
    raise ValueError(f"no predicted lifespan exponent for data case {case!r}")


@dataclass
class ScalingFit:
    slope: float
    intercept: float
    residual: float
    predicted: float
    deviation: float
    p: float
    profile: str
    case: str
    n_records: int
    decades: float

    def csv_row(self) -> dict:
        return {"epsilon": "", "p": self.p, "profile": self.profile, "detected_T": "",
                "threshold": "", "dt_policy": "fit", "resolved": "", "slope": self.slope,
                "predicted_exponent": self.predicted, "residual": self.residual}

    def within(self, rel: float) -> bool:
        return self.deviation <= rel * abs(self.predicted)


MIN_DECADES = 4.0


def fit_lifespan_scaling(records: list[LifespanRecord], use: str = "detected") -> ScalingFit:
    """Least-squares slope of ``log T`` against ``log eps``.

    ``use="extrapolated"`` fits the tail-corrected times instead of the raw
    threshold crossings.
    """
    if not records:
        raise ValueError("no lifespan records to fit")
    keys = {(r.p, r.profile, r.dt_policy, r.case) for r in records}
    if len(keys) != 1:
        raise ValueError(f"records mix configurations: {sorted(map(str, keys))}")
    bad = [r.epsilon for r in records if not r.resolved]
    if bad:
        raise ValueError(f"unresolved records for eps = {bad}")
    eps = np.array([r.epsilon for r in records])
    T = np.array([r.extrapolated_T if use == "extrapolated" else r.detected_T for r in records])
    decades = float(np.log10(eps.max() / eps.min()))
    if decades < MIN_DECADES - 1e-9:
        raise ValueError(f"fit needs >= {MIN_DECADES:g} decades of eps, got {decades:.2f}")
    x, y = np.log(eps), np.log(T)
    slope, intercept = np.polyfit(x, y, 1)
    resid = float(np.sqrt(np.mean((y - (slope * x + intercept)) ** 2)))
    r0 = records[0]
    pred = predicted_exponent(r0.p, r0.case)
    return ScalingFit(float(slope), float(intercept), resid, pred, abs(float(slope) - pred),
                      r0.p, r0.profile, r0.case, len(records), decades)


def oracle_records(p: float, epsilons, u0_mean: float, u1_mean: float) -> list[LifespanRecord]:
    """Records whose lifespans come from the comparison ODE, not the PDE."""
    case = U1_ZERO if u1_mean == 0 else U1_POSITIVE
    out = []
    for e in epsilons:
        T = kato_blowup_time(p, e * u0_mean, e * u1_mean)
        out.append(LifespanRecord(float(e), p, f"u0=constant({u0_mean!r});u1=constant({u1_mean!r})",
                                  T, math.inf, "oracle", True, case, T, T, True, "ode"))
    return out


def epsilon_grid(eps_min: float, eps_max: float, points: int) -> np.ndarray:
    return np.logspace(math.log10(eps_min), math.log10(eps_max), points)
