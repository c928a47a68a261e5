"""Empirical checks of the Gagliardo-Nirenberg type inequality

    ||f||_{L^q} <= C ||f||_{H^1}^theta ||f||_{L^2}^(1 - theta),
    theta(n, q) = n (1/2 - 1/q),   2 <= q <= 2n/(n-2),  n >= 3,

plus the admissibility guard shared with the local-existence range
``p <= n/(n-2)`` (which is ``q = 2p`` in the window above).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .fourier import lq_norm, plancherel_norm, random_field, sobolev_norm, synthesize
from .groups import GroupSpec


class AdmissibilityError(ValueError):
    """Raised outside the exponent range where the local theory applies."""


def q_max(n: int) -> float:
    return 2 * n / (n - 2)


def check_gn_admissible(n: int, q: float) -> None:
    if n < 3:
        raise AdmissibilityError(f"the inequality needs topological dimension n >= 3, got n = {n}")
    if not 2 <= q <= q_max(n) + 1e-12:
        raise AdmissibilityError(
            f"q = {q:g} is outside 2 <= q <= 2n/(n-2) = {q_max(n):g} for n = {n}"
        )


def check_local_existence(n: int, p: float) -> None:
    """Guard for the local-existence regime: ``n >= 3`` and ``1 < p <= n/(n-2)``."""
    if p <= 1:
        raise AdmissibilityError(f"p must exceed 1, got {p:g}")
    if n < 3:
        raise AdmissibilityError(
            f"local existence in the energy space needs n >= 3, got n = {n}"
            " (disable the guard for blow-up runs)"
        )
    if p > n / (n - 2) + 1e-12:
        raise AdmissibilityError(
            f"p = {p:g} exceeds n/(n-2) = {n / (n - 2):g}, the range where"
            f" 2p <= 2n/(n-2) = {q_max(n):g} (disable the guard for blow-up runs)"
        )


def theta(n: int, q: float) -> float:
    check_gn_admissible(n, q)
    return n * (0.5 - 1.0 / q)


def gn_ratio(F, q: float, th: float, homogeneous: bool = False) -> float:
    """``||f||_q / (||f||_{H^1}^theta ||f||_2^(1-theta))`` for one field.

    ``homogeneous=True`` replaces the full ``H^1`` norm by its homogeneous part.
    """
    lq = lq_norm(synthesize(F), q)
    l2 = plancherel_norm(F)
    homog, full = sobolev_norm(F, 1.0)
    h1 = homog if homogeneous else full
    den = h1**th * l2 ** (1 - th)
    return lq / den if den > 0 else float("nan")


@dataclass
class GNReport:
    n: int
    q: float
    theta: float
    samples: int
    max_ratio: float
    argmax_seed: int
    band_limit: float
    ratios: np.ndarray = field(repr=False)
    seeds: np.ndarray = field(repr=False)

    def csv_row(self) -> dict:
        return {
            "n": self.n, "q": self.q, "theta": self.theta, "samples": self.samples,
            "max_ratio": self.max_ratio, "argmax_seed": self.argmax_seed,
            "band_limit": self.band_limit,
        }


def sample_seeds(seed: int, samples: int) -> np.ndarray:
    """Deterministic per-sample seeds, independent of evaluation order."""
    return np.random.SeedSequence(seed).generate_state(samples, dtype=np.uint32)


def gn_ratio_sweep(spec: GroupSpec, q: float, samples: int, seed: int,
                   decay: float = 1.0) -> GNReport:
    """Max GN ratio over random real band-limited fields with unit L^2 norm.

    The grid is refined so that ``|f|^q`` is integrated exactly for even
    integer ``q``.
    """
    th = theta(spec.topological_dim, q)
    if spec.dealias < q / 2:
        spec = spec.with_dealias(q / 2)
    seeds = sample_seeds(seed, samples)
    ratios = np.empty(samples)
    for i, s in enumerate(seeds):
        F = random_field(spec, np.random.default_rng(int(s)), decay=decay, normalize=True)
        ratios[i] = gn_ratio(F, q, th)
    j = int(np.argmax(ratios))
    return GNReport(spec.topological_dim, float(q), th, samples, float(ratios[j]),
                    int(seeds[j]), spec.band_limit, ratios, seeds)
