"""Unitary-dual backends for the torus T^n and for SU(2).

Each backend enumerates representation classes up to a band limit on the
Laplace-Beltrami eigenvalue, samples the representation matrices on a product
quadrature grid, and supplies weights for the normalized Haar measure.

SU(2) uses Euler angles ``(alpha, beta, gamma)`` with ``alpha`` in
``[0, 2pi)``, ``beta`` in ``[0, pi]`` and ``gamma`` in ``[0, 4pi)``; the
Haar measure is ``sin(beta) dalpha dbeta dgamma / (16 pi^2)``. Representation
``l`` acts as the Wigner matrix ``D^l_{mn} = exp(-i m alpha) d^l_{mn}(beta)
exp(-i n gamma)`` with rows ordered ``m = l, l-1, ..., -l``. The metric is
the one for which ``-L D^l = l(l+1) D^l``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field, replace
from functools import cached_property

import numpy as np

TORUS = "torus"
SU2 = "su2"


@dataclass(frozen=True, order=True)
class Mode:
    """One class of the unitary dual.

    ``index`` is the frequency vector ``k`` on the torus and ``(2l,)`` on
    SU(2), so half-integer labels never appear as floats.
    """

    eigenvalue: float
    index: tuple[int, ...]
    dim: int = field(compare=False)
    kind: str = field(default="torus", compare=False)

    @property
    def is_trivial(self) -> bool:
        return self.eigenvalue == 0.0

    @property
    def spin(self) -> float:
        """SU(2) label ``l``; meaningless on the torus."""
        return self.index[0] / 2

    def label(self) -> str:
        if self.kind == SU2:
            two_l = self.index[0]
            return f"l={two_l // 2}" if two_l % 2 == 0 else f"l={two_l}/2"
        return "k=(" + ",".join(str(k) for k in self.index) + ")"


@dataclass(frozen=True, eq=False)
class QuadratureGrid:
    """Product quadrature for the normalized Haar measure.

    ``points`` has one row per node (angle vector on T^n, Euler triple on
    SU(2)); ``shape`` is the tensor-product layout the flat arrays unravel to.
    """

    points: np.ndarray
    weights: np.ndarray
    shape: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.weights)


class ModeLayout:
    """Flat storage layout of all coefficient matrices up to the band limit.

    Coefficient entries are concatenated mode by mode, each ``d x d`` matrix
    row-major. ``entry_eigenvalues`` and ``entry_dims`` repeat the mode's
    eigenvalue and dimension for every entry so that mode-wise operations
    become elementwise array operations.
    """

    def __init__(self, modes: list[Mode]):
        self.modes = tuple(modes)
        sizes = np.array([m.dim * m.dim for m in modes], dtype=int)
        self.offsets = np.concatenate([[0], np.cumsum(sizes)])
        self.size = int(self.offsets[-1])
        self.entry_eigenvalues = np.repeat([m.eigenvalue for m in modes], sizes).astype(float)
        self.entry_dims = np.repeat([m.dim for m in modes], sizes).astype(float)
        self._position = {m: i for i, m in enumerate(modes)}

    def __len__(self) -> int:
        return len(self.modes)

    def __contains__(self, mode) -> bool:
        return mode in self._position

    def slice(self, mode: Mode) -> slice:
        try:
            i = self._position[mode]
        except KeyError:
            raise ValueError(f"mode {mode.label()} is not below the band limit") from None
        return slice(int(self.offsets[i]), int(self.offsets[i + 1]))

    @property
    def trivial(self) -> Mode:
        return self.modes[0]


@dataclass(frozen=True)
class GroupSpec:
    """Which compact group, up to which Laplace-Beltrami eigenvalue.

    Grids are sized so that every function in the span of representation
    entries with total degree ``dealias * 2 * L`` is integrated exactly, where
    ``L`` is the largest admitted frequency (``max |k_i|`` on the torus, the
    largest spin ``l`` on SU(2)). ``dealias=1`` is the minimum for discrete
    orthogonality; the default 2 leaves room for cubic products and for
    ``L^4`` quadrature norms.
    """

    kind: str
    n: int
    band_limit: float
    dealias: float = 2.0

    def __post_init__(self):
        if self.kind not in (TORUS, SU2):
            raise ValueError(f"unknown group kind {self.kind!r}")
        if self.kind == TORUS and self.n < 1:
            raise ValueError("Torus(n) needs n >= 1")
        if self.kind == SU2 and self.n != 3:
            raise ValueError("SU(2) has topological dimension 3")
        if not (self.band_limit >= 0 and math.isfinite(self.band_limit)):
            raise ValueError("band_limit must be a finite nonnegative number")
        if self.dealias < 1:
            raise ValueError("dealias must be >= 1")

    @classmethod
    def torus(cls, n: int, band_limit: float, dealias: float = 2.0) -> GroupSpec:
        return cls(TORUS, n, float(band_limit), float(dealias))

    @classmethod
    def su2(cls, band_limit: float, dealias: float = 2.0) -> GroupSpec:
        return cls(SU2, 3, float(band_limit), float(dealias))

    @property
    def topological_dim(self) -> int:
        return self.n

    @property
    def name(self) -> str:
        return "SU2" if self.kind == SU2 else f"T{self.n}"

    def with_dealias(self, dealias: float) -> GroupSpec:
        return replace(self, dealias=float(dealias))

    @cached_property
    def max_frequency(self) -> int:
        """``K`` on the torus, ``2 l_max`` on SU(2)."""
        if self.kind == TORUS:
            return math.isqrt(int(math.floor(self.band_limit + 1e-9)))
        two_l = 0
        while (two_l + 1) * (two_l + 3) / 4 <= self.band_limit + 1e-12:
            two_l += 1
        return two_l

    @cached_property
    def modes(self) -> list[Mode]:
        return enumerate_modes(self)

    @cached_property
    def layout(self) -> ModeLayout:
        return ModeLayout(self.modes)

    @cached_property
    def grid(self) -> QuadratureGrid:
        return build_grid(self)

    @cached_property
    def basis(self) -> np.ndarray:
        """Matrix ``B`` with ``B[i, entry(xi, a, b)] = xi(x_i)[b, a]``.

        With it, synthesis is ``B @ (d * c)`` and analysis ``B^H @ (w * f)``.
        """
        layout = self.layout
        out = np.empty((len(self.grid), layout.size), dtype=complex)
        for mode in layout.modes:
            mats = sample_representation(self, mode)
            out[:, layout.slice(mode)] = np.swapaxes(mats, 1, 2).reshape(len(mats), -1)
        return out

    def same_modes(self, other: GroupSpec) -> bool:
        return (
            self.kind == other.kind
            and self.n == other.n
            and (self.layout is other.layout or self.layout.modes == other.layout.modes)
        )


def enumerate_modes(spec: GroupSpec) -> list[Mode]:
    """All classes with eigenvalue <= band_limit, sorted by (eigenvalue, index)."""
    out = []
    if spec.kind == TORUS:
        K = spec.max_frequency
        for k in itertools.product(range(-K, K + 1), repeat=spec.n):
            lam2 = sum(ki * ki for ki in k)
            if lam2 <= spec.band_limit:
                out.append(Mode(float(lam2), tuple(k), 1))
    else:
        for two_l in range(spec.max_frequency + 1):
            out.append(Mode(two_l * (two_l + 2) / 4, (two_l,), two_l + 1, SU2))
    out.sort()
    return out


def _exact_degree(spec: GroupSpec) -> int:
    return int(math.ceil(spec.dealias * 2 * spec.max_frequency - 1e-9))


def build_grid(spec: GroupSpec) -> QuadratureGrid:
    """Tensor-product quadrature exact to the GroupSpec's dealiased degree.

    Torus: ``D + 1`` uniform nodes per circle for exact degree ``D``.
    SU(2) (degree counted in half-units ``2l``): ``floor(D/2) + 1`` uniform
    nodes in alpha, ``D + 1`` in gamma over ``[0, 4pi)`` and Gauss-Legendre in
    ``cos(beta)`` exact for polynomials of degree ``floor(D/2)``.
    """
    D = _exact_degree(spec)
    if spec.kind == TORUS:
        N = D + 1
        axis = 2 * np.pi * np.arange(N) / N
        mesh = np.meshgrid(*([axis] * spec.n), indexing="ij")
        points = np.stack([m.ravel() for m in mesh], axis=1)
        weights = np.full(N**spec.n, 1.0 / N**spec.n)
        return QuadratureGrid(points, weights, (N,) * spec.n)

    top = D // 2
    n_alpha = top + 1
    n_gamma = D + 1
    n_beta = top // 2 + 1
    alpha = 2 * np.pi * np.arange(n_alpha) / n_alpha
    gamma = 4 * np.pi * np.arange(n_gamma) / n_gamma
    x, wx = np.polynomial.legendre.leggauss(n_beta)
    beta = np.arccos(x)
    A, Bt, G = np.meshgrid(alpha, beta, gamma, indexing="ij")
    points = np.stack([A.ravel(), Bt.ravel(), G.ravel()], axis=1)
    # Gauss-Legendre weights sum to 2 = integral of sin(beta) dbeta.
    w = (wx / 2)[None, :, None] * np.ones((n_alpha, 1, n_gamma)) / (n_alpha * n_gamma)
    return QuadratureGrid(points, w.ravel(), (n_alpha, n_beta, n_gamma))


def _spin_jy(two_l: int) -> np.ndarray:
    """``J_y`` on the spin-``l`` irrep, basis ordered ``m = l, ..., -l``."""
    d = two_l + 1
    l = two_l / 2
    m = l - np.arange(d)
    # raising operator: <m+1|J+|m> = sqrt(l(l+1) - m(m+1))
    jplus = np.zeros((d, d))
    for i in range(1, d):
        jplus[i - 1, i] = math.sqrt(l * (l + 1) - m[i] * (m[i] + 1))
    return (jplus - jplus.T) / 2j


def wigner_small_d(two_l: int, beta) -> np.ndarray:
    """Real matrices ``d^l(beta) = exp(-i beta J_y)``, one per angle.

    Computed from the eigendecomposition of ``J_y`` (eigenvalues ``m``), which
    is unitary to rounding for every ``l``; shape ``(len(beta), d, d)``.
    """
    beta = np.atleast_1d(np.asarray(beta, dtype=float))
    if two_l == 0:
        return np.ones((len(beta), 1, 1))
    mu, V = np.linalg.eigh(_spin_jy(two_l))
    phase = np.exp(-1j * beta[:, None] * mu[None, :])
    mats = np.einsum("ij,bj,kj->bik", V, phase, V.conj())
    return mats.real


def evaluate_representation(spec: GroupSpec, mode: Mode, points) -> np.ndarray:
    """Representation matrices of ``mode`` at arbitrary group points."""
    points = np.atleast_2d(np.asarray(points, dtype=float))
    if spec.kind == TORUS:
        if points.shape[1] != spec.n:
            raise ValueError(f"torus points must have {spec.n} angles")
        phase = points @ np.asarray(mode.index, dtype=float)
        return np.exp(1j * phase)[:, None, None]
    if points.shape[1] != 3:
        raise ValueError("SU(2) points are Euler triples")
    two_l = mode.index[0]
    m = two_l / 2 - np.arange(two_l + 1)
    d = wigner_small_d(two_l, points[:, 1])
    left = np.exp(-1j * points[:, 0:1] * m[None, :])
    right = np.exp(-1j * points[:, 2:3] * m[None, :])
    return left[:, :, None] * d * right[:, None, :]


def sample_representation(spec: GroupSpec, mode: Mode) -> np.ndarray:
    """Representation matrices of ``mode`` at every grid node, ``(M, d, d)``."""
    if mode not in spec.layout:
        raise ValueError(f"mode {mode.label()} is not below the band limit")
    return evaluate_representation(spec, mode, spec.grid.points)


# Euler-angle helpers for SU(2), used by tests and the diagnostics.

def su2_matrix(points) -> np.ndarray:
    """Fundamental ``2 x 2`` matrices for Euler triples."""
    return evaluate_representation(GroupSpec.su2(0.75), Mode(0.75, (1,), 2, SU2), points)


def su2_euler_angles(U: np.ndarray) -> np.ndarray:
    """Inverse of :func:`su2_matrix` for a stack of SU(2) matrices."""
    U = np.asarray(U).reshape(-1, 2, 2)
    a = U[:, 0, 0]
    b = U[:, 1, 0]
    beta = 2 * np.arctan2(np.abs(b), np.abs(a))
    arg_a = np.angle(a)
    arg_b = np.where(np.abs(b) > 0, np.angle(b), 0.0)
    alpha = arg_b - arg_a
    gamma = -arg_a - arg_b
    return np.stack([alpha, beta, gamma], axis=1)
