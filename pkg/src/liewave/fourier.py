"""Group Fourier transform between grid samples and coefficient matrices.

Coefficients follow ``f^(xi) = int f(x) xi(x)^* dx`` and the inverse series
``f(x) = sum_xi d_xi tr(xi(x) f^(xi))``. On the torus both directions are
FFTs; on SU(2) they are direct sums against the sampled Wigner matrices.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .groups import TORUS, GroupSpec, Mode, evaluate_representation


@dataclass(eq=False)
class GridField:
    """Samples of a function at the nodes of ``spec.grid``."""

    spec: GroupSpec
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values)
        if self.values.shape != (len(self.spec.grid),):
            raise ValueError(
                f"grid field has {self.values.size} values, grid has {len(self.spec.grid)}"
            )


@dataclass(eq=False)
class SpectralField:
    """Coefficient matrices for every mode up to the band limit.

    Stored flat (see :class:`~liewave.groups.ModeLayout`); ``field[mode]``
    returns the ``d x d`` matrix as a view.
    """

    spec: GroupSpec
    data: np.ndarray

    def __post_init__(self):
        self.data = np.asarray(self.data, dtype=complex)
        if self.data.shape != (self.spec.layout.size,):
            raise ValueError(
                f"expected {self.spec.layout.size} coefficient entries, got {self.data.shape}"
            )

    @classmethod
    def zeros(cls, spec: GroupSpec) -> SpectralField:
        return cls(spec, np.zeros(spec.layout.size, dtype=complex))

    @classmethod
    def from_coeffs(cls, spec: GroupSpec, coeffs: dict) -> SpectralField:
        """Build from a ``{mode: matrix}`` mapping; absent modes are zero."""
        out = cls.zeros(spec)
        for mode, mat in coeffs.items():
            mat = np.asarray(mat, dtype=complex).reshape(mode.dim, mode.dim)
            out.data[spec.layout.slice(mode)] = mat.ravel()
        return out

    def __getitem__(self, mode: Mode) -> np.ndarray:
        return self.data[self.spec.layout.slice(mode)].reshape(mode.dim, mode.dim)

    @property
    def coeffs(self) -> dict:
        return {m: self[m] for m in self.spec.modes}

    @property
    def zero_mode(self) -> complex:
        return complex(self.data[0])

    def copy(self) -> SpectralField:
        return SpectralField(self.spec, self.data.copy())

    def _check(self, other: SpectralField):
        if not self.spec.same_modes(other.spec):
            raise ValueError("spectral fields live on different groups or band limits")

    def __add__(self, other):
        self._check(other)
        return SpectralField(self.spec, self.data + other.data)

    def __sub__(self, other):
        self._check(other)
        return SpectralField(self.spec, self.data - other.data)

    def __mul__(self, scalar):
        return SpectralField(self.spec, self.data * scalar)

    __rmul__ = __mul__

    def __neg__(self):
        return SpectralField(self.spec, -self.data)


def _torus_index(spec: GroupSpec) -> tuple[np.ndarray, ...]:
    cached = spec.__dict__.get("_fft_index")
    if cached is None:
        N = spec.grid.shape[0]
        k = np.array([m.index for m in spec.modes], dtype=int)
        cached = tuple(np.mod(k[:, j], N) for j in range(spec.n))
        spec.__dict__["_fft_index"] = cached
    return cached


def analyze(f: GridField) -> SpectralField:
    """Forward transform ``sum_i w_i f(x_i) xi(x_i)^*``."""
    spec = f.spec
    if f.values.shape != (len(spec.grid),):
        raise ValueError("grid field does not match its spec's grid")
    values = np.asarray(f.values, dtype=complex)
    if spec.kind == TORUS:
        grid = spec.grid
        hat = np.fft.fftn(values.reshape(grid.shape)) / len(grid)
        return SpectralField(spec, hat[_torus_index(spec)])
    return SpectralField(spec, spec.basis.conj().T @ (spec.grid.weights * values))


def synthesize(F: SpectralField) -> GridField:
    """Inverse transform ``sum_xi d_xi tr(xi(x_i) F(xi))`` on the grid."""
    spec = F.spec
    if spec.kind == TORUS:
        grid = spec.grid
        hat = np.zeros(grid.shape, dtype=complex)
        hat[_torus_index(spec)] = F.data
        return GridField(spec, np.fft.ifftn(hat).ravel() * len(grid))
    return GridField(spec, spec.basis @ (spec.layout.entry_dims * F.data))


def analyze_direct(f: GridField) -> SpectralField:
    """Forward transform by direct summation on any backend (reference path)."""
    spec = f.spec
    return SpectralField(spec, spec.basis.conj().T @ (spec.grid.weights * f.values))


def synthesize_direct(F: SpectralField) -> GridField:
    spec = F.spec
    return GridField(spec, spec.basis @ (spec.layout.entry_dims * F.data))


def evaluate(F: SpectralField, points) -> np.ndarray:
    """Evaluate the Fourier series at arbitrary group points."""
    points = np.atleast_2d(np.asarray(points, dtype=float))
    out = np.zeros(len(points), dtype=complex)
    for mode in F.spec.modes:
        mats = evaluate_representation(F.spec, mode, points)
        out += mode.dim * np.einsum("iab,ba->i", mats, F[mode])
    return out


def plancherel_norm(F: SpectralField) -> float:
    """``sqrt(sum_xi d_xi ||F(xi)||_HS^2)``."""
    return float(np.sqrt(np.sum(F.spec.layout.entry_dims * np.abs(F.data) ** 2)))


def apply_symbol(F: SpectralField, s: float) -> SpectralField:
    """Coefficients of ``(-L)^{s/2} f``: multiply mode-wise by ``lambda^s``."""
    lam2 = F.spec.layout.entry_eigenvalues
    return SpectralField(F.spec, F.data * lam2 ** (s / 2))


def laplacian(F: SpectralField) -> SpectralField:
    return SpectralField(F.spec, -F.spec.layout.entry_eigenvalues * F.data)


def sobolev_norm(F: SpectralField, s: float = 1.0) -> tuple[float, float]:
    """Return ``(||(-L)^{s/2} f||, ||f|| + ||(-L)^{s/2} f||)`` in L^2."""
    if s <= 0:
        raise ValueError("Sobolev order must be positive")
    lam2 = F.spec.layout.entry_eigenvalues
    w = F.spec.layout.entry_dims
    homog = float(np.sqrt(np.sum(w * lam2**s * np.abs(F.data) ** 2)))
    return homog, plancherel_norm(F) + homog


def lq_norm(f: GridField, q: float) -> float:
    """Quadrature ``L^q`` norm on the grid; ``q = inf`` gives the max."""
    if q < 1:
        raise ValueError("L^q norms need q >= 1")
    a = np.abs(f.values)
    if np.isinf(q):
        return float(a.max())
    return float(np.sum(f.spec.grid.weights * a**q) ** (1.0 / q))


def realify(F: SpectralField) -> SpectralField:
    """Coefficients of the real part of the represented function."""
    g = synthesize(F)
    return analyze(GridField(F.spec, g.values.real.astype(complex)))


def reality_defect(F: SpectralField) -> float:
    """Largest imaginary part of the represented function on the grid."""
    return float(np.max(np.abs(synthesize(F).values.imag), initial=0.0))


def random_field(spec: GroupSpec, rng: np.random.Generator, decay: float = 0.0,
                 real: bool = True, normalize: bool = False) -> SpectralField:
    """Standard complex Gaussian coefficients with envelope ``(1+lambda^2)^(-decay/2)``."""
    size = spec.layout.size
    z = (rng.standard_normal(size) + 1j * rng.standard_normal(size)) / np.sqrt(2)
    z *= (1.0 + spec.layout.entry_eigenvalues) ** (-decay / 2)
    F = SpectralField(spec, z)
    if real:
        F = realify(F)
    if normalize:
        nrm = plancherel_norm(F)
        if nrm > 0:
            F = F * (1.0 / nrm)
    return F


def spectral_tail(F: SpectralField) -> float:
    """Fraction of Plancherel mass carried by the top eigenvalue decade."""
    layout = F.spec.layout
    top = layout.entry_eigenvalues.max(initial=0.0)
    if top == 0:
        return 0.0
    mass = layout.entry_dims * np.abs(F.data) ** 2
    total = mass.sum()
    if total == 0:
        return 0.0
    return float(mass[layout.entry_eigenvalues > top / 10].sum() / total)


__all__ = [
    "GridField",
    "SpectralField",
    "analyze",
    "synthesize",
    "analyze_direct",
    "synthesize_direct",
    "evaluate",
    "plancherel_norm",
    "sobolev_norm",
    "apply_symbol",
    "laplacian",
    "lq_norm",
    "realify",
    "reality_defect",
    "random_field",
    "spectral_tail",
]
