"""Uniform box grids, sampled radial fields, and Fourier kernels.

Grid convention: per axis, N (even) nodes x_k = -L + k·(2L/N) on [-L, L),
so 0 is always a node. Quadrature is the trapezoid rule in the form it
takes for integrands that have already decayed below tolerance at the
boundary: spacing^rank times a pairwise sum.

Two transform paths share one convention  F(xi) = h^l * sum_k e^{sign*i<xi,x_k>} v_k:

* `fourier_native`  - FFT, output on the dual grid xi_j = (j - N/2)*2pi/(N h)
* `fourier_at`      - separable matrix product, arbitrary output nodes per axis
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import GridTooSmall


class Representation(enum.Enum):
    """Whether a field stores u itself or the conjugated profile u·φ."""
    PLAIN = "plain"
    CONJUGATED = "conjugated"


class Method(enum.Enum):
    CLOSED_FORM = "closed_form"
    SPECTRAL = "spectral"


class GridMode(enum.Enum):
    SCALED = "scaled"
    FIXED = "fixed"


@dataclass(frozen=True)
class RadialGrid:
    """Uniform Cartesian lattice on [-half_width, half_width)^rank."""

    rank: int
    half_width: float
    points_per_axis: int

    def __post_init__(self):
        if self.rank < 1:
            raise ValueError("rank must be >= 1")
        if self.half_width <= 0:
            raise ValueError("half_width must be positive")
        n = self.points_per_axis
        if n < 2 or n % 2 != 0:
            raise ValueError("points_per_axis must be even and >= 2")

    @property
    def spacing(self) -> float:
        return 2.0 * self.half_width / self.points_per_axis

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.points_per_axis,) * self.rank

    @property
    def axis(self) -> np.ndarray:
        """1-D node coordinates (shared by every axis)."""
        return -self.half_width + self.spacing * np.arange(self.points_per_axis)

    def meshes(self) -> list[np.ndarray]:
        return list(np.meshgrid(*([self.axis] * self.rank), indexing="ij"))

    def nodes(self) -> np.ndarray:
        """All nodes as an (N^rank, rank) array, C-ordered."""
        return np.stack([m.ravel() for m in self.meshes()], axis=-1)

    def radius_sq(self) -> np.ndarray:
        """|x|^2 at every node, shape = self.shape."""
        out = np.zeros(self.shape)
        for m in self.meshes():
            out += m * m
        return out

    def cell_volume(self) -> float:
        return self.spacing ** self.rank

    def dual(self) -> "RadialGrid":
        """The FFT-native frequency grid (same N, half-width pi/spacing)."""
        return RadialGrid(self.rank, np.pi / self.spacing, self.points_per_axis)

    def scaled(self, factor: float) -> "RadialGrid":
        return RadialGrid(self.rank, self.half_width * factor,
                          self.points_per_axis)


@dataclass(frozen=True)
class BiInvariantField:
    """Complex samples of a radial profile on a RadialGrid.

    `representation` records whether values are u (PLAIN, Weyl-invariant)
    or u·φ (CONJUGATED, Weyl-antisymmetric). PLAIN fields recovered by
    dividing by φ carry NaN at wall nodes.
    """

    grid: RadialGrid
    values: np.ndarray
    representation: Representation

    def __post_init__(self):
        if self.values.shape != self.grid.shape:
            raise ValueError(
                f"values shape {self.values.shape} != grid {self.grid.shape}")
        self.values.setflags(write=False)

    def with_values(self, values: np.ndarray,
                    representation: Representation | None = None) -> "BiInvariantField":
        return BiInvariantField(self.grid, np.ascontiguousarray(values),
                                representation or self.representation)


@dataclass(frozen=True)
class SpectralField:
    """Spherical-transform samples on a spectral-side RadialGrid.

    `singular_mask` flags nodes on Weyl walls, where the stored value is 0
    by convention: the Plancherel density vanishes quadratically there, so
    synthesis never reads those nodes.
    """

    grid: RadialGrid
    values: np.ndarray
    singular_mask: np.ndarray | None = None

    def __post_init__(self):
        if self.values.shape != self.grid.shape:
            raise ValueError("values shape does not match grid")
        self.values.setflags(write=False)
        if self.singular_mask is not None:
            self.singular_mask.setflags(write=False)


# --- quadrature and norms ---------------------------------------------------

def lq_norm(values: np.ndarray, grid: RadialGrid, q: float) -> float:
    """L^q(dH) norm over the grid; q = inf gives the nodewise sup."""
    a = np.abs(values)
    if np.isinf(q):
        return float(a.max())
    return float((a**q).sum() * grid.cell_volume()) ** (1.0 / q)


def l2_norm(values: np.ndarray, grid: RadialGrid) -> float:
    return lq_norm(values, grid, 2.0)


def relative_l2(a: np.ndarray, b: np.ndarray, grid: RadialGrid) -> float:
    """Relative L² distance ||a-b|| / ||b||."""
    return l2_norm(a - b, grid) / l2_norm(b, grid)


def boundary_tail(values: np.ndarray) -> float:
    """max |values| over the outermost node shells, relative to the peak."""
    a = np.abs(values)
    peak = a.max()
    if peak == 0:
        return 0.0
    worst = 0.0
    for ax in range(values.ndim):
        first = a.take(0, axis=ax).max()
        last = a.take(-1, axis=ax).max()
        worst = max(worst, first, last)
    return float(worst / peak)


def require_tail(values: np.ndarray, tol: float = 1e-12,
                 what: str = "field") -> None:
    t = boundary_tail(values)
    if t > tol:
        raise GridTooSmall(
            f"{what} boundary tail {t:.2e} exceeds {tol:.0e}; enlarge the box")


def support_radius(values: np.ndarray, grid: RadialGrid,
                   rel: float = 1e-12) -> float:
    """Largest node |x|_inf where |values| still exceeds rel·peak."""
    a = np.abs(values)
    peak = a.max()
    if peak == 0:
        return 0.0
    mask = a > rel * peak
    if not mask.any():
        return 0.0
    ax = np.abs(grid.axis)
    out = 0.0
    for d in range(values.ndim):
        keep = mask.any(axis=tuple(i for i in range(values.ndim) if i != d))
        out = max(out, float(ax[keep].max()))
    return out


# --- Fourier kernels --------------------------------------------------------

def fourier_native(values: np.ndarray, grid: RadialGrid,
                   sign: int = -1) -> tuple[RadialGrid, np.ndarray]:
    """FFT evaluation of h^l Σ_k e^{sign·i⟨ξ,x⟩} v_k on the dual grid.

    With x_k = -L + k h and ξ_j = (j - N/2)·2π/(N h), the kernel factors
    into the standard DFT times (-1)^k and a boundary phase per axis.
    """
    n = grid.points_per_axis
    dual = grid.dual()
    xi = dual.axis
    alt = (-1.0) ** np.arange(n)
    out = np.asarray(values, dtype=complex)
    for ax in range(grid.rank):
        shape = [1] * grid.rank
        shape[ax] = n
        out = out * alt.reshape(shape)
        if sign == -1:
            out = np.fft.fft(out, axis=ax)
            phase = np.exp(1j * xi * grid.half_width)
        else:
            out = np.fft.ifft(out, axis=ax) * n
            phase = np.exp(-1j * xi * grid.half_width)
        out = out * (grid.spacing * phase).reshape(shape)
    return dual, out


def fourier_at(values: np.ndarray, grid: RadialGrid,
               out_axes: list[np.ndarray], sign: int = -1) -> np.ndarray:
    """Separable direct evaluation of the same sum at arbitrary output nodes.

    `out_axes` holds one 1-D node array per axis; cost is O(M·N) per axis
    pair, exact (no aliasing tricks), and deterministic.
    """
    x = grid.axis
    out = np.asarray(values, dtype=complex)
    for ax, xi in enumerate(out_axes):
        kernel = np.exp(sign * 1j * np.outer(np.asarray(xi, dtype=float), x))
        kernel *= grid.spacing
        out = np.moveaxis(np.tensordot(kernel, out, axes=([1], [ax])), 0, ax)
    return out


# --- lattice-compatible Weyl symmetry checks --------------------------------

def weyl_symmetry_residual(values: np.ndarray, grid: RadialGrid,
                           matrices: np.ndarray, signs: np.ndarray,
                           odd: bool) -> float:
    """Max |v(sH) - (det s)^k v(H)| over lattice-compatible Weyl elements.

    k = 1 for antisymmetric (odd=True) fields, 0 for invariant ones.
    Elements whose matrices move nodes off the lattice are skipped; every
    supported system keeps at least one nontrivial element (e.g. -1 on a
    rank-1 factor) lattice-compatible.
    """
    n = grid.points_per_axis
    scale = np.abs(values).max()
    if scale == 0:
        return 0.0
    worst = 0.0
    grids_idx = np.meshgrid(*([np.arange(n)] * grid.rank), indexing="ij")
    for mat, sgn in zip(matrices, signs):
        rounded = np.round(mat)
        if np.abs(mat - rounded).max() > 1e-12:
            continue
        if not np.all(np.isin(rounded, (-1.0, 0.0, 1.0))):
            continue
        ok = np.ones(grid.shape, dtype=bool)
        src = []
        for out_ax in range(grid.rank):
            nz = np.nonzero(rounded[out_ax])[0]
            if len(nz) != 1:
                ok = None
                break
            src_ax = int(nz[0])
            if rounded[out_ax, src_ax] > 0:
                idx = grids_idx[src_ax]
            else:
                idx = (n - grids_idx[src_ax]) % n
                ok &= grids_idx[src_ax] != 0
            src.append(idx)
        if ok is None:
            continue
        mapped = values[tuple(src)]
        target = (sgn if odd else 1.0) * values
        diff = np.abs(mapped - target)[ok]
        if diff.size:
            worst = max(worst, float(diff.max() / scale))
    return worst
