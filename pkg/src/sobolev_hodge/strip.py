"""Periodized half space: the strip torus(L)^N x [0, X_max].

Tangential directions are periodic with period ``L`` and sampled at ``M``
points per axis; the normal direction ``x0`` is a uniform grid of ``P``
nodes. Tangential derivatives are spectral, normal derivatives use
high-order finite differences, and inner products are evaluated mode by
mode through Parseval's identity.

Array layout: a scalar field is a complex array of shape
``(P, M, ..., M)`` with the normal axis first. Spectral arrays use the same
shape with tangential axes in numpy FFT order.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from itertools import product

import numpy as np
import scipy.sparse as sp

from .errors import GridMismatch, GridTooCoarse, InvalidGrid, NonFiniteInput
from .stencils import derivative_matrix, one_sided_weights, quadrature_weights


@dataclass(frozen=True)
class StripGrid:
    """Discretization of the periodized half space.

    Parameters
    ----------
    N : int
        Number of tangential dimensions.
    L : float
        Tangential period.
    M : int
        Tangential points per axis (even, at least 4).
    X_max : float
        Normal truncation length.
    P : int
        Number of normal nodes (at least 9), spacing ``X_max / (P - 1)``.
    fd_order : int
        Accuracy order of normal finite differences and boundary traces.
    quadrature : {"gregory", "trapezoid"}
        Normal-axis integration rule used by the inner products.
    """

    N: int
    L: float
    M: int
    X_max: float
    P: int
    fd_order: int = 6
    quadrature: str = "gregory"

    def __post_init__(self):
        if int(self.N) != self.N or self.N < 1:
            raise InvalidGrid(f"N must be a positive integer, got {self.N}")
        if int(self.M) != self.M or self.M < 4 or self.M % 2:
            raise InvalidGrid(f"M must be an even integer >= 4, got {self.M}")
        if int(self.P) != self.P or self.P < 9:
            raise InvalidGrid(f"P must be an integer >= 9, got {self.P}")
        if not (np.isfinite(self.L) and self.L > 0):
            raise InvalidGrid(f"L must be positive, got {self.L}")
        if not (np.isfinite(self.X_max) and self.X_max > 0):
            raise InvalidGrid(f"X_max must be positive, got {self.X_max}")
        if self.fd_order < 2 or self.fd_order % 2:
            raise InvalidGrid(f"fd_order must be even and >= 2, got {self.fd_order}")
        if self.quadrature not in ("gregory", "trapezoid"):
            raise InvalidGrid(f"unknown quadrature {self.quadrature!r}")
        for name in ("N", "M", "P", "fd_order"):
            object.__setattr__(self, name, int(getattr(self, name)))
        object.__setattr__(self, "L", float(self.L))
        object.__setattr__(self, "X_max", float(self.X_max))

    # geometry ---------------------------------------------------------------

    @property
    def h(self) -> float:
        return self.X_max / (self.P - 1)

    @property
    def shape(self) -> tuple:
        return (self.P,) + (self.M,) * self.N

    @property
    def boundary_shape(self) -> tuple:
        return (self.M,) * self.N

    @cached_property
    def x0(self) -> np.ndarray:
        return np.linspace(0.0, self.X_max, self.P)

    @cached_property
    def xt(self) -> np.ndarray:
        """Tangential sample points along one axis."""
        return self.L * np.arange(self.M) / self.M

    def mesh(self) -> tuple:
        """Broadcastable coordinate arrays ``(x0, x1, ..., xN)`` over ``shape``."""
        return tuple(np.meshgrid(self.x0, *([self.xt] * self.N), indexing="ij", sparse=True))

    def boundary_mesh(self) -> tuple:
        return tuple(np.meshgrid(*([self.xt] * self.N), indexing="ij", sparse=True))

    # frequencies ------------------------------------------------------------

    @cached_property
    def k1d(self) -> np.ndarray:
        """Integer frequencies of one axis in FFT order, covering -M/2..M/2-1."""
        return np.fft.fftfreq(self.M, 1.0 / self.M).round().astype(int)

    @cached_property
    def wavenumbers(self) -> tuple:
        """Broadcastable angular wavenumbers ``2 pi k_j / L`` over ``boundary_shape``."""
        k = 2.0 * np.pi * self.k1d / self.L
        return tuple(np.meshgrid(*([k] * self.N), indexing="ij", sparse=True))

    @cached_property
    def beta(self) -> np.ndarray:
        """``2 pi |k| / L`` over ``boundary_shape``."""
        return np.sqrt(sum(w**2 for w in self.wavenumbers) + np.zeros(self.boundary_shape))

    @cached_property
    def omega(self) -> np.ndarray:
        return np.sqrt(1.0 + self.beta**2)

    @cached_property
    def max_abs_k(self) -> np.ndarray:
        """Largest absolute integer frequency component per mode (band-limit tests)."""
        ks = np.meshgrid(*([np.abs(self.k1d)] * self.N), indexing="ij")
        return np.max(np.stack(ks), axis=0)

    def mode_position(self, k) -> tuple:
        """Array position of the integer frequency vector ``k``."""
        k = tuple(int(v) for v in np.atleast_1d(k))
        if len(k) != self.N or any(not -self.M // 2 <= v < self.M // 2 for v in k):
            raise GridMismatch(f"frequency {k} outside the grid's frequency set")
        return tuple(v % self.M for v in k)

    # normal operators -------------------------------------------------------

    @cached_property
    def quad_weights(self) -> np.ndarray:
        return quadrature_weights(self.P, self.h, self.quadrature)

    def normal_matrix(self, order: int) -> sp.csr_matrix:
        if order == 0:
            return sp.identity(self.P, format="csr")
        return self._normal_matrices[order]

    @cached_property
    def _normal_matrices(self) -> dict:
        return {n: derivative_matrix(self.P, self.h, n, self.fd_order) for n in (1, 2, 3)}

    def trace_weights(self, j: int) -> np.ndarray:
        """One-sided weights of the ``j``-th normal derivative at ``x0 = 0``."""
        if not 0 <= j <= 3:
            raise ValueError(f"trace order must be in 0..3, got {j}")
        width = j + self.fd_order
        if self.P < width + 1:
            raise GridTooCoarse(f"trace of order {j} needs more than {width} normal nodes")
        return one_sided_weights(j, self.fd_order) / self.h**j

    # derivatives on raw arrays ---------------------------------------------

    def _normal_axis(self, arr) -> int:
        return arr.ndim - (self.N + 1)

    def diff(self, arr: np.ndarray, axis: int, n: int = 1) -> np.ndarray:
        """``n``-th derivative along ``axis`` (0 = normal) of the trailing field axes."""
        ax0 = self._normal_axis(arr)
        if axis == 0:
            return self.normal_apply(self.normal_matrix(n), arr)
        if not 1 <= axis <= self.N:
            raise ValueError(f"axis {axis} outside 0..{self.N}")
        ax = ax0 + axis
        mult = (2j * np.pi * self.k1d / self.L) ** n
        shape = [1] * arr.ndim
        shape[ax] = self.M
        spectrum = np.fft.fft(arr, axis=ax) * mult.reshape(shape)
        return np.fft.ifft(spectrum, axis=ax)

    def normal_apply(self, mat, arr: np.ndarray) -> np.ndarray:
        """Apply a ``P x P`` matrix along the normal axis of ``arr``."""
        ax0 = self._normal_axis(arr)
        moved = np.moveaxis(arr, ax0, 0)
        out = mat @ moved.reshape(self.P, -1)
        return np.moveaxis(np.asarray(out).reshape(moved.shape), 0, ax0)

    def dft(self, arr: np.ndarray) -> np.ndarray:
        """Forward tangential DFT of the trailing ``N`` axes, scaled by ``M**-N``."""
        axes = tuple(range(arr.ndim - self.N, arr.ndim))
        return np.fft.fftn(arr, axes=axes, norm="forward")

    def idft(self, arr: np.ndarray) -> np.ndarray:
        axes = tuple(range(arr.ndim - self.N, arr.ndim))
        return np.fft.ifftn(arr, axes=axes, norm="forward")

    def trace_array(self, arr: np.ndarray, j: int = 0) -> np.ndarray:
        """``j``-th normal derivative at the boundary of the trailing field axes."""
        ax0 = self._normal_axis(arr)
        if j == 0:
            return np.take(arr, 0, axis=ax0)
        w = self.trace_weights(j)
        head = np.take(arr, np.arange(len(w)), axis=ax0)
        return np.tensordot(w, np.moveaxis(head, ax0, 0), axes=(0, 0))

    # spectral norms ---------------------------------------------------------

    @cached_property
    def _tangential_weights(self) -> dict:
        """Sum of ``prod xi_i^(2 a_i)`` over tangential multi-indices with ``|a| <= r``."""
        out = {}
        sq = [w**2 for w in self.wavenumbers]
        for r in range(3):
            total = np.zeros(self.boundary_shape)
            for alpha in product(range(r + 1), repeat=self.N):
                if sum(alpha) <= r:
                    term = np.ones(self.boundary_shape)
                    for s2, a in zip(sq, alpha):
                        term = term * s2**a
                    total = total + term
            out[r] = total
        return out

    def inner_spectral(self, fhat: np.ndarray, ghat: np.ndarray, s: int) -> complex:
        """Order-``s`` Sobolev pairing of two spectral arrays (trailing field axes)."""
        if s not in (0, 1, 2):
            raise ValueError(f"interior Sobolev order must be 0, 1 or 2, got {s}")
        total = 0.0 + 0.0j
        wq = self.quad_weights.reshape((self.P,) + (1,) * self.N)
        for a0 in range(s + 1):
            df = self.normal_apply(self.normal_matrix(a0), fhat)
            dg = df if ghat is fhat else self.normal_apply(self.normal_matrix(a0), ghat)
            prod_ = df * np.conj(dg) * wq * self._tangential_weights[s - a0]
            total += np.sum(prod_)
        return complex(total * self.L**self.N)


def _check_finite(values):
    if not np.all(np.isfinite(values)):
        raise NonFiniteInput("field contains NaN or Inf")


@dataclass(frozen=True)
class ScalarField:
    """Complex samples of a function on the strip."""

    grid: StripGrid
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=complex)
        if vals.shape != self.grid.shape:
            raise GridMismatch(f"values have shape {vals.shape}, grid expects {self.grid.shape}")
        _check_finite(vals)
        object.__setattr__(self, "values", vals)

    @classmethod
    def from_function(cls, grid: StripGrid, fn) -> "ScalarField":
        """Sample ``fn(x0, x1, ..., xN)`` on broadcastable coordinate arrays."""
        vals = np.broadcast_to(np.asarray(fn(*grid.mesh()), dtype=complex), grid.shape)
        return cls(grid, np.array(vals))

    @classmethod
    def zeros(cls, grid: StripGrid) -> "ScalarField":
        return cls(grid, np.zeros(grid.shape, dtype=complex))

    @classmethod
    def from_modes(cls, grid: StripGrid, fhat: np.ndarray) -> "ScalarField":
        return cls(grid, grid.idft(fhat))

    def _other(self, other):
        if isinstance(other, ScalarField):
            if other.grid != self.grid:
                raise GridMismatch("fields live on different grids")
            return other.values
        return other

    def __add__(self, other):
        return ScalarField(self.grid, self.values + self._other(other))

    __radd__ = __add__

    def __sub__(self, other):
        return ScalarField(self.grid, self.values - self._other(other))

    def __mul__(self, c):
        return ScalarField(self.grid, self.values * self._other(c))

    __rmul__ = __mul__

    def __neg__(self):
        return ScalarField(self.grid, -self.values)


@dataclass(frozen=True)
class BoundaryField:
    """Complex samples of a function on the boundary torus."""

    grid: StripGrid
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=complex)
        if vals.shape != self.grid.boundary_shape:
            raise GridMismatch(
                f"values have shape {vals.shape}, grid expects {self.grid.boundary_shape}"
            )
        _check_finite(vals)
        object.__setattr__(self, "values", vals)

    @classmethod
    def from_function(cls, grid: StripGrid, fn) -> "BoundaryField":
        vals = np.broadcast_to(np.asarray(fn(*grid.boundary_mesh()), dtype=complex), grid.boundary_shape)
        return cls(grid, np.array(vals))

    @classmethod
    def zeros(cls, grid: StripGrid) -> "BoundaryField":
        return cls(grid, np.zeros(grid.boundary_shape, dtype=complex))

    @classmethod
    def from_modes(cls, grid: StripGrid, vhat: np.ndarray) -> "BoundaryField":
        return cls(grid, grid.idft(vhat))

    def modes(self) -> np.ndarray:
        return self.grid.dft(self.values)

    def __add__(self, other):
        return BoundaryField(self.grid, self.values + getattr(other, "values", other))

    def __sub__(self, other):
        return BoundaryField(self.grid, self.values - getattr(other, "values", other))

    def __mul__(self, c):
        return BoundaryField(self.grid, self.values * c)

    __rmul__ = __mul__


@dataclass(frozen=True)
class ModeProfile:
    """One tangential Fourier mode as a function of ``x0``."""

    k: tuple
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "k", tuple(int(v) for v in np.atleast_1d(self.k)))
        object.__setattr__(self, "values", np.asarray(self.values, dtype=complex))


def tangential_dft(f: ScalarField) -> np.ndarray:
    """Per-node tangential DFT; entry ``[p, k]`` is the Fourier coefficient of mode ``k``."""
    return f.grid.dft(f.values)


def inverse_tangential_dft(grid: StripGrid, fhat: np.ndarray) -> ScalarField:
    return ScalarField.from_modes(grid, fhat)


def mode(f: ScalarField, k) -> ModeProfile:
    """Extract the profile of tangential frequency ``k`` from a field."""
    pos = f.grid.mode_position(k)
    return ModeProfile(k, tangential_dft(f)[(slice(None),) + pos])


def trace(f: ScalarField, j: int = 0) -> BoundaryField:
    """``j``-th normal derivative at ``x0 = 0`` by a one-sided stencil."""
    return BoundaryField(f.grid, f.grid.trace_array(f.values, j))


def _same_grid(f, g):
    if f.grid != g.grid:
        raise GridMismatch("fields live on different grids")


def inner_sobolev(f: ScalarField, g: ScalarField, s: int) -> complex:
    """Sobolev pairing ``sum over |a| <= s`` of ``integral D^a f conj(D^a g)``."""
    _same_grid(f, g)
    fh = tangential_dft(f)
    gh = fh if g is f else tangential_dft(g)
    return f.grid.inner_spectral(fh, gh, s)


def _peak(values) -> float:
    peak = float(np.max(np.abs(values))) if np.size(values) else 0.0
    return peak if 0.0 < peak < np.inf else 1.0


def norm_sobolev(f: ScalarField, s: int) -> float:
    # factor out the peak so tiny or huge data do not under/overflow when squared
    peak = _peak(f.values)
    g = ScalarField(f.grid, f.values / peak)
    return peak * float(np.sqrt(max(inner_sobolev(g, g, s).real, 0.0)))


def inner_sobolev_form(phi, psi, s: int) -> complex:
    """Componentwise sum of scalar Sobolev pairings of two forms."""
    if phi.grid != psi.grid:
        raise GridMismatch("forms live on different grids")
    if phi.degree != psi.degree:
        raise GridMismatch(f"degree mismatch: {phi.degree} vs {psi.degree}")
    grid = phi.grid
    fh = grid.dft(phi.values)
    gh = fh if psi is phi else grid.dft(psi.values)
    return grid.inner_spectral(fh, gh, s)


def norm_sobolev_form(phi, s: int) -> float:
    grid = phi.grid
    peak = _peak(phi.values)
    fh = grid.dft(phi.values / peak)
    return peak * float(np.sqrt(max(grid.inner_spectral(fh, fh, s).real, 0.0)))


def boundary_norm(v: BoundaryField, s: float) -> float:
    """Torus Sobolev norm ``L^N sum (1 + |2 pi k / L|^2)^s |v_k|^2``, square-rooted."""
    grid = v.grid
    vh = v.modes()
    peak = _peak(vh)
    weight = (1.0 + grid.beta**2) ** s
    return peak * float(np.sqrt(grid.L**grid.N * np.sum(weight * np.abs(vh / peak) ** 2)))
