"""Builtin data generators: smooth random fields, Gaussian bumps, manufactured forms."""

from __future__ import annotations

import numpy as np

from .exterior import FormField, MultiIndex
from .strip import BoundaryField, ScalarField, StripGrid


def random_profile(rng: np.random.Generator, x: np.ndarray, terms: int = 3, rates=(1.0, 3.0)) -> np.ndarray:
    """Smooth decaying complex profile ``sum c_m x^m exp(-a_m x)``."""
    out = np.zeros(len(x), dtype=complex)
    for m in range(terms):
        a = rng.uniform(*rates)
        c = rng.standard_normal() + 1j * rng.standard_normal()
        out += c * x**m * np.exp(-a * x)
    return out


def _band_mask(grid: StripGrid, kmax=None) -> np.ndarray:
    kmax = grid.M // 4 if kmax is None else kmax
    return grid.max_abs_k <= kmax


def band_limited_field(
    grid: StripGrid, rng: np.random.Generator, kmax=None, terms: int = 3, rates=(1.0, 3.0)
) -> ScalarField:
    """Random field with modes ``|k_j| <= kmax`` (default ``M/4``) and smooth decaying profiles.

    Each mode carries ``sum c_m x0^m exp(-a_m x0)`` with independent complex
    coefficients and rates drawn uniformly from ``rates``.
    """
    mask = _band_mask(grid, kmax)
    x = grid.x0
    hat = np.zeros(grid.shape, dtype=complex)
    for m in range(terms):
        a = rng.uniform(*rates, size=grid.boundary_shape)
        c = (rng.standard_normal(grid.boundary_shape) + 1j * rng.standard_normal(grid.boundary_shape)) * mask
        xm = (x**m).reshape((grid.P,) + (1,) * grid.N)
        hat += c * xm * np.exp(-np.multiply.outer(x, a))
    return ScalarField.from_modes(grid, hat)


def band_limited_boundary(grid: StripGrid, rng: np.random.Generator, kmax=None) -> BoundaryField:
    mask = _band_mask(grid, kmax)
    shape = grid.boundary_shape
    vhat = (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) * mask
    return BoundaryField.from_modes(grid, vhat)


def random_form(grid: StripGrid, degree: int, rng: np.random.Generator, in_dom_dstar: bool = False, **kw) -> FormField:
    """Random band-limited form; optionally profile-corrected into the adjoint domain.

    With ``in_dom_dstar`` the normal components ``psi_{0J}`` use profiles
    ``(1 + a x0 + b x0^2) exp(-a x0)`` whose first normal derivative vanishes
    at the boundary exactly.
    """
    comps = []
    for K in MultiIndex.all(degree, grid.N):
        if in_dom_dstar and 0 in K:
            comps.append(_flat_slope_field(grid, rng, **kw))
        else:
            comps.append(band_limited_field(grid, rng, **kw).values)
    return FormField(grid, degree, np.stack(comps))


def _flat_slope_field(grid: StripGrid, rng, kmax=None, rates=(1.0, 3.0), terms: int = 3) -> np.ndarray:
    # sum c_m (1 + a_m x0 + b_m x0^2) exp(-a_m x0): the x0-derivative at 0 is exactly zero
    mask = _band_mask(grid, kmax)
    x = grid.x0
    shape = grid.boundary_shape
    hat = np.zeros(grid.shape, dtype=complex)
    for _ in range(terms):
        a = rng.uniform(*rates, size=shape)
        b = rng.uniform(-1.0, 1.0, size=shape)
        c = (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) * mask
        xx = np.multiply.outer(x, np.ones(shape))
        hat += c * (1.0 + a * xx + b * xx**2) * np.exp(-xx * a)
    return grid.idft(hat)


def gaussian_bump(grid: StripGrid, center=None, width: float = 1.0, amplitude: float = 1.0) -> ScalarField:
    """Gaussian in all directions, periodic tangentially, centred at ``(x0, x', ...)``."""
    if center is None:
        center = (2.0,) + (grid.L / 2,) * grid.N
    coords = grid.mesh()
    r2 = (coords[0] - center[0]) ** 2
    for j in range(1, grid.N + 1):
        dx = coords[j] - center[j]
        dx = (dx + grid.L / 2) % grid.L - grid.L / 2
        r2 = r2 + dx**2
    return ScalarField.from_function(grid, lambda *_: amplitude * np.exp(-r2 / width**2))


def manufactured_form(grid: StripGrid, degree: int, rng: np.random.Generator, kmax=None, rates=(2.5, 3.5)) -> FormField:
    """Random form that satisfies the boundary conditions of the Hodge problem exactly.

    Per mode, tangential components (``0`` not in ``K``) use
    ``exp(-r1 x) - (r1/r2)^2 exp(-r2 x)`` (zero second derivative at 0) and
    normal components use ``exp(-r1 x) - (r1/r2) exp(-r2 x)`` (zero slope).
    Rates are large enough that the profiles vanish to rounding at ``X_max = 12``.

    The tangential mean gets ``(1 + r1 x + (r1 x)^2 / 2) exp(-r1 x)`` or
    ``x^2 exp(-r1 x)`` instead. Both also kill the boundary trace that feeds
    the nonlocal term, whose zero-mode extension ``exp(-x0)`` would otherwise
    leave a datum tail of size ``X_max exp(-X_max)`` beyond the strip.
    """
    r1, r2 = rates
    x = grid.x0
    mask = _band_mask(grid, kmax)
    shape = grid.boundary_shape
    e1 = np.exp(-r1 * x)
    e2 = np.exp(-r2 * x)
    zero = (slice(None),) + (0,) * grid.N
    comps = []
    for K in MultiIndex.all(degree, grid.N):
        if 0 in K:
            prof, prof0 = e1 - (r1 / r2) * e2, x**2 * e1
        else:
            prof, prof0 = e1 - (r1 / r2) ** 2 * e2, (1.0 + r1 * x + 0.5 * (r1 * x) ** 2) * e1
        c = (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) * mask
        hat = np.multiply.outer(prof, c)
        hat[zero] = prof0 * c[(0,) * grid.N]
        comps.append(grid.idft(hat))
    return FormField(grid, degree, np.stack(comps))
