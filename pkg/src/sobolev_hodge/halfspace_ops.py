"""Boundary-coupled operators of the W^1 Hodge problem on the strip.

The kernel operator sends boundary data ``v`` to the field whose tangential
modes are ``-omega exp(-omega x0) v_k``. Composed with traces it yields the
singular Green operators ``G`` (scalar and form versions) and ``G'``, and
together with the formal adjoint it gives the W^1 adjoint
``d* = d' + K`` of the exterior derivative.

All multipliers are applied in the tangential Fourier basis; nothing dense is
ever assembled.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DegreeUnderflow, NotInDomain, PrereqViolated
from .exterior import FormField, d_formal
from .strip import BoundaryField, ScalarField, StripGrid, norm_sobolev_form


@dataclass(frozen=True)
class DomMembership:
    """Outcome of a boundary-condition check on a form.

    Attributes
    ----------
    member : bool
    max_violation : float
        Largest sup-norm of the checked boundary traces.
    offending_components : list of MultiIndex
        Components whose trace exceeded the tolerance.
    tol : float
    """

    member: bool
    max_violation: float
    offending_components: list = field(default_factory=list)
    tol: float = 0.0


def _profiles(grid: StripGrid, vhat: np.ndarray, rate_power: int, coeff) -> np.ndarray:
    """Spectral array ``coeff * omega^rate_power * exp(-omega x0) * vhat``."""
    w = grid.omega
    decay = np.exp(-np.multiply.outer(grid.x0, w))
    return coeff * decay * (w**rate_power * vhat)


def apply_Ktilde(v: BoundaryField) -> ScalarField:
    """Extend boundary data into the strip by ``-omega exp(-omega x0)`` per mode."""
    grid = v.grid
    return ScalarField.from_modes(grid, _profiles(grid, v.modes(), 1, -1.0))


def _ktilde_array(grid: StripGrid, boundary_values: np.ndarray) -> np.ndarray:
    return grid.idft(_profiles(grid, grid.dft(boundary_values), 1, -1.0))


def _gprime_array(grid: StripGrid, boundary_values: np.ndarray) -> np.ndarray:
    return grid.idft(_profiles(grid, grid.dft(boundary_values), 2, 1.0))


def apply_G_scalar(u: ScalarField) -> ScalarField:
    """``G u``: the kernel extension of the normal derivative trace."""
    grid = u.grid
    return ScalarField(grid, _ktilde_array(grid, grid.trace_array(u.values, 1)))


def apply_Gprime(u: ScalarField) -> ScalarField:
    """``G' u``: per mode ``omega^2 exp(-omega x0)`` times the boundary value."""
    grid = u.grid
    return ScalarField(grid, _gprime_array(grid, grid.trace_array(u.values, 0)))


def apply_Q(g: BoundaryField) -> ScalarField:
    """Neumann lift: per mode ``-exp(-omega x0) g_k / omega``; its normal derivative at 0 is ``g``."""
    grid = g.grid
    return ScalarField.from_modes(grid, _profiles(grid, g.modes(), -1, -1.0))


def apply_K_form(psi: FormField) -> FormField:
    """Kernel operator on forms.

    ``(K psi)_I`` is the kernel extension of the boundary value of
    ``psi_{0I}`` when ``0`` is not in ``I`` and vanishes otherwise.
    """
    if psi.degree == 0:
        raise DegreeUnderflow("the kernel operator lowers degree; input must have degree >= 1")
    grid = psi.grid
    out = FormField.zeros(grid, psi.degree - 1)
    for pos, I in enumerate(out.indices):
        if 0 in I:
            continue
        src = psi.component_array(I.insert(0))
        out.values[pos] = _ktilde_array(grid, grid.trace_array(src, 0))
    return out


def apply_G_form(phi: FormField) -> FormField:
    """Diagonal boundary operator on forms.

    Components containing the normal axis get ``G'``; the others get the
    scalar ``G``.
    """
    grid = phi.grid
    out = FormField.zeros(grid, phi.degree)
    for pos, K in enumerate(phi.indices):
        comp = phi.values[pos]
        if 0 in K:
            out.values[pos] = _gprime_array(grid, grid.trace_array(comp, 0))
        else:
            out.values[pos] = _ktilde_array(grid, grid.trace_array(comp, 1))
    return out


def _laplacian_array(grid: StripGrid, arr: np.ndarray) -> np.ndarray:
    ax0 = arr.ndim - (grid.N + 1)
    axes = tuple(range(ax0 + 1, arr.ndim))
    spectrum = np.fft.fftn(arr, axes=axes)
    spectrum = spectrum * (-(grid.beta**2))
    tang = np.fft.ifftn(spectrum, axes=axes)
    return tang + grid.normal_apply(grid.normal_matrix(2), arr)


def apply_laplacian(u: ScalarField) -> ScalarField:
    """Spectral tangential Laplacian plus finite-difference second normal derivative."""
    return ScalarField(u.grid, _laplacian_array(u.grid, u.values))


def apply_hodge(phi: FormField) -> FormField:
    """Componentwise ``(-Laplacian + G) phi`` with the diagonal form version of ``G``."""
    lap = FormField(phi.grid, phi.degree, _laplacian_array(phi.grid, phi.values))
    return apply_G_form(phi) - lap


def _default_tol(form: FormField, tol):
    if tol is not None:
        return float(tol)
    return 1e-8 * norm_sobolev_form(form, 2)


def in_dom_dstar(psi: FormField, s: int = 1, tol=None) -> DomMembership:
    """Check that normal components ``psi_{0J}`` have vanishing ``s``-th normal derivative at 0.

    The default tolerance is ``1e-8`` times the W^2 norm of ``psi``.
    """
    if not 1 <= s <= 3:
        raise ValueError(f"s must be in 1..3, got {s}")
    tol = _default_tol(psi, tol)
    grid = psi.grid
    worst, bad = 0.0, []
    for pos, K in enumerate(psi.indices):
        if 0 not in K:
            continue
        viol = float(np.max(np.abs(grid.trace_array(psi.values[pos], s))))
        worst = max(worst, viol)
        if viol > tol:
            bad.append(K)
    return DomMembership(not bad, worst, bad, tol)


def in_dom_dstar_of_d(phi: FormField, tol=None) -> DomMembership:
    """Check that ``d phi`` lies in the adjoint domain, given ``phi`` already does.

    Equivalent to a vanishing second normal derivative at 0 of every
    tangential component ``phi_K`` (``0`` not in ``K``).
    """
    tol = _default_tol(phi, tol)
    if phi.degree >= 1:
        pre = in_dom_dstar(phi, 1, tol)
        if not pre.member:
            raise PrereqViolated(
                f"form is not in the adjoint domain (components {[c.indices for c in pre.offending_components]})"
            )
    grid = phi.grid
    worst, bad = 0.0, []
    for pos, K in enumerate(phi.indices):
        if 0 in K:
            continue
        viol = float(np.max(np.abs(grid.trace_array(phi.values[pos], 2))))
        worst = max(worst, viol)
        if viol > tol:
            bad.append(K)
    return DomMembership(not bad, worst, bad, tol)


def d_star(psi: FormField, tol=None) -> FormField:
    """W^1 adjoint of ``d``: ``d' psi + K psi`` on the adjoint domain.

    Raises
    ------
    NotInDomain
        If a normal component has a nonzero normal derivative at the boundary.
    """
    membership = in_dom_dstar(psi, 1, tol)
    if not membership.member:
        raise NotInDomain(membership)
    return d_formal(psi) + apply_K_form(psi)


__all__ = [
    "DomMembership",
    "apply_G_form",
    "apply_G_scalar",
    "apply_Gprime",
    "apply_K_form",
    "apply_Ktilde",
    "apply_Q",
    "apply_hodge",
    "apply_laplacian",
    "d_star",
    "in_dom_dstar",
    "in_dom_dstar_of_d",
]
