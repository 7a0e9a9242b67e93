"""Closed-form per-mode solvers for the scalar and q-form boundary problems.

Dirichlet type (second-derivative boundary condition)::

    -u'' + beta^2 u - omega exp(-omega x) u'(0) = f,   u''(0) = h

Neumann type (first-derivative boundary condition)::

    -u'' + beta^2 u + omega^2 exp(-omega x) u(0) = f,  u'(0) = h

Each nonzero tangential mode is solved by Green's operators of
``-d^2 + beta^2`` plus a two-term boundary correction, with integrals
evaluated by :mod:`sobolev_hodge.modequad`. The zero mode (``beta = 0``) is
integrated twice from infinity; decay forces a solvability condition on
the mean of ``f``, which is the strip analogue of the continuum moment
conditions.
"""

from __future__ import annotations

import logging
from dataclasses import asdict, dataclass, field
from enum import Enum

import numpy as np

from .errors import NonFiniteInput, ZeroModeIncompatible
from .exterior import FormField
from .halfspace_ops import apply_G_scalar, apply_Gprime, apply_laplacian
from .modequad import backward_integrals, forward_integrals, tail_integrals
from .strip import BoundaryField, ScalarField, StripGrid, norm_sobolev, tangential_dft
from .symbols import boundary_denominator, m1, m2, omega

log = logging.getLogger(__name__)

ZERO_MODE_TOL = 1e-8


class BCKind(Enum):
    DIRICHLET_TYPE = "dirichlet"
    NEUMANN_TYPE = "neumann"


@dataclass(frozen=True)
class ScalarBVPData:
    """Interior datum ``f``, boundary datum ``h`` and the boundary-condition kind."""

    f: ScalarField
    h: BoundaryField | None = None
    kind: BCKind = BCKind.DIRICHLET_TYPE

    def __post_init__(self):
        if self.h is None:
            object.__setattr__(self, "h", BoundaryField.zeros(self.f.grid))
        elif self.h.grid != self.f.grid:
            from .errors import GridMismatch

            raise GridMismatch("f and h live on different grids")
        object.__setattr__(self, "kind", BCKind(self.kind))


@dataclass
class SolveReport:
    """Diagnostics of a solve; all entries are nonnegative.

    ``residual_l2`` is the L^2 norm of the operator residual and
    ``relative_residual`` divides it by the L^2 norm of the datum.
    ``bc_violation`` is the sup-norm error in the boundary condition.
    ``per_mode_condition`` bounds the sup-norm gain of the slowest mode and
    ``truncation_estimate`` is the largest mode amplitude left at ``X_max``
    relative to the solution's peak.
    """

    residual_l2: float
    relative_residual: float
    bc_violation: float
    moment_diagnostics: list = field(default_factory=list)
    per_mode_condition: float = 0.0
    truncation_estimate: float = 0.0

    def to_dict(self) -> dict:
        return asdict(self)


# ---------------------------------------------------------------------------
# per-mode closed forms (vectorized over the trailing mode axes)


def dirichlet_assemble(beta, x, green_f, moment, f0, h_hat):
    """Assemble the Dirichlet-type solution for ``beta > 0``.

    Parameters
    ----------
    beta : ndarray
        Mode frequencies, shape ``(...)``.
    x : ndarray
        Normal nodes, shape ``(P,)``.
    green_f : ndarray
        Dirichlet Green's operator applied to ``f``, shape ``(P, ...)``.
    moment : ndarray
        ``int exp(-beta y) f(y) dy``.
    f0 : ndarray
        ``f(0)``.
    h_hat : ndarray
        Boundary datum.
    """
    w = omega(beta)
    mult = m1(beta)
    eb = np.exp(-np.multiply.outer(x, beta))
    ew = np.exp(-np.multiply.outer(x, w))
    edge = h_hat + f0
    return (
        green_f
        + mult * (eb - ew) * (beta * moment - edge)
        + eb * edge / boundary_denominator(beta)
        + eb * (mult / beta) * moment
    )


def neumann_assemble(beta, x, neumann_f, moment):
    """Assemble the homogeneous Neumann-type solution for ``beta > 0``.

    ``neumann_f`` is the Neumann Green's operator applied to the datum and
    ``moment`` is ``int exp(-beta y) f(y) dy``; the boundary value is
    ``m2(beta) * moment``.
    """
    w = omega(beta)
    u0 = m2(beta) * moment
    jk = (w / beta) * np.exp(-np.multiply.outer(x, beta)) - np.exp(-np.multiply.outer(x, w))
    return neumann_f - w**2 * u0 * jk


def _green_parts(fhat, beta, x, h):
    A = forward_integrals(fhat, beta, h)
    B = backward_integrals(fhat, beta, h)
    eb = np.exp(-np.multiply.outer(x, beta))
    return A, B, eb


def solve_modes_dirichlet(fhat, h_hat, beta, x, h):
    """Dirichlet-type solution of every mode in ``fhat`` (shape ``(P, n)``), ``beta > 0``."""
    A, B, eb = _green_parts(fhat, beta, x, h)
    green_f = (A + B - eb * B[0]) / (2.0 * beta)
    return dirichlet_assemble(beta, x, green_f, B[0], fhat[0], h_hat)


def neumann_lift_response(beta, x):
    """Homogeneous Neumann-type solution for the datum ``(beta^2 / omega) exp(-omega x)``.

    This is the datum left over by the lift ``v = u - Q h`` with unit ``h``.
    Its Neumann Green's potential and moment are exact, which gives
    ``(beta^2 / omega) * beta (beta + omega) / D * J[exp(-omega .)]``.
    """
    w = omega(beta)
    jk = (w / beta) * np.exp(-np.multiply.outer(x, beta)) - np.exp(-np.multiply.outer(x, w))
    return (beta**2 / w) * beta * (beta + w) / boundary_denominator(beta) * jk


def solve_modes_neumann(fhat, h_hat, beta, x, h):
    """Neumann-type solution of every mode, ``beta > 0``, via the lift ``v = u - Q h``."""
    w = omega(beta)
    A, B, eb = _green_parts(fhat, beta, x, h)
    neumann_f = (A + B + eb * B[0]) / (2.0 * beta)
    v = neumann_assemble(beta, x, neumann_f, B[0]) + h_hat * neumann_lift_response(beta, x)
    return v - np.exp(-np.multiply.outer(x, w)) * h_hat / w


def zero_mode_moments(f0hat, h):
    """Tails ``R``, ``S`` of the zero-mode profile; ``R(0)`` and ``S(0)`` are its moments."""
    return tail_integrals(f0hat, h)


def solve_zero_mode(f0hat, h0, x, h, kind: BCKind):
    """Zero tangential mode by double integration from infinity.

    Dirichlet type: ``u'(0) = -(f(0) + h)`` and ``u = -u'(0) exp(-x) - S``,
    consistent only if ``int f = 0``.
    Neumann type: ``u(0) = int f - h`` and ``u = u(0) exp(-x) - S``,
    consistent only if ``int y f(y) dy = 0``.
    """
    R, S = zero_mode_moments(f0hat, h)
    ex = np.exp(-x)
    if kind is BCKind.DIRICHLET_TYPE:
        slope = -(f0hat[0] + h0)
        return -slope * ex - S
    value = R[0] - h0
    return value * ex - S


def zero_mode_condition(f0hat, h, kind: BCKind) -> tuple:
    """Name and value of the zero-mode solvability functional."""
    R, S = zero_mode_moments(f0hat, h)
    if BCKind(kind) is BCKind.DIRICHLET_TYPE:
        return "zero_mode_integral", complex(R[0])
    return "zero_mode_first_moment", complex(S[0])


# ---------------------------------------------------------------------------
# full-grid solvers


def _solve_scalar_array(grid: StripGrid, fvals, hvals, kind: BCKind, tol, component=None):
    if not (np.all(np.isfinite(fvals)) and np.all(np.isfinite(hvals))):
        raise NonFiniteInput("data contain NaN or Inf")
    fhat = grid.dft(fvals)
    hhat = grid.dft(hvals)
    flat_f = fhat.reshape(grid.P, -1)
    flat_h = hhat.reshape(-1)
    beta = grid.beta.reshape(-1)
    x = grid.x0
    out = np.zeros_like(flat_f)

    fnorm = norm_sobolev(ScalarField(grid, fvals), 0)
    name, value = zero_mode_condition(flat_f[:, 0], grid.h, kind)
    # moments of the tangential mean scale with the torus volume
    moment_value = abs(value) * grid.L**grid.N
    threshold = tol * fnorm
    diag = {
        "name": name,
        "value": moment_value,
        "threshold": threshold,
        "passed": bool(moment_value <= threshold),
    }
    if moment_value > threshold:
        where = "" if component is None else f" in component {component}"
        raise ZeroModeIncompatible(
            f"{name} = {moment_value:.3e} exceeds {threshold:.3e}{where}",
            component=component,
            value=moment_value,
            threshold=threshold,
        )

    out[:, 0] = solve_zero_mode(flat_f[:, 0], flat_h[0], x, grid.h, kind)
    nz = beta > 0
    solve = solve_modes_dirichlet if kind is BCKind.DIRICHLET_TYPE else solve_modes_neumann
    out[:, nz] = solve(flat_f[:, nz], flat_h[nz], beta[nz], x, grid.h)

    peak = np.max(np.abs(out))
    trunc = float(np.max(np.abs(out[-1])) / peak) if peak > 0 else 0.0
    bmin = float(np.min(beta[nz])) if np.any(nz) else 1.0
    cond = max(1.0 / min(bmin, 1.0) ** 2, 0.5 * grid.X_max**2)
    u = grid.idft(out.reshape(fhat.shape))
    return u, diag, cond, trunc


def _scalar_diagnostics(grid, u, fvals, hvals, kind):
    uf = ScalarField(grid, u)
    if kind is BCKind.DIRICHLET_TYPE:
        res = -apply_laplacian(uf) + apply_G_scalar(uf)
        bc = grid.trace_array(u, 2) - hvals
    else:
        res = -apply_laplacian(uf) + apply_Gprime(uf)
        bc = grid.trace_array(u, 1) - hvals
    res_norm = norm_sobolev(res - ScalarField(grid, fvals), 0)
    fnorm = norm_sobolev(ScalarField(grid, fvals), 0)
    rel = res_norm / fnorm if fnorm > 0 else res_norm
    return res_norm, rel, float(np.max(np.abs(bc)))


def _solve_scalar(data: ScalarBVPData, kind: BCKind, tol: float, check_continuum: int | None):
    if data.kind is not kind:
        raise ValueError(f"data are of kind {data.kind.value}, solver expects {kind.value}")
    grid = data.f.grid
    u, diag, cond, trunc = _solve_scalar_array(grid, data.f.values, data.h.values, kind, tol)
    res, rel, bc = _scalar_diagnostics(grid, u, data.f.values, data.h.values, kind)
    moments = [diag]
    if check_continuum is not None:
        moments.extend(check_moments(data.f, check_continuum).as_dicts())
    report = SolveReport(res, rel, bc, moments, cond, trunc)
    log.info("%s solve: residual %.3e (relative %.3e), bc %.3e", kind.value, res, rel, bc)
    return ScalarField(grid, u), report


def solve_scalar_dirichlet_type(data: ScalarBVPData, tol: float = ZERO_MODE_TOL, check_continuum=None):
    """Solve ``(-Laplacian + G) u = f`` with ``u''(0) = h``.

    Parameters
    ----------
    data : ScalarBVPData
        Must have ``kind = DIRICHLET_TYPE``.
    tol : float
        Relative tolerance on the zero-mode integral of ``f``.
    check_continuum : int, optional
        If given, also report the continuum moment conditions for this
        tangential dimension.

    Returns
    -------
    (ScalarField, SolveReport)

    Raises
    ------
    ZeroModeIncompatible
        If the tangential mean of ``f`` does not integrate to zero.
    """
    return _solve_scalar(data, BCKind.DIRICHLET_TYPE, tol, check_continuum)


def solve_scalar_neumann_type(data: ScalarBVPData, tol: float = ZERO_MODE_TOL, check_continuum=None):
    """Solve ``(-Laplacian + G') u = f`` with ``u'(0) = h``.

    The zero mode requires the first normal moment of the tangential mean of
    ``f`` to vanish.
    """
    return _solve_scalar(data, BCKind.NEUMANN_TYPE, tol, check_continuum)


def component_kind(index) -> BCKind:
    """Neumann type for components containing the normal axis, Dirichlet type otherwise."""
    return BCKind.NEUMANN_TYPE if 0 in index else BCKind.DIRICHLET_TYPE


def solve_qform(alpha: FormField, tol: float = ZERO_MODE_TOL):
    """Solve ``(-Laplacian + G) phi = alpha`` for a q-form, one component at a time.

    Components containing axis 0 get the homogeneous Neumann-type problem,
    the others the homogeneous Dirichlet-type problem. The report carries the
    worst component values.
    """
    from .halfspace_ops import apply_hodge

    grid = alpha.grid
    out = FormField.zeros(grid, alpha.degree)
    zero_h = np.zeros(grid.boundary_shape, dtype=complex)
    moments, cond, trunc, bc = [], 0.0, 0.0, 0.0
    for pos, K in enumerate(alpha.indices):
        kind = component_kind(K)
        u, diag, c, t = _solve_scalar_array(grid, alpha.values[pos], zero_h, kind, tol, component=K.indices)
        out.values[pos] = u
        diag = dict(diag, component=list(K.indices))
        moments.append(diag)
        cond, trunc = max(cond, c), max(trunc, t)
        jump = 1 if kind is BCKind.NEUMANN_TYPE else 2
        bc = max(bc, float(np.max(np.abs(grid.trace_array(u, jump)))))
    resid = apply_hodge(out) - alpha
    from .strip import norm_sobolev_form

    res = norm_sobolev_form(resid, 0)
    anorm = norm_sobolev_form(alpha, 0)
    rel = res / anorm if anorm > 0 else res
    return out, SolveReport(res, rel, bc, moments, cond, trunc)


# ---------------------------------------------------------------------------
# zero-mode projection and continuum moment diagnostics


def project_zero_mode(f: ScalarField, kind: BCKind) -> ScalarField:
    """Remove the zero-mode solvability defect by subtracting a multiple of a fixed profile.

    The correction is tangentially constant: ``exp(-2 x0)`` for the
    Dirichlet type (zero integral) and ``x0 exp(-2 x0)`` for the Neumann type
    (zero first moment).
    """
    grid = f.grid
    kind = BCKind(kind)
    x = grid.x0
    prof = np.exp(-2.0 * x) if kind is BCKind.DIRICHLET_TYPE else x * np.exp(-2.0 * x)
    fhat0 = tangential_dft(f)[(slice(None),) + (0,) * grid.N]
    _, val = zero_mode_condition(fhat0, grid.h, kind)
    _, unit = zero_mode_condition(prof.astype(complex), grid.h, kind)
    shift = (val / unit) * prof
    return ScalarField(grid, f.values - shift.reshape((grid.P,) + (1,) * grid.N))


@dataclass(frozen=True)
class MomentCondition:
    name: str
    value: float
    threshold: float
    required: bool

    @property
    def passed(self) -> bool:
        return (not self.required) or self.value <= self.threshold


@dataclass(frozen=True)
class MomentReport:
    """Continuum moment conditions for a given tangential dimension."""

    n_continuum: int
    conditions: tuple

    @property
    def satisfied(self) -> bool:
        return all(c.passed for c in self.conditions)

    @property
    def required_names(self) -> list:
        return [c.name for c in self.conditions if c.required]

    def as_dicts(self) -> list:
        return [
            dict(name=c.name, value=c.value, threshold=c.threshold, required=c.required, passed=c.passed)
            for c in self.conditions
        ]


def check_moments(f: ScalarField, N_continuum: int, tol: float = ZERO_MODE_TOL) -> MomentReport:
    """Evaluate the integral and first moments of ``f`` and flag the required ones.

    Requirements depend on the continuum tangential dimension: none for
    ``N >= 4``; zero integral for ``N = 2, 3``; zero integral and zero
    first moments in ``x0`` and ``x1`` for ``N = 1``. Tangential moments are
    taken about the torus centre.
    """
    grid = f.grid
    cell = (grid.L / grid.M) ** grid.N
    wq = grid.quad_weights.reshape((grid.P,) + (1,) * grid.N)
    dens = f.values * wq * cell
    coords = grid.mesh()
    total = abs(complex(np.sum(dens)))
    m0 = abs(complex(np.sum(dens * coords[0])))
    m1_ = abs(complex(np.sum(dens * (coords[1] - grid.L / 2))))
    threshold = tol * max(norm_sobolev(f, 0), np.finfo(float).tiny)
    need_integral = N_continuum in (1, 2, 3)
    need_first = N_continuum == 1
    conds = (
        MomentCondition("integral", total, threshold, need_integral),
        MomentCondition("first_moment_x0", m0, threshold, need_first),
        MomentCondition("first_moment_x1", m1_, threshold, need_first),
    )
    return MomentReport(int(N_continuum), conds)


def solve_mode(beta: float, fhat, h_hat, kind: BCKind, x: np.ndarray) -> np.ndarray:
    """Closed-form solution of a single mode on the uniform nodes ``x``.

    The zero mode does not check solvability; callers compare against
    :func:`zero_mode_condition` themselves.
    """
    kind = BCKind(kind)
    fhat = np.asarray(fhat, dtype=complex)
    h = x[1] - x[0]
    if beta == 0:
        return solve_zero_mode(fhat, complex(h_hat), x, h, kind)
    b = np.array([float(beta)])
    solve = solve_modes_dirichlet if kind is BCKind.DIRICHLET_TYPE else solve_modes_neumann
    return solve(fhat[:, None], np.array([complex(h_hat)]), b, x, h)[:, 0]
