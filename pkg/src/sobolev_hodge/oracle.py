"""Independent reference computations used to validate the closed-form solvers.

``fd_mode_solve`` discretizes each mode problem directly with a
three-point finite-difference scheme, a nonlocal rank-one boundary coupling
and a decay closure at ``X_max``; it shares no code with the closed-form
path. Two interior schemes are available: the plain second-order one and
Numerov's compact fourth-order weighting of the right-hand side.
``adjoint_gap`` measures the defect of the W^1 adjoint identity and
``estimate_ratio_ensemble`` samples a priori estimate ratios.
"""

from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spl
from scipy.integrate import simpson

from .errors import SingularSystem
from .exterior import FormField, d
from .generators import band_limited_boundary, band_limited_field
from .halfspace_ops import d_star, in_dom_dstar
from .solvers import (
    BCKind,
    ScalarBVPData,
    project_zero_mode,
    solve_mode,
    solve_scalar_dirichlet_type,
    solve_scalar_neumann_type,
)
from .strip import ModeProfile, StripGrid, boundary_norm, inner_sobolev_form, norm_sobolev

log = logging.getLogger(__name__)

# fourth-order forward difference for the boundary slope that drives the coupling
_SLOPE = np.array([-25.0 / 12.0, 4.0, -3.0, 4.0 / 3.0, -0.25])
# backward differences for u'(X_max), second and fourth order
_BACK2 = np.array([0.5, -2.0, 1.5])
_BACK4 = np.array([0.25, -4.0 / 3.0, 3.0, -4.0, 25.0 / 12.0])


class Closure(Enum):
    """Far-end condition at ``X_max``.

    ``TRANSPARENT`` is exact for data vanishing beyond ``X_max``: there the
    solution is ``A exp(-beta x) + u_p`` with ``u_p`` the particular solution
    driven by the boundary kernel, so ``u' + beta u = (beta - omega) u_p``
    (and ``u = u_p`` for ``beta = 0``). ``ROBIN`` imposes
    ``u' + rate u = 0`` and ``DIRICHLET_AT_INFINITY`` imposes ``u = 0``.
    """

    TRANSPARENT = "transparent"
    ROBIN = "robin"
    DIRICHLET_AT_INFINITY = "dirichlet"


class Scheme(Enum):
    SECOND_ORDER = "second_order"
    NUMEROV = "numerov"


@dataclass(frozen=True)
class OracleConfig:
    """Reference discretization of one mode on ``[0, X_max]``.

    ``rate`` fixes the Robin closure ``u'(X) + rate u(X) = 0``; ``None`` picks
    the decay rate of the mode (``beta``, or 1 for the zero mode).
    ``scheme`` selects the interior discretization; with ``SECOND_ORDER``
    every row is second-order accurate, with ``NUMEROV`` every row is
    fourth-order accurate.
    """

    P_oracle: int = 2049
    X_max: float = 12.0
    closure: Closure = Closure.TRANSPARENT
    rate: float | None = None
    tol: float = 1e-4
    scheme: Scheme = Scheme.NUMEROV

    def __post_init__(self):
        if self.P_oracle < 65:
            raise ValueError(f"P_oracle must be at least 65, got {self.P_oracle}")
        if self.rate is not None and self.rate < 0:
            raise ValueError("Robin rate must be nonnegative")
        object.__setattr__(self, "closure", Closure(self.closure))
        object.__setattr__(self, "scheme", Scheme(self.scheme))

    @property
    def x(self) -> np.ndarray:
        return np.linspace(0.0, self.X_max, self.P_oracle)

    @property
    def h(self) -> float:
        return self.X_max / (self.P_oracle - 1)


def fd_system(beta: float, fvals, h_hat, kind: BCKind, cfg: OracleConfig):
    """Sparse matrix and right-hand side of the reference discretization."""
    kind = BCKind(kind)
    P, h, x = cfg.P_oracle, cfg.h, cfg.x
    w = np.sqrt(1.0 + beta**2)
    kern = np.exp(-w * x)
    rhs = np.array(fvals, dtype=complex)
    if rhs.shape != (P,):
        raise ValueError(f"profile has {rhs.shape} samples, oracle grid has {P}")

    numerov = cfg.scheme is Scheme.NUMEROV
    # -u'' + beta^2 u = g, with g = f + (nonlocal term); Numerov averages g and beta^2 u
    wc, wn = (10.0 / 12.0, 1.0 / 12.0) if numerov else (1.0, 0.0)
    main = np.full(P, 2.0 / h**2 + wc * beta**2)
    off = np.full(P - 1, -1.0 / h**2 + wn * beta**2)
    lap = sp.diags([off, main, off], [-1, 0, 1], format="csr")
    avg = sp.diags([np.full(P - 1, wn), np.full(P, wc), np.full(P - 1, wn)], [-1, 0, 1], format="csr")
    rhs = avg @ rhs
    kern_avg = avg @ kern
    slope = _SLOPE / h
    if kind is BCKind.DIRICHLET_TYPE:
        # the nonlocal term -w e^{-wx} u'(0) couples every row to the slope stencil
        coupling = sp.csr_matrix(np.outer(-w * kern_avg, slope))
        coupling = sp.hstack([coupling, sp.csr_matrix((P, P - len(slope)))])
    else:
        coupling = sp.csr_matrix((w**2 * kern_avg, (np.arange(P), np.zeros(P, dtype=int))), shape=(P, P))
    A = (lap + coupling).tolil()

    A[0, :] = 0.0
    if kind is BCKind.DIRICHLET_TYPE:
        # boundary row: the equation at x=0 with u''(0) replaced by the datum
        A[0, 0] = beta**2
        for j, c in enumerate(slope):
            A[0, j] += -w * c
        rhs[0] = complex(np.asarray(fvals)[0]) + h_hat
    else:
        for j, c in enumerate(slope):
            A[0, j] = c
        rhs[0] = h_hat

    A[P - 1, :] = 0.0
    back = (_BACK4 if numerov else _BACK2) / h
    nb = len(back)
    if cfg.closure is Closure.DIRICHLET_AT_INFINITY:
        A[P - 1, P - 1] = 1.0
    elif cfg.closure is Closure.ROBIN:
        rate = cfg.rate if cfg.rate is not None else (beta if beta > 0 else 1.0)
        A[P - 1, P - nb :] = back
        A[P - 1, P - 1] += rate
    else:
        # particular solution at X: -w c e^{-wX} (Dirichlet type), w^2 u(0) e^{-wX} (Neumann type)
        tail = np.exp(-w * x[-1])
        if kind is BCKind.DIRICHLET_TYPE:
            cols, coef = np.arange(len(slope)), -w * tail * slope
        else:
            cols, coef = np.array([0]), np.array([w**2 * tail])
        if beta > 0:
            A[P - 1, P - nb :] = back
            A[P - 1, P - 1] += beta
            factor = -(beta - w)
        else:
            A[P - 1, P - 1] = 1.0
            factor = -1.0
        for j, c in zip(cols, coef):
            A[P - 1, j] += factor * c
    rhs[P - 1] = 0.0
    return A.tocsc(), rhs


def fd_mode_solve(beta: float, fhat, h_hat, kind: BCKind, cfg: OracleConfig = OracleConfig(), return_residual=False):
    """Finite-difference reference solution of one mode problem.

    Parameters
    ----------
    beta : float
        Mode frequency ``2 pi |k| / L``.
    fhat : ModeProfile or array_like
        Interior datum sampled on ``cfg.x``.
    h_hat : complex
        Boundary datum (``u''(0)`` for Dirichlet type, ``u'(0)`` for Neumann type).
    kind : BCKind
    cfg : OracleConfig

    Returns
    -------
    ModeProfile, or ``(ModeProfile, backward_error)`` if requested.
    """
    k = fhat.k if isinstance(fhat, ModeProfile) else ()
    vals = fhat.values if isinstance(fhat, ModeProfile) else fhat
    A, rhs = fd_system(beta, vals, h_hat, kind, cfg)
    with warnings.catch_warnings():
        warnings.simplefilter("error", spl.MatrixRankWarning)
        try:
            u = spl.spsolve(A, rhs)
        except (spl.MatrixRankWarning, RuntimeError) as exc:
            raise SingularSystem(f"reference system singular at beta={beta}") from exc
    if not np.all(np.isfinite(u)):
        raise SingularSystem(f"reference solve produced non-finite values at beta={beta}")
    prof = ModeProfile(k, u)
    if not return_residual:
        return prof
    # normwise backward error in the infinity norm
    scale = spl.norm(A, np.inf) * np.max(np.abs(u)) + np.max(np.abs(rhs))
    scale = max(scale, np.finfo(float).tiny)
    return prof, float(np.max(np.abs(A @ u - rhs)) / scale)


# ---------------------------------------------------------------------------
# closed form vs reference


def random_mode_data(rng: np.random.Generator, x: np.ndarray, beta: float, kind: BCKind):
    """Random smooth mode datum and boundary value.

    The profile is a sum of three complex Gaussians with centres in
    ``[0.5, 4]`` and widths in ``[0.8, 1.5]``, so it vanishes to rounding
    level well before ``X_max = 12``. Zero-mode data are made solvable by
    subtracting a multiple of ``exp(-2x)`` (Dirichlet type) or
    ``x exp(-2x)`` (Neumann type).
    """
    kind = BCKind(kind)
    f = np.zeros(len(x), dtype=complex)
    for _ in range(3):
        centre = rng.uniform(0.5, 4.0)
        width = rng.uniform(0.8, 1.5)
        c = rng.standard_normal() + 1j * rng.standard_normal()
        f += c * np.exp(-(((x - centre) / width) ** 2))
    hb = complex(rng.standard_normal() + 1j * rng.standard_normal())
    if beta == 0:
        power = 0 if kind is BCKind.DIRICHLET_TYPE else 1
        g = x**power * np.exp(-2.0 * x)
        f = f - (simpson(f * x**power, x=x) / simpson(g * x**power, x=x)) * g
    return f, hb


@dataclass
class ConvergenceRow:
    beta: float
    kind: str
    P: list
    gaps: list
    orders: list = field(default_factory=list)


def oracle_convergence(betas, n_profiles: int = 20, P_list=(513, 1025, 2049), X_max: float = 12.0, seed: int = 0):
    """Relative L^2 gap between closed form and reference solution under refinement.

    For each ``beta`` and kind, ``n_profiles`` random data are drawn; the
    reported gap at each resolution is the worst over profiles, and orders
    are ``log2`` of successive gap ratios.
    """
    rows = []
    for beta in betas:
        for kind in BCKind:
            rng = np.random.default_rng([seed, int(round(1e6 * beta)), 0 if kind is BCKind.DIRICHLET_TYPE else 1])
            draws = [rng.integers(2**32) for _ in range(n_profiles)]
            gaps = []
            for P in P_list:
                cfg = OracleConfig(P_oracle=P, X_max=X_max)
                x = cfg.x
                worst = 0.0
                for s in draws:
                    f, hb = random_mode_data(np.random.default_rng(s), x, beta, kind)
                    ref = fd_mode_solve(beta, f, hb, kind, cfg).values
                    closed = solve_mode(beta, f, hb, kind, x)
                    worst = max(worst, float(np.linalg.norm(closed - ref) / np.linalg.norm(ref)))
                gaps.append(worst)
            orders = [float(np.log2(a / b)) for a, b in zip(gaps, gaps[1:])]
            rows.append(ConvergenceRow(float(beta), kind.value, list(P_list), gaps, orders))
            log.info("beta=%g %s gaps=%s orders=%s", beta, kind.value, gaps, orders)
    return rows


# ---------------------------------------------------------------------------
# adjointness


def adjoint_gap(u, psi: FormField, tol=None) -> float:
    """``|<du, psi>_1 - <u, d* psi>_1|`` for ``psi`` in the adjoint domain.

    Raises
    ------
    NotInDomain
        If ``psi`` violates the boundary condition of the adjoint domain.
    """
    if not isinstance(u, FormField):
        u = FormField.scalar(u)
    adj = d_star(psi, tol)
    return abs(inner_sobolev_form(d(u), psi, 1) - inner_sobolev_form(u, adj, 1))


# ---------------------------------------------------------------------------
# a priori estimate ratios


@dataclass
class EstimateReport:
    kind: str
    n: int
    seed: int
    ratios: list
    skipped: int
    failures: int

    @property
    def max(self) -> float:
        return float(np.max(self.ratios)) if self.ratios else float("nan")

    @property
    def median(self) -> float:
        return float(np.median(self.ratios)) if self.ratios else float("nan")

    def to_dict(self) -> dict:
        return dict(
            kind=self.kind,
            n=self.n,
            seed=self.seed,
            max=self.max,
            median=self.median,
            skipped=self.skipped,
            failures=self.failures,
        )


def default_data(grid: StripGrid, rng: np.random.Generator, kind: BCKind):
    f = project_zero_mode(band_limited_field(grid, rng), kind)
    return f, band_limited_boundary(grid, rng)


def estimate_ratio(u, f, h, kind: BCKind) -> float:
    """``|u|_2`` over the right-hand side of the a priori estimate for this kind.

    Dirichlet type: ``|f|_0 + |h|_{-1/2} + |u|_1``.
    Neumann type: ``|f|_0 + |h|_{1/2} + |u|_0``.
    """
    if BCKind(kind) is BCKind.DIRICHLET_TYPE:
        denom = norm_sobolev(f, 0) + boundary_norm(h, -0.5) + norm_sobolev(u, 1)
    else:
        denom = norm_sobolev(f, 0) + boundary_norm(h, 0.5) + norm_sobolev(u, 0)
    num = norm_sobolev(u, 2)
    if denom == 0:
        return float("nan")
    return num / denom


def estimate_ratio_ensemble(n: int, seed: int, kind: BCKind, grid: StripGrid, data_factory=None) -> EstimateReport:
    """Solve ``n`` random problems and collect their estimate ratios.

    Instance ``i`` draws its data from ``default_rng([seed, i])``, so each
    instance is reproducible on its own. Instances with identically zero data
    are skipped; solver errors are counted as failures.
    """
    if n < 1:
        raise ValueError("ensemble size must be at least 1")
    kind = BCKind(kind)
    factory = data_factory or default_data
    solve = solve_scalar_dirichlet_type if kind is BCKind.DIRICHLET_TYPE else solve_scalar_neumann_type
    ratios, skipped, failures = [], 0, 0
    for i in range(n):
        rng = np.random.default_rng([seed, i])
        f, h = factory(grid, rng, kind)
        if not (np.any(f.values) or np.any(h.values)):
            skipped += 1
            continue
        try:
            u, _ = solve(ScalarBVPData(f, h, kind))
        except Exception as exc:  # counted, reported, never hidden
            log.warning("instance %d failed: %s", i, exc)
            failures += 1
            continue
        ratios.append(estimate_ratio(u, f, h, kind))
    return EstimateReport(kind.value, n, seed, ratios, skipped, failures)


__all__ = [
    "Closure",
    "ConvergenceRow",
    "EstimateReport",
    "OracleConfig",
    "adjoint_gap",
    "estimate_ratio",
    "estimate_ratio_ensemble",
    "fd_mode_solve",
    "fd_system",
    "in_dom_dstar",
    "oracle_convergence",
    "random_mode_data",
]
