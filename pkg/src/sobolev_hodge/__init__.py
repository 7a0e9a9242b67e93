"""Hodge Laplacian with nonlocal singular Green boundary terms on a half-space strip.

Tangential directions are periodic and handled by FFT; the normal direction
is a uniform grid on ``[0, X_max]``. Each tangential frequency is solved in
closed form, and an independent finite-difference solver serves as a
reference.
"""

from .errors import (
    ConfigError,
    DegreeOverflow,
    DegreeUnderflow,
    GridMismatch,
    GridTooCoarse,
    HodgeError,
    InvalidGrid,
    InvalidMultiIndex,
    InvalidOrder,
    NonFiniteInput,
    NotInDomain,
    PrereqViolated,
    SingularSystem,
    ZeroModeIncompatible,
)
from .exterior import FormField, MultiIndex, contract_normal, d, d_formal, eps
from .strip import BoundaryField, ModeProfile, ScalarField, StripGrid, inner_sobolev, norm_sobolev
from .solvers import (
    BCKind,
    ScalarBVPData,
    SolveReport,
    check_moments,
    project_zero_mode,
    solve_qform,
    solve_scalar_dirichlet_type,
    solve_scalar_neumann_type,
)
from .halfspace_ops import apply_G_form, apply_hodge, apply_K_form, d_star, in_dom_dstar

__version__ = "0.1.0"

__all__ = [
    "BCKind",
    "BoundaryField",
    "ConfigError",
    "DegreeOverflow",
    "DegreeUnderflow",
    "FormField",
    "GridMismatch",
    "GridTooCoarse",
    "HodgeError",
    "InvalidGrid",
    "InvalidMultiIndex",
    "InvalidOrder",
    "ModeProfile",
    "MultiIndex",
    "NonFiniteInput",
    "NotInDomain",
    "PrereqViolated",
    "ScalarBVPData",
    "ScalarField",
    "SingularSystem",
    "SolveReport",
    "StripGrid",
    "ZeroModeIncompatible",
    "apply_G_form",
    "apply_K_form",
    "apply_hodge",
    "check_moments",
    "contract_normal",
    "d",
    "d_formal",
    "d_star",
    "eps",
    "in_dom_dstar",
    "inner_sobolev",
    "norm_sobolev",
    "project_zero_mode",
    "solve_qform",
    "solve_scalar_dirichlet_type",
    "solve_scalar_neumann_type",
]
