"""Order and class bookkeeping for boundary operators, and the model boundary problem.

Operators in the boundary calculus carry an order and, for trace and
singular Green operators, a class (how many normal derivatives they take at
the boundary). Composing a Poisson operator of order ``d`` with the trace of
the ``l``-th normal derivative gives a singular Green operator of order
``d + l`` and class ``l + 1``; a pseudodifferential factor of order ``s``
in front of that trace gives a trace operator of order ``s + l`` and the
same class.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from enum import Enum

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spl

from .errors import InvalidOrder, SingularSystem
from .strip import ModeProfile


class OperatorKind(Enum):
    INTERIOR_PDO = "interior_pdo"
    POISSON = "poisson"
    TRACE = "trace"
    SINGULAR_GREEN = "singular_green"


@dataclass(frozen=True)
class BoundaryOperatorDesc:
    """Kind, order and class of a boundary-calculus operator.

    ``operator_class`` is present exactly for trace and singular Green
    operators.
    """

    kind: OperatorKind
    order: float
    operator_class: int | None = None

    def __post_init__(self):
        kind = OperatorKind(self.kind)
        object.__setattr__(self, "kind", kind)
        needs_class = kind in (OperatorKind.TRACE, OperatorKind.SINGULAR_GREEN)
        if needs_class and self.operator_class is None:
            raise InvalidOrder(f"{kind.value} operators need a class")
        if not needs_class and self.operator_class is not None:
            raise InvalidOrder(f"{kind.value} operators carry no class")
        if self.operator_class is not None and self.operator_class < 0:
            raise InvalidOrder("class must be nonnegative")

    def to_dict(self) -> dict:
        out = asdict(self)
        out["kind"] = self.kind.value
        out["class"] = out.pop("operator_class")
        return out


def _check_trace_order(gamma_ell):
    if int(gamma_ell) != gamma_ell or gamma_ell < 0:
        raise InvalidOrder(f"trace derivative order must be a nonnegative integer, got {gamma_ell}")
    return int(gamma_ell)


def compose_trace(s_order: float, gamma_ell: int) -> BoundaryOperatorDesc:
    """Tangential operator of order ``s_order`` after the trace of the ``gamma_ell``-th derivative."""
    ell = _check_trace_order(gamma_ell)
    return BoundaryOperatorDesc(OperatorKind.TRACE, s_order + ell, ell + 1)


def compose_green(poisson_order: float, gamma_ell: int) -> BoundaryOperatorDesc:
    """Poisson operator of order ``poisson_order`` after the trace of the ``gamma_ell``-th derivative."""
    ell = _check_trace_order(gamma_ell)
    return BoundaryOperatorDesc(OperatorKind.SINGULAR_GREEN, poisson_order + ell, ell + 1)


# the kernel extension -omega exp(-omega x0) is a Poisson operator of order 1
KERNEL_POISSON = BoundaryOperatorDesc(OperatorKind.POISSON, 1.0)


@dataclass(frozen=True)
class ProblemClassification:
    """The boundary system ``(-Laplacian + G ; T)`` and its operator table."""

    system: str
    operators: dict
    M: int
    M_prime: int
    interior_symbol_invertible: bool
    interior_symbol_min: float

    def to_dict(self) -> dict:
        return dict(
            system=self.system,
            operators={k: v.to_dict() for k, v in self.operators.items()},
            M=self.M,
            M_prime=self.M_prime,
            interior_symbol_invertible=self.interior_symbol_invertible,
            interior_symbol_min=self.interior_symbol_min,
        )


def classify_problem(n_samples: int = 64) -> ProblemClassification:
    """Orders and classes of the scalar Dirichlet-type Hodge system.

    ``G`` is the kernel extension composed with the first-derivative trace;
    ``T`` is ``(1 - tangential Laplacian)^(-1/2)`` applied to the
    second-derivative trace. The interior symbol ``|xi|^2`` is sampled on the
    unit sphere of ``R^2`` to confirm it has no zeros away from the origin.
    """
    G = compose_green(KERNEL_POISSON.order, 1)
    T = compose_trace(-1.0, 2)
    theta = np.linspace(0.0, 2.0 * np.pi, n_samples, endpoint=False)
    sym = np.cos(theta) ** 2 + np.sin(theta) ** 2
    smin = float(np.min(sym))
    return ProblemClassification(
        system="(-Laplacian + G ; T)",
        operators={"G": G, "T": T},
        M=0,
        M_prime=1,
        interior_symbol_invertible=bool(smin > 0),
        interior_symbol_min=smin,
    )


# ---------------------------------------------------------------------------
# Poisson-operator symbol bounds of the kernel extension


@dataclass
class SymbolBoundRow:
    ell: int
    ell_prime: int
    alpha: int
    exponent: float
    sup_ratio: float
    inf_ratio: float
    tail_slope: float
    passed: bool


def _kernel_derivative_norms(ell: int, ell_prime: int, alpha: int, xi: np.ndarray) -> np.ndarray:
    """``|| x0^ell D_x0^ell' D_xi^alpha k(x0, xi) ||_{L^2(dx0)}`` on a grid of ``xi``.

    ``k = -omega exp(-omega x0)`` with ``omega = sqrt(1 + (2 pi xi)^2)``; the
    ``xi`` derivatives are taken symbolically.
    """
    import sympy

    x, z = sympy.symbols("x z", positive=True)
    w = sympy.sqrt(1 + (2 * sympy.pi * z) ** 2)
    expr = -w * sympy.exp(-w * x)
    expr = sympy.diff(expr, x, ell_prime) if ell_prime else expr
    expr = sympy.diff(expr, z, alpha) if alpha else expr
    expr = x**ell * expr
    fn = sympy.lambdify((x, z), expr, "numpy")
    out = np.empty(len(xi))
    gl_t, gl_w = np.polynomial.laguerre.laggauss(60)
    for i, zi in enumerate(xi):
        wz = np.sqrt(1.0 + (2.0 * np.pi * zi) ** 2)
        # substitute x0 = t / (2 omega) so the Laguerre weight matches exp(-2 omega x0)
        xs = gl_t / (2.0 * wz)
        vals = np.abs(np.asarray(fn(xs, zi), dtype=float)) ** 2 * np.exp(gl_t)
        out[i] = np.sqrt(np.sum(gl_w * vals) / (2.0 * wz))
    return out


def poisson_symbol_check(
    order: float = 1.0, max_index: int = 2, xi=None, slope_tol: float = 0.05, ell_prime_sign: int = 1
) -> list:
    """Sample the Poisson symbol-estimate inequalities for the kernel extension.

    For every ``(ell, ell', alpha)`` with entries up to ``max_index`` the L^2
    norm in ``x0`` of ``x0^ell D_x0^ell' D_xi^alpha k`` is compared with
    ``<xi>^(order - 1/2 - ell + ell' - alpha)``. A row passes when the ratio
    stays bounded over the sampled range and its log-log slope at the high
    end does not exceed ``slope_tol``. ``ell_prime_sign = -1`` evaluates the
    alternative exponent with ``- ell'``, which the normal-derivative rows
    violate.
    """
    xi = np.logspace(-2, 3, 61) if xi is None else np.asarray(xi, dtype=float)
    bracket = np.sqrt(1.0 + xi**2)
    rows = []
    for ell in range(max_index + 1):
        for ellp in range(max_index + 1):
            for alpha in range(max_index + 1):
                exponent = order - 0.5 - ell + ell_prime_sign * ellp - alpha
                norms = _kernel_derivative_norms(ell, ellp, alpha, xi)
                ratio = norms / bracket**exponent
                tail = np.polyfit(np.log(xi[-10:]), np.log(ratio[-10:] + 1e-300), 1)[0]
                ok = bool(np.all(np.isfinite(ratio)) and tail <= slope_tol)
                rows.append(
                    SymbolBoundRow(ell, ellp, alpha, exponent, float(ratio.max()), float(ratio.min()), float(tail), ok)
                )
    return rows


# ---------------------------------------------------------------------------
# model boundary problem


_SLOPE = np.array([-25.0 / 12.0, 4.0, -3.0, 4.0 / 3.0, -0.25])


@dataclass
class ModelSolution:
    profile: ModeProfile
    slope: complex
    condition: float
    residual: float
    decay: float = field(default=0.0)


def model_system_matrix(beta: float, x: np.ndarray) -> sp.csc_matrix:
    """Bordered matrix for unknowns ``(v_0, ..., v_{P-1}, c)`` with ``c = v'(0)``.

    Rows: boundary condition (equation at 0 with ``v''(0)`` from the datum),
    interior second-order differences with the rank-one coupling column,
    a Robin decay row ``v' + beta v = 0`` at the far end, and the definition
    of ``c`` by a fourth-order one-sided slope.
    """
    P = len(x)
    h = x[1] - x[0]
    w = np.sqrt(1.0 + beta**2)
    kern = w * np.exp(-w * x)
    A = sp.lil_matrix((P + 1, P + 1))
    # row 0: v''(0) = w a  and  v''(0) = psi(0) - w c + beta^2 v_0  (equation at 0)
    A[0, 0] = beta**2
    A[0, P] = -w
    for i in range(1, P - 1):
        A[i, i - 1] = 1.0 / h**2
        A[i, i] = -2.0 / h**2 - beta**2
        A[i, i + 1] = 1.0 / h**2
        A[i, P] = kern[i]
    A[P - 1, P - 3] = 0.5 / h
    A[P - 1, P - 2] = -2.0 / h
    A[P - 1, P - 1] = 1.5 / h + beta
    for j, c in enumerate(_SLOPE):
        A[P, j] = c / h
    A[P, P] = -1.0
    return A.tocsc()


def model_system_solve(beta: float, psi, a: complex, x=None) -> ModelSolution:
    """Solve ``v'' + omega e^{-omega x} v'(0) - beta^2 v = psi`` with ``v''(0) / omega = a``.

    Parameters
    ----------
    beta : float
        Frequency, at least 0.5.
    psi : ModeProfile or array_like
        Right-hand side sampled on ``x``.
    a : complex
        Boundary datum.
    x : ndarray, optional
        Uniform nodes; defaults to 4001 nodes on ``[0, 20]``.

    Returns
    -------
    ModelSolution
        Profile, boundary slope, exact 1-norm condition number of the bordered
        matrix, relative residual of the linear solve and ``|v(X)| / max |v|``.

    Raises
    ------
    SingularSystem
    """
    if beta < 0.5:
        raise ValueError(f"model system requires beta >= 0.5, got {beta}")
    x = np.linspace(0.0, 20.0, 4001) if x is None else np.asarray(x, dtype=float)
    k = psi.k if isinstance(psi, ModeProfile) else ()
    vals = np.asarray(psi.values if isinstance(psi, ModeProfile) else psi, dtype=complex)
    P = len(x)
    if vals.shape != (P,):
        raise ValueError("psi must be sampled on x")
    w = np.sqrt(1.0 + beta**2)
    A = model_system_matrix(beta, x)
    rhs = np.zeros(P + 1, dtype=complex)
    rhs[0] = w * a - vals[0]
    rhs[1 : P - 1] = vals[1 : P - 1]
    try:
        lu = spl.splu(A)
    except RuntimeError as exc:
        raise SingularSystem(f"model system singular at beta={beta}") from exc
    sol = lu.solve(rhs.real) + 1j * lu.solve(rhs.imag)
    if not np.all(np.isfinite(sol)):
        raise SingularSystem(f"model system produced non-finite values at beta={beta}")
    inv = lu.solve(np.eye(P + 1))
    cond = float(spl.norm(A, 1) * np.max(np.sum(np.abs(inv), axis=0)))
    scale = max(float(np.max(np.abs(rhs))), np.finfo(float).tiny)
    residual = float(np.max(np.abs(A @ sol - rhs)) / scale)
    v = sol[:P]
    peak = float(np.max(np.abs(v)))
    decay = float(abs(v[-1]) / peak) if peak > 0 else 0.0
    return ModelSolution(ModeProfile(k, v), complex(sol[P]), cond, residual, decay)
