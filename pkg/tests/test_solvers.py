import math

import numpy as np
import pytest
from hypothesis import example, given, settings
from hypothesis import strategies as st

from sobolev_hodge import symbols
from sobolev_hodge.errors import NonFiniteInput, ZeroModeIncompatible
from sobolev_hodge.exterior import FormField
from sobolev_hodge.generators import band_limited_boundary, band_limited_field, random_form
from sobolev_hodge.halfspace_ops import apply_hodge, in_dom_dstar, in_dom_dstar_of_d
from sobolev_hodge.solvers import (
    BCKind,
    ScalarBVPData,
    check_moments,
    dirichlet_assemble,
    neumann_assemble,
    neumann_lift_response,
    project_zero_mode,
    solve_mode,
    solve_qform,
    solve_scalar_dirichlet_type,
    solve_scalar_neumann_type,
)
from sobolev_hodge.strip import BoundaryField, ScalarField, StripGrid, norm_sobolev, norm_sobolev_form, trace

D, N_ = BCKind.DIRICHLET_TYPE, BCKind.NEUMANN_TYPE
X = np.linspace(0.0, 12.0, 2049)


def manufactured_dirichlet_mode(beta, x):
    # exact inputs for f = beta^2 exp(-omega y), h = omega^2
    w = symbols.omega(beta)
    b = np.array([beta])
    green_f = beta**2 * symbols.green_of_khat(beta, x)[:, None]
    moment = np.array([beta**2 / (beta + w)])
    return dirichlet_assemble(b, x, green_f, moment, np.array([beta**2]), np.array([w**2]))[:, 0]


def manufactured_neumann_mode(beta, x):
    # exact inputs for f = beta^2 exp(-omega y), h = -omega
    w = symbols.omega(beta)
    b = np.array([beta])
    neumann_f = beta**2 * symbols.neumann_of_khat(beta, x)[:, None]
    moment = np.array([beta**2 / (beta + w)])
    h = -w
    v = neumann_assemble(b, x, neumann_f, moment)[:, 0] + h * neumann_lift_response(b, x)[:, 0]
    return v - np.exp(-w * x) * h / w


@pytest.mark.parametrize("beta", [0.5, 1.0, 2.0, 5.0, 20.0])
@pytest.mark.parametrize("assemble", [manufactured_dirichlet_mode, manufactured_neumann_mode])
def test_per_mode_manufactured(beta, assemble):
    want = np.exp(-symbols.omega(beta) * X)
    got = assemble(beta, X)
    assert np.linalg.norm(got - want) / np.linalg.norm(want) <= 1e-8


@pytest.mark.parametrize("kind, hval", [(D, lambda w: w**2), (N_, lambda w: -w)])
def test_per_mode_quadrature_path(kind, hval):
    # same data through the quadrature path: limited only by data truncation at X_max
    beta = 1.0
    w = symbols.omega(beta)
    u = solve_mode(beta, beta**2 * np.exp(-w * X), hval(w), kind, X)
    assert np.max(np.abs(u - np.exp(-w * X))) < 1e-6


def test_zero_data_zero_solution(small_grid):
    for solve, kind in ((solve_scalar_dirichlet_type, D), (solve_scalar_neumann_type, N_)):
        u, rep = solve(ScalarBVPData(ScalarField.zeros(small_grid), BoundaryField.zeros(small_grid), kind))
        assert not np.any(u.values) and rep.residual_l2 == 0


@pytest.mark.parametrize("kind", [D, N_])
def test_full_grid_residual_and_bc(kind):
    g = StripGrid(N=2, L=4 * math.pi, M=16, X_max=12.0, P=2049)
    rng = np.random.default_rng(8)
    f = project_zero_mode(band_limited_field(g, rng), kind)
    h = band_limited_boundary(g, rng)
    solve = solve_scalar_dirichlet_type if kind is D else solve_scalar_neumann_type
    u, rep = solve(ScalarBVPData(f, h, kind))
    assert rep.residual_l2 <= 1e-6 * norm_sobolev(f, 0)
    assert rep.bc_violation <= 1e-8 * norm_sobolev(u, 2)
    jump = 2 if kind is D else 1
    assert np.max(np.abs(trace(u, jump).values - h.values)) == pytest.approx(rep.bc_violation)
    for key, val in rep.to_dict().items():
        if isinstance(val, float):
            assert np.isfinite(val) and val >= 0, key


def test_zero_mode_incompatible(small_grid):
    x0 = np.broadcast_to(small_grid.mesh()[0], small_grid.shape)
    f = ScalarField(small_grid, np.exp(-x0) + 0j)
    with pytest.raises(ZeroModeIncompatible) as info:
        solve_scalar_dirichlet_type(ScalarBVPData(f, None, D))
    assert info.value.value > info.value.threshold
    fixed = project_zero_mode(f, D)
    u, rep = solve_scalar_dirichlet_type(ScalarBVPData(fixed, None, D))
    assert rep.relative_residual <= 1e-6
    with pytest.raises(ZeroModeIncompatible):
        solve_scalar_neumann_type(ScalarBVPData(ScalarField(small_grid, x0 * np.exp(-x0) + 0j), None, N_))


def test_non_finite_data(small_grid):
    vals = np.zeros(small_grid.boundary_shape, dtype=complex)
    vals[0, 0] = np.inf
    with pytest.raises((NonFiniteInput, ValueError)):
        solve_scalar_dirichlet_type(ScalarBVPData(ScalarField.zeros(small_grid), BoundaryField(small_grid, vals), D))


def test_kind_mismatch(small_grid):
    with pytest.raises(ValueError):
        solve_scalar_neumann_type(ScalarBVPData(ScalarField.zeros(small_grid), None, D))


@settings(max_examples=5, deadline=None)
@given(seed=st.integers(0, 2**31 - 1), a=st.floats(-3, 3), b=st.floats(-3, 3))
@example(seed=0, a=0.0, b=4.3301620051857273e-246)
def test_linearity(small_grid, seed, a, b):
    rng = np.random.default_rng(seed)
    f1, f2 = (project_zero_mode(band_limited_field(small_grid, rng), N_) for _ in range(2))
    h1, h2 = band_limited_boundary(small_grid, rng), band_limited_boundary(small_grid, rng)
    u1, _ = solve_scalar_neumann_type(ScalarBVPData(f1, h1, N_))
    u2, _ = solve_scalar_neumann_type(ScalarBVPData(f2, h2, N_))
    u, _ = solve_scalar_neumann_type(ScalarBVPData(f1 * a + f2 * b, h1 * a + h2 * b, N_))
    scale = max(np.max(np.abs(u1.values)), np.max(np.abs(u2.values)), 1.0) * (abs(a) + abs(b) + 1)
    assert np.max(np.abs(u.values - a * u1.values - b * u2.values)) <= 1e-11 * scale


def test_deterministic(small_grid):
    f = project_zero_mode(band_limited_field(small_grid, np.random.default_rng(4)), D)
    u1, r1 = solve_scalar_dirichlet_type(ScalarBVPData(f, None, D))
    u2, r2 = solve_scalar_dirichlet_type(ScalarBVPData(f, None, D))
    assert np.array_equal(u1.values, u2.values) and r1.to_dict() == r2.to_dict()


@pytest.mark.parametrize("q", [0, 1, 2, 3])
def test_qform_solution_in_domain(ref_grid, q):
    alpha = random_form(ref_grid, q, np.random.default_rng([2, q]))
    for pos, K in enumerate(alpha.indices):
        kind = N_ if 0 in K else D
        alpha.values[pos] = project_zero_mode(ScalarField(ref_grid, alpha.values[pos]), kind).values
    phi, rep = solve_qform(alpha)
    assert rep.relative_residual <= 1e-6
    assert norm_sobolev_form(apply_hodge(phi) - alpha, 0) <= 1e-6 * norm_sobolev_form(alpha, 0)
    tol = 1e-8 * norm_sobolev_form(phi, 2)
    if q >= 1:
        assert in_dom_dstar(phi, 1, tol).member
    assert in_dom_dstar_of_d(phi, tol).member


def test_qform_reports_component(small_grid):
    x0 = np.broadcast_to(small_grid.mesh()[0], small_grid.shape)
    alpha = FormField.from_components(small_grid, 1, {(2,): np.exp(-x0) + 0j})
    with pytest.raises(ZeroModeIncompatible) as info:
        solve_qform(alpha)
    assert tuple(info.value.component) == (2,)


def test_check_moments_table(grid1d, small_grid):
    x0, x1 = np.broadcast_to(small_grid.mesh()[0], small_grid.shape), np.broadcast_to(small_grid.mesh()[1], small_grid.shape)
    # odd about the torus centre in x1, so the integral vanishes exactly
    odd = ScalarField(small_grid, np.exp(-x0) * np.sin(2 * np.pi * x1 / small_grid.L) + 0j)
    rep = check_moments(odd, 2)
    assert rep.satisfied and rep.required_names == ["integral"]
    L2 = small_grid.L**2
    bump = ScalarField(small_grid, 0.3 * np.exp(-x0) + 0j)  # integral 0.3 L^2 (up to e^-12)
    rep = check_moments(bump, 2)
    assert not rep.satisfied
    assert np.isclose(rep.conditions[0].value, 0.3 * L2, rtol=1e-5)
    assert check_moments(bump, 4).satisfied and check_moments(bump, 4).required_names == []
    assert check_moments(bump, 3).required_names == ["integral"]
    assert set(check_moments(bump, 1).required_names) == {"integral", "first_moment_x0", "first_moment_x1"}
