import math

import numpy as np
import pytest

from sobolev_hodge import symbols
from sobolev_hodge.exterior import FormField
from sobolev_hodge.generators import random_form
from sobolev_hodge.oracle import (
    Closure,
    OracleConfig,
    Scheme,
    adjoint_gap,
    estimate_ratio_ensemble,
    fd_mode_solve,
    oracle_convergence,
    random_mode_data,
)
from sobolev_hodge.solvers import BCKind, solve_mode
from sobolev_hodge.strip import BoundaryField, ScalarField, StripGrid, norm_sobolev_form

D, N_ = BCKind.DIRICHLET_TYPE, BCKind.NEUMANN_TYPE


def test_zero_data():
    cfg = OracleConfig(P_oracle=257)
    assert not np.any(fd_mode_solve(1.0, np.zeros(257), 0.0, D, cfg).values)


@pytest.mark.parametrize("scheme", [Scheme.SECOND_ORDER, Scheme.NUMEROV])
def test_manufactured_mode_converges(scheme):
    beta = 1.0
    w = symbols.omega(beta)
    errs = []
    for P in (257, 513, 1025):
        cfg = OracleConfig(P_oracle=P, scheme=scheme)
        x = cfg.x
        u = fd_mode_solve(beta, beta**2 * np.exp(-w * x), w**2, D, cfg).values
        errs.append(np.max(np.abs(u - np.exp(-w * x))))
    assert errs[-1] < 1e-4
    assert min(a / b for a, b in zip(errs, errs[1:])) >= 3.5


@pytest.mark.parametrize("closure", list(Closure))
@pytest.mark.parametrize("kind", [D, N_])
def test_self_consistent_solve(closure, kind):
    cfg = OracleConfig(P_oracle=513, closure=closure)
    f, h = random_mode_data(np.random.default_rng(1), cfg.x, 0.5, kind)
    _, res = fd_mode_solve(0.5, f, h, kind, cfg, return_residual=True)
    assert res <= 1e-12


def test_oracle_agreement_quick():
    rows = oracle_convergence([0.0, 1.0], n_profiles=3, P_list=(257, 513), seed=4)
    for r in rows:
        assert r.gaps[-1] < 1e-4
        assert r.orders[0] >= 1.9


def test_adjoint_gap_properties():
    g = StripGrid(N=2, L=4 * math.pi, M=8, X_max=12.0, P=513)
    rng = np.random.default_rng(6)
    u = random_form(g, 0, rng)
    psi = random_form(g, 1, rng, in_dom_dstar=True)
    gap = adjoint_gap(u, psi)
    assert gap <= 5e-5 * norm_sobolev_form(u, 2) * norm_sobolev_form(psi, 2)
    assert adjoint_gap(u * 2.0, psi) == pytest.approx(2 * gap, rel=1e-6, abs=1e-12)
    const = FormField.scalar(ScalarField(g, np.ones(g.shape, dtype=complex)))
    assert adjoint_gap(const, psi) <= 5e-5 * norm_sobolev_form(const, 2) * norm_sobolev_form(psi, 2)
    x0 = np.broadcast_to(g.mesh()[0], g.shape)
    bump = np.exp(-4 * (x0 - 6) ** 2)
    interior = FormField(g, 1, random_form(g, 1, rng).values * bump)
    assert adjoint_gap(u, interior) <= 1e-8 * norm_sobolev_form(u, 2) * norm_sobolev_form(interior, 2)


def test_adjoint_gap_shrinks_under_refinement():
    gaps = []
    for P in (257, 513, 1025):
        g = StripGrid(N=1, L=4 * math.pi, M=8, X_max=12.0, P=P)
        rng = np.random.default_rng(9)
        u = random_form(g, 0, rng)
        psi = random_form(g, 1, rng, in_dom_dstar=True)
        gaps.append(adjoint_gap(u, psi, tol=1e-4 * norm_sobolev_form(psi, 2)))
    assert gaps[0] > gaps[1] > gaps[2]


def test_ensemble_determinism_and_skip():
    g = StripGrid(N=1, L=4 * math.pi, M=8, X_max=12.0, P=257)
    a = estimate_ratio_ensemble(4, 3, D, g)
    b = estimate_ratio_ensemble(4, 3, D, g)
    assert a.to_dict() == b.to_dict() and a.ratios == b.ratios
    zero = estimate_ratio_ensemble(1, 0, D, g, data_factory=lambda grid, rng, kind: (ScalarField.zeros(grid), BoundaryField.zeros(grid)))
    assert zero.skipped == 1 and zero.ratios == []
    with pytest.raises(ValueError):
        estimate_ratio_ensemble(0, 0, D, g)


def test_closed_form_matches_reference_at_zero_mode():
    cfg = OracleConfig(P_oracle=1025)
    for kind in (D, N_):
        f, h = random_mode_data(np.random.default_rng(2), cfg.x, 0.0, kind)
        ref = fd_mode_solve(0.0, f, h, kind, cfg).values
        closed = solve_mode(0.0, f, h, kind, cfg.x)
        assert np.linalg.norm(closed - ref) / np.linalg.norm(ref) < 1e-5
