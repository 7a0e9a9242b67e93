import numpy as np
import pytest

from sobolev_hodge.errors import DegreeUnderflow, NotInDomain, PrereqViolated
from sobolev_hodge.exterior import FormField, MultiIndex, d_formal
from sobolev_hodge.generators import band_limited_boundary, random_form
from sobolev_hodge.halfspace_ops import (
    apply_G_form,
    apply_G_scalar,
    apply_Gprime,
    apply_hodge,
    apply_K_form,
    apply_Ktilde,
    apply_laplacian,
    apply_Q,
    d_star,
    in_dom_dstar,
    in_dom_dstar_of_d,
)
from sobolev_hodge.strip import BoundaryField, ScalarField, boundary_norm, norm_sobolev_form, trace


def _x0(grid):
    return np.broadcast_to(grid.mesh()[0], grid.shape)


def _mode(grid, k):
    _, x1, x2 = grid.mesh()
    return np.exp(2j * np.pi * (k[0] * x1 + k[1] * x2) / grid.L)


def test_ktilde_examples(small_grid):
    x0 = _x0(small_grid)
    one = BoundaryField(small_grid, np.ones(small_grid.boundary_shape, dtype=complex))
    assert np.max(np.abs(apply_Ktilde(one).values + np.exp(-x0))) < 1e-14
    k = (1, 2)
    b = 2 * np.pi * np.hypot(*k) / small_grid.L
    w = np.sqrt(1 + b * b)
    v = BoundaryField(small_grid, _mode(small_grid, k)[0])
    want = -w * np.exp(-w * x0) * _mode(small_grid, k)
    assert np.max(np.abs(apply_Ktilde(v).values - want)) < 1e-13


def test_ktilde_bounded_ratio(small_grid):
    from sobolev_hodge.strip import norm_sobolev

    ratios = []
    for i in range(50):
        v = band_limited_boundary(small_grid, np.random.default_rng([5, i]))
        ratios.append(norm_sobolev(apply_Ktilde(v), 1) / boundary_norm(v, 1.5))
    assert np.all(np.isfinite(ratios)) and max(ratios) < 10


def test_G_scalar_examples(small_grid):
    x0 = _x0(small_grid)
    e = ScalarField(small_grid, np.exp(-x0) + 0j)
    assert np.max(np.abs(apply_G_scalar(e).values - np.exp(-x0))) < 1e-8
    even = ScalarField(small_grid, np.exp(-x0**2) * _mode(small_grid, (1, 0)))
    assert np.max(np.abs(apply_G_scalar(even).values)) < 1e-6
    far = ScalarField(small_grid, np.exp(-4 * (x0 - 6) ** 2) + 0j)
    assert np.max(np.abs(apply_G_scalar(far).values)) < 1e-12


def test_Gprime_examples(small_grid):
    x0 = _x0(small_grid)
    u = ScalarField(small_grid, np.exp(-x0**2) + 0j)
    assert np.max(np.abs(apply_Gprime(u).values - np.exp(-x0))) < 1e-14
    v = ScalarField(small_grid, x0 * np.exp(-x0) + 0j)
    assert np.max(np.abs(apply_Gprime(v).values)) < 1e-14
    k = (2, 1)
    b = 2 * np.pi * np.hypot(*k) / small_grid.L
    w = np.sqrt(1 + b * b)
    m = ScalarField(small_grid, np.cos(x0) * _mode(small_grid, k))
    assert np.max(np.abs(apply_Gprime(m).values - w**2 * np.exp(-w * x0) * _mode(small_grid, k))) < 1e-12


def test_K_form(small_grid, rng):
    with pytest.raises(DegreeUnderflow):
        apply_K_form(FormField.zeros(small_grid, 0))
    x0 = _x0(small_grid)
    psi = FormField.from_components(small_grid, 1, {(0,): (1 + x0) * np.exp(-x0) + 0j})
    out = apply_K_form(psi)
    assert out.degree == 0
    assert np.max(np.abs(out.values[0] + np.exp(-x0))) < 1e-14
    for q in (1, 2, 3):
        res = apply_K_form(random_form(small_grid, q, rng))
        for pos, I in enumerate(res.indices):
            if 0 in I:
                assert not np.any(res.values[pos])
    zero_bdry = FormField.from_components(small_grid, 1, {(0,): x0 * np.exp(-x0) + 0j, (1,): np.exp(-x0) + 0j})
    assert np.max(np.abs(apply_K_form(zero_bdry).values)) < 1e-14


def test_G_form_diagonal(small_grid, rng):
    x0 = _x0(small_grid)
    for q in (1, 2):
        for K in MultiIndex.all(q, small_grid.N):
            vals = random_form(small_grid, 0, rng).values[0]
            out = apply_G_form(FormField.from_components(small_grid, q, {K.indices: vals}))
            for pos, J in enumerate(out.indices):
                if J != K:
                    assert not np.any(out.values[pos])
    phi = FormField.from_components(small_grid, 1, {(1,): np.exp(-x0) + 0j})
    assert np.max(np.abs(apply_G_form(phi)[(1,)].values - np.exp(-x0))) < 1e-8
    u = random_form(small_grid, 0, rng)
    assert np.array_equal(apply_G_form(u).values[0], apply_G_scalar(ScalarField(small_grid, u.values[0])).values)


def test_Q_examples(small_grid):
    x0 = _x0(small_grid)
    one = BoundaryField(small_grid, np.ones(small_grid.boundary_shape, dtype=complex))
    q = apply_Q(one)
    assert np.max(np.abs(q.values + np.exp(-x0))) < 1e-14
    assert np.max(np.abs(trace(q, 1).values - 1)) < 1e-8
    assert np.allclose(apply_Q(one * 2).values, 2 * q.values, rtol=0, atol=1e-15)


def test_Q_trace_converges(rng):
    import math

    from sobolev_hodge.strip import StripGrid

    errs = []
    for P in (129, 257):
        g = StripGrid(N=2, L=4 * math.pi, M=8, X_max=12.0, P=P)
        v = band_limited_boundary(g, np.random.default_rng(3))
        errs.append(np.max(np.abs(trace(apply_Q(v), 1).values - v.values)))
    assert errs[0] / errs[1] >= 3.5


def test_laplacian_examples(small_grid):
    x0 = _x0(small_grid)
    w = ScalarField(small_grid, _mode(small_grid, (1, 0)) + 0 * x0)
    assert np.max(np.abs(apply_laplacian(w).values + (2 * np.pi / small_grid.L) ** 2 * w.values)) < 1e-10
    sq = apply_laplacian(ScalarField(small_grid, x0**2 + 0j)).values
    assert np.max(np.abs(sq[1:-1] - 2)) < 1e-9


def test_hodge_degree_zero(small_grid, rng):
    u = random_form(small_grid, 0, rng)
    s = ScalarField(small_grid, u.values[0])
    want = apply_G_scalar(s) - apply_laplacian(s)
    assert np.allclose(apply_hodge(u).values[0], want.values, rtol=0, atol=1e-12)


def test_in_dom_dstar_examples(small_grid):
    x0 = _x0(small_grid)
    g = _mode(small_grid, (1, 1)) * np.exp(-x0)
    psi2 = FormField.from_components(small_grid, 1, {(0,): x0**2 * g})
    assert in_dom_dstar(psi2, 1).member
    assert not in_dom_dstar(psi2, 2).member
    psi1 = FormField.from_components(small_grid, 1, {(0,): x0 * g})
    res = in_dom_dstar(psi1, 1)
    assert not res.member and res.offending_components == [MultiIndex((0,))]


def test_in_dom_dstar_of_d_examples(small_grid):
    x0 = _x0(small_grid)
    e = FormField.scalar(ScalarField(small_grid, np.exp(-x0) + 0j))
    assert not in_dom_dstar_of_d(e).member
    cube = FormField.scalar(ScalarField(small_grid, x0**3 * _mode(small_grid, (0, 1))))
    assert in_dom_dstar_of_d(cube).member
    const = FormField.from_components(small_grid, 1, {(1,): _mode(small_grid, (1, 0)) + 0 * x0})
    assert in_dom_dstar_of_d(const).member
    bad = FormField.from_components(small_grid, 1, {(0,): x0 * np.exp(-x0) + 0j})
    with pytest.raises(PrereqViolated):
        in_dom_dstar_of_d(bad)


def test_d_star_rejects_and_names_component(small_grid):
    x0 = _x0(small_grid)
    psi = FormField.from_components(small_grid, 2, {(0, 2): x0 * np.exp(-x0) + 0j, (1, 2): np.exp(-x0) + 0j})
    with pytest.raises(NotInDomain) as info:
        d_star(psi)
    assert info.value.membership.offending_components == [MultiIndex((0, 2))]


def test_d_star_interior_and_linear(small_grid, rng):
    x0 = _x0(small_grid)
    bump = np.exp(-4 * (x0 - 6.0) ** 2)
    psi = FormField(small_grid, 1, random_form(small_grid, 1, rng).values * bump)
    assert np.allclose(d_star(psi).values, d_formal(psi).values, rtol=0, atol=1e-13)
    psi = random_form(small_grid, 2, rng, in_dom_dstar=True)
    tol = 1e-4 * norm_sobolev_form(psi, 2)
    assert np.allclose(d_star(psi * 3.0, 3 * tol).values, 3.0 * d_star(psi, tol).values, rtol=1e-13, atol=1e-12)
