import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sobolev_hodge.errors import DegreeOverflow, InvalidMultiIndex
from sobolev_hodge.exterior import FormField, MultiIndex, contract_normal, d, d_formal, eps
from sobolev_hodge.generators import random_form
from sobolev_hodge.strip import ScalarField, inner_sobolev_form


def _perm_sign(seq):
    seq = list(seq)
    sign = 1
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                sign = -sign
    return sign


@pytest.mark.parametrize(
    "K, j, I, expected",
    [((0, 1), 0, (1,), 1), ((0, 1), 1, (0,), -1), ((0, 2), 1, (0,), 0), ((0, 1, 2), 1, (0, 2), -1)],
)
def test_eps_examples(K, j, I, expected):
    assert eps(K, j, I) == expected


@pytest.mark.parametrize("N", [1, 2, 3, 4])
def test_eps_matches_permutation_sign(N):
    for q in range(N + 1):
        for I in MultiIndex.all(q, N):
            for K in MultiIndex.all(q + 1, N):
                for j in range(N + 1):
                    if j in I or set(K.indices) != set(I.indices) | {j}:
                        want = 0
                    else:
                        want = _perm_sign((j,) + I.indices)
                    assert eps(K, j, I) == want


def test_multiindex_validation():
    with pytest.raises(InvalidMultiIndex):
        MultiIndex((1, 0))
    with pytest.raises(InvalidMultiIndex):
        MultiIndex((0, 0))
    with pytest.raises((InvalidMultiIndex, DegreeOverflow)):
        MultiIndex((0, 3)).check(2)
    assert MultiIndex((0, 2)).insert(1) == MultiIndex((0, 1, 2))
    assert [m.indices for m in MultiIndex.all(2, 2)] == [(0, 1), (0, 2), (1, 2)]


def test_component_count(small_grid):
    for q in range(small_grid.N + 2):
        f = FormField.zeros(small_grid, q)
        assert f.values.shape[0] == len(list(itertools.combinations(range(3), q)))


def test_d_of_x0_and_constant(small_grid):
    x0 = np.broadcast_to(small_grid.mesh()[0], small_grid.shape)
    df = d(FormField.scalar(ScalarField(small_grid, x0.astype(complex))))
    assert np.allclose(df[(0,)].values, 1.0, atol=1e-10)
    assert np.allclose(df[(1,)].values, 0.0) and np.allclose(df[(2,)].values, 0.0)
    const = FormField.scalar(ScalarField(small_grid, np.full(small_grid.shape, 3.0 + 0j)))
    assert np.max(np.abs(d(const).values)) < 1e-10


def test_d_formal_examples(small_grid):
    x0 = small_grid.mesh()[0]
    psi = FormField.from_components(small_grid, 1, {(0,): np.exp(-x0) + 0j})
    out = d_formal(psi)
    assert np.max(np.abs(out.values[0] - np.exp(-x0))) < 1e-8
    const = FormField.from_components(small_grid, 1, {(0,): np.ones(small_grid.shape) + 0j, (2,): 2 * np.ones(small_grid.shape) + 0j})
    assert np.max(np.abs(d_formal(const).values)) < 1e-10


def test_contract_normal_examples(small_grid, grid1d):
    a = np.full(grid1d.shape, 2.0 + 0j)
    b = np.full(grid1d.shape, 5.0 + 0j)
    psi = FormField.from_components(grid1d, 1, {(0,): a, (1,): b})
    assert np.array_equal(contract_normal(psi).values[0], a)
    assert np.array_equal(contract_normal(FormField.from_components(grid1d, 1, {(1,): b})).values[0], 0 * b)
    two = FormField.from_components(grid1d, 2, {(0, 1): a})
    out = contract_normal(two)
    assert out.degree == 1 and np.array_equal(out[(1,)].values, a) and not np.any(out[(0,)].values)


@settings(max_examples=10, deadline=None)
@given(seed=st.integers(0, 2**31 - 1), q=st.integers(0, 1))
def test_d_squared_vanishes(small_grid, seed, q):
    phi = random_form(small_grid, q, np.random.default_rng(seed))
    dd = d(d(phi))
    scale = np.max(np.abs(d(phi).values))
    assert np.max(np.abs(dd.values)) <= 1e-10 * max(scale, 1.0) * small_grid.M


@settings(max_examples=10, deadline=None)
@given(seed=st.integers(0, 2**31 - 1), q=st.integers(1, 3))
def test_contract_twice_vanishes(small_grid, seed, q):
    psi = random_form(small_grid, q, np.random.default_rng(seed))
    twice = contract_normal(contract_normal(psi)) if q >= 2 else None
    if twice is not None:
        assert not np.any(twice.values)


def test_formal_adjoint_on_interior_support(small_grid, rng):
    # bump supported well inside (0, X_max): boundary terms vanish
    x0 = small_grid.mesh()[0]
    bump = np.exp(-4 * (x0 - 6.0) ** 2)
    phi = FormField.scalar(ScalarField(small_grid, bump * random_form(small_grid, 0, rng).values[0]))
    psi_vals = random_form(small_grid, 1, rng).values * bump
    psi = FormField(small_grid, 1, psi_vals)
    lhs = inner_sobolev_form(d(phi), psi, 0)
    rhs = inner_sobolev_form(phi, d_formal(psi), 0)
    assert abs(lhs - rhs) <= 1e-6 * abs(lhs)
