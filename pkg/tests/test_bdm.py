import numpy as np
import pytest

from sobolev_hodge.bdm import (
    BoundaryOperatorDesc,
    OperatorKind,
    classify_problem,
    compose_green,
    compose_trace,
    model_system_solve,
    poisson_symbol_check,
)
from sobolev_hodge.errors import InvalidOrder


@pytest.mark.parametrize("args, order, cls", [((-1, 2), 1, 3), ((0, 0), 0, 1), ((-0.5, 1), 0.5, 2)])
def test_compose_trace(args, order, cls):
    d = compose_trace(*args)
    assert d.kind is OperatorKind.TRACE and d.order == order and d.operator_class == cls


@pytest.mark.parametrize("args, order, cls", [((1, 1), 2, 2), ((0, 0), 0, 1), ((1, 0), 1, 1)])
def test_compose_green(args, order, cls):
    d = compose_green(*args)
    assert d.kind is OperatorKind.SINGULAR_GREEN and d.order == order and d.operator_class == cls


def test_invalid_descriptors():
    with pytest.raises(InvalidOrder):
        compose_trace(0, -1)
    with pytest.raises(InvalidOrder):
        BoundaryOperatorDesc(OperatorKind.POISSON, 1.0, 2)
    with pytest.raises(InvalidOrder):
        BoundaryOperatorDesc(OperatorKind.TRACE, 1.0)


def test_classify_problem():
    c = classify_problem().to_dict()
    assert c["operators"]["G"] == {"kind": "singular_green", "order": 2.0, "class": 2}
    assert c["operators"]["T"] == {"kind": "trace", "order": 1.0, "class": 3}
    assert c["M"] == 0 and c["M_prime"] == 1 and c["interior_symbol_invertible"]


def test_poisson_symbol_bounds():
    rows = poisson_symbol_check()
    assert len(rows) == 27 and all(r.passed for r in rows)
    # the alternative exponent fails on rows with normal derivatives
    alt = poisson_symbol_check(ell_prime_sign=-1)
    assert any(not r.passed for r in alt if r.ell_prime > 0)


def _psi(x, rng):
    return (rng.standard_normal() + 1j * rng.standard_normal()) * np.exp(-((x - rng.uniform(1, 3)) ** 2))


def test_model_system_examples():
    x = np.linspace(0.0, 20.0, 2001)
    zero = model_system_solve(1.0, np.zeros(2001), 0.0, x)
    assert not np.any(zero.profile.values)
    rng = np.random.default_rng(1)
    p1, p2 = _psi(x, rng), _psi(x, rng)
    s1 = model_system_solve(1.0, p1, 1.0, x)
    assert s1.residual <= 1e-8 and s1.decay <= 1e-6
    s2 = model_system_solve(1.0, p2, 2.0j, x)
    s = model_system_solve(1.0, 2 * p1 + p2, 2.0 + 2.0j, x)
    assert np.allclose(s.profile.values, 2 * s1.profile.values + s2.profile.values, rtol=1e-9, atol=1e-12)


def test_model_system_condition_bounded():
    x = np.linspace(0.0, 20.0, 2001)
    rng = np.random.default_rng(2)
    conds = [model_system_solve(float(b), _psi(x, rng), 1.0, x).condition for b in np.logspace(0, 2, 7)]
    assert np.all(np.isfinite(conds)) and max(conds) < 1e12


def test_model_system_rejects_small_beta():
    with pytest.raises(ValueError):
        model_system_solve(0.1, np.zeros(11), 0.0, np.linspace(0, 1, 11))
