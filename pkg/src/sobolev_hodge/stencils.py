"""Finite-difference stencils and normal-axis quadrature on a uniform grid."""

from __future__ import annotations

from functools import lru_cache

import numpy as np
import scipy.sparse as sp


def fornberg_weights(z: float, x: np.ndarray, m: int) -> np.ndarray:
    """Weights for derivatives 0..m at ``z`` from values at nodes ``x``.

    Fornberg's recursion (Math. Comp. 51, 1988). Returns an array of shape
    ``(m + 1, len(x))`` whose row ``k`` holds the weights of the k-th
    derivative.
    """
    x = np.asarray(x, dtype=float)
    n = len(x)
    c = np.zeros((m + 1, n))
    c1 = 1.0
    c4 = x[0] - z
    c[0, 0] = 1.0
    for i in range(1, n):
        mn = min(i, m)
        c2 = 1.0
        c5 = c4
        c4 = x[i] - z
        for j in range(i):
            c3 = x[i] - x[j]
            c2 *= c3
            if j == i - 1:
                for k in range(mn, 0, -1):
                    c[k, i] = c1 * (k * c[k - 1, i - 1] - c5 * c[k, i - 1]) / c2
                c[0, i] = -c1 * c5 * c[0, i - 1] / c2
            for k in range(mn, 0, -1):
                c[k, j] = (c4 * c[k, j] - k * c[k - 1, j]) / c3
            c[0, j] = c4 * c[0, j] / c3
        c1 = c2
    return c


@lru_cache(maxsize=64)
def one_sided_weights(deriv: int, order: int) -> np.ndarray:
    """Forward stencil for the ``deriv``-th derivative at node 0, unit spacing."""
    width = deriv + order
    return fornberg_weights(0.0, np.arange(width, dtype=float), deriv)[deriv]


@lru_cache(maxsize=64)
def _derivative_matrix_unit(n: int, deriv: int, order: int) -> sp.csr_matrix:
    # centred stencil in the interior (order+1 points for derivatives 1-2,
    # order+3 for 3-4), shifted windows of width deriv+order near the ends
    width = order + 2 * ((deriv + 1) // 2) - 1
    half = width // 2
    edge_width = deriv + order
    rows, cols, vals = [], [], []
    for i in range(n):
        if half <= i < n - half:
            start, w = i - half, width
        else:
            w = edge_width
            start = min(max(i - w // 2, 0), n - w)
        nodes = np.arange(start, start + w)
        wts = fornberg_weights(float(i), nodes.astype(float), deriv)[deriv]
        rows.extend([i] * w)
        cols.extend(nodes.tolist())
        vals.extend(wts.tolist())
    return sp.csr_matrix((vals, (rows, cols)), shape=(n, n))


def derivative_matrix(n: int, h: float, deriv: int, order: int) -> sp.csr_matrix:
    """Sparse ``n x n`` matrix of the ``deriv``-th derivative, accuracy ``order``."""
    if order % 2:
        raise ValueError("order must be even")
    if n < deriv + order:
        raise ValueError(f"need at least {deriv + order} nodes, got {n}")
    return (_derivative_matrix_unit(n, deriv, order) / h**deriv).tocsr()


def quadrature_weights(n: int, h: float, rule: str = "gregory") -> np.ndarray:
    """Weights for integrating nodal values over ``[0, (n-1) h]``.

    ``"trapezoid"`` is the composite trapezoid rule (O(h^2)).
    ``"gregory"`` adds the fourth-order endpoint corrections
    ``[3/8, 7/6, 23/24]`` at both ends (O(h^4)).
    """
    w = np.full(n, h)
    if rule == "trapezoid":
        w[0] = w[-1] = h / 2
    elif rule == "gregory":
        if n < 7:
            raise ValueError("gregory rule needs at least 7 nodes")
        ends = np.array([3 / 8, 7 / 6, 23 / 24]) * h
        w[:3] = ends
        w[-3:] = ends[::-1]
    else:
        raise ValueError(f"unknown quadrature rule {rule!r}")
    return w


_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(16)


def _lagrange_basis(nodes: np.ndarray, s: np.ndarray) -> np.ndarray:
    """Values of the Lagrange basis on ``nodes`` at points ``s``: (len(nodes), len(s))."""
    out = np.ones((len(nodes), len(s)))
    for m, xm in enumerate(nodes):
        for j, xj in enumerate(nodes):
            if j != m:
                out[m] *= (s - xj) / (xm - xj)
    return out


def exp_step_weights(beta: np.ndarray, h: float, npts: int = 6) -> np.ndarray:
    """Product-integration weights for one step of an exponential recursion.

    For each decay rate ``beta`` and each placement ``p`` of the step inside
    an ``npts``-node interpolation stencil, returns weights ``W[p, m, ...]``
    with

        int_0^h exp(-beta (h - t)) f(x_left + t) dt  ~=  sum_m W[p, m] f[s + m]

    where ``x_left`` is stencil node ``p``. The local error is
    ``O(h^(npts + 1))`` uniformly in ``beta``.
    """
    beta = np.asarray(beta, dtype=float)
    t = 0.5 * (_GL_NODES + 1.0)  # on [0, 1]
    gw = 0.5 * _GL_WEIGHTS
    kern = np.exp(-np.multiply.outer(beta * h, 1.0 - t))  # (..., nq)
    nodes = np.arange(npts, dtype=float)
    out = np.empty((npts - 1, npts) + beta.shape)
    for p in range(npts - 1):
        basis = _lagrange_basis(nodes, p + t)  # (npts, nq)
        out[p] = h * np.einsum("mq,...q->m...", basis * gw, kern)
    return out
