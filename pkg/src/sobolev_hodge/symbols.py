"""Per-frequency scalar symbols of the half-space problems.

Every function takes the tangential frequency magnitude ``beta = 2 pi |k| / L``
rather than an integer mode, so the formulas can be checked independently of
any grid. ``omega = sqrt(1 + beta^2)`` is the decay rate of the boundary
kernel.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import HodgeError


class ZeroModeSingular(HodgeError, ValueError):
    """The Neumann mode kernel has no decaying form at zero frequency."""


@dataclass(frozen=True)
class Freq:
    beta: float

    @property
    def omega(self) -> float:
        return float(omega(self.beta))


def omega(beta):
    """``sqrt(1 + beta^2)``."""
    return np.sqrt(1.0 + np.square(beta))


def m1(beta):
    """Multiplier ``(1 + b^2 + b w) / (1 + 2 b^2 + b w)`` with ``w = omega(b)``."""
    beta = np.asarray(beta, dtype=float)
    w = omega(beta)
    num = 1.0 + beta**2 + beta * w
    return num / (num + beta**2)


def m2(beta):
    """Second multiplier ``m1 / omega``."""
    return m1(beta) / omega(beta)


def boundary_denominator(beta):
    """``1 + 2 b^2 + b omega(b)``, the determinant of the boundary system."""
    beta = np.asarray(beta, dtype=float)
    return 1.0 + 2.0 * beta**2 + beta * omega(beta)


def k_hat(beta, x0):
    """Kernel profile ``-omega exp(-omega x0)``."""
    w = omega(beta)
    return -w * np.exp(-w * np.asarray(x0, dtype=float))


def poisson_mode(beta, x0):
    """Decaying harmonic profile ``exp(-beta x0)``."""
    return np.exp(-np.asarray(beta, dtype=float) * np.asarray(x0, dtype=float))


def green_dirichlet_mode(beta, x0, y0):
    """Mode kernel of the Dirichlet Green's operator of ``-d^2 + beta^2``.

    ``(exp(-b|x-y|) - exp(-b(x+y))) / (2b)``, with the limit ``min(x, y)``
    used where ``b max(x, y) < 1e-8``.
    """
    beta, x0, y0 = np.broadcast_arrays(*(np.asarray(a, dtype=float) for a in (beta, x0, y0)))
    small = beta * np.maximum(x0, y0) < 1e-8
    safe = np.where(small, 1.0, beta)
    # expm1 form keeps accuracy when the two exponentials nearly cancel
    lo, hi = np.minimum(x0, y0), np.maximum(x0, y0)
    val = -np.exp(-safe * (hi - lo)) * np.expm1(-2.0 * safe * lo) / (2.0 * safe)
    out = np.where(small, np.minimum(x0, y0), val)
    return out[()] if out.ndim == 0 else out


def green_neumann_mode(beta, x0, y0):
    """Mode kernel of the Neumann Green's operator: ``(e^{-b|x-y|} + e^{-b(x+y)}) / (2b)``."""
    beta = np.asarray(beta, dtype=float)
    if np.any(beta <= 0):
        raise ZeroModeSingular("the Neumann mode kernel requires beta > 0")
    x0 = np.asarray(x0, dtype=float)
    y0 = np.asarray(y0, dtype=float)
    return (np.exp(-beta * np.abs(x0 - y0)) + np.exp(-beta * (x0 + y0))) / (2.0 * beta)


def green_of_khat(beta, x0):
    """Dirichlet Green's operator applied to ``exp(-omega y)``: ``e^{-b x} - e^{-w x}``."""
    beta = np.asarray(beta, dtype=float)
    x0 = np.asarray(x0, dtype=float)
    return np.exp(-beta * x0) - np.exp(-omega(beta) * x0)


def neumann_of_khat(beta, x0):
    """Neumann Green's operator applied to ``exp(-omega y)``: ``(w/b) e^{-b x} - e^{-w x}``.

    It solves ``-w'' + b^2 w = exp(-omega x)`` with ``w'(0) = 0`` and decay.
    """
    beta = np.asarray(beta, dtype=float)
    if np.any(beta <= 0):
        raise ZeroModeSingular("the Neumann mode kernel requires beta > 0")
    x0 = np.asarray(x0, dtype=float)
    w = omega(beta)
    return (w / beta) * np.exp(-beta * x0) - np.exp(-w * x0)
