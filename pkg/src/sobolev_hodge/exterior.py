"""Multi-indices, the permutation sign and exterior calculus on forms.

Components are labelled by increasing multi-indices in ``{0, ..., N}``,
where ``0`` is the normal direction. A ``q``-form on the strip carries one
scalar field per multi-index of length ``q``.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Mapping

import numpy as np

from .errors import DegreeOverflow, DegreeUnderflow, GridMismatch, InvalidMultiIndex


@dataclass(frozen=True, order=True)
class MultiIndex:
    """A strictly increasing tuple of axis labels."""

    indices: tuple

    def __post_init__(self):
        idx = tuple(int(i) for i in self.indices)
        if any(i < 0 for i in idx):
            raise InvalidMultiIndex(f"negative entry in {idx}")
        if any(b <= a for a, b in zip(idx, idx[1:])):
            raise InvalidMultiIndex(f"entries must be strictly increasing: {idx}")
        object.__setattr__(self, "indices", idx)

    @property
    def degree(self) -> int:
        return len(self.indices)

    def __contains__(self, j) -> bool:
        return j in self.indices

    def __iter__(self):
        return iter(self.indices)

    def __len__(self):
        return len(self.indices)

    def __repr__(self):
        return f"MultiIndex{self.indices}"

    def check(self, n: int) -> "MultiIndex":
        """Validate entries against the top label ``n`` (tangential dimension)."""
        if self.indices and self.indices[-1] > n:
            raise InvalidMultiIndex(f"entry above {n} in {self.indices}")
        return self

    def insert(self, j: int) -> "MultiIndex":
        """Sorted union with ``{j}``; ``j`` must not already be present."""
        if j in self.indices:
            raise InvalidMultiIndex(f"{j} already in {self.indices}")
        return MultiIndex(tuple(sorted(self.indices + (j,))))

    def remove(self, j: int) -> "MultiIndex":
        return MultiIndex(tuple(i for i in self.indices if i != j))

    @staticmethod
    def all(q: int, n: int) -> list:
        """All multi-indices of length ``q`` over ``{0..n}``, in lexicographic order."""
        return [MultiIndex(c) for c in combinations(range(n + 1), q)]


def as_index(obj) -> MultiIndex:
    return obj if isinstance(obj, MultiIndex) else MultiIndex(tuple(obj))


def eps(K, j: int, I) -> int:
    """Sign of the permutation taking ``(j, I)`` to ``K``; zero if not one.

    Returns 0 when ``j`` is in ``I`` or when ``{j} | I`` differs from ``K``.
    """
    K, I = as_index(K), as_index(I)
    if j in I or set(K.indices) != set(I.indices) | {j}:
        return 0
    # j moves past every element of I smaller than it
    return -1 if sum(1 for i in I if i < j) % 2 else 1


@dataclass(frozen=True)
class FormField:
    """A ``q``-form on a strip grid.

    Parameters
    ----------
    grid : StripGrid
    degree : int
    values : ndarray
        Shape ``(C, P, M, ..., M)`` with one slab per component, ordered as
        ``MultiIndex.all(degree, grid.N)``.
    """

    grid: object
    degree: int
    values: np.ndarray

    def __post_init__(self):
        n = self.grid.N
        if self.degree < 0:
            raise DegreeUnderflow(f"negative degree {self.degree}")
        if self.degree > n + 1:
            raise DegreeOverflow(f"degree {self.degree} exceeds {n + 1}")
        vals = np.asarray(self.values, dtype=complex)
        shape = (len(self.indices),) + self.grid.shape
        if vals.shape != shape:
            raise GridMismatch(f"form values have shape {vals.shape}, expected {shape}")
        object.__setattr__(self, "values", vals)

    @property
    def indices(self) -> list:
        return MultiIndex.all(self.degree, self.grid.N)

    def position(self, index) -> int:
        index = as_index(index).check(self.grid.N)
        if index.degree != self.degree:
            raise InvalidMultiIndex(f"{index} has degree {index.degree}, form has {self.degree}")
        return self.indices.index(index)

    def __getitem__(self, index):
        from .strip import ScalarField

        return ScalarField(self.grid, self.values[self.position(index)])

    def component_array(self, index) -> np.ndarray:
        return self.values[self.position(index)]

    @classmethod
    def zeros(cls, grid, degree: int) -> "FormField":
        count = len(MultiIndex.all(degree, grid.N))
        return cls(grid, degree, np.zeros((count,) + grid.shape, dtype=complex))

    @classmethod
    def from_components(cls, grid, degree: int, comps: Mapping) -> "FormField":
        """Build a form from ``{index: ScalarField or array}``; missing ones are zero."""
        out = cls.zeros(grid, degree)
        for key, val in comps.items():
            arr = getattr(val, "values", val)
            if getattr(val, "grid", grid) != grid:
                raise GridMismatch("component lives on a different grid")
            out.values[out.position(key)] = arr
        return out

    @classmethod
    def scalar(cls, field) -> "FormField":
        return cls(field.grid, 0, field.values[None])

    def _check_same(self, other):
        if not isinstance(other, FormField) or other.grid != self.grid or other.degree != self.degree:
            raise GridMismatch("forms differ in grid or degree")

    def __add__(self, other):
        self._check_same(other)
        return FormField(self.grid, self.degree, self.values + other.values)

    def __sub__(self, other):
        self._check_same(other)
        return FormField(self.grid, self.degree, self.values - other.values)

    def __mul__(self, c):
        return FormField(self.grid, self.degree, self.values * c)

    __rmul__ = __mul__

    def __neg__(self):
        return FormField(self.grid, self.degree, -self.values)


def _check_form(phi):
    if not isinstance(phi, FormField):
        raise TypeError("expected a FormField")


def d(phi: FormField) -> FormField:
    """Exterior derivative: ``(d phi)_K = sum eps^K_{jI} D_j phi_I``."""
    _check_form(phi)
    grid, q = phi.grid, phi.degree
    if q + 1 > grid.N + 1:
        raise DegreeOverflow(f"d of a {q}-form exceeds top degree {grid.N + 1}")
    out = FormField.zeros(grid, q + 1)
    for pos, K in enumerate(out.indices):
        acc = np.zeros(grid.shape, dtype=complex)
        for j in K:
            I = K.remove(j)
            acc += eps(K, j, I) * grid.diff(phi.component_array(I), j)
        out.values[pos] = acc
    return out


def d_formal(psi: FormField) -> FormField:
    """Formal adjoint of ``d``: ``(d' psi)_I = -sum eps^K_{jI} D_j psi_K``."""
    _check_form(psi)
    grid, q1 = psi.grid, psi.degree
    if q1 == 0:
        raise DegreeUnderflow("formal adjoint of a 0-form is undefined")
    out = FormField.zeros(grid, q1 - 1)
    for pos, I in enumerate(out.indices):
        acc = np.zeros(grid.shape, dtype=complex)
        for j in range(grid.N + 1):
            if j in I:
                continue
            K = I.insert(j)
            acc -= eps(K, j, I) * grid.diff(psi.component_array(K), j)
        out.values[pos] = acc
    return out


def contract_normal(psi: FormField) -> FormField:
    """Interior product with the normal direction: ``(psi _| d0)_I = psi_{0I}``."""
    _check_form(psi)
    if psi.degree == 0:
        raise DegreeUnderflow("cannot contract a 0-form")
    out = FormField.zeros(psi.grid, psi.degree - 1)
    for pos, I in enumerate(out.indices):
        if 0 not in I:
            out.values[pos] = psi.component_array(I.insert(0))
    return out
