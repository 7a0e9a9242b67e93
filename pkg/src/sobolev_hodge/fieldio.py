"""Binary field dumps: one JSON header line followed by raw complex samples.

The header holds ``N, L, M, X_max, P, degree`` and the component labels.
The payload is little-endian float64 pairs (real, imaginary), component by
component, each in C order with the normal axis outermost.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .errors import GridMismatch
from .exterior import FormField, MultiIndex
from .strip import BoundaryField, ScalarField, StripGrid

_DTYPE = np.dtype("<c16")


def _header(grid: StripGrid, degree, components, kind: str) -> bytes:
    head = {
        "N": grid.N,
        "L": grid.L,
        "M": grid.M,
        "X_max": grid.X_max,
        "P": grid.P,
        "degree": degree,
        "components": components,
        "field": kind,
    }
    return (json.dumps(head, sort_keys=True) + "\n").encode("ascii")


def dump_field(obj, path) -> None:
    """Write a ScalarField, BoundaryField or FormField to ``path``."""
    if isinstance(obj, FormField):
        comps = [list(K.indices) for K in obj.indices]
        head = _header(obj.grid, obj.degree, comps, "form")
        data = obj.values
    elif isinstance(obj, ScalarField):
        head = _header(obj.grid, 0, [[]], "scalar")
        data = obj.values
    elif isinstance(obj, BoundaryField):
        head = _header(obj.grid, None, [[]], "boundary")
        data = obj.values
    else:
        raise TypeError(f"cannot dump {type(obj).__name__}")
    with open(path, "wb") as fh:
        fh.write(head)
        fh.write(np.ascontiguousarray(data, dtype=_DTYPE).tobytes(order="C"))


def load_field(path, grid: StripGrid | None = None):
    """Read a dump written by :func:`dump_field`; optionally check it matches ``grid``."""
    raw = Path(path).read_bytes()
    line, _, payload = raw.partition(b"\n")
    head = json.loads(line.decode("ascii"))
    stored = StripGrid(head["N"], head["L"], head["M"], head["X_max"], head["P"])
    if grid is None:
        grid = stored
    elif (grid.N, grid.L, grid.M, grid.X_max, grid.P) != (stored.N, stored.L, stored.M, stored.X_max, stored.P):
        raise GridMismatch(f"dump {path} was written on a different grid")
    data = np.frombuffer(payload, dtype=_DTYPE)
    kind = head.get("field", "form")
    if kind == "boundary":
        return BoundaryField(grid, data.reshape(grid.boundary_shape).copy())
    if kind == "scalar":
        return ScalarField(grid, data.reshape(grid.shape).copy())
    count = len(MultiIndex.all(head["degree"], grid.N))
    return FormField(grid, head["degree"], data.reshape((count,) + grid.shape).copy())
