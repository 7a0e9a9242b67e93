import numpy as np
import pytest

from sobolev_hodge.errors import GridMismatch
from sobolev_hodge.fieldio import dump_field, load_field
from sobolev_hodge.generators import band_limited_boundary, band_limited_field, random_form


def test_roundtrip(small_grid, grid1d, tmp_path, rng):
    objs = [random_form(small_grid, 2, rng), band_limited_field(small_grid, rng), band_limited_boundary(small_grid, rng)]
    for i, obj in enumerate(objs):
        p = tmp_path / f"f{i}.bin"
        dump_field(obj, p)
        back = load_field(p)
        assert type(back) is type(obj)
        assert np.array_equal(back.values, obj.values)
        assert back.grid == obj.grid
        with pytest.raises(GridMismatch):
            load_field(p, grid1d)


def test_dumps_are_byte_identical(small_grid, tmp_path):
    a, b = tmp_path / "a.bin", tmp_path / "b.bin"
    for p in (a, b):
        dump_field(random_form(small_grid, 1, np.random.default_rng(5)), p)
    assert a.read_bytes() == b.read_bytes()
    header = a.read_bytes().split(b"\n", 1)[0]
    assert b'"degree": 1' in header
