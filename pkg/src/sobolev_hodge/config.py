"""Run configuration for the command-line driver."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from pathlib import Path

from .errors import ConfigError, InvalidGrid
from .strip import StripGrid

GENERATORS = ("zero", "gaussian-bump", "band-limited-random", "manufactured")
KINDS = ("hodge", "dirichlet", "neumann")

DEFAULT_TOLERANCES = {
    "zero_mode": 1e-8,
    "residual": 1e-6,
    "bc": 1e-8,
    "adjoint": 5e-5,
    "adjoint_refinement": 3.0,
    "orthogonality": 1e-6,
    "oracle_gap": 1e-4,
    "oracle_order": 1.9,
    "estimate_stability": 0.2,
    "manufactured": 1e-6,
    "model_residual": 1e-8,
}


@dataclass(frozen=True)
class RunConfig:
    """Validated contents of a JSON run configuration.

    ``grid`` keys: ``N, L, M, X_max, P`` (``L`` defaults to ``4 pi``).
    ``problem`` keys: ``degree``, ``kind`` (``hodge``, ``dirichlet`` or
    ``neumann``) and ``data`` (``{"generator": name, "params": {...}}`` or
    ``{"paths": {"f": ..., "h": ...}}``).
    """

    grid: StripGrid
    degree: int = 0
    kind: str = "hodge"
    data: dict = field(default_factory=lambda: {"generator": "zero"})
    tolerances: dict = field(default_factory=lambda: dict(DEFAULT_TOLERANCES))
    seed: int = 0
    output_dir: str = "out"
    verify: dict = field(default_factory=dict)
    base_dir: str = "."

    @classmethod
    def from_dict(cls, raw: dict, base_dir=".") -> "RunConfig":
        if not isinstance(raw, dict):
            raise ConfigError("configuration must be a JSON object")
        g = raw.get("grid")
        if not isinstance(g, dict):
            raise ConfigError("missing 'grid' section")
        try:
            grid = StripGrid(
                N=_int(g, "N"),
                L=float(g.get("L", 4.0 * math.pi)),
                M=_int(g, "M"),
                X_max=float(g.get("X_max", 12.0)),
                P=_int(g, "P"),
            )
        except InvalidGrid as exc:
            raise ConfigError(str(exc)) from exc
        prob = raw.get("problem", {})
        degree = prob.get("degree", 0)
        if not isinstance(degree, int) or not 0 <= degree <= grid.N + 1:
            raise ConfigError(f"degree must be an integer in [0, {grid.N + 1}], got {degree!r}")
        kind = prob.get("kind", "hodge")
        if kind not in KINDS:
            raise ConfigError(f"kind must be one of {KINDS}, got {kind!r}")
        if kind != "hodge" and degree != 0:
            raise ConfigError("scalar problem kinds require degree 0")
        data = prob.get("data", {"generator": "zero"})
        if "paths" in data:
            if not isinstance(data["paths"], dict) or "f" not in data["paths"]:
                raise ConfigError("data.paths must map 'f' (and optionally 'h') to dump files")
        elif data.get("generator") not in GENERATORS:
            raise ConfigError(f"generator must be one of {GENERATORS}, got {data.get('generator')!r}")
        tol = dict(DEFAULT_TOLERANCES)
        for key, val in raw.get("tolerances", {}).items():
            if key not in tol and key != "estimate_cap":
                raise ConfigError(f"unknown tolerance {key!r}")
            if not isinstance(val, (int, float)) or not val > 0:
                raise ConfigError(f"tolerance {key!r} must be a positive number")
            tol[key] = float(val)
        seed = raw.get("seed", 0)
        if not isinstance(seed, int) or seed < 0:
            raise ConfigError("seed must be a nonnegative integer")
        out = raw.get("output", {}).get("dir", "out")
        verify = raw.get("verify", {})
        if not isinstance(verify, dict):
            raise ConfigError("'verify' must be an object")
        return cls(grid, degree, kind, data, tol, seed, out, verify, str(base_dir))

    @classmethod
    def load(cls, path) -> "RunConfig":
        path = Path(path)
        try:
            raw = json.loads(path.read_text())
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
        return cls.from_dict(raw, base_dir=path.parent)

    def with_grid(self, **changes) -> "RunConfig":
        try:
            return replace(self, grid=replace(self.grid, **changes))
        except InvalidGrid as exc:
            raise ConfigError(str(exc)) from exc

    def resolve(self, path) -> Path:
        p = Path(path)
        return p if p.is_absolute() else Path(self.base_dir) / p


def _int(section, key):
    if key not in section:
        raise ConfigError(f"grid.{key} is required")
    val = section[key]
    if isinstance(val, bool) or not isinstance(val, (int, float)) or int(val) != val:
        raise ConfigError(f"grid.{key} must be an integer, got {val!r}")
    return int(val)
