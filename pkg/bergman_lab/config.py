"""Line-oriented experiment configuration.

A config file holds one ``key value...`` setting per line; ``#`` starts a
comment and blank lines are ignored::

    # bounded pair with a compact difference
    weight A=1 alpha=1
    phi template half_one_plus_z2
    psi template contact_perturbation eps=0.0078
    radii 0.9 0.95 0.99 0.995
    seed 7

Command-line flags override file values.  The merged config (not the file)
is what goes into every artifact's provenance header, so an artifact can be
re-run from its header alone.
"""

from __future__ import annotations

import dataclasses
from collections.abc import Callable, Mapping
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from bergman_lab.compop import SelfMap, parse_complex, parse_map
from bergman_lab.exceptions import SpecParseError
from bergman_lab.lab import BergmanLab
from bergman_lab.utils import parse_float_list, parse_point_list

__all__ = ["ExperimentConfig", "grid_points"]


def _int(text: str) -> int:
    try:
        return int(text)
    except ValueError:
        raise SpecParseError(text, "expected an integer") from None


def _float(text: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise SpecParseError(text, "expected a number") from None


def _grid(text: str) -> tuple[int, float]:
    parts = text.split()
    if len(parts) != 2:
        raise SpecParseError(text, "grid expects '<points per side> <radius>'")
    return _int(parts[0]), _float(parts[1])


def _route(text: str) -> str:
    if text not in ("integral", "basis", "both"):
        raise SpecParseError(text, "route must be integral, basis or both")
    return text


_PARSERS: dict[str, Callable[[str], Any]] = {
    "weight": str,
    "phi": str,
    "psi": str,
    "radii": parse_float_list,
    "tol": _float,
    "seed": _int,
    "out": str,
    "resolution": _int,
    "angular_n": _int,
    "n_max": _int,
    "r_max": _float,
    "threads": _int,
    "route": _route,
    "s_grid": parse_float_list,
    "z": parse_complex,
    "w": parse_complex,
    "points": parse_point_list,
    "grid": _grid,
    "p": _float,
    "mc_samples": _int,
}


def grid_points(n: int, radius: float) -> tuple[complex, ...]:
    """Cartesian ``n x n`` grid on ``[-radius, radius]^2`` clipped to ``|w| <= radius``."""
    if n < 2:
        raise SpecParseError(str(n), "grid needs at least 2 points per side")
    axis = np.linspace(-radius, radius, n)
    pts = (axis[None, :] + 1j * axis[:, None]).ravel()
    return tuple(complex(p) for p in pts[np.abs(pts) <= radius])


@dataclass
class ExperimentConfig:
    """Every setting an experiment may use; ``None`` means the lab default."""

    weight: str | None = None
    phi: str = "template half_one_plus_z2"
    psi: str = "template contact_perturbation"
    radii: tuple[float, ...] | None = None
    tol: float | None = None
    seed: int | None = None
    out: str | None = None
    resolution: int | None = None
    angular_n: int | None = None
    n_max: int | None = None
    r_max: float | None = None
    threads: int | None = None
    route: str = "both"
    s_grid: tuple[float, ...] = (0.0, 0.25, 0.5, 0.75, 1.0)
    z: complex = 0j
    w: complex | None = None
    points: tuple[complex, ...] | None = None
    grid: tuple[int, float] = (21, 0.95)
    p: float = 2.0
    mc_samples: int = 10**5
    source: str | None = field(default=None, repr=False, compare=False)

    @classmethod
    def from_text(cls, text: str, source: str | None = None) -> ExperimentConfig:
        """Parse config text.

        Raises:
            SpecParseError: unknown or repeated keys, malformed values.
        """
        values: dict[str, Any] = {}
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, _, rest = line.partition(" ")
            rest = rest.strip()
            if key not in _PARSERS:
                raise SpecParseError(raw, f"line {lineno}: unknown key {key!r}")
            if key in values:
                raise SpecParseError(raw, f"line {lineno}: {key!r} given twice")
            if not rest:
                raise SpecParseError(raw, f"line {lineno}: {key!r} needs a value")
            values[key] = _PARSERS[key](rest)
        return cls(**values, source=source)

    @classmethod
    def from_file(cls, path: str | Path) -> ExperimentConfig:
        path = Path(path)
        return cls.from_text(path.read_text(encoding="utf-8"), source=str(path))

    def merged(self, overrides: Mapping[str, Any]) -> ExperimentConfig:
        """Copy with every non-``None`` override applied (string values are parsed)."""
        changes: dict[str, Any] = {}
        for key, value in overrides.items():
            if value is None:
                continue
            if key not in _PARSERS:
                raise SpecParseError(str(key), "unknown setting")
            changes[key] = _PARSERS[key](value) if isinstance(value, str) else value
        return dataclasses.replace(self, **changes)

    def to_dict(self) -> dict[str, Any]:
        """Settings for the provenance header (the source path is not a setting)."""
        return {f.name: getattr(self, f.name) for f in dataclasses.fields(self) if f.compare}

    def lab(self, progress: bool = False) -> BergmanLab:
        return BergmanLab(
            weight=self.weight,
            tol=self.tol,
            r_max=self.r_max,
            n_max=self.n_max,
            resolution=self.resolution,
            angular_n=self.angular_n,
            seed=self.seed,
            threads=self.threads,
            progress=progress,
        )

    def maps(self) -> tuple[SelfMap, SelfMap]:
        return parse_map(self.phi), parse_map(self.psi)

    def field_points(self) -> tuple[complex, ...]:
        """Explicit ``points`` if given, else the ``grid`` points."""
        return self.points if self.points is not None else grid_points(*self.grid)
