"""BergmanLab: experiment dataclass composing the numerical mixins."""

import dataclasses
import logging
import os
from collections.abc import Callable, Iterable
from dataclasses import dataclass, field
from typing import Any, TypeVar

from typing_extensions import Self

from bergman_lab._version import __version__
from bergman_lab.exceptions import DomainError
from bergman_lab.mixins import (
    CriterionMixin,
    HilbertSchmidtMixin,
    KernelMixin,
    MetricMixin,
    WeightMixin,
)
from bergman_lab.utils import thread_map
from bergman_lab.weights import WeightSpec, parse_weight

logger = logging.getLogger("bergman_lab")

T = TypeVar("T")
R = TypeVar("R")

_COERCE: dict[str, Callable[[Any], Any]] = {
    "tol": float,
    "r_max": float,
    "n_max": int,
    "resolution": int,
    "angular_n": int,
    "seed": int,
    "threads": int,
    "locality_r": float,
}


@dataclass
class BergmanLab(
    WeightMixin,
    KernelMixin,
    MetricMixin,
    CriterionMixin,
    HilbertSchmidtMixin,
):
    """Numerical lab for composition operators on ``A^2(omega)``.

    Holds one weight and the numerical settings shared by every experiment;
    the mixins return plot-ready DataFrames and report dicts.  Settings left
    as ``None`` fall back to ``BERGMAN_LAB_*`` environment variables, then to
    built-in defaults.  Moment tables and distances are cached per instance.
    """

    weight: WeightSpec | str | None = None
    tol: float | None = None
    r_max: float | None = None
    n_max: int | None = None
    resolution: int | None = None
    angular_n: int | None = None
    seed: int | None = None
    threads: int | None = field(default=None, repr=False)
    locality_r: float | None = field(default=None, repr=False)
    progress: bool = field(default=False, repr=True)

    # Mapping: field_name -> (env_var, fallback)
    _ENV_DEFAULTS: dict = field(
        default_factory=lambda: {
            "weight": ("BERGMAN_LAB_WEIGHT", "weight A=1 alpha=1"),
            "tol": ("BERGMAN_LAB_TOL", 1e-10),
            "r_max": ("BERGMAN_LAB_R_MAX", 0.999),
            "n_max": ("BERGMAN_LAB_N_MAX", 20000),
            "resolution": ("BERGMAN_LAB_RESOLUTION", 64),
            "angular_n": ("BERGMAN_LAB_ANGULAR_N", 1024),
            "seed": ("BERGMAN_LAB_SEED", 0),
            "threads": ("BERGMAN_LAB_THREADS", 4),
            "locality_r": ("BERGMAN_LAB_LOCALITY_R", 0.5),
        },
        repr=False,
    )

    def __post_init__(self) -> None:
        for attr, (env_var, fallback) in self._ENV_DEFAULTS.items():
            if getattr(self, attr) is None:
                setattr(self, attr, os.getenv(env_var, fallback))
        for attr, cast in _COERCE.items():
            raw = getattr(self, attr)
            try:
                setattr(self, attr, cast(raw))
            except (TypeError, ValueError):
                raise DomainError(attr, raw, f"expected {cast.__name__}") from None
        if isinstance(self.weight, str):
            self.weight = parse_weight(self.weight)
        if not self.tol > 0:
            raise DomainError("tol", self.tol, "tolerance must be positive")
        if not 0.0 < self.r_max < 1.0:
            raise DomainError("r_max", self.r_max, "cap radius must lie in (0, 1)")
        if self.resolution < 8:
            raise DomainError("resolution", self.resolution, "grid resolution must be >= 8")
        if self.n_max < 16:
            raise DomainError("n_max", self.n_max, "series cap must be >= 16")
        logger.debug("lab ready: %s", self)

    def map(self, fn: Callable[[T], R], items: Iterable[T], desc: str = "") -> list[R]:
        """Ordered map over ``self.threads`` threads (progress bar if ``self.progress``)."""
        return thread_map(fn, items, threads=self.threads, progress=self.progress, desc=desc)

    def with_settings(self, **changes: Any) -> Self:
        """A fresh lab (empty caches) with some settings replaced."""
        return dataclasses.replace(self, **changes)

    def provenance(self, **extra: Any) -> dict[str, Any]:
        """Settings that reproduce an artifact, merged with ``extra``."""
        return {
            "version": __version__,
            "weight": str(self.weight),
            "tol": self.tol,
            "r_max": self.r_max,
            "n_max": self.n_max,
            "resolution": self.resolution,
            "angular_n": self.angular_n,
            "seed": self.seed,
            "locality_r": self.locality_r,
            **extra,
        }
