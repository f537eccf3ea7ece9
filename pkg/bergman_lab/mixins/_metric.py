"""Geodesic distance and kernel-distance mixin."""

from __future__ import annotations

from collections.abc import Sequence

import numpy as np
import pandas as pd
from pandera.typing import DataFrame

from bergman_lab.metric import (
    GeodesicResult,
    comparability_report,
    d_tau,
    setinclus_check,
    skwarczynski,
    triangle_audit,
)
from bergman_lab.schemas import DistanceFieldSchema
from bergman_lab.types import ComparabilityReport, SetInclusionResult, TriangleAudit
from bergman_lab.utils import instance_cache


class MetricMixin:
    # ── Distances ────────────────────────────────────────────────────────

    @instance_cache(maxsize=4096)
    def distance(self, z: complex, w: complex) -> GeodesicResult:
        """``d_tau(z, w)`` at the lab's grid resolution, refined."""
        return d_tau(self.weight, z, w, resolution=self.resolution, r_max=self.r_max)

    def distance_field(
        self, z: complex, points: Sequence[complex], *, with_kernel: bool = True
    ) -> DataFrame[DistanceFieldSchema]:
        """Distances from ``z`` to every point: ``d_tau``, ``rho_tau`` and optionally ``S``."""
        z = complex(z)

        def row(w: complex) -> dict:
            res = self.distance(z, complex(w))
            kern = skwarczynski(self.table, z, w, n_max=self.n_max) if with_kernel else np.nan
            return {
                "w_re": complex(w).real,
                "w_im": complex(w).imag,
                "d_tau": res.distance,
                "rho_tau": res.rho,
                "skwarczynski": kern,
            }

        rows = self.map(row, points, desc="distance-field")
        return DataFrame[DistanceFieldSchema](pd.DataFrame(rows))

    def sample_pairs(
        self, n: int, radius: float = 0.995, seed: int | None = None
    ) -> list[tuple[complex, complex]]:
        """``n`` pairs uniform in area on ``|z| <= radius``, reproducible from the seed."""
        rng = np.random.default_rng(self.seed if seed is None else seed)
        r = radius * np.sqrt(rng.random((n, 2)))
        pts = r * np.exp(1j * rng.uniform(0.0, 2 * np.pi, (n, 2)))
        return [(complex(a), complex(b)) for a, b in pts]

    def comparability(
        self, pairs: Sequence[tuple[complex, complex]] | None = None, n: int = 500
    ) -> ComparabilityReport:
        """Comparability of ``rho_tau`` with the kernel distances (default: ``n`` random pairs)."""
        pairs = self.sample_pairs(n) if pairs is None else pairs
        return comparability_report(
            self.weight,
            self.table,
            pairs,
            resolution=self.resolution,
            r_max=self.r_max,
            n_max=self.n_max,
            progress=self.progress,
        )

    def setinclus(self, z: complex, w: complex) -> SetInclusionResult:
        return setinclus_check(
            self.weight, z, w, self.locality_r, resolution=self.resolution, r_max=self.r_max
        )

    def triangles(self, n: int = 50, radius: float = 0.95) -> TriangleAudit:
        """Metric axioms of ``rho_tau`` on ``n`` random triples."""
        pts = np.array(self.sample_pairs(2 * n, radius)).ravel()[: 3 * n].reshape(n, 3)
        return triangle_audit(
            self.weight,
            [tuple(t) for t in pts],
            resolution=self.resolution,
            r_max=self.r_max,
        )
