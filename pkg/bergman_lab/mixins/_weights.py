"""Weight-class checks mixin."""

from __future__ import annotations

import numpy as np
import pandas as pd
from pandera.typing import DataFrame

from bergman_lab.schemas import WeightCheckSchema
from bergman_lab.types import WeightAudit
from bergman_lab.utils import instance_cache
from bergman_lab.weights import (
    TauConstants,
    check_equiquan,
    check_lipschitz,
    validate_class_W,
)


class WeightMixin:
    # ── Class W ──────────────────────────────────────────────────────────

    @instance_cache
    def tau_constants(self, grid_size: int = 1000) -> TauConstants:
        """Measured ``c1``, ``c2``, ``m_tau`` for ``self.weight``."""
        return validate_class_W(self.weight, grid_size)

    def weight_profile(self, grid_size: int = 1000) -> DataFrame[WeightCheckSchema]:
        """``eta``, ``tau`` and ``tau^2 Laplacian(eta)`` on a boundary-refined grid in ``[1/2, 1)``.

        The last column must stay inside a band bounded away from 0 and
        infinity for the weight to be in class W.
        """
        r = 1.0 - np.geomspace(0.5, 1e-12, grid_size)
        spec = self.weight
        frame = pd.DataFrame(
            {
                "r": r,
                "eta": spec.eta(r),
                "tau": spec.tau(r),
                "tau2_laplacian": np.asarray(spec.tau(r)) ** 2 * np.asarray(spec.laplacian_eta(r)),
            }
        )
        return DataFrame[WeightCheckSchema](frame)

    def weight_audit(self, samples: int = 2000, grid_size: int = 1000) -> WeightAudit:
        """Constants plus violation counts of the Lipschitz and comparability properties.

        Sample points are drawn in ``|z| <= r_max`` from ``self.seed``.
        """
        constants = self.tau_constants(grid_size)
        rng = np.random.default_rng(self.seed)
        radius = self.r_max * np.sqrt(rng.random((2, samples)))
        theta = rng.uniform(0.0, 2 * np.pi, (2, samples))
        z, w = radius * np.exp(1j * theta)
        return {
            "c1": constants.c1,
            "c2": constants.c2,
            "m_tau": constants.m_tau,
            "delta": constants.delta,
            "laplacian_lo": constants.laplacian_band[0],
            "laplacian_hi": constants.laplacian_band[1],
            "lipschitz_violations": check_lipschitz(self.weight, constants, z, w),
            "equiquan_violations": check_equiquan(
                self.weight, constants, z[: samples // 8], seed=self.seed
            ),
        }
