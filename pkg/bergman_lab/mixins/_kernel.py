"""Moments and reproducing-kernel evaluations mixin."""

from __future__ import annotations

from collections.abc import Sequence

import numpy as np
import pandas as pd
from pandera.typing import DataFrame

from bergman_lab.kernel import (
    RING_N_MAX,
    KernelValue,
    MomentTable,
    compute_moments,
    gram_matrix,
    kernel,
    kernel_decay_rate,
    kernel_lp_ratio,
    reproducing_identity,
    test_function_norm,
)
from bergman_lab.schemas import KernelValueSchema, MomentSchema
from bergman_lab.types import DecayFit
from bergman_lab.utils import instance_cache


class KernelMixin:
    # ── Moments ──────────────────────────────────────────────────────────

    @instance_cache(maxsize=8)
    def moments(self, N: int = 256) -> MomentTable:  # noqa: N803
        """``log m_n`` for ``n <= N``; kernel routines extend the table on demand."""
        return compute_moments(self.weight, N, self.tol)

    @property
    def table(self) -> MomentTable:
        return self.moments()

    def moment_frame(self, N: int = 256) -> DataFrame[MomentSchema]:  # noqa: N803
        return self.moments(N).to_frame()

    # ── Kernel ───────────────────────────────────────────────────────────

    def kernel_value(self, z: complex, w: complex) -> KernelValue:
        return kernel(self.table, z, w, n_max=self.n_max, r_max=self.r_max)

    def kernel_values(
        self, pairs: Sequence[tuple[complex, complex]]
    ) -> DataFrame[KernelValueSchema]:
        """``K(z, w)`` in log/phase form for each pair, with series diagnostics."""

        def evaluate(pair: tuple[complex, complex]) -> dict:
            z, w = complex(pair[0]), complex(pair[1])
            kv = self.kernel_value(z, w)
            return {
                "z_re": z.real,
                "z_im": z.imag,
                "w_re": w.real,
                "w_im": w.imag,
                "log_abs": kv.log_abs,
                "phase": kv.phase,
                "terms_used": kv.terms_used,
                "tail_bound": kv.tail_bound,
            }

        rows = self.map(evaluate, pairs, desc="kernel")
        return DataFrame[KernelValueSchema](pd.DataFrame(rows))

    @property
    def _ring_budget(self) -> int:
        # ring series near the boundary outrun the point-kernel budget
        return max(self.n_max, RING_N_MAX)

    def lp_ratio(self, z: complex, p: float = 2.0) -> float:
        """``||K_z||_{A^p(omega^{p/2})}^p`` normalized as in :func:`kernel_lp_ratio`."""
        return kernel_lp_ratio(self.table, z, p, n_max=self._ring_budget, r_max=self.r_max)

    def test_function(self, z: complex, w: complex) -> float:
        """Normalized test-function norm at locality radius ``self.locality_r``."""
        return test_function_norm(
            self.table, z, w, R=self.locality_r, n_max=self._ring_budget, r_max=self.r_max
        )

    def reproducing_errors(self, points: Sequence[complex], ks: Sequence[int]) -> pd.DataFrame:
        """Relative error of ``<xi^k, K_z> = z^k`` for each point and power."""
        rows = []
        for z in points:
            for k in ks:
                value = reproducing_identity(self.table, k, z, angular_n=self.angular_n)
                exact = complex(z) ** k
                error = abs(value - exact) / max(abs(exact), 1e-300)
                rows.append({"z": complex(z), "k": k, "error": error})
        return pd.DataFrame(rows)

    def decay_rate(self, pairs: Sequence[tuple[complex, complex]]) -> DecayFit:
        return kernel_decay_rate(self.table, pairs, resolution=self.resolution, r_max=self.r_max)

    def gram_eigenvalues(self, points: Sequence[complex]) -> np.ndarray:
        """Ascending eigenvalues of the normalized Gram matrix (all ``>= -tol`` for a kernel)."""
        return np.linalg.eigvalsh(gram_matrix(self.table, points))
