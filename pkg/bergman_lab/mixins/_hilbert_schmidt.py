"""Hilbert-Schmidt norms and path-component experiments mixin."""

from __future__ import annotations

from collections.abc import Sequence
from typing import Literal

from bergman_lab.compop import SelfMap
from bergman_lab.hilbert_schmidt import (
    HSResult,
    hs_component_check,
    hs_diff_basis_sum,
    hs_diff_integral,
    hs_equivalence_ratio,
    mesh_refinement_check,
    path_experiment,
    segment_rho_bound,
)
from bergman_lab.types import (
    ComponentCheck,
    EquivalenceRatio,
    MeshRefinement,
    PathExperiment,
    SegmentBound,
)


class HilbertSchmidtMixin:
    # ── Norms ────────────────────────────────────────────────────────────

    def hs_norm(
        self,
        phi: SelfMap,
        psi: SelfMap,
        route: Literal["integral", "basis", "both"] = "both",
    ) -> dict[str, HSResult]:
        """``||C_phi - C_psi||_HS^2`` by the requested route(s), keyed by route name."""
        out: dict[str, HSResult] = {}
        if route in ("integral", "both"):
            out["integral"] = hs_diff_integral(self.weight, self.table, phi, psi, n_max=self.n_max)
        if route in ("basis", "both"):
            out["basis-sum"] = hs_diff_basis_sum(
                self.weight, self.table, phi, psi, n_max=self.n_max
            )
        return out

    def equivalence(self, phi: SelfMap, psi: SelfMap) -> EquivalenceRatio:
        return hs_equivalence_ratio(
            self.weight, self.table, phi, psi, resolution=self.resolution, n_max=self.n_max
        )

    def components(self, phi: SelfMap, psi: SelfMap) -> ComponentCheck:
        return hs_component_check(
            self.weight, self.table, phi, psi, resolution=self.resolution, n_max=self.n_max
        )

    # ── Segments and paths ───────────────────────────────────────────────

    def segment_bound(
        self, z: complex, w: complex, s_grid: Sequence[float] | None = None
    ) -> SegmentBound:
        return segment_rho_bound(
            self.weight, z, w, s_grid, resolution=self.resolution, r_max=self.r_max
        )

    def path(
        self, phi: SelfMap, psi: SelfMap, s_values: Sequence[float] = (0.0, 0.25, 0.5, 0.75, 1.0)
    ) -> PathExperiment:
        """Pairwise HS matrix along the segment, entries computed on ``self.threads`` threads."""
        return path_experiment(
            self.weight, self.table, phi, psi, s_values, n_max=self.n_max, map_fn=self.map
        )

    def mesh_refinement(
        self, phi: SelfMap, psi: SelfMap, coarse: int = 5, fine: int = 9
    ) -> MeshRefinement:
        return mesh_refinement_check(
            self.weight, self.table, phi, psi, coarse, fine, n_max=self.n_max, map_fn=self.map
        )
