"""Composition-operator criteria mixin."""

from __future__ import annotations

import math
from collections.abc import Iterable

import pandas as pd

from bergman_lab.compop import (
    PERTURBATION_EPS,
    VERDICT_LABELS,
    CriterionReport,
    SelfMap,
    boundedness_profile,
    carleson_ratio,
    contact_perturbation,
    difference_criterion,
    half_one_plus_z2,
    omegatau_check,
    weight_ratio,
)
from bergman_lab.types import CarlesonEstimate, OmegaTauReport, PairExampleReport


class CriterionMixin:
    # ── Profiles ─────────────────────────────────────────────────────────

    def boundedness(self, phi: SelfMap, radii: Iterable[float] | None = None) -> CriterionReport:
        return boundedness_profile(
            self.weight, phi, radii, angular_n=self.angular_n, r_max=self.r_max
        )

    def difference(
        self, phi: SelfMap, psi: SelfMap, radii: Iterable[float] | None = None
    ) -> CriterionReport:
        return difference_criterion(
            self.weight,
            phi,
            psi,
            radii,
            angular_n=self.angular_n,
            resolution=self.resolution,
            r_max=self.r_max,
        )

    def omegatau(
        self, phi: SelfMap, psi: SelfMap, zeta: complex, M: int = 4  # noqa: N803
    ) -> OmegaTauReport:
        return omegatau_check(
            self.weight, phi, psi, zeta, M=M, resolution=self.resolution, r_max=self.r_max
        )

    def carleson(
        self, phi: SelfMap, xi: complex, p: float = 2.0, mc_samples: int = 10**5
    ) -> CarlesonEstimate:
        """Pullback-measure ratio with ``self.threads`` Monte Carlo streams."""
        return carleson_ratio(
            self.weight,
            phi,
            xi,
            p,
            mc_samples=mc_samples,
            seed=self.seed,
            tasks=max(self.threads, 1),
            map_fn=self.map,
        )

    # ── Worked example ───────────────────────────────────────────────────

    def bounded_pair_example(
        self, eps: float = PERTURBATION_EPS, radii: Iterable[float] | None = None
    ) -> PairExampleReport:
        """Two bounded, non-compact maps whose difference is compact.

        ``phi = (1 + z^2) / 2`` touches the circle at ``+-1`` with a finite
        weight-ratio limit ``e^{1/2}`` on the real axis; ``psi`` adds
        ``eps (1 - z^2)^5``, which keeps the 4-order data at ``+-1``.
        """
        phi, psi = half_one_plus_z2(), contact_perturbation(eps)
        reports = {
            "phi": self.boundedness(phi, radii),
            "psi": self.boundedness(psi, radii),
            "difference": self.difference(phi, psi, radii),
        }
        profiles = pd.concat(
            [rep.to_frame().assign(kind=name) for name, rep in reports.items()],
            ignore_index=True,
        )
        return {
            "phi": VERDICT_LABELS["boundedness"][reports["phi"].verdict],
            "psi": VERDICT_LABELS["boundedness"][reports["psi"].verdict],
            "difference": VERDICT_LABELS["difference"][reports["difference"].verdict],
            "real_axis_ratio": math.exp(weight_ratio(self.weight, phi, self.r_max)),
            "profiles": profiles,
            "omegatau": {
                str(zeta): self.omegatau(phi, psi, zeta) for zeta in (1.0, -1.0)
            },
        }
