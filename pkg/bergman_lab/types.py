"""TypedDict models for dict-returning functions.

These are structural subtypes of ``dict``; ``result["key"]`` keeps working and
reports serialize directly with :func:`bergman_lab.utils.dumps`.
"""

from __future__ import annotations

from typing import Literal, TypedDict

import pandas as pd
from pandera.typing import DataFrame

from bergman_lab.schemas import (
    ComparabilitySchema,
    ContactSchema,
    DecayProfileSchema,
    DecaySchema,
    PathMatrixSchema,
    SegmentSchema,
    UniformBoundSchema,
)

Status = Literal["holds", "fails", "skipped", "inconclusive"]

# ── kernel / metric ──────────────────────────────────────────────────────


class DecayFit(TypedDict):
    """Linear fit ``log_gap ~ sigma * d_tau + intercept``."""

    sigma: float
    intercept: float
    pairs: DataFrame[DecaySchema]


class ComparabilityReport(TypedDict):
    """Band statistics of ``S / rho_tau`` and of the kernel-difference ratio."""

    min: float
    max: float
    median: float
    spread: float
    median_refined: float
    median_change: float
    kernel_min: float
    kernel_max: float
    kernel_spread: float
    local_spread: float
    tau: str
    pairs: DataFrame[ComparabilitySchema]


class SetInclusionResult(TypedDict):
    """Outcome of the local lower bound ``d_tau >= C1 |z - w| / min(tau)``."""

    status: Status
    holds: bool | None
    margin: float
    d_tau: float
    lower_bound: float


class TriangleAudit(TypedDict):
    checked: int
    violations: int
    max_excess: float
    asymmetric: int


# ── compop ───────────────────────────────────────────────────────────────


class ContactReport(TypedDict):
    """Infimum of ``(1 - |w|) / |phi(zeta) - w|^k`` near the contact point."""

    status: Status
    holds: bool | None
    inf_value: float
    samples: int
    profile: DataFrame[ContactSchema]


class OmegaTauReport(TypedDict):
    """Hypotheses and measured decay of ``rho_tau(phi, psi)`` at a boundary point."""

    m: int
    M: int
    order_data: bool
    contact: ContactReport
    hypotheses_hold: bool
    decays: bool
    profile: DataFrame[DecayProfileSchema]


class CarlesonEstimate(TypedDict):
    """Monte Carlo pullback-measure ratio ``mu(D(xi, delta tau(xi))) / tau(xi)^2``."""

    ratio: float
    std_err: float
    delta: float
    samples: int
    note: str


class UniformBound(TypedDict):
    holds: bool
    frame: DataFrame[UniformBoundSchema] | pd.DataFrame


# ── hilbert_schmidt ──────────────────────────────────────────────────────


class EquivalenceRatio(TypedDict):
    """``int rho^2 (||K_phi||^2 + ||K_psi||^2) omega^2 dA`` over the HS norm squared."""

    ratio: float
    numerator: float
    denominator: float
    status: Literal["finite", "undefined", "divergent"]


class SegmentBound(TypedDict):
    """``max rho_tau(z_s, z_t) / rho_tau(z, w)`` over a grid of segment parameters."""

    constant: float
    status: Literal["ok", "skipped"]
    pairs: DataFrame[SegmentSchema]


class PathExperiment(TypedDict):
    """Pairwise HS norms along ``phi_s = (1 - s) phi + s psi``."""

    status: Literal["ok", "obstruction", "contradiction"]
    all_finite: bool
    max_adjacent: float
    triangle_violations: int
    matrix: DataFrame[PathMatrixSchema]


class ComponentCheck(TypedDict):
    """HS finiteness of the difference against that of the two rho-weighted integrals."""

    hs_diff: float
    weighted_phi: float
    weighted_psi: float
    agree: bool


class MeshRefinement(TypedDict):
    coarse_max_adjacent: float
    fine_max_adjacent: float
    shrinks: bool


# ── lab reports ──────────────────────────────────────────────────────────


class WeightAudit(TypedDict):
    """Measured class constants plus the sampled Lipschitz and disk-comparability audits."""

    c1: float
    c2: float
    m_tau: float
    delta: float
    laplacian_lo: float
    laplacian_hi: float
    lipschitz_violations: int
    equiquan_violations: int


class PairExampleReport(TypedDict):
    """Verdicts for the bounded, non-compact pair with a compact difference."""

    phi: str
    psi: str
    difference: str
    real_axis_ratio: float
    profiles: pd.DataFrame
    omegatau: dict[str, OmegaTauReport]
