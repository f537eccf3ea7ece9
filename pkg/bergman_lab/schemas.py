"""Pandera DataFrameModel schemas for DataFrame-returning functions.

**Convention**: every public function that returns a ``pd.DataFrame`` has a
schema here and is annotated ``DataFrame[SomeSchema]``.  Tests validate the
produced frames against these schemas.

All schemas use ``strict=False`` (extra columns allowed) and ``coerce=True``.
Logarithmic columns may hold ``-inf`` (a vanishing quantity); distances and
norms may hold ``+inf`` (divergence).
"""

from __future__ import annotations

import pandera.pandas as pa


class _Lenient(pa.DataFrameModel):
    """Base config: allow extra columns, coerce types."""

    class Config:
        strict = False
        coerce = True


# ── weights / kernel ─────────────────────────────────────────────────────


class WeightCheckSchema(_Lenient):
    """Radial samples behind ``validate_class_W`` (``verify-weights`` output)."""

    r: float = pa.Field(ge=0, lt=1)
    eta: float = pa.Field(gt=0)
    tau: float = pa.Field(gt=0, le=1)
    tau2_laplacian: float = pa.Field(gt=0)


class MomentSchema(_Lenient):
    """``MomentTable.to_frame``: log radial moments and their error estimates."""

    n: int = pa.Field(ge=0)
    log_m: float
    err: float = pa.Field(ge=0)


class KernelValueSchema(_Lenient):
    """``kernel-probe`` rows: log kernel value and the sign/phase of ``K(z, w)``."""

    z_re: float
    z_im: float
    w_re: float
    w_im: float
    log_abs: float
    phase: float
    terms_used: int = pa.Field(ge=0)
    tail_bound: float = pa.Field(ge=0)


class DecaySchema(_Lenient):
    """Pairs behind ``kernel_decay_rate``."""

    d_tau: float = pa.Field(ge=0)
    log_gap: float


# ── metric ───────────────────────────────────────────────────────────────


class DistanceFieldSchema(_Lenient):
    """``distance-field`` output: distances from a fixed point to grid points."""

    w_re: float
    w_im: float
    d_tau: float = pa.Field(ge=0)
    rho_tau: float = pa.Field(ge=0, le=1)
    skwarczynski: float = pa.Field(ge=0, le=1, nullable=True)


class ComparabilitySchema(_Lenient):
    """Per-pair rows of ``comparability_report``."""

    z_re: float
    z_im: float
    w_re: float
    w_im: float
    rho_tau: float = pa.Field(gt=0, le=1)
    rho_tau_fine: float = pa.Field(gt=0, le=1)
    skwarczynski: float = pa.Field(ge=0, le=1)
    ratio: float = pa.Field(ge=0)
    ratio_fine: float = pa.Field(ge=0)
    kernel_difference_ratio: float = pa.Field(ge=0)
    kernel_ratio: float = pa.Field(ge=0)
    local: bool


# ── compop ───────────────────────────────────────────────────────────────


class ProfileSchema(_Lenient):
    """``CriterionReport.to_frame``: one row per circle radius."""

    r: float = pa.Field(gt=0, lt=1)
    sup_value: float = pa.Field(ge=0)
    log_sup_value: float
    argmax_theta: float = pa.Field(ge=0)


class SliceSchema(_Lenient):
    """Log of a criterion functional along eight fixed directions."""

    theta: float = pa.Field(ge=0)
    r: float = pa.Field(gt=0, lt=1)
    log_value: float


class ContactSchema(_Lenient):
    """Samples behind ``contact_order_check``: ``(1 - |w|) / |c - w|^k``."""

    h: float = pa.Field(gt=0)
    beta: float
    value: float = pa.Field(ge=0)


class DecayProfileSchema(_Lenient):
    """``rho_tau(phi(z), psi(z))`` along the radius ending at a boundary point."""

    h: float = pa.Field(gt=0)
    r: float = pa.Field(ge=0, lt=1)
    rho: float = pa.Field(ge=0, le=1)


class UniformBoundSchema(_Lenient):
    """``uniform_bound_check`` rows: circle suprema for ``phi_s`` and their bound."""

    s: float = pa.Field(ge=0, le=1)
    r: float = pa.Field(gt=0, lt=1)
    sup_ratio: float = pa.Field(ge=0)
    bound: float = pa.Field(ge=0)


# ── hilbert_schmidt ──────────────────────────────────────────────────────


class AnnulusSchema(_Lenient):
    """Per-annulus contributions of a Hilbert-Schmidt disk integral."""

    r_lo: float = pa.Field(ge=0, lt=1)
    r_hi: float = pa.Field(gt=0, le=1)
    contribution: float = pa.Field(ge=0)


class PartialSumSchema(_Lenient):
    """Running partial sums of the basis-sum route."""

    n: int = pa.Field(ge=0)
    term: float = pa.Field(ge=0)
    total: float = pa.Field(ge=0)


class PathMatrixSchema(_Lenient):
    """Long-form ``path_experiment`` matrix: HS norm of ``C_{phi_s} - C_{phi_t}``."""

    s: float = pa.Field(ge=0, le=1)
    t: float = pa.Field(ge=0, le=1)
    hs_norm: float = pa.Field(ge=0)


class SegmentSchema(_Lenient):
    """``segment_rho_bound`` rows: ``rho_tau(z_s, z_t) / rho_tau(z, w)``."""

    s: float = pa.Field(ge=0, le=1)
    t: float = pa.Field(ge=0, le=1)
    ratio: float = pa.Field(ge=0)


# ── verification ─────────────────────────────────────────────────────────


class VerifySchema(_Lenient):
    """``verify-all`` result table."""

    check: str
    passed: bool
    value: float = pa.Field(nullable=True)
    detail: str
    seconds: float = pa.Field(ge=0)
