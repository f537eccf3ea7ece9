"""Hilbert-Schmidt norms of (differences of) weighted composition operators.

Two independent routes:

- the kernel integral ``int |u|^2 ||K_{phi(z)}||^2 omega(z)^2 dA`` (and its
  difference analogue with ``||K_a - K_b||^2``), integrated over dyadic
  annuli ``1 - 2^-k <= |z| <= 1 - 2^-(k+1)`` with a geometric tail;
- the basis sum ``sum_n ||(C_phi - C_psi) e_n||^2`` with ``e_n = z^n / sqrt(m_n)``.

Divergence (a non-HS operator) shows up as annulus contributions that keep
growing towards the boundary and is reported as an infinite value, not an
exception.
"""

from __future__ import annotations

import logging
import math
import warnings
from collections.abc import Callable, Iterable, Sequence
from dataclasses import dataclass, field
from typing import Literal

import numpy as np
import numpy.typing as npt
import pandas as pd
from pandera.typing import DataFrame
from scipy.special import logsumexp

from bergman_lab.compop import SelfMap
from bergman_lab.exceptions import DomainError, TruncationError
from bergman_lab.kernel import N_MAX, R_MAX, MomentTable, kernel_array, log_kernel_diag
from bergman_lab.metric import rho_tau, rho_tau_array
from bergman_lab.quad import gauss_legendre_unit, radial_integral
from bergman_lab.schemas import AnnulusSchema, PartialSumSchema, PathMatrixSchema, SegmentSchema
from bergman_lab.types import (
    ComponentCheck,
    EquivalenceRatio,
    MeshRefinement,
    PathExperiment,
    SegmentBound,
)
from bergman_lab.weights import WeightSpec

__all__ = [
    "R_CUT",
    "HSResult",
    "hs_component_check",
    "hs_diff_basis_sum",
    "hs_diff_integral",
    "hs_equivalence_ratio",
    "hs_metric",
    "hs_norm_integral",
    "mesh_refinement_check",
    "path_experiment",
    "segment_rho_bound",
]

logger = logging.getLogger("bergman_lab")

R_CUT = 0.999
STAGNATION = 1e-4
_STAGNANT_RUN = 3
_CLAMP = 1e-12

HSStatus = Literal["finite", "divergent", "undefined"]
Route = Literal["integral", "basis-sum"]
Multiplier = Callable[[npt.NDArray[np.complex128]], npt.ArrayLike]


@dataclass(frozen=True)
class HSResult:
    """Squared HS norm from one route.

    ``truncation`` is the last basis index summed (``None`` for the integral
    route).  ``err`` is an absolute error estimate of ``value_sq``.
    """

    value_sq: float
    route: Route
    truncation: int | None
    err: float
    status: HSStatus
    detail: pd.DataFrame | None = field(default=None, repr=False, compare=False)

    @property
    def norm(self) -> float:
        return math.sqrt(self.value_sq)

    @property
    def finite(self) -> bool:
        return self.status == "finite"


def hs_metric(value_sq: float) -> float:
    """Capped distance ``h / (1 + h)`` with ``h`` the HS norm; 1 for a divergent norm."""
    if value_sq < 0:
        raise DomainError("value_sq", value_sq, "squared norm must be non-negative")
    if not math.isfinite(value_sq):
        return 1.0
    h = math.sqrt(value_sq)
    return h / (1.0 + h)


# ── Annulus integration ──────────────────────────────────────────────────


def _edges(r_cut: float) -> npt.NDArray[np.float64]:
    if not 0.5 < r_cut < 1.0:
        raise DomainError("r_cut", r_cut, "cut radius must lie in (1/2, 1)")
    k_top = int(math.floor(-math.log2(1.0 - r_cut)))
    return np.concatenate([[0.0], 1.0 - 2.0 ** -np.arange(1, k_top + 1)])


def _annulus_logs(
    log_f: Callable[[npt.NDArray[np.float64]], npt.NDArray[np.float64]],
    edges: npt.NDArray[np.float64],
    tol: float,
) -> tuple[list[float], list[float], bool]:
    """Log contributions and relative errors per annulus, plus an in-range flag.

    Stops early (returning fewer entries) when the kernel series can no
    longer be summed within ``n_max`` terms.  The flag is ``False`` when
    an image point lies beyond the kernel radius ``R_MAX``.
    """
    logs: list[float] = []
    errs: list[float] = []
    for lo, hi in zip(edges[:-1], edges[1:]):
        try:
            scan = log_f(np.linspace(lo, hi, 33)[1:])
        except TruncationError as exc:
            logger.debug("annulus [%.6f, %.6f] beyond series reach: %s", lo, hi, exc)
            break
        except DomainError as exc:
            logger.warning("annulus [%.6f, %.6f] maps outside the kernel range: %s", lo, hi, exc)
            return logs, errs, False
        shift = float(np.max(scan))
        if shift == -math.inf:
            logs.append(-math.inf)
            errs.append(0.0)
            continue

        def f(r: npt.NDArray[np.float64], shift: float = shift) -> npt.NDArray[np.float64]:
            with np.errstate(under="ignore"):
                return np.exp(log_f(r) - shift)

        try:
            res = radial_integral(f, tol, "none", r_cut=float(hi), r_min=float(lo))
        except TruncationError as exc:
            logger.debug("annulus [%.6f, %.6f] beyond series reach: %s", lo, hi, exc)
            break
        except DomainError as exc:
            logger.warning("annulus [%.6f, %.6f] maps outside the kernel range: %s", lo, hi, exc)
            return logs, errs, False
        if res.value > 0:
            logs.append(shift + math.log(res.value))
            errs.append(res.abs_err / res.value)
        else:
            logs.append(-math.inf)
            errs.append(0.0)
        logger.debug("annulus [%.6f, %.6f]: log contribution %.6g", lo, hi, logs[-1])
    return logs, errs, True


def _combine(
    logs: list[float],
    errs: list[float],
    edges: npt.NDArray[np.float64],
    in_range: bool = True,
) -> tuple[float, float, HSStatus, pd.DataFrame]:
    """Sum annulus contributions; growth over the last three means divergence."""
    done = len(logs)
    frame = DataFrame[AnnulusSchema](
        pd.DataFrame(
            {
                "r_lo": edges[:done],
                "r_hi": edges[1 : done + 1],
                "contribution": np.exp(np.array(logs, dtype=float)),
            }
        )
    )
    arr = np.array(logs, dtype=float)
    if not in_range:
        return math.nan, math.nan, "undefined", frame
    if done == 0 or np.all(arr == -np.inf):
        return 0.0, 0.0, "finite", frame
    if done >= 3 and np.all(np.diff(arr[-3:]) > 0):
        return math.inf, math.inf, "divergent", frame
    total = float(logsumexp(arr))
    err = math.fsum(math.exp(lv) * e for lv, e in zip(arr, errs) if lv > -math.inf)
    # Geometric tail past the last annulus.
    last, prev = arr[-1], arr[-2] if done >= 2 else -math.inf
    if last > -math.inf:
        q = math.exp(last - prev) if prev > -math.inf else 0.0
        tail = math.exp(last) * (q / (1.0 - q) if q < 1.0 else 1.0)
        err += tail
        total = float(np.logaddexp(total, math.log(tail))) if tail > 0 else total
    value = math.exp(total)
    if done < len(edges) - 1:
        logger.debug("series reach ended at |z| = %.6f; tail extrapolated", edges[done])
    if not math.isfinite(value):
        return math.inf, math.inf, "divergent", frame
    return value, err, "finite", frame


def _circle_mean(
    log_vals: npt.NDArray[np.float64],
) -> npt.NDArray[np.float64]:
    with np.errstate(divide="ignore"):
        return logsumexp(log_vals, axis=1) - math.log(log_vals.shape[1])


def _log_measure(spec: WeightSpec, r: npt.NDArray[np.float64]) -> npt.NDArray[np.float64]:
    """``log(2 r omega(r)^2)`` for the polar area element."""
    with np.errstate(divide="ignore"):
        return np.log(2.0 * r) - 2.0 * spec.eta_gap(1.0 - r)


def _ring(angular_n: int) -> npt.NDArray[np.complex128]:
    if angular_n < 8:
        raise DomainError("angular_n", angular_n, "need at least 8 angles")
    return np.exp(2j * np.pi * np.arange(angular_n) / angular_n)


def _log_u2(u: Multiplier | None, z: npt.NDArray[np.complex128]) -> npt.NDArray[np.float64]:
    if u is None:
        return np.zeros(z.shape)
    with np.errstate(divide="ignore"):
        return 2.0 * np.log(np.abs(np.broadcast_to(np.asarray(u(z), dtype=complex), z.shape)))


def hs_norm_integral(
    spec: WeightSpec,
    table: MomentTable,
    u: Multiplier | None,
    phi: SelfMap,
    *,
    tol: float = 1e-8,
    angular_n: int = 1024,
    r_cut: float = R_CUT,
    n_max: int = N_MAX,
) -> HSResult:
    """``||u C_phi||_HS^2 = int |u|^2 ||K_{phi(z)}||^2 omega(z)^2 dA``.

    Args:
        u: Multiplier (``None`` means ``u = 1``).
        phi: Self-map.
        tol: Relative tolerance per annulus.
        angular_n: Trapezoid angles per circle.
        r_cut: Outermost radius; the tail beyond is extrapolated.

    Returns:
        HSResult with ``status="divergent"`` and an infinite value when the
        annulus contributions grow towards the boundary.  ``status="undefined"``
        with a NaN value when an image point lies beyond ``R_MAX``.
    """
    ring = _ring(angular_n)
    edges = _edges(r_cut)

    def log_f(r: npt.NDArray[np.float64]) -> npt.NDArray[np.float64]:
        z = r[:, None] * ring[None, :]
        w = phi.checked(z)
        vals = _log_u2(u, z) + log_kernel_diag(table, w, n_max=n_max, r_max=R_MAX)
        return _circle_mean(vals) + _log_measure(spec, r)

    logs, errs, in_range = _annulus_logs(log_f, edges, tol)
    value, err, status, frame = _combine(logs, errs, edges, in_range)
    return HSResult(value, "integral", None, err, status, frame)


def _log_diff_norm(
    table: MomentTable,
    a: npt.NDArray[np.complex128],
    b: npt.NDArray[np.complex128],
    n_max: int,
) -> npt.NDArray[np.float64]:
    """``log ||K_a - K_b||^2`` with a common max-log shift over the three terms."""
    la = log_kernel_diag(table, a, n_max=n_max, r_max=R_MAX)
    lb = log_kernel_diag(table, b, n_max=n_max, r_max=R_MAX)
    lab, phase = kernel_array(table, a, b, n_max=n_max, r_max=R_MAX)
    shift = np.maximum(np.maximum(la, lb), lab)
    scale = np.exp(la - shift) + np.exp(lb - shift)
    val = scale - 2.0 * np.exp(lab - shift) * np.cos(phase)
    worst = np.min(val / scale)
    if worst < -_CLAMP:
        warnings.warn(
            f"negative kernel-difference norm clamped to 0 (relative {worst:.3g})",
            stacklevel=3,
        )
    val = np.where(a == b, 0.0, np.maximum(val, 0.0))
    with np.errstate(divide="ignore"):
        return shift + np.log(val)


def hs_diff_integral(
    spec: WeightSpec,
    table: MomentTable,
    phi: SelfMap,
    psi: SelfMap,
    *,
    u: Multiplier | None = None,
    tol: float = 1e-8,
    angular_n: int = 1024,
    r_cut: float = R_CUT,
    n_max: int = N_MAX,
) -> HSResult:
    """``||u (C_phi - C_psi)||_HS^2 = int |u|^2 ||K_{phi(z)} - K_{psi(z)}||^2 omega(z)^2 dA``.

    The integrand uses ``||K_a||^2 + ||K_b||^2 - 2 Re K(a, b)``; rounding
    below zero is clamped with a warning.
    """
    ring = _ring(angular_n)
    edges = _edges(r_cut)

    def log_f(r: npt.NDArray[np.float64]) -> npt.NDArray[np.float64]:
        z = r[:, None] * ring[None, :]
        vals = _log_u2(u, z) + _log_diff_norm(table, phi.checked(z), psi.checked(z), n_max)
        return _circle_mean(vals) + _log_measure(spec, r)

    logs, errs, in_range = _annulus_logs(log_f, edges, tol)
    value, err, status, frame = _combine(logs, errs, edges, in_range)
    return HSResult(value, "integral", None, err, status, frame)


def _rho_weighted_integral(
    spec: WeightSpec,
    table: MomentTable,
    phi: SelfMap,
    psi: SelfMap,
    maps: Sequence[SelfMap],
    *,
    tol: float,
    angular_n: int,
    resolution: int,
    r_cut: float,
    n_max: int,
) -> HSResult:
    """``int rho_tau(phi, psi)^2 sum_{m in maps} ||K_{m(z)}||^2 omega^2 dA``."""
    ring = _ring(angular_n)
    edges = _edges(r_cut)

    def log_f(r: npt.NDArray[np.float64]) -> npt.NDArray[np.float64]:
        z = r[:, None] * ring[None, :]
        a, b = phi.checked(z), psi.checked(z)
        with np.errstate(divide="ignore"):
            log_rho2 = 2.0 * np.log(rho_tau_array(spec, a, b, resolution=resolution))
        norms = [log_kernel_diag(table, m.checked(z), n_max=n_max, r_max=R_MAX) for m in maps]
        vals = log_rho2 + np.logaddexp.reduce(norms, axis=0)
        return _circle_mean(vals) + _log_measure(spec, r)

    logs, errs, in_range = _annulus_logs(log_f, edges, tol)
    value, err, status, frame = _combine(logs, errs, edges, in_range)
    return HSResult(value, "integral", None, err, status, frame)


# ── Basis sums ───────────────────────────────────────────────────────────


def _basis_grid(
    spec: WeightSpec, r_cut: float, radial_order: int, angular_n: int
) -> tuple[npt.NDArray[np.complex128], npt.NDArray[np.float64]]:
    """Gauss-Legendre nodes on each annulus times the trapezoid rule on circles.

    Returns the node array ``(radial, angular)`` and the log quadrature weights
    per radial node (including ``2 r omega(r)^2`` and the ``1 / angular_n``
    circle mean).
    """
    edges = _edges(r_cut)
    x, wt = gauss_legendre_unit(radial_order)
    lo, hi = edges[:-1, None], edges[1:, None]
    r = (lo + (hi - lo) * x[None, :]).ravel()
    w = ((hi - lo) * wt[None, :]).ravel()
    log_w = np.log(w) + _log_measure(spec, r) - math.log(angular_n)
    return r[:, None] * _ring(angular_n)[None, :], log_w


def hs_diff_basis_sum(
    spec: WeightSpec,
    table: MomentTable,
    phi: SelfMap,
    psi: SelfMap,
    N: int | None = None,  # noqa: N803
    *,
    angular_n: int = 512,
    radial_order: int = 32,
    r_cut: float = R_CUT,
    n_max: int = N_MAX,
) -> HSResult:
    """``sum_{n <= N} (1 / m_n) int |phi^n - psi^n|^2 omega^2 dA`` on a fixed grid.

    The stagnation point ``N*`` is the first index after which three
    consecutive terms stay below ``1e-4`` of the running total.  With
    ``N=None`` the sum stops there; with an explicit ``N`` every term up to
    ``N`` is summed and a warning is issued if the tail never stagnated.

    Raises:
        DomainError: ``N < 0``.
    """
    if N is not None and N < 0:
        raise DomainError("N", N, "truncation must be non-negative")
    cap = n_max if N is None else N
    z, log_w = _basis_grid(spec, r_cut, radial_order, angular_n)
    a, b = phi.checked(z), psi.checked(z)
    big = np.maximum(np.abs(a), np.abs(b))
    live = big > 0
    with np.errstate(divide="ignore", invalid="ignore"):
        log_big = np.where(live, np.log(big), -np.inf)
        sa = np.where(live, a / np.where(live, big, 1.0), 0.0)
        sb = np.where(live, b / np.where(live, big, 1.0), 0.0)
    pa = np.ones(z.shape, dtype=complex)
    pb = np.ones(z.shape, dtype=complex)
    log_w_full = np.broadcast_to(log_w[:, None], z.shape)

    if table.N < min(cap, 64) + 1:
        table = table.extended(min(cap, 64) + 1)
    terms: list[float] = []
    totals: list[float] = []
    total = 0.0
    run = 0
    n_star: int | None = None
    n = 0
    while n <= cap:
        if n > table.N:
            table = table.extended(min(max(2 * table.N, n), n_max))
            if n > table.N:
                break
        diff2 = np.abs(pa - pb) ** 2
        with np.errstate(divide="ignore", invalid="ignore"):
            logs = log_w_full + 2.0 * n * log_big + np.log(diff2)
        logs = np.where(live, logs, -np.inf)
        log_term = float(logsumexp(logs)) - float(table.log_m[n])
        term = math.exp(log_term) if log_term > -math.inf else 0.0
        total += term
        terms.append(term)
        totals.append(total)
        run = run + 1 if term <= STAGNATION * total else 0
        if n_star is None and run >= _STAGNANT_RUN and n >= _STAGNANT_RUN:
            n_star = n
            if N is None:
                break
        pa *= sa
        pb *= sb
        n += 1
    last = len(terms) - 1
    if n_star is None:
        warnings.warn(
            f"basis sum did not stagnate by N={last}; the value is a lower bound",
            stacklevel=2,
        )
    degree = max(phi.degree, psi.degree)
    if 2 * degree * last >= angular_n and degree > 0:
        logger.warning(
            "angular grid (%d) under-resolves z^%d of degree-%d maps", angular_n, last, degree
        )
    frame = DataFrame[PartialSumSchema](
        pd.DataFrame({"n": np.arange(len(terms)), "term": terms, "total": totals})
    )
    err = math.fsum(terms[-_STAGNANT_RUN:]) if n_star is not None else math.inf
    return HSResult(total, "basis-sum", last, err, "finite", frame)


# ── Comparisons ──────────────────────────────────────────────────────────


def hs_equivalence_ratio(
    spec: WeightSpec,
    table: MomentTable,
    phi: SelfMap,
    psi: SelfMap,
    *,
    tol: float = 1e-6,
    angular_n: int = 128,
    resolution: int = 64,
    r_cut: float = R_CUT,
    n_max: int = N_MAX,
) -> EquivalenceRatio:
    """``int rho^2 (||K_phi||^2 + ||K_psi||^2) omega^2 dA`` over ``||C_phi - C_psi||_HS^2``.

    The two sides are comparable with unspecified constants; the ratio is
    reported for band checks.  ``phi == psi`` gives an undefined ratio.
    """
    denom = hs_diff_integral(
        spec, table, phi, psi, tol=tol, angular_n=angular_n, r_cut=r_cut, n_max=n_max
    )
    if denom.status == "divergent":
        return {
            "ratio": math.nan,
            "numerator": math.nan,
            "denominator": math.inf,
            "status": "divergent",
        }
    if denom.status == "undefined":
        return {
            "ratio": math.nan,
            "numerator": math.nan,
            "denominator": math.nan,
            "status": "undefined",
        }
    if denom.value_sq == 0:
        return {"ratio": math.nan, "numerator": 0.0, "denominator": 0.0, "status": "undefined"}
    numer = _rho_weighted_integral(
        spec,
        table,
        phi,
        psi,
        (phi, psi),
        tol=tol,
        angular_n=angular_n,
        resolution=resolution,
        r_cut=r_cut,
        n_max=n_max,
    )
    return {
        "ratio": numer.value_sq / denom.value_sq,
        "numerator": numer.value_sq,
        "denominator": denom.value_sq,
        "status": "finite" if numer.finite else "divergent",
    }


def hs_component_check(
    spec: WeightSpec,
    table: MomentTable,
    phi: SelfMap,
    psi: SelfMap,
    *,
    tol: float = 1e-6,
    angular_n: int = 128,
    resolution: int = 64,
    r_cut: float = R_CUT,
    n_max: int = N_MAX,
) -> ComponentCheck:
    """HS finiteness of ``C_phi - C_psi`` against that of both rho-weighted kernel integrals."""
    diff = hs_diff_integral(
        spec, table, phi, psi, tol=tol, angular_n=angular_n, r_cut=r_cut, n_max=n_max
    )
    weighted = [
        _rho_weighted_integral(
            spec,
            table,
            phi,
            psi,
            (m,),
            tol=tol,
            angular_n=angular_n,
            resolution=resolution,
            r_cut=r_cut,
            n_max=n_max,
        )
        for m in (phi, psi)
    ]
    return {
        "hs_diff": diff.value_sq,
        "weighted_phi": weighted[0].value_sq,
        "weighted_psi": weighted[1].value_sq,
        "agree": diff.finite == (weighted[0].finite and weighted[1].finite),
    }


def segment_rho_bound(
    spec: WeightSpec,
    z: complex,
    w: complex,
    s_grid: Iterable[float] | None = None,
    *,
    resolution: int = 64,
    r_max: float = R_MAX,
) -> SegmentBound:
    """``max rho_tau(z_s, z_t) / rho_tau(z, w)`` over grid pairs, ``z_s = (1 - s) z + s w``."""
    grid = np.linspace(0.0, 1.0, 9) if s_grid is None else list(s_grid)
    s = np.unique(np.asarray(grid, dtype=float))
    if s.size == 0 or s[0] < 0 or s[-1] > 1:
        raise DomainError("s_grid", s.tolist(), "segment parameters must lie in [0, 1]")
    z, w = complex(z), complex(w)
    empty = DataFrame[SegmentSchema](pd.DataFrame({"s": [], "t": [], "ratio": []}, dtype=float))
    if z == w:
        return {"constant": math.nan, "status": "skipped", "pairs": empty}
    base = rho_tau(spec, z, w, resolution=resolution, r_max=r_max)
    si, ti = np.triu_indices(s.size, k=1)
    zs = (1.0 - s[si]) * z + s[si] * w
    zt = (1.0 - s[ti]) * z + s[ti] * w
    ratio = rho_tau_array(spec, zs, zt, resolution=resolution, r_max=r_max) / base
    frame = DataFrame[SegmentSchema](pd.DataFrame({"s": s[si], "t": s[ti], "ratio": ratio}))
    constant = float(ratio.max()) if ratio.size else math.nan
    return {"constant": constant, "status": "ok", "pairs": frame}


# ── Path experiments ─────────────────────────────────────────────────────


def path_experiment(
    spec: WeightSpec,
    table: MomentTable,
    phi: SelfMap,
    psi: SelfMap,
    s_values: Sequence[float] = (0.0, 0.25, 0.5, 0.75, 1.0),
    *,
    tol: float = 1e-8,
    angular_n: int = 256,
    r_cut: float = R_CUT,
    n_max: int = N_MAX,
    map_fn: Callable[..., Iterable[HSResult]] = map,
) -> PathExperiment:
    """Pairwise ``||C_{phi_s} - C_{phi_t}||_HS`` along ``phi_s = (1 - s) phi + s psi``.

    A divergent endpoint pair is a path obstruction; a divergent entry
    between finite endpoints is a contradiction.  ``map_fn`` may be an
    executor's ``map`` (results keep their order).
    """
    s = np.unique(np.asarray(list(s_values), dtype=float))
    if s.size < 2 or s[0] < 0 or s[-1] > 1:
        raise DomainError("s_values", s.tolist(), "need at least two values in [0, 1]")
    maps = [phi.blend(psi, float(v)) for v in s]

    def hs(pair: tuple[int, int]) -> HSResult:
        i, j = pair
        return hs_diff_integral(
            spec, table, maps[i], maps[j], tol=tol, angular_n=angular_n, r_cut=r_cut, n_max=n_max
        )

    endpoint = hs_diff_integral(
        spec, table, phi, psi, tol=tol, angular_n=angular_n, r_cut=r_cut, n_max=n_max
    )
    if not endpoint.finite:
        matrix = pd.DataFrame({"s": [0.0], "t": [1.0], "hs_norm": [math.inf]})
        return {
            "status": "obstruction",
            "all_finite": False,
            "max_adjacent": math.inf,
            "triangle_violations": 0,
            "matrix": DataFrame[PathMatrixSchema](matrix),
        }
    pairs = [(i, j) for i in range(s.size) for j in range(i + 1, s.size)]
    results = list(map_fn(hs, pairs))
    norm = np.zeros((s.size, s.size))
    err = np.zeros((s.size, s.size))
    for (i, j), res in zip(pairs, results):
        norm[i, j] = norm[j, i] = res.norm if res.finite else math.inf
        err[i, j] = err[j, i] = math.sqrt(res.err) if res.finite else 0.0
    all_finite = bool(np.all(np.isfinite(norm)))
    violations = 0
    if all_finite:
        for i in range(s.size):
            for j in range(s.size):
                via = norm[i, :] + norm[:, j]
                slack = 1e-6 * norm.max() + err[i, j]
                violations += int(np.any(norm[i, j] > via + slack))
    ii, jj = np.meshgrid(np.arange(s.size), np.arange(s.size), indexing="ij")
    matrix = pd.DataFrame({"s": s[ii.ravel()], "t": s[jj.ravel()], "hs_norm": norm.ravel()})
    return {
        "status": "ok" if all_finite else "contradiction",
        "all_finite": all_finite,
        "max_adjacent": float(np.max(np.diag(norm, k=1))),
        "triangle_violations": violations,
        "matrix": DataFrame[PathMatrixSchema](matrix),
    }


def mesh_refinement_check(
    spec: WeightSpec,
    table: MomentTable,
    phi: SelfMap,
    psi: SelfMap,
    coarse: int = 5,
    fine: int = 9,
    **kwargs: object,
) -> MeshRefinement:
    """Largest adjacent-``s`` HS norm on a coarse and a fine uniform mesh."""
    if not 2 <= coarse < fine:
        raise DomainError("fine", fine, "need 2 <= coarse < fine")
    runs = [
        path_experiment(
            spec, table, phi, psi, np.linspace(0.0, 1.0, k), **kwargs  # type: ignore[arg-type]
        )
        for k in (coarse, fine)
    ]
    return {
        "coarse_max_adjacent": runs[0]["max_adjacent"],
        "fine_max_adjacent": runs[1]["max_adjacent"],
        "shrinks": runs[1]["max_adjacent"] < runs[0]["max_adjacent"],
    }
