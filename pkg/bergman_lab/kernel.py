"""Monomial moments and the reproducing kernel of ``A^2(omega)``.

With ``m_n = ||z^n||^2`` the kernel is ``K(z, w) = sum_n (z conj(w))^n / m_n``.
``m_n`` leaves the double range for moderate ``n`` (``log m_20000 ~ -566``
for ``A = alpha = 1``), so moments are stored as ``log m_n`` and every series
is summed as ``exp(t_n - max t)`` with ``t_n = n log|x| - log m_n``.

Log-convexity of ``m_n`` makes ``t_n`` concave in ``n``; past the peak the
term ratios decrease, which gives the geometric tail bound
``sum_{n >= N} e^{t_n} <= e^{t_N} / (1 - e^{t_{N+1} - t_N})``.
"""

from __future__ import annotations

import cmath
import logging
import math
import threading
import warnings
from collections.abc import Callable, Sequence
from dataclasses import dataclass
from typing import Literal

import numpy as np
import numpy.typing as npt
import pandas as pd
from cachetools import LRUCache
from pandera.typing import DataFrame

from bergman_lab.exceptions import DomainError, QuadratureError, TruncationError
from bergman_lab.quad import radial_integral, radial_log_integral
from bergman_lab.schemas import DecaySchema, MomentSchema
from bergman_lab.types import DecayFit
from bergman_lab.weights import WeightSpec

__all__ = [
    "N_MAX",
    "RING_N_MAX",
    "R_MAX",
    "KernelValue",
    "MomentTable",
    "compute_moments",
    "gram_matrix",
    "kernel",
    "kernel_array",
    "kernel_decay_rate",
    "kernel_lp_ratio",
    "kernel_norm",
    "log_kernel_diag",
    "moment_oracle",
    "reproducing_identity",
    "ring_kernel",
    "test_function_norm",
]

logger = logging.getLogger("bergman_lab")

N_MAX = 20000
# Rings just outside |z| = 0.99 need about 35000 terms.
RING_N_MAX = 50_000
RING_DROP = 40.0
R_MAX = 0.999
_LOG2 = math.log(2.0)
_CHUNK = 2**20


@dataclass(frozen=True, eq=False)
class MomentTable:
    """``log m_n`` for ``n = 0..N`` with per-entry relative quadrature errors.

    Tables are immutable; :meth:`extended` returns a deeper table built on the
    shared moment store, so extending is cheap once a depth has been reached.
    """

    spec: WeightSpec
    log_m: npt.NDArray[np.float64]
    err: npt.NDArray[np.float64]
    tol: float

    def __post_init__(self) -> None:
        self.log_m.setflags(write=False)
        self.err.setflags(write=False)

    @property
    def N(self) -> int:  # noqa: N802
        return int(self.log_m.size - 1)

    def extended(self, N: int) -> MomentTable:  # noqa: N803
        return self if N <= self.N else compute_moments(self.spec, N, self.tol)

    def to_frame(self) -> DataFrame[MomentSchema]:
        return DataFrame[MomentSchema](
            pd.DataFrame(
                {"n": np.arange(self.log_m.size), "log_m": self.log_m, "err": self.err}
            )
        )


@dataclass(frozen=True)
class KernelValue:
    """``K(z, w) = exp(log_abs + i phase)``; ``tail_bound`` is relative to ``|K|``."""

    log_abs: float
    phase: float
    terms_used: int
    tail_bound: float

    @property
    def value(self) -> complex:
        """The kernel as a complex number (may overflow near the boundary)."""
        return cmath.rect(math.exp(self.log_abs), self.phase)


# ── Moments ──────────────────────────────────────────────────────────────

_STORE: LRUCache = LRUCache(maxsize=16)
_STORE_LOCK = threading.RLock()


def _log_moment(spec: WeightSpec, n: int, tol: float) -> tuple[float, float]:
    power = 2 * n + 1

    def log_integrand(r: npt.NDArray[np.float64]) -> npt.NDArray[np.float64]:
        return _LOG2 + power * np.log(r) - 2.0 * spec.eta_gap(1.0 - r)

    res = radial_log_integral(log_integrand, tol)
    if not res.converged or not math.isfinite(res.value):
        raise QuadratureError(res.abs_err, res.panels, index=n)
    return res.value, res.abs_err


def compute_moments(spec: WeightSpec, N: int, tol: float = 1e-10) -> MomentTable:  # noqa: N803
    """Build ``log m_n`` for ``n = 0..N``.

    Each moment is an adaptive radial integral (log-layer variable, order-16
    Gauss-Legendre panels) with relative error at most ``tol``.  Tables are
    kept in a process-wide store keyed by ``(spec, tol)`` and only the
    missing degrees are computed.

    Raises:
        DomainError: ``N < 0`` or ``tol <= 0``.
        QuadratureError: a moment failed to converge; ``index`` is its degree.
    """
    if N < 0:
        raise DomainError("N", N, "maximum degree must be non-negative")
    if not tol > 0:
        raise DomainError("tol", tol, "tolerance must be positive")
    key = (spec, tol)
    with _STORE_LOCK:
        base: MomentTable | None = _STORE.get(key)
        if base is not None and base.N >= N:
            return MomentTable(spec, base.log_m[: N + 1], base.err[: N + 1], tol)
        start = 0 if base is None else base.N + 1
        logger.debug("computing moments %d..%d for %s", start, N, spec)
        fresh = [_log_moment(spec, n, tol) for n in range(start, N + 1)]
        log_m = np.array([v for v, _ in fresh])
        err = np.array([e for _, e in fresh])
        if base is not None:
            log_m = np.concatenate([base.log_m, log_m])
            err = np.concatenate([base.err, err])
        _audit_moments(log_m, err, start)
        table = MomentTable(spec, log_m, err, tol)
        _STORE[key] = table
        return table


def _audit_moments(log_m: npt.NDArray, err: npt.NDArray, start: int) -> None:
    lo = max(start - 2, 0)
    seg, seg_err = log_m[lo:], err[lo:]
    if np.any(np.diff(seg) >= 0):
        warnings.warn("moment table is not strictly decreasing", stacklevel=3)
    if seg.size >= 3:
        second = seg[:-2] - 2.0 * seg[1:-1] + seg[2:]
        slack = seg_err[:-2] + 2.0 * seg_err[1:-1] + seg_err[2:]
        if np.any(second < -slack):
            warnings.warn("moment table violates log-convexity beyond its error", stacklevel=3)


def moment_oracle(spec: WeightSpec, n: int, points: int = 10**7) -> float:
    """``log m_n`` by the composite midpoint rule with ``points`` cells."""
    chunk = 10**6
    logs: list[float] = []
    for start in range(0, points, chunk):
        k = np.arange(start, min(start + chunk, points), dtype=float)
        r = (k + 0.5) / points
        vals = _LOG2 + (2 * n + 1) * np.log(r) - 2.0 * spec.eta_gap(1.0 - r)
        peak = vals.max()
        logs.append(peak + math.log(math.fsum(np.exp(vals - peak))))
    top = max(logs)
    return top + math.log(math.fsum(math.exp(v - top) for v in logs)) - math.log(points)


# ── Series ───────────────────────────────────────────────────────────────


def _series_length(
    table: MomentTable, lx: float, target: float, n_max: int
) -> tuple[MomentTable, int]:
    """Smallest ``N`` whose tail bound after ``N`` terms is ``<= target`` times the peak term."""
    last = math.inf
    while True:
        lm = table.log_m
        t = np.arange(lm.size) * lx - lm
        k = int(np.argmax(t))
        if lm.size - 2 >= k + 1:
            cand = np.arange(k + 1, lm.size - 1)
            with np.errstate(over="ignore", divide="ignore"):
                q = np.exp(t[cand + 1] - t[cand])
                bound = np.where(q < 1.0, np.exp(t[cand] - t[k]) / (1.0 - q), np.inf)
            ok = np.flatnonzero(bound <= target)
            if ok.size:
                return table, int(cand[ok[0]])
            last = float(bound[-1])
        if table.N >= n_max:
            raise TruncationError(n_max, last)
        table = table.extended(min(max(2 * table.N, 64), n_max))


def _check_points(points: npt.ArrayLike, r_max: float, name: str) -> None:
    mod = np.abs(np.asarray(points, dtype=complex))
    if np.any(mod > r_max):
        raise DomainError(name, float(mod.max()), f"points must satisfy |z| <= r_max = {r_max}")


def kernel(
    table: MomentTable,
    z: complex,
    w: complex,
    tol: float = 1e-12,
    *,
    n_max: int = N_MAX,
    r_max: float = R_MAX,
) -> KernelValue:
    """Evaluate ``K(z, w)`` with a relative tail bound ``<= tol``.

    Raises:
        DomainError: ``|z|`` or ``|w|`` exceeds ``r_max``.
        TruncationError: more than ``n_max`` terms would be needed.
    """
    _check_points(z, r_max, "z")
    _check_points(w, r_max, "w")
    x = complex(z) * complex(w).conjugate()
    if x == 0:
        return KernelValue(-float(table.log_m[0]), 0.0, 1, 0.0)
    lx = math.log(abs(x))
    theta = cmath.phase(x)
    target = tol
    for _ in range(64):
        table, N = _series_length(table, lx, target, n_max)
        lm = table.log_m
        n = np.arange(N)
        t = n * lx - lm[:N]
        peak = float(t.max())
        s = complex(np.sum(np.exp(t - peak) * np.exp(1j * theta * n)))
        t_n = N * lx - lm[N] - peak
        q = math.exp((N + 1) * lx - lm[N + 1] - (N * lx - lm[N]))
        tail = math.exp(t_n) / (1.0 - q) / abs(s) if s != 0 else math.inf
        if tail <= tol:
            phase = cmath.phase(s)
            return KernelValue(
                log_abs=peak + math.log(abs(s)),
                phase=math.pi if phase == -math.pi else phase,
                terms_used=N,
                tail_bound=tail,
            )
        # Cancellation: tighten the target relative to the peak term.
        target = min(target, tol * abs(s)) * 0.5
    raise TruncationError(N, tail)


def kernel_array(
    table: MomentTable,
    z: npt.ArrayLike,
    w: npt.ArrayLike,
    tol: float = 1e-12,
    *,
    n_max: int = N_MAX,
    r_max: float = R_MAX,
) -> tuple[npt.NDArray[np.float64], npt.NDArray[np.float64]]:
    """Vectorized :func:`kernel`; returns ``(log_abs, phase)`` arrays.

    Points are processed in chunks sorted by ``|z conj(w)|``; entries whose
    tail bound misses ``tol`` (off-diagonal cancellation) are redone one by
    one with the scalar routine.
    """
    zb, wb = np.broadcast_arrays(np.asarray(z, dtype=complex), np.asarray(w, dtype=complex))
    _check_points(zb, r_max, "z")
    _check_points(wb, r_max, "w")
    x = (zb * np.conj(wb)).ravel()
    absx = np.abs(x)
    log_abs = np.full(x.size, -float(table.log_m[0]))
    phase = np.zeros(x.size)
    order = np.flatnonzero(absx > 0)
    order = order[np.argsort(absx[order])]
    pos = 0
    while pos < order.size:
        # Sizing by the largest modulus in the chunk covers every smaller one.
        pivot = order[min(pos + 4096, order.size) - 1]
        table, N = _series_length(table, math.log(absx[pivot]), tol, n_max)
        step = max(1, _CHUNK // max(N, 1))
        idx = order[pos : min(pos + step, order.size)]
        idx = idx[absx[idx] <= absx[pivot]]
        lm = table.log_m
        lx = np.log(absx[idx])
        th = np.angle(x[idx])
        n = np.arange(N)
        t = n[None, :] * lx[:, None] - lm[None, :N]
        peak = t.max(axis=1)
        s = np.sum(np.exp(t - peak[:, None]) * np.exp(1j * n[None, :] * th[:, None]), axis=1)
        t_n = N * lx - lm[N]
        q = np.exp((N + 1) * lx - lm[N + 1] - t_n)
        with np.errstate(divide="ignore"):
            tail = np.exp(t_n - peak) / (1.0 - q) / np.abs(s)
        log_abs[idx] = peak + np.log(np.abs(s))
        phase[idx] = np.angle(s)
        for j in idx[~(tail <= tol)]:
            kv = kernel(table, x[j], 1.0, tol, n_max=n_max, r_max=1.0)
            log_abs[j], phase[j] = kv.log_abs, kv.phase
        pos += idx.size
    return log_abs.reshape(zb.shape), phase.reshape(zb.shape)


def log_kernel_diag(
    table: MomentTable,
    a: npt.ArrayLike,
    tol: float = 1e-12,
    *,
    n_max: int = N_MAX,
    r_max: float = R_MAX,
) -> npt.NDArray[np.float64]:
    """``log K(a, a) = log ||K_a||^2`` for an array of points.

    The value only depends on ``|a|``; moduli are rounded to 13 decimals and
    deduplicated before summation.
    """
    a = np.asarray(a, dtype=complex)
    radii = np.round(np.abs(a), 13).ravel()
    uniq, inverse = np.unique(radii, return_inverse=True)
    logs, _ = kernel_array(table, uniq, uniq, tol, n_max=n_max, r_max=r_max)
    return logs[inverse].reshape(a.shape)


def kernel_norm(
    table: MomentTable,
    z: complex,
    tol: float = 1e-12,
    *,
    n_max: int = N_MAX,
    r_max: float = R_MAX,
) -> float:
    """Return ``log ||K_z|| = log K(z, z) / 2``."""
    return 0.5 * kernel(table, z, z, tol, n_max=n_max, r_max=r_max).log_abs


def gram_matrix(
    table: MomentTable, points: npt.ArrayLike, tol: float = 1e-12
) -> npt.NDArray[np.complex128]:
    """Normalized Gram matrix ``K(z_i, z_j) / (||K_{z_i}|| ||K_{z_j}||)``.

    Congruent to the raw Gram matrix by a positive diagonal, so both are
    positive semidefinite together.
    """
    pts = np.asarray(points, dtype=complex).ravel()
    log_abs, phase = kernel_array(table, pts[:, None], pts[None, :], tol)
    diag = np.diag(log_abs)
    return np.exp(log_abs - 0.5 * (diag[:, None] + diag[None, :])) * np.exp(1j * phase)


# ── Ring evaluations and kernel integrals ────────────────────────────────


def ring_kernel(
    table: MomentTable,
    r: float,
    z: complex,
    n_theta: int,
    tol: float = 1e-12,
    *,
    n_max: int = N_MAX,
) -> tuple[float, npt.NDArray[np.complex128]]:
    """``K(r e^{i theta_j}, z)`` on ``n_theta`` equispaced angles, via one FFT.

    Returns ``(shift, values)`` with ``K = exp(shift) * values``.  The series
    coefficients are folded modulo ``n_theta`` so the trapezoid samples are
    exact for the truncated series.
    """
    x_mod = r * abs(z)
    if x_mod == 0.0:
        return -float(table.log_m[0]), np.ones(n_theta, dtype=complex)
    table, N = _series_length(table, math.log(x_mod), tol, n_max)
    n = np.arange(N)
    t = n * math.log(x_mod) - table.log_m[:N]
    peak = float(t.max())
    coef = np.exp(t - peak) * np.exp(-1j * cmath.phase(z) * n)
    slot = n % n_theta
    folded = np.bincount(slot, weights=coef.real, minlength=n_theta) + 1j * np.bincount(
        slot, weights=coef.imag, minlength=n_theta
    )
    return peak, n_theta * np.fft.ifft(folded)


def _ring_resolution(spec: WeightSpec, a: float) -> int:
    if a == 0.0:
        return 64
    width = float(spec.tau(a)) / a
    need = 24.0 * math.pi / width
    return int(min(2**16, max(64, 2 ** math.ceil(math.log2(need)))))


def _ring_log_mean(
    table: MomentTable,
    r: float,
    z: complex,
    p: float,
    extra: Callable[[npt.NDArray[np.complex128]], npt.NDArray] | None,
    ring: npt.NDArray[np.complex128],
    series_tol: float,
    n_max: int,
) -> float:
    """``log mean_theta |K(r e^{i theta}, z)|^p omega(r)^p``, times ``extra`` when given."""
    shift, ker = ring_kernel(table, r, z, ring.size, series_tol, n_max=n_max)
    with np.errstate(divide="ignore"):
        logs = p * (shift + np.log(np.abs(ker)) - float(table.spec.eta(r)))
    peak = float(logs.max())
    if not math.isfinite(peak):
        return -math.inf
    vals = np.exp(logs - peak)
    if extra is not None:
        vals = vals * extra(r * ring)
    with np.errstate(divide="ignore"):
        return peak + float(np.log(vals.mean()))


def _ring_cut(
    table: MomentTable,
    z: complex,
    p: float,
    extra: Callable[[npt.NDArray[np.complex128]], npt.NDArray] | None,
    ring: npt.NDArray[np.complex128],
    series_tol: float,
    n_max: int,
) -> float | None:
    """First radius whose ring mean lies ``RING_DROP`` e-folds below the largest one seen.

    Gaps ``1 - r`` shrink geometrically from ``1 - |z|``.  ``None`` means the
    integrand never dropped far enough and the integral runs to the boundary.
    """
    args = (z, p, extra, ring, series_tol, n_max)
    gap = 1.0 - abs(z)
    top = _ring_log_mean(table, 1.0 - gap, *args)
    while gap > 1e-9:
        gap *= 0.85
        value = _ring_log_mean(table, 1.0 - gap, *args)
        if value < top - RING_DROP:
            return 1.0 - gap
        top = max(top, value)
    return None


def _ring_integral(
    table: MomentTable,
    z: complex,
    p: float,
    log_const: float,
    extra: Callable[[npt.NDArray[np.complex128]], npt.NDArray] | None,
    tol: float,
    angular_n: int | None,
    n_max: int,
) -> float:
    a = abs(z)
    n_theta = angular_n or _ring_resolution(table.spec, a)
    ring = np.exp(2j * np.pi * np.arange(n_theta) / n_theta)
    # Ring series only need to resolve the quadrature tolerance.
    series_tol = tol * 1e-3
    r_cut = _ring_cut(table, z, p, extra, ring, series_tol, n_max) if a > 0 else None

    def radial(r: npt.NDArray[np.float64]) -> npt.NDArray[np.float64]:
        logs = np.array(
            [
                _ring_log_mean(table, float(ri), z, p, extra, ring, series_tol, n_max)
                for ri in r
            ]
        )
        return 2.0 * r * np.exp(logs + log_const)

    res = radial_integral(radial, tol, "log-layer", r_cut)
    if not res.converged:
        raise QuadratureError(res.abs_err, res.panels)
    return res.value


def kernel_lp_ratio(
    table: MomentTable,
    z: complex,
    p: float,
    tol: float = 1e-7,
    *,
    method: Literal["auto", "quadrature"] = "auto",
    angular_n: int | None = None,
    n_max: int = RING_N_MAX,
    r_max: float = R_MAX,
) -> float:
    """``(int |K(z, .)|^p omega^p dA) * omega(z)^p * tau(z)^(2(p-1))``.

    The integral is a polar quadrature whose rings are evaluated by
    :func:`ring_kernel`; the angular resolution follows ``tau(|z|)`` and the
    radial range stops where the ring means have decayed (see ``_ring_cut``).
    For ``p = 2`` the integral equals ``K(z, z)``, which ``method="auto"``
    uses; ``"quadrature"`` forces the polar route.

    Raises:
        DomainError: ``p <= 0``, ``|z| > r_max`` or an unknown ``method``.
        QuadratureError: the radial integral did not converge.
        TruncationError: a ring series needs more than ``n_max`` terms.
    """
    if not p > 0:
        raise DomainError("p", p, "exponent must be positive")
    if method not in ("auto", "quadrature"):
        raise DomainError("method", method, "expected 'auto' or 'quadrature'")
    _check_points(z, r_max, "z")
    spec = table.spec
    a = abs(z)
    log_const = -p * float(spec.eta(a)) + 2.0 * (p - 1.0) * math.log(float(spec.tau(a)))
    if p == 2.0 and method == "auto":
        return math.exp(2.0 * kernel_norm(table, z, n_max=n_max, r_max=r_max) + log_const)
    return _ring_integral(table, z, p, log_const, None, tol, angular_n, n_max)


def test_function_norm(
    table: MomentTable,
    z: complex,
    w: complex,
    *,
    R: float = 0.5,  # noqa: N803
    tol: float = 1e-7,
    angular_n: int | None = None,
    n_max: int = RING_N_MAX,
    r_max: float = R_MAX,
) -> float:
    """``||f_{z,w}||`` for ``f_{z,w}(xi) = omega(z) K(xi, z) (xi - w)``.

    The locality precondition ``d_tau(z, w) < R`` is checked; a violation
    emits a warning and the value is still computed.
    """
    from bergman_lab.metric import d_tau

    _check_points(z, r_max, "z")
    _check_points(w, r_max, "w")
    dist = d_tau(table.spec, z, w, r_max=r_max).distance
    if dist >= R:
        warnings.warn(
            f"d_tau(z, w) = {dist:.4g} is not below R = {R}; value reported anyway",
            stacklevel=2,
        )
    log_const = -2.0 * float(table.spec.eta(abs(z)))

    def factor(xi: npt.NDArray[np.complex128]) -> npt.NDArray[np.float64]:
        return np.abs(xi - w) ** 2

    return math.sqrt(_ring_integral(table, z, 2.0, log_const, factor, tol, angular_n, n_max))


test_function_norm.__test__ = False  # type: ignore[attr-defined]


def reproducing_identity(
    table: MomentTable,
    k: int,
    z: complex,
    tol: float = 1e-10,
    *,
    angular_n: int = 1024,
    n_max: int = N_MAX,
) -> complex:
    """``<xi^k, K_z>`` computed by polar quadrature (should equal ``z^k``)."""
    if k < 0:
        raise DomainError("k", k, "degree must be non-negative")
    _check_points(z, R_MAX, "z")
    spec = table.spec
    ring = np.exp(2j * np.pi * np.arange(angular_n) / angular_n)

    def ring_mean(r: float) -> complex:
        shift, ker = ring_kernel(table, r, z, angular_n, n_max=n_max)
        scale = shift - 2.0 * spec.A * (1.0 - r) ** (-spec.alpha)
        if r > 0:
            scale += k * math.log(r)
        elif k > 0:
            return 0j
        return complex(np.mean(ring**k * np.conj(ker)) * math.exp(scale))

    parts = []
    for take in (lambda c: c.real, lambda c: c.imag):

        def radial(r: npt.NDArray[np.float64], take=take) -> tuple[npt.NDArray, npt.NDArray]:
            full = np.array([ring_mean(float(ri)) for ri in r])
            # Rounding floor from the full complex mean.
            return 2.0 * r * take(full), 2.0 * r * np.abs(full) + 1e-300

        res = radial_integral(radial, tol, "log-layer")
        if not res.converged:
            raise QuadratureError(res.abs_err, res.panels)
        parts.append(res.value)
    return complex(parts[0], parts[1])


def kernel_decay_rate(
    table: MomentTable,
    pairs: Sequence[tuple[complex, complex]],
    *,
    resolution: int = 64,
    r_max: float = R_MAX,
) -> DecayFit:
    """Least-squares fit of ``log(||K_z|| ||K_w|| / |K(z, w)|)`` against ``d_tau(z, w)``.

    The slope is the empirical decay rate ``sigma`` of the normalized kernel;
    it is reported, not assumed.
    """
    from bergman_lab.metric import d_tau

    rows = []
    for z, w in pairs:
        if complex(z) == complex(w):
            continue
        dist = d_tau(table.spec, z, w, resolution=resolution, r_max=r_max).distance
        gap = (
            0.5 * (kernel(table, z, z).log_abs + kernel(table, w, w).log_abs)
            - kernel(table, z, w).log_abs
        )
        rows.append({"d_tau": dist, "log_gap": gap})
    if len(rows) < 2:
        raise DomainError("pairs", len(rows), "need at least two pairs with z != w")
    frame = DataFrame[DecaySchema](pd.DataFrame(rows))
    sigma, intercept = np.polyfit(frame["d_tau"], frame["log_gap"], 1)
    return {"sigma": float(sigma), "intercept": float(intercept), "pairs": frame}
