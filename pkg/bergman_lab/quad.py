"""Quadrature on the unit disk in the normalized area measure.

``dA = r dr dtheta / pi``, so the disk has total mass 1 and radial moments are
``m_n = 2 * int_0^1 r^(2n+1) omega(r)^2 dr``.

Radial integrals run adaptive bisection on Gauss-Legendre panels (order 16).
Each panel is compared against its two halves; the global error is the sum of
the per-panel differences and the worst panel is split until the total drops
below ``tol * |value|``.  The optional log-layer map ``r = 1 - exp(-t)``
stretches the boundary layer of ``omega^2`` into an O(1) interval.
"""

from __future__ import annotations

import heapq
import itertools
import logging
import math
from collections.abc import Callable, Iterable
from dataclasses import dataclass
from typing import Literal

import numpy as np
import numpy.typing as npt

from bergman_lab.exceptions import DomainError

__all__ = [
    "MCResult",
    "QuadResult",
    "disk_integral",
    "gauss_legendre_unit",
    "mc_disk",
    "radial_integral",
    "radial_log_integral",
    "spawn_streams",
]

logger = logging.getLogger("bergman_lab")

BoundaryMap = Literal["log-layer", "none"]

_GL_X, _GL_W = np.polynomial.legendre.leggauss(16)
_EPS = np.finfo(float).eps
# 1 - r >= 1e-15 keeps r = 1 - exp(-t) distinguishable from 1.
T_MAX = 34.5

RealFn = Callable[[npt.NDArray[np.float64]], npt.ArrayLike]


@dataclass(frozen=True)
class QuadResult:
    """Result of an adaptive integral.

    ``abs_err`` is the halving estimate; ``converged`` means
    ``abs_err <= tol * |value|`` (or the integrand is zero to rounding).
    """

    value: float
    abs_err: float
    panels: int
    converged: bool


@dataclass(frozen=True)
class MCResult:
    """Monte Carlo mean with its standard error."""

    value: float
    std_err: float
    n: int


def gauss_legendre_unit(order: int) -> tuple[npt.NDArray[np.float64], npt.NDArray[np.float64]]:
    """Gauss-Legendre nodes and weights mapped to ``[0, 1]``."""
    x, w = np.polynomial.legendre.leggauss(order)
    return 0.5 * (x + 1.0), 0.5 * w


def _panel_sums(
    g: Callable[[npt.NDArray[np.float64]], object],
    lo: npt.NDArray[np.float64],
    hi: npt.NDArray[np.float64],
) -> tuple[npt.NDArray[np.float64], npt.NDArray[np.float64]]:
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    x = mid[:, None] + half[:, None] * _GL_X
    out = g(x.ravel())
    if isinstance(out, tuple):
        vals = np.asarray(out[0], dtype=float).reshape(x.shape)
        mags = np.asarray(out[1], dtype=float).reshape(x.shape)
    else:
        vals = np.asarray(out, dtype=float).reshape(x.shape)
        mags = np.abs(vals)
    return half * (vals @ _GL_W), half * (mags @ _GL_W)


def _adaptive(
    g: Callable[[npt.NDArray[np.float64]], object],
    a: float,
    b: float,
    tol: float,
    initial_panels: int,
    max_panels: int,
) -> QuadResult:
    edges = np.linspace(a, b, initial_panels + 1)
    lo, hi = edges[:-1], edges[1:]
    mid = 0.5 * (lo + hi)
    coarse, _ = _panel_sums(g, lo, hi)
    halves, halves_abs = _panel_sums(g, np.concatenate([lo, mid]), np.concatenate([mid, hi]))
    n = lo.size
    left, right = halves[:n], halves[n:]
    mag = halves_abs[:n] + halves_abs[n:]

    counter = itertools.count()
    heap: list[tuple[float, int, float, float, float, float, float]] = []
    for i in range(n):
        err = abs(left[i] + right[i] - coarse[i])
        heapq.heappush(heap, (-err, next(counter), lo[i], hi[i], left[i], right[i], mag[i]))

    while True:
        value = math.fsum(item[4] + item[5] for item in heap)
        resabs = math.fsum(item[6] for item in heap)
        err = math.fsum(-item[0] for item in heap)
        if err <= max(tol * abs(value), 50.0 * _EPS * resabs):
            return QuadResult(value, err, len(heap), True)
        if len(heap) >= max_panels:
            logger.debug("panel budget %d exhausted (err=%.3e)", max_panels, err)
            return QuadResult(value, err, len(heap), False)
        # Split the worst panels; the halves of a panel become the coarse
        # estimates of its children.
        batch = [heapq.heappop(heap) for _ in range(min(len(heap), 4))]
        los, his = [], []
        for _, _, p_lo, p_hi, *_rest in batch:
            p_mid = 0.5 * (p_lo + p_hi)
            q1, q3 = 0.5 * (p_lo + p_mid), 0.5 * (p_mid + p_hi)
            los += [p_lo, q1, p_mid, q3]
            his += [q1, p_mid, q3, p_hi]
        quarters, quarters_abs = _panel_sums(g, np.asarray(los), np.asarray(his))
        for k, (_, _, p_lo, p_hi, p_left, p_right, _) in enumerate(batch):
            p_mid = 0.5 * (p_lo + p_hi)
            q = quarters[4 * k : 4 * k + 4]
            qa = quarters_abs[4 * k : 4 * k + 4]
            for c_lo, c_hi, c_coarse, c_l, c_r, c_mag in (
                (p_lo, p_mid, p_left, q[0], q[1], qa[0] + qa[1]),
                (p_mid, p_hi, p_right, q[2], q[3], qa[2] + qa[3]),
            ):
                c_err = abs(c_l + c_r - c_coarse)
                heapq.heappush(heap, (-c_err, next(counter), c_lo, c_hi, c_l, c_r, c_mag))


def _check_tol(tol: float) -> None:
    if not tol > 0:
        raise DomainError("tol", tol, "tolerance must be positive")


def _t_range(r_cut: float | None) -> float:
    if r_cut is None:
        return T_MAX
    if not 0.0 < r_cut < 1.0:
        raise DomainError("r_cut", r_cut, "cut radius must lie in (0, 1)")
    return min(-math.log1p(-r_cut), T_MAX)


def radial_integral(
    f: RealFn,
    tol: float = 1e-10,
    boundary_map: BoundaryMap = "log-layer",
    r_cut: float | None = None,
    *,
    r_min: float = 0.0,
    initial_panels: int = 8,
    max_panels: int = 4000,
) -> QuadResult:
    """Integrate ``f(r)`` over ``[r_min, r_cut]`` (``r_cut`` defaults to the boundary).

    Args:
        f: Vectorized real integrand. It may also return a ``(values, magnitudes)``
            tuple, in which case the magnitudes set the rounding floor of the
            convergence test (useful for integrands that cancel to zero).
        tol: Relative tolerance.
        boundary_map: ``"log-layer"`` integrates in ``t = -log(1 - r)``;
            ``"none"`` integrates in ``r`` directly.
        r_cut: Upper radius; ``None`` means the unit circle (``1 - 1e-15``
            under the log layer).
        r_min: Lower radius.

    Returns:
        QuadResult; a non-converged result carries the best estimate.
    """
    _check_tol(tol)
    if not 0.0 <= r_min < 1.0:
        raise DomainError("r_min", r_min, "lower radius must lie in [0, 1)")
    if boundary_map == "none":
        upper = 1.0 if r_cut is None else r_cut
        return _adaptive(f, r_min, upper, tol, initial_panels, max_panels)
    if boundary_map != "log-layer":
        raise DomainError("boundary_map", boundary_map, "expected 'log-layer' or 'none'")

    def g(t: npt.NDArray[np.float64]) -> object:
        jac = np.exp(-t)
        out = f(-np.expm1(-t))
        if isinstance(out, tuple):
            return np.asarray(out[0]) * jac, np.asarray(out[1]) * jac
        return np.asarray(out) * jac

    return _adaptive(g, -math.log1p(-r_min), _t_range(r_cut), tol, initial_panels, max_panels)


def radial_log_integral(
    log_f: RealFn,
    tol: float = 1e-10,
    r_cut: float | None = None,
    *,
    window: float = 60.0,
    scan_points: int = 1024,
    initial_panels: int = 8,
    max_panels: int = 4000,
) -> QuadResult:
    """Integrate a positive radial integrand given through its logarithm.

    The integrand ``exp(log_f(r))`` may lie far outside the double range.  A
    scan on the log-layer variable locates the mass (everything within
    ``window`` e-folds of the maximum), and the shifted integrand is
    integrated adaptively on that window.

    Returns:
        QuadResult whose ``value`` is the *logarithm* of the integral and whose
        ``abs_err`` is the error of that logarithm (the relative error of the
        integral).  ``-inf`` is returned for an integrand that vanishes.
    """
    _check_tol(tol)
    t_hi = _t_range(r_cut)

    def h(t: npt.NDArray[np.float64]) -> npt.NDArray[np.float64]:
        with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
            vals = np.asarray(log_f(-np.expm1(-t)), dtype=float) - t
        return np.where(np.isnan(vals), -np.inf, vals)

    grid = np.linspace(0.0, t_hi, scan_points + 1)
    scan = h(grid)
    peak = float(np.max(scan))
    if not math.isfinite(peak):
        if peak == np.inf:
            raise DomainError("log_f", peak, "integrand is infinite")
        return QuadResult(-math.inf, 0.0, 0, True)
    idx = np.flatnonzero(scan > peak - window)
    a = grid[max(idx[0] - 1, 0)]
    b = grid[min(idx[-1] + 1, grid.size - 1)]

    def shifted(t: npt.NDArray[np.float64]) -> npt.NDArray[np.float64]:
        return np.exp(h(t) - peak)

    res = _adaptive(shifted, float(a), float(b), tol, initial_panels, max_panels)
    if res.value <= 0:
        return QuadResult(-math.inf, math.inf, res.panels, False)
    log_value = peak + math.log(res.value)
    return QuadResult(log_value, res.abs_err / res.value, res.panels, res.converged)


def disk_integral(
    g: Callable[[npt.NDArray[np.complex128]], npt.ArrayLike],
    tol: float = 1e-8,
    angular_n: int = 256,
    boundary_map: BoundaryMap = "log-layer",
    r_cut: float | None = None,
    *,
    r_min: float = 0.0,
    max_panels: int = 4000,
) -> QuadResult:
    """Integrate ``g`` over the disk against the normalized area measure.

    Tensor polar rule: the trapezoid rule with ``angular_n`` equispaced angles
    gives the circle mean at each radial node, and :func:`radial_integral`
    integrates ``2 r * mean``.  ``g`` receives a complex array of shape
    ``(radial nodes, angular_n)`` and must return real values of that shape.
    """
    if angular_n < 1:
        raise DomainError("angular_n", angular_n, "need at least one angle")
    ring = np.exp(2j * np.pi * np.arange(angular_n) / angular_n)

    def radial(r: npt.NDArray[np.float64]) -> tuple[npt.NDArray, npt.NDArray]:
        vals = np.asarray(g(r[:, None] * ring[None, :]), dtype=float)
        return 2.0 * r * vals.mean(axis=1), 2.0 * r * np.abs(vals).mean(axis=1)

    return radial_integral(
        radial, tol, boundary_map, r_cut, r_min=r_min, max_panels=max_panels
    )


def spawn_streams(seed: int | np.random.SeedSequence, tasks: int) -> list[np.random.Generator]:
    """Independent generators, one per task index."""
    root = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    return [np.random.default_rng(child) for child in root.spawn(tasks)]


def _mc_chunk(
    rng: np.random.Generator,
    n: int,
    integrand: Callable[[npt.NDArray[np.complex128]], npt.ArrayLike],
) -> tuple[float, float, int]:
    radius = np.sqrt(rng.random(n))
    theta = rng.uniform(0.0, 2 * np.pi, n)
    vals = np.asarray(integrand(radius * np.exp(1j * theta)), dtype=float)
    vals = np.broadcast_to(vals, (n,))
    return math.fsum(vals), math.fsum(vals * vals), n


def mc_disk(
    seed: int | np.random.SeedSequence,
    n: int,
    integrand: Callable[[npt.NDArray[np.complex128]], npt.ArrayLike],
    *,
    tasks: int = 1,
    map_fn: Callable[..., Iterable[tuple[float, float, int]]] = map,
) -> MCResult:
    """Uniform Monte Carlo over the disk (polar inverse-CDF sampling).

    The ``n`` samples are partitioned over ``tasks`` independent streams spawned
    from ``seed``; results are identical for a fixed partition whatever
    ``map_fn`` (builtin ``map`` or an executor's ``map``) runs the chunks.
    """
    if n < 1000:
        raise DomainError("n", n, "Monte Carlo needs at least 1000 samples")
    if tasks < 1:
        raise DomainError("tasks", tasks, "need at least one task")
    sizes = [n // tasks + (1 if i < n % tasks else 0) for i in range(tasks)]
    streams = spawn_streams(seed, tasks)
    parts = list(map_fn(lambda job: _mc_chunk(job[0], job[1], integrand), zip(streams, sizes)))
    total = math.fsum(p[0] for p in parts)
    total_sq = math.fsum(p[1] for p in parts)
    mean = total / n
    var = max(total_sq / n - mean * mean, 0.0) * n / (n - 1)
    return MCResult(value=mean, std_err=math.sqrt(var / n), n=n)
