"""The conformal metric ``|dz| / tau(|z|)``: ``d_tau``, ``rho_tau`` and kernel distances.

``d_tau`` is computed in layers of decreasing cost:

* points on a common ray use the closed form ``|F(|w|) - F(|z|)|`` with
  ``F' = 1 / tau`` (any curve pays at least its radial variation);
* pairs closer than ``0.1 * min(tau)`` use the straight-chord integral;
* everything else runs Dijkstra on a polar graph, then descends the
  polyline with L-BFGS.

Geodesics never leave the disk of radius ``max(|z|, |w|)`` (radial projection
onto that circle shortens a curve and lowers ``1/tau``), so graphs are built
only up to the ring covering the farther endpoint.
"""

from __future__ import annotations

import logging
import math
import threading
import warnings
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from typing import Literal

import numpy as np
import numpy.typing as npt
import pandas as pd
from cachetools import LRUCache, cached
from pandera.typing import DataFrame
from scipy import optimize, sparse
from scipy.sparse import csgraph
from scipy.spatial import cKDTree
from tqdm.auto import tqdm

from bergman_lab.exceptions import DomainError, GeodesicError
from bergman_lab.kernel import N_MAX, R_MAX, MomentTable, kernel
from bergman_lab.quad import gauss_legendre_unit
from bergman_lab.schemas import ComparabilitySchema
from bergman_lab.types import ComparabilityReport, SetInclusionResult, TriangleAudit
from bergman_lab.weights import WeightSpec

__all__ = [
    "CHORD_FACTOR",
    "SETINCLUS_C1",
    "GeodesicResult",
    "chord_cost",
    "comparability_report",
    "d_tau",
    "d_tau_grid",
    "d_tau_radial",
    "d_tau_refine",
    "decay_bound_check",
    "kernel_difference_ratio",
    "polyline_cost",
    "rho_tau",
    "rho_tau_array",
    "setinclus_check",
    "skwarczynski",
    "triangle_audit",
]

logger = logging.getLogger("bergman_lab")

GeodesicMethod = Literal["grid", "refined", "radial-closed-form", "chord"]

CHORD_FACTOR = 0.1
# Empirical lower constant for d_tau >= C1 |z - w| / min(tau) below the
# locality radius; a property of the canonical tau, not a universal constant.
SETINCLUS_C1 = 0.25
GRID_ERR = 0.02
_NEIGHBOURS = 16
_MAX_RING = 2**14
_CHORD_X, _CHORD_W = gauss_legendre_unit(16)


@dataclass(frozen=True)
class GeodesicResult:
    """A ``d_tau`` value with the polyline that realizes it.

    ``path[0]`` and ``path[-1]`` are the query points; ``err`` is a relative
    error estimate for ``distance``.
    """

    distance: float
    path: npt.NDArray[np.complex128] = field(repr=False)
    method: GeodesicMethod
    err: float

    @property
    def rho(self) -> float:
        return -math.expm1(-self.distance)


# ── Closed forms and path costs ──────────────────────────────────────────


def _inv_tau(spec: WeightSpec, xi: npt.ArrayLike) -> npt.NDArray[np.float64]:
    return (1.0 - np.abs(xi)) ** (-spec.tau_exponent)


def _antiderivative(spec: WeightSpec, r: npt.ArrayLike) -> npt.NDArray[np.float64]:
    # F(r) = int_0^r (1 - t)^-c dt with c = (alpha + 2) / 2 > 1
    c1 = spec.tau_exponent - 1.0
    return ((1.0 - np.asarray(r, dtype=float)) ** (-c1) - 1.0) / c1


def d_tau_radial(spec: WeightSpec, r0: float, r1: float) -> float:
    """``d_tau`` between two points on a common ray at radii ``r0`` and ``r1``."""
    return float(abs(_antiderivative(spec, r1) - _antiderivative(spec, r0)))


def chord_cost(spec: WeightSpec, z: npt.ArrayLike, w: npt.ArrayLike) -> npt.ArrayLike:
    """``int |dz| / tau`` along the straight segment ``[z, w]`` (an upper bound for ``d_tau``).

    Four Gauss-Legendre panels of order 16; vectorized over broadcast pairs.
    """
    zb, wb = np.broadcast_arrays(np.asarray(z, dtype=complex), np.asarray(w, dtype=complex))
    s = ((np.arange(4)[:, None] + _CHORD_X[None, :]) / 4.0).ravel()
    weights = np.tile(_CHORD_W, 4) / 4.0
    pts = zb[..., None] + s * (wb - zb)[..., None]
    out = np.abs(wb - zb) * (_inv_tau(spec, pts) @ weights)
    return float(out) if out.ndim == 0 else out


def _simpson_cost(
    spec: WeightSpec, a: npt.NDArray[np.complex128], b: npt.NDArray[np.complex128]
) -> npt.NDArray[np.float64]:
    mid = 0.5 * (a + b)
    return np.abs(b - a) / 6.0 * (_inv_tau(spec, a) + 4.0 * _inv_tau(spec, mid) + _inv_tau(spec, b))


def _segment_costs(spec: WeightSpec, path: npt.NDArray[np.complex128]) -> npt.NDArray[np.float64]:
    return _simpson_cost(spec, path[:-1], path[1:])


def polyline_cost(spec: WeightSpec, path: npt.ArrayLike) -> float:
    """Metric length of a polyline, Simpson's rule on each segment."""
    return math.fsum(_segment_costs(spec, np.asarray(path, dtype=complex)))


def _check_point(value: complex, r_max: float, name: str) -> None:
    if abs(value) > r_max:
        raise DomainError(name, value, f"points must satisfy |z| <= r_max = {r_max}")


# ── Polar graph ──────────────────────────────────────────────────────────


@dataclass(frozen=True, eq=False)
class _PolarGraph:
    nodes: npt.NDArray[np.complex128]
    matrix: sparse.csr_matrix
    tree: cKDTree
    r_top: float


def _ring_ratio(resolution: int, r_max: float) -> float:
    return (1.0 / (1.0 - r_max)) ** (1.0 / resolution)


@cached(LRUCache(maxsize=8), lock=threading.Lock())
def _polar_graph(spec: WeightSpec, resolution: int, r_max: float, k_top: int) -> _PolarGraph:
    q = _ring_ratio(resolution, r_max)
    gaps = q ** -np.arange(1, k_top + 1, dtype=float)
    radii = 1.0 - gaps
    spacing = gaps * (1.0 - 1.0 / q)
    counts = np.clip(2 ** np.round(np.log2(2 * np.pi * radii / spacing)), 8, _MAX_RING)
    rings = [
        r * np.exp(2j * np.pi * np.arange(int(m)) / int(m)) for r, m in zip(radii, counts)
    ]
    nodes = np.concatenate([np.zeros(1, dtype=complex), *rings])
    pts = np.column_stack([nodes.real, nodes.imag])
    tree = cKDTree(pts)
    _, idx = tree.query(pts, k=_NEIGHBOURS + 1)
    rows = np.repeat(np.arange(nodes.size), _NEIGHBOURS)
    cols = idx[:, 1:].ravel()
    keep = rows < cols
    rows, cols = rows[keep], cols[keep]
    weights = _pair_costs(spec, np.stack([nodes[rows], nodes[cols]], axis=1))
    n = nodes.size + 2
    matrix = sparse.csr_matrix((weights, (rows, cols)), shape=(n, n))
    logger.debug(
        "polar graph: %d rings up to r=%.6f, %d nodes, %d edges",
        k_top,
        radii[-1],
        nodes.size,
        weights.size,
    )
    return _PolarGraph(nodes, matrix, tree, float(radii[-1]))


def _pair_costs(spec: WeightSpec, pair: npt.NDArray[np.complex128]) -> npt.NDArray[np.float64]:
    return np.maximum(_simpson_cost(spec, pair[:, 0], pair[:, 1]), 1e-300)


def _graph_for(spec: WeightSpec, r_needed: float, resolution: int, r_max: float) -> _PolarGraph:
    q = _ring_ratio(resolution, r_max)
    k = math.ceil(-math.log1p(-min(r_needed, r_max)) / math.log(q) - 1e-9) + 1
    return _polar_graph(spec, resolution, r_max, int(min(max(k, 2), resolution)))


def d_tau_grid(
    spec: WeightSpec,
    z: complex,
    w: complex,
    resolution: int = 64,
    *,
    r_max: float = R_MAX,
) -> GeodesicResult:
    """Shortest path on a polar graph.

    Rings sit at ``1 - r_k = q^-k`` with ``q^resolution = 1 / (1 - r_max)``;
    each ring carries a power-of-two number of nodes chosen so cells are
    close to square.  Every node is joined to its 16 nearest neighbours with
    edge weight ``|b - a| / tau`` integrated by Simpson's rule.  The query
    points are attached to their own 16 nearest nodes.  The result is biased
    upward by the stencil anisotropy.

    Raises:
        DomainError: ``resolution < 8`` or a point beyond ``r_max``.
        GeodesicError: the graph does not connect the endpoints.
    """
    z, w = complex(z), complex(w)
    _check_point(z, r_max, "z")
    _check_point(w, r_max, "w")
    if resolution < 8:
        raise DomainError("resolution", resolution, "resolution too coarse to connect endpoints")
    if z == w:
        return GeodesicResult(0.0, np.array([z, w]), "grid", 0.0)

    graph = _graph_for(spec, max(abs(z), abs(w)), resolution, r_max)
    n = graph.nodes.size
    ends = np.array([z, w])
    dist, idx = graph.tree.query(np.column_stack([ends.real, ends.imag]), k=_NEIGHBOURS)
    rows = np.concatenate([np.full(_NEIGHBOURS, n), np.full(_NEIGHBOURS, n + 1)])
    cols = idx.ravel()
    pair = np.column_stack([np.repeat(ends, _NEIGHBOURS), graph.nodes[cols]])
    weights = _pair_costs(spec, pair)
    direct = float(chord_cost(spec, z, w))
    if abs(z - w) <= dist.max():
        rows = np.append(rows, n)
        cols = np.append(cols, n + 1)
        weights = np.append(weights, direct)
    extra = sparse.csr_matrix((weights, (rows, cols)), shape=graph.matrix.shape)
    full = graph.matrix + extra

    limit = 1.25 * direct + 1e-12
    dists, pred = csgraph.dijkstra(
        full, directed=False, indices=n, return_predecessors=True, limit=limit
    )
    if not math.isfinite(dists[n + 1]):
        dists, pred = csgraph.dijkstra(full, directed=False, indices=n, return_predecessors=True)
    if not math.isfinite(dists[n + 1]):
        raise GeodesicError(f"polar graph at resolution {resolution} does not connect {z} and {w}")

    hops = [n + 1]
    while hops[-1] != n:
        hops.append(int(pred[hops[-1]]))
    every = np.concatenate([graph.nodes, ends])
    path = every[np.array(hops[::-1])]
    return GeodesicResult(float(dists[n + 1]), path, "grid", GRID_ERR)


# ── Polyline descent ─────────────────────────────────────────────────────


def _resample(spec: WeightSpec, path: npt.NDArray[np.complex128], m: int) -> npt.NDArray:
    """``m`` segments of equal metric cost along ``path``."""
    costs = _segment_costs(spec, path)
    cum = np.concatenate([[0.0], np.cumsum(costs)])
    targets = np.linspace(0.0, cum[-1], m + 1)
    seg = np.clip(np.searchsorted(cum, targets, side="right") - 1, 0, costs.size - 1)
    with np.errstate(invalid="ignore", divide="ignore"):
        frac = np.where(costs[seg] > 0, (targets - cum[seg]) / costs[seg], 0.0)
    out = path[seg] + np.clip(frac, 0.0, 1.0) * (path[seg + 1] - path[seg])
    out[0], out[-1] = path[0], path[-1]
    return out


def _objective(spec: WeightSpec, bound: float, z: complex, w: complex):
    c = spec.tau_exponent

    def grad_inv_tau(xi: npt.NDArray[np.complex128]) -> npt.NDArray[np.complex128]:
        mod = np.abs(xi)
        unit = np.divide(xi, mod, out=np.zeros_like(xi), where=mod > 0)
        return c * (1.0 - mod) ** (-c - 1.0) * unit

    def fun(x: npt.NDArray[np.float64]) -> tuple[float, npt.NDArray[np.float64]]:
        m = x.size // 2
        v = x[:m] + 1j * x[m:]
        mod = np.abs(v)
        outside = mod > bound
        proj = np.where(outside, v * (bound / np.where(outside, mod, 1.0)), v)
        p = np.concatenate([[z], proj, [w]])
        a, b = p[:-1], p[1:]
        mid = 0.5 * (a + b)
        length = np.abs(b - a)
        ga, gm, gb = _inv_tau(spec, a), _inv_tau(spec, mid), _inv_tau(spec, b)
        simpson = ga + 4.0 * gm + gb
        cost = math.fsum(length * simpson / 6.0)

        unit = np.divide(b - a, length, out=np.zeros_like(a), where=length > 0)
        dga, dgm, dgb = grad_inv_tau(a), grad_inv_tau(mid), grad_inv_tau(b)
        d_a = -unit * simpson / 6.0 + length / 6.0 * (dga + 2.0 * dgm)
        d_b = unit * simpson / 6.0 + length / 6.0 * (dgb + 2.0 * dgm)
        g = d_a[1:] + d_b[:-1]
        # Chain rule through the radial projection onto |v| = bound.
        vhat = np.divide(v, mod, out=np.zeros_like(v), where=mod > 0)
        radial = (g * np.conj(vhat)).real * vhat
        g = np.where(outside, (bound / np.where(outside, mod, 1.0)) * (g - radial), g)
        return cost, np.concatenate([g.real, g.imag])

    return fun


def _descend(
    spec: WeightSpec, path: npt.NDArray[np.complex128], bound: float, tol: float
) -> tuple[npt.NDArray[np.complex128], float]:
    z, w = complex(path[0]), complex(path[-1])
    inner = path[1:-1]
    if inner.size == 0:
        return path, polyline_cost(spec, path)
    fun = _objective(spec, bound, z, w)
    x0 = np.concatenate([inner.real, inner.imag])
    res = optimize.minimize(
        fun,
        x0,
        jac=True,
        method="L-BFGS-B",
        options={"ftol": tol * 0.1, "gtol": 1e-12, "maxiter": 2000},
    )
    m = inner.size
    v = res.x[:m] + 1j * res.x[m:]
    mod = np.abs(v)
    v = np.where(mod > bound, v * bound / np.maximum(mod, 1e-300), v)
    out = np.concatenate([[z], v, [w]])
    return out, polyline_cost(spec, out)


def d_tau_refine(
    spec: WeightSpec,
    seed: GeodesicResult,
    tol: float = 1e-5,
    *,
    max_vertices: int = 512,
) -> GeodesicResult:
    """Descend the seed polyline, doubling its vertices until a round gains ``< tol``.

    The seed is first resampled to segments of equal metric cost (about 0.25
    each, between 16 and ``max_vertices`` segments); the straight chord is
    used instead when it is cheaper.  Each round minimizes the Simpson
    polyline length with L-BFGS over the interior vertices, which stay in
    the disk of radius ``max(|z|, |w|)``.  The result never exceeds the seed.
    """
    if seed.method == "radial-closed-form" or seed.distance == 0.0 or seed.path.size < 2:
        return seed
    path = np.asarray(seed.path, dtype=complex)
    z, w = complex(path[0]), complex(path[-1])
    bound = max(abs(z), abs(w))
    m = int(min(max(16, math.ceil(seed.distance / 0.25)), max_vertices))
    start = _resample(spec, path, m)
    straight = z + np.linspace(0.0, 1.0, m + 1) * (w - z)
    if polyline_cost(spec, straight) < polyline_cost(spec, start):
        start = straight
    start_cost = polyline_cost(spec, start)

    best, cost = _descend(spec, start, bound, tol)
    gain = math.inf
    rounds = 1
    while best.size - 1 < max_vertices:
        doubled = np.empty(2 * best.size - 1, dtype=complex)
        doubled[0::2] = best
        doubled[1::2] = 0.5 * (best[:-1] + best[1:])
        cand, cand_cost = _descend(spec, doubled, bound, tol)
        gain = (cost - cand_cost) / cand_cost
        best, cost = (cand, cand_cost) if cand_cost < cost else (best, cost)
        rounds += 1
        logger.debug("refine round %d: %d segments, d=%.10g", rounds, best.size - 1, cost)
        if abs(gain) < tol:
            break

    if cost > start_cost * (1.0 + 1e-12):
        warnings.warn(
            f"polyline descent increased the objective ({start_cost:.10g} -> {cost:.10g})",
            stacklevel=2,
        )
    if cost >= seed.distance:
        return seed
    err = max(tol, abs(gain) if math.isfinite(gain) else tol)
    return GeodesicResult(cost, best, "refined", err)


# ── Dispatch ─────────────────────────────────────────────────────────────


def _same_ray(z: npt.ArrayLike, w: npt.ArrayLike) -> npt.NDArray[np.bool_]:
    z = np.asarray(z, dtype=complex)
    w = np.asarray(w, dtype=complex)
    prod = z * np.conj(w)
    scale = np.abs(z) * np.abs(w)
    return (scale == 0) | ((np.abs(prod.imag) <= 1e-13 * scale) & (prod.real > 0))


def _chord_regime(spec: WeightSpec, z: npt.ArrayLike, w: npt.ArrayLike) -> npt.NDArray[np.bool_]:
    z = np.asarray(z, dtype=complex)
    w = np.asarray(w, dtype=complex)
    t = np.minimum(
        (1.0 - np.abs(z)) ** spec.tau_exponent, (1.0 - np.abs(w)) ** spec.tau_exponent
    )
    return np.abs(z - w) <= CHORD_FACTOR * t


def _chord_err(spec: WeightSpec, z: complex, w: complex) -> float:
    scale = spec.tau_exponent * abs(z - w) / (1.0 - max(abs(z), abs(w)))
    return scale * scale / 24.0


def _canonical(z: complex, w: complex) -> tuple[float, float, float, bool]:
    delta = math.remainder(np.angle(w) - np.angle(z), 2 * math.pi)
    return (
        round(abs(z), 12),
        round(abs(w), 12),
        round(abs(delta), 12),
        delta < 0,
    )


_DISTANCES: LRUCache = LRUCache(maxsize=65536)
_DISTANCES_LOCK = threading.Lock()


def d_tau(
    spec: WeightSpec,
    z: complex,
    w: complex,
    *,
    resolution: int = 64,
    r_max: float = R_MAX,
    refine: bool = True,
    tol: float = 1e-5,
) -> GeodesicResult:
    """Best available ``d_tau``: closed form, chord, or grid plus descent.

    Grid results are computed for the rotated pair ``(|z|, |w| e^{i dtheta})``
    with ``dtheta`` in ``[0, pi]`` and cached, so rotated or reflected queries
    return identical distances.
    """
    z, w = complex(z), complex(w)
    _check_point(z, r_max, "z")
    _check_point(w, r_max, "w")
    if z == w:
        return GeodesicResult(0.0, np.array([z, w]), "radial-closed-form", 0.0)
    if bool(_same_ray(z, w)):
        dist = d_tau_radial(spec, abs(z), abs(w))
        return GeodesicResult(dist, np.array([z, w]), "radial-closed-form", 1e-14)
    if bool(_chord_regime(spec, z, w)):
        dist = float(chord_cost(spec, z, w))
        return GeodesicResult(dist, np.array([z, w]), "chord", _chord_err(spec, z, w))

    a, b, delta, reflected = _canonical(z, w)
    key = (spec, resolution, r_max, refine, tol, a, b, delta)
    with _DISTANCES_LOCK:
        hit = _DISTANCES.get(key)
    if hit is None:
        cz, cw = complex(a), b * complex(math.cos(delta), math.sin(delta))
        hit = d_tau_grid(spec, cz, cw, resolution, r_max=r_max)
        if refine:
            hit = d_tau_refine(spec, hit, tol)
        with _DISTANCES_LOCK:
            _DISTANCES[key] = hit
    path = np.conj(hit.path) if reflected else hit.path.copy()
    path = path * np.exp(1j * np.angle(z))
    path[0], path[-1] = z, w
    return GeodesicResult(hit.distance, path, hit.method, hit.err)


def rho_tau(spec: WeightSpec, z: complex, w: complex, **kwargs: object) -> float:
    """``rho_tau = 1 - exp(-d_tau)`` from the best available ``d_tau``."""
    return d_tau(spec, z, w, **kwargs).rho  # type: ignore[arg-type]


def rho_tau_array(
    spec: WeightSpec,
    z: npt.ArrayLike,
    w: npt.ArrayLike,
    *,
    resolution: int = 64,
    r_max: float = R_MAX,
    refine: bool = True,
    progress: bool = False,
) -> npt.NDArray[np.float64]:
    """Vectorized :func:`rho_tau` over broadcast point arrays.

    Identical, same-ray and chord-regime pairs are handled in bulk; the
    remaining pairs are deduplicated by rotation class before the graph
    search.
    """
    zb, wb = np.broadcast_arrays(np.asarray(z, dtype=complex), np.asarray(w, dtype=complex))
    zf, wf = zb.ravel(), wb.ravel()
    if zf.size and max(np.abs(zf).max(), np.abs(wf).max()) > r_max:
        raise DomainError("z", float(max(np.abs(zf).max(), np.abs(wf).max())), "beyond r_max")
    dist = np.zeros(zf.size)
    todo = zf != wf
    ray = todo & _same_ray(zf, wf)
    dist[ray] = np.abs(
        _antiderivative(spec, np.abs(wf[ray])) - _antiderivative(spec, np.abs(zf[ray]))
    )
    todo &= ~ray
    near = todo & _chord_regime(spec, zf, wf)
    if near.any():
        dist[near] = chord_cost(spec, zf[near], wf[near])
    todo &= ~near

    rest = np.flatnonzero(todo)
    if rest.size:
        groups: dict[tuple[float, float, float], list[int]] = {}
        for i in rest:
            a, b, delta, _ = _canonical(zf[i], wf[i])
            groups.setdefault((a, b, delta), []).append(int(i))
        for (a, b, delta), members in tqdm(
            groups.items(), desc="d_tau", disable=not progress, leave=False
        ):
            i = members[0]
            value = d_tau(
                spec, zf[i], wf[i], resolution=resolution, r_max=r_max, refine=refine
            ).distance
            dist[members] = value
    return (-np.expm1(-dist)).reshape(zb.shape)


# ── Kernel distances ─────────────────────────────────────────────────────


def _log_norms(
    table: MomentTable, z: complex, w: complex, tol: float, n_max: int
) -> tuple[float, float, float, float]:
    kzw = kernel(table, z, w, tol, n_max=n_max)
    kzz = kernel(table, z, z, tol, n_max=n_max).log_abs
    kww = kernel(table, w, w, tol, n_max=n_max).log_abs
    return kzz, kww, kzw.log_abs, kzw.phase


def skwarczynski(
    table: MomentTable, z: complex, w: complex, tol: float = 1e-12, *, n_max: int = N_MAX
) -> float:
    """``sqrt(1 - |K(z, w)| / (||K_z|| ||K_w||))``.

    A radicand below ``-1e-8`` (a Cauchy-Schwarz violation beyond rounding)
    emits a warning; the radicand is clamped to ``[0, 1]``.
    """
    if complex(z) == complex(w):
        return 0.0
    kzz, kww, kzw, _ = _log_norms(table, z, w, tol, n_max)
    radicand = -math.expm1(kzw - 0.5 * (kzz + kww))
    if radicand < -1e-8:
        warnings.warn(
            f"Skwarczynski radicand {radicand:.3e} is negative beyond tolerance; clamped",
            stacklevel=2,
        )
    return math.sqrt(min(max(radicand, 0.0), 1.0))


def kernel_difference_ratio(
    table: MomentTable, z: complex, w: complex, tol: float = 1e-12, *, n_max: int = N_MAX
) -> float:
    """``||K_z - K_w||^2 / (||K_z||^2 + ||K_w||^2)``, in ``[0, 2]``."""
    if complex(z) == complex(w):
        return 0.0
    kzz, kww, kzw, phase = _log_norms(table, z, w, tol, n_max)
    top = max(kzz, kww)
    den = math.exp(kzz - top) + math.exp(kww - top)
    num = den - 2.0 * math.cos(phase) * math.exp(kzw - top)
    return max(num, 0.0) / den


def comparability_report(
    spec: WeightSpec,
    table: MomentTable,
    pairs: Iterable[tuple[complex, complex]],
    *,
    resolution: int = 64,
    r_max: float = R_MAX,
    local_factor: float = CHORD_FACTOR,
    n_max: int = N_MAX,
    progress: bool = False,
) -> ComparabilityReport:
    """Statistics of ``S / rho_tau`` and of ``||K_z - K_w||^2 / (...) / rho_tau^2``.

    ``rho_tau`` is computed at ``resolution`` and again at twice that
    resolution; ``median_change`` is the relative change of the ratio median
    under that refinement.  Pairs with ``z == w`` are dropped.

    Raises:
        DomainError: fewer than two non-degenerate pairs.
    """
    kept = [(complex(z), complex(w)) for z, w in pairs if complex(z) != complex(w)]
    if len(kept) < 2:
        raise DomainError("pairs", len(kept), "need at least two pairs with z != w")
    rows = []
    for z, w in tqdm(kept, desc="comparability", disable=not progress, leave=False):
        rho = d_tau(spec, z, w, resolution=resolution, r_max=r_max).rho
        rho_fine = d_tau(spec, z, w, resolution=2 * resolution, r_max=r_max).rho
        s = skwarczynski(table, z, w, n_max=n_max)
        kd = kernel_difference_ratio(table, z, w, n_max=n_max)
        tz = float(spec.tau(abs(z)))
        rows.append(
            {
                "z_re": z.real,
                "z_im": z.imag,
                "w_re": w.real,
                "w_im": w.imag,
                "rho_tau": rho,
                "rho_tau_fine": rho_fine,
                "skwarczynski": s,
                "ratio": s / rho,
                "ratio_fine": s / rho_fine,
                "kernel_difference_ratio": kd,
                "kernel_ratio": kd / (rho * rho),
                "local": abs(z - w) <= local_factor * tz,
            }
        )
    frame = DataFrame[ComparabilitySchema](pd.DataFrame(rows))
    ratio = frame["ratio"].to_numpy()
    kratio = frame["kernel_ratio"].to_numpy()
    median = float(np.median(ratio))
    median_fine = float(np.median(frame["ratio_fine"].to_numpy()))
    local = frame.loc[frame["local"], "ratio"].to_numpy()
    return {
        "min": float(ratio.min()),
        "max": float(ratio.max()),
        "median": median,
        "spread": float(ratio.max() / ratio.min()),
        "median_refined": median_fine,
        "median_change": abs(median_fine - median) / median,
        "kernel_min": float(kratio.min()),
        "kernel_max": float(kratio.max()),
        "kernel_spread": float(kratio.max() / kratio.min()),
        "local_spread": float(local.max() / local.min()) if local.size else math.nan,
        "tau": f"(1 - r)^{spec.tau_exponent:g}",
        "pairs": frame,
    }


def setinclus_check(
    spec: WeightSpec,
    z: complex,
    w: complex,
    R: float = 0.5,  # noqa: N803
    *,
    C1: float = SETINCLUS_C1,  # noqa: N803
    resolution: int = 64,
    r_max: float = R_MAX,
) -> SetInclusionResult:
    """Check ``d_tau(z, w) >= C1 |z - w| / min(tau(z), tau(w))`` when ``d_tau < R``.

    ``margin`` is ``d_tau - C1 |z - w| / min(tau)``; the status is
    ``"skipped"`` when the locality precondition fails.
    """
    dist = d_tau(spec, z, w, resolution=resolution, r_max=r_max).distance
    t = min(float(spec.tau(abs(z))), float(spec.tau(abs(w))))
    lower = C1 * abs(complex(z) - complex(w)) / t
    if dist >= R:
        return {
            "status": "skipped",
            "holds": None,
            "margin": math.nan,
            "d_tau": dist,
            "lower_bound": lower,
        }
    holds = dist >= lower * (1.0 - 1e-12)
    return {
        "status": "holds" if holds else "fails",
        "holds": holds,
        "margin": dist - lower,
        "d_tau": dist,
        "lower_bound": lower,
    }


def decay_bound_check(
    spec: WeightSpec,
    pairs: Sequence[tuple[complex, complex]],
    M: int,  # noqa: N803
    **kwargs: object,
) -> float:
    """``max e^{-d_tau} (|z - w| / min tau)^M`` over the pairs (finite means bounded)."""
    if M < 1:
        raise DomainError("M", M, "exponent must be a positive integer")
    best = 0.0
    for z, w in pairs:
        if complex(z) == complex(w):
            continue
        dist = d_tau(spec, z, w, **kwargs).distance  # type: ignore[arg-type]
        t = min(float(spec.tau(abs(z))), float(spec.tau(abs(w))))
        best = max(best, math.exp(-dist) * (abs(complex(z) - complex(w)) / t) ** M)
    return best


def triangle_audit(
    spec: WeightSpec,
    triples: Sequence[tuple[complex, complex, complex]],
    tol: float = 1e-6,
    **kwargs: object,
) -> TriangleAudit:
    """Metric axioms of ``rho_tau`` on sampled triples."""
    violations = 0
    worst = -math.inf
    asymmetric = 0
    for a, b, c in triples:
        ab = rho_tau(spec, a, b, **kwargs)
        bc = rho_tau(spec, b, c, **kwargs)
        ac = rho_tau(spec, a, c, **kwargs)
        ba = rho_tau(spec, b, a, **kwargs)
        if abs(ab - ba) > tol:
            asymmetric += 1
        excess = ac - (ab + bc)
        worst = max(worst, excess)
        if excess > tol or min(ab, bc, ac) < 0:
            violations += 1
    return {
        "checked": len(triples),
        "violations": violations,
        "max_excess": worst,
        "asymmetric": asymmetric,
    }
