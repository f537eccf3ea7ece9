"""Unit tests for bergman_lab.metric."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bergman_lab.exceptions import DomainError
from bergman_lab.kernel import MomentTable
from bergman_lab.metric import (
    chord_cost,
    comparability_report,
    d_tau,
    d_tau_grid,
    d_tau_radial,
    d_tau_refine,
    decay_bound_check,
    kernel_difference_ratio,
    polyline_cost,
    rho_tau,
    rho_tau_array,
    setinclus_check,
    skwarczynski,
    triangle_audit,
)
from bergman_lab.weights import WeightSpec

# ── closed forms ─────────────────────────────────────────────────────────────


def test_radial_closed_form(spec: WeightSpec):
    # F(r) = 2 ((1 - r)^(-1/2) - 1)
    assert d_tau_radial(spec, 0.0, 0.75) == pytest.approx(2.0)
    assert d_tau_radial(spec, 0.75, 0.0) == pytest.approx(2.0)
    assert d_tau_radial(spec, 0.75, 0.96) == pytest.approx(6.0)


def test_same_ray_uses_closed_form(spec: WeightSpec):
    res = d_tau(spec, 0j, 0.75 + 0j)
    assert res.method == "radial-closed-form"
    assert res.distance == pytest.approx(2.0)
    assert res.rho == pytest.approx(1.0 - math.exp(-2.0))
    rotated = d_tau(spec, 0.3j, 0.75j)
    assert rotated.distance == pytest.approx(d_tau_radial(spec, 0.3, 0.75))


def test_identical_points(spec: WeightSpec):
    assert d_tau(spec, 0.4 + 0.4j, 0.4 + 0.4j).distance == 0.0
    assert rho_tau(spec, 0.9, 0.9) == 0.0


def test_polyline_cost_of_radial_segment(spec: WeightSpec):
    path = np.linspace(0.0, 0.75, 401).astype(complex)
    assert polyline_cost(spec, path) == pytest.approx(2.0, rel=1e-6)


def test_chord_regime(spec: WeightSpec):
    z, w = 0.5 + 0j, 0.5 + 0.001j
    res = d_tau(spec, z, w)
    assert res.method == "chord"
    assert res.distance == pytest.approx(0.001 / 0.5**1.5, rel=1e-3)
    assert res.distance == pytest.approx(chord_cost(spec, z, w))


# ── graph and descent ────────────────────────────────────────────────────────


def test_grid_against_radial_oracle(spec: WeightSpec):
    grid = d_tau_grid(spec, 0j, 0.75 + 0j, 64)
    assert grid.method == "grid"
    assert grid.distance == pytest.approx(2.0, rel=0.03)
    refined = d_tau_refine(spec, grid)
    assert refined.distance <= grid.distance
    assert refined.distance == pytest.approx(2.0, rel=1e-3)


def test_refine_never_exceeds_grid(spec: WeightSpec):
    for z, w in [(0.5, 0.5j), (0.8, -0.3 + 0.6j), (0.2 - 0.1j, 0.7 + 0.4j)]:
        grid = d_tau_grid(spec, z, w, 32)
        refined = d_tau_refine(spec, grid)
        assert refined.distance <= grid.distance
        assert refined.path[0] == complex(z)
        assert refined.path[-1] == complex(w)


def test_geodesic_between_bounds(spec: WeightSpec):
    z, w = 0.6 + 0j, 0.6 * np.exp(1.2j)
    dist = d_tau(spec, z, w).distance
    assert dist <= chord_cost(spec, z, w) * (1 + 1e-3)
    assert dist >= d_tau_radial(spec, abs(z), abs(w))
    assert dist > 0


def test_rotation_and_reflection_invariance(spec: WeightSpec):
    base = d_tau(spec, 0.5, 0.5j).distance
    assert d_tau(spec, 0.5j, -0.5).distance == base
    assert d_tau(spec, 0.5, -0.5j).distance == base


def test_symmetry(spec: WeightSpec):
    z, w = 0.3 + 0.2j, -0.5 + 0.4j
    assert d_tau(spec, z, w).distance == pytest.approx(d_tau(spec, w, z).distance, rel=1e-3)


def test_grid_rejects_coarse_resolution_and_outside_points(spec: WeightSpec):
    with pytest.raises(DomainError):
        d_tau_grid(spec, 0.1, 0.2j, 4)
    with pytest.raises(DomainError):
        d_tau(spec, 0.1, 0.9995)


def test_rho_tau_array_matches_scalar(spec: WeightSpec):
    z = np.array([[0.0, 0.5], [0.3 + 0.3j, 0.7]])
    w = np.array([[0.75, 0.5j], [0.3 + 0.3j, 0.7 + 0.001j]])
    arr = rho_tau_array(spec, z, w)
    assert arr.shape == (2, 2)
    for idx in np.ndindex(2, 2):
        assert arr[idx] == pytest.approx(rho_tau(spec, z[idx], w[idx]), rel=1e-12)
    assert np.all((arr >= 0) & (arr < 1))


# ── kernel distances ─────────────────────────────────────────────────────────


def test_skwarczynski_range_and_symmetry(table: MomentTable):
    z, w = 0.4 + 0.1j, -0.2 + 0.6j
    s = skwarczynski(table, z, w)
    assert 0.0 < s <= 1.0
    assert s == pytest.approx(skwarczynski(table, w, z), abs=1e-12)
    assert skwarczynski(table, z, z) == 0.0


def test_kernel_difference_ratio_range(table: MomentTable):
    near = kernel_difference_ratio(table, 0.5, 0.51)
    far = kernel_difference_ratio(table, 0.9, -0.9)
    assert 0.0 <= near < far <= 2.0
    assert kernel_difference_ratio(table, 0.3, 0.3) == 0.0


def test_comparability_report(spec: WeightSpec, table: MomentTable):
    pairs = [(0.5, 0.5j), (0.6, 0.62), (0.3 + 0.3j, 0.7), (0.2, 0.2)]
    report = comparability_report(spec, table, pairs, resolution=16)
    assert len(report["pairs"]) == 3
    assert report["min"] <= report["median"] <= report["max"]
    assert report["spread"] >= 1.0
    assert report["tau"] == "(1 - r)^1.5"
    assert report["median_change"] >= 0.0


def test_comparability_needs_two_pairs(spec: WeightSpec, table: MomentTable):
    with pytest.raises(DomainError):
        comparability_report(spec, table, [(0.1, 0.2), (0.3, 0.3)])


# ── audits ───────────────────────────────────────────────────────────────────


def test_setinclus_check(spec: WeightSpec):
    local = setinclus_check(spec, 0.5, 0.52)
    assert local["status"] == "holds"
    assert local["holds"] is True
    assert local["margin"] >= 0
    far = setinclus_check(spec, 0.0, 0.9)
    assert far["status"] == "skipped"
    assert far["holds"] is None
    assert math.isnan(far["margin"])


def test_setinclus_holds_on_random_radial_pairs(spec: WeightSpec):
    rng = np.random.default_rng(3)
    for r in rng.uniform(0.0, 0.99, 100):
        w = r + 0.3 * float(spec.tau(r))
        out = setinclus_check(spec, r, w)
        assert out["status"] == "holds", (r, out)
        assert out["margin"] >= 0


def test_decay_bound_check(spec: WeightSpec):
    pairs = [(0.0, 0.5), (0.5, 0.9), (0.1, 0.1)]
    value = decay_bound_check(spec, pairs, 2)
    assert 0.0 < value < math.inf
    with pytest.raises(DomainError):
        decay_bound_check(spec, pairs, 0)


def test_triangle_audit(spec: WeightSpec):
    triples = [(0j, 0.5 + 0j, 0.5j), (0.3 + 0j, -0.3 + 0j, 0.6j), (0.1j, 0.8 + 0j, -0.4 + 0j)]
    audit = triangle_audit(spec, triples, resolution=32)
    assert audit["checked"] == 3
    assert audit["violations"] == 0
    assert audit["max_excess"] < 0


# ── properties ───────────────────────────────────────────────────────────────

radii = st.floats(min_value=0.0, max_value=0.99)
angles = st.floats(min_value=0.0, max_value=2 * math.pi)


@settings(deadline=None, max_examples=60)
@given(a=radii, b=radii, c=radii)
def test_radial_distance_is_additive(a: float, b: float, c: float):
    a, b, c = sorted((a, b, c))
    w = WeightSpec(1.0, 1.0)
    total = d_tau_radial(w, a, c)
    assert d_tau_radial(w, a, b) + d_tau_radial(w, b, c) == pytest.approx(total, abs=1e-9)


@settings(deadline=None, max_examples=60)
@given(r1=radii, r2=radii, t1=angles, t2=angles, theta=angles)
def test_chord_cost_is_rotation_invariant(r1: float, r2: float, t1: float, t2: float, theta: float):
    w = WeightSpec(1.0, 1.0)
    z, v = r1 * complex(math.cos(t1), math.sin(t1)), r2 * complex(math.cos(t2), math.sin(t2))
    rot = complex(math.cos(theta), math.sin(theta))
    expected = chord_cost(w, z, v)
    assert chord_cost(w, rot * z, rot * v) == pytest.approx(expected, rel=1e-9, abs=1e-12)
