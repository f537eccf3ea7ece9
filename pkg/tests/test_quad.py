"""Unit tests for bergman_lab.quad."""

import math

import numpy as np
import pytest

from bergman_lab.exceptions import DomainError
from bergman_lab.kernel import moment_oracle
from bergman_lab.quad import (
    disk_integral,
    gauss_legendre_unit,
    mc_disk,
    radial_integral,
    radial_log_integral,
)
from bergman_lab.utils import thread_map
from bergman_lab.weights import WeightSpec

# ── Gauss-Legendre ───────────────────────────────────────────────────────────


def test_gauss_legendre_exact_for_polynomials():
    x, w = gauss_legendre_unit(8)
    assert w.sum() == pytest.approx(1.0)
    assert np.sum(w * x**15) == pytest.approx(1.0 / 16.0)
    assert np.all((x > 0) & (x < 1))


# ── radial_integral ──────────────────────────────────────────────────────────


def test_polynomial_integral():
    res = radial_integral(lambda r: 3 * r**2, tol=1e-12, boundary_map="none")
    assert res.converged
    assert res.value == pytest.approx(1.0, rel=1e-12)


def test_integrable_singularity_with_log_layer():
    # int_0^1 2r (1 - r)^(-1/2) dr = 8/3
    res = radial_integral(lambda r: 2 * r / np.sqrt(1 - r), tol=1e-10)
    assert res.converged
    assert res.value == pytest.approx(8.0 / 3.0, rel=1e-8)


def test_boundary_layer_moment_matches_midpoint_oracle(spec: WeightSpec):
    res = radial_integral(lambda r: 2 * r * np.exp(-2.0 / (1.0 - r)), tol=1e-10)
    assert res.converged
    oracle = math.exp(moment_oracle(spec, 0))
    assert res.value == pytest.approx(oracle, rel=1e-8)


def test_cut_radius():
    res = radial_integral(lambda r: np.ones_like(r), tol=1e-12, r_cut=0.5)
    assert res.value == pytest.approx(0.5, rel=1e-10)


def test_r_min_offsets_lower_limit():
    res = radial_integral(lambda r: 2 * r, tol=1e-12, boundary_map="none", r_min=0.5)
    assert res.value == pytest.approx(0.75, rel=1e-12)


@pytest.mark.parametrize(
    "kwargs",
    [{"tol": 0.0}, {"tol": -1.0}, {"boundary_map": "tanh"}, {"r_cut": 1.0}, {"r_min": 1.0}],
)
def test_invalid_arguments(kwargs: dict):
    with pytest.raises(DomainError):
        radial_integral(lambda r: r, **kwargs)


def test_panel_budget_exhaustion_reports_not_converged():
    res = radial_integral(
        lambda r: np.sin(1.0 / (1.0 - r + 1e-9)), tol=1e-14, boundary_map="none", max_panels=16
    )
    assert not res.converged
    assert math.isfinite(res.value)


def test_log_integral_handles_underflowing_integrand():
    # int_0^1 2 r exp(-2000 / (1 - r)) dr underflows in linear scale
    res = radial_log_integral(lambda r: math.log(2) + np.log(r) - 2000.0 / (1.0 - r), tol=1e-10)
    assert res.converged
    assert -2100.0 < res.value < -2000.0


def test_log_integral_of_vanishing_integrand():
    res = radial_log_integral(lambda r: np.full_like(r, -np.inf), tol=1e-8)
    assert res.value == -math.inf


# ── disk_integral / Monte Carlo ──────────────────────────────────────────────


def test_disk_integral_area_and_moment():
    area = disk_integral(lambda z: np.ones(z.shape), tol=1e-12, angular_n=8)
    assert area.value == pytest.approx(1.0, rel=1e-10)
    second = disk_integral(lambda z: np.abs(z) ** 2, tol=1e-12, angular_n=8)
    assert second.value == pytest.approx(0.5, rel=1e-10)


def test_disk_integral_cancels_odd_harmonics():
    res = disk_integral(lambda z: z.real, tol=1e-10, angular_n=16)
    assert abs(res.value) < 1e-12


def test_mc_disk_mean_and_error():
    res = mc_disk(7, 200_000, lambda z: np.abs(z) ** 2)
    assert res.n == 200_000
    assert abs(res.value - 0.5) < 5 * res.std_err


def test_mc_disk_is_reproducible_across_executors():
    f = lambda z: np.abs(z)  # noqa: E731
    inline = mc_disk(11, 20_000, f, tasks=4)
    threaded = mc_disk(
        11, 20_000, f, tasks=4, map_fn=lambda fn, jobs: thread_map(fn, jobs, threads=4)
    )
    assert inline == threaded


def test_mc_disk_rejects_small_samples():
    with pytest.raises(DomainError):
        mc_disk(0, 10, lambda z: z.real)
