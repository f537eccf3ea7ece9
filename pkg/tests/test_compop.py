"""Unit tests for bergman_lab.compop."""

import math

import numpy as np
import pytest

from bergman_lab.compop import (
    TEMPLATES,
    VERDICT_LABELS,
    SelfMap,
    angular_derivative,
    boundedness_profile,
    carleson_ratio,
    constant,
    contact_order_check,
    contact_perturbation,
    difference_boundedness_check,
    difference_criterion,
    essential_norm_lower,
    half_one_plus_z,
    half_one_plus_z2,
    identity,
    omegatau_check,
    order_data_check,
    parse_complex,
    parse_map,
    scaled,
    trend_verdict,
    uniform_bound_check,
    weight_ratio,
    weighted_compactness_check,
)
from bergman_lab.exceptions import (
    BoundaryTouchError,
    DomainError,
    HypothesisError,
    SelfMapError,
    SpecParseError,
)
from bergman_lab.weights import WeightSpec

RADII = (0.9, 0.95, 0.99, 0.995)

# ── self-maps ────────────────────────────────────────────────────────────────


def test_self_map_evaluation():
    phi = half_one_plus_z2()
    assert phi(0.0) == 0.5
    assert phi(1j) == 0j
    np.testing.assert_allclose(phi(np.array([0.5, -0.5])), [0.625, 0.625])
    assert phi.degree == 2
    assert phi.max_modulus == pytest.approx(1.0)


def test_self_map_rejects_escaping_polynomial():
    with pytest.raises(SelfMapError):
        SelfMap((0.0, 1.5))
    with pytest.raises(SelfMapError):
        SelfMap((0.6, 0.6))


def test_checked_raises_on_boundary_touch():
    with pytest.raises(BoundaryTouchError):
        constant(1.0).checked(np.array([0.1, 0.2]))


def test_blend():
    mid = identity().blend(constant(0.0), 0.5)
    assert mid.coeffs == (0j, 0.5 + 0j)
    with pytest.raises(DomainError):
        identity().blend(constant(0.0), 1.5)


def test_contact_perturbation_stays_inside():
    psi = contact_perturbation()
    assert psi.max_modulus <= 1.0 + 1e-12
    assert psi(1.0) == pytest.approx(1.0)


def test_derivative_and_rotation():
    phi = half_one_plus_z2()
    assert phi.derivative()(1.0) == pytest.approx(1.0)
    assert phi.derivative(2)(0.3) == pytest.approx(1.0)
    theta = 0.7
    rot = complex(math.cos(theta), math.sin(theta))
    turned = phi.rotate(theta)
    z = 0.4 - 0.2j
    assert turned(rot * z) == pytest.approx(rot * phi(z))
    assert str(turned) == "half_one_plus_z2 rotated 0.7"


# ── parsing ──────────────────────────────────────────────────────────────────


@pytest.mark.parametrize(
    "token, expected",
    [("0.5", 0.5), ("0.5-0.25i", 0.5 - 0.25j), ("-i", -1j), ("0.3i", 0.3j), (" 1 ", 1.0)],
)
def test_parse_complex(token: str, expected: complex):
    assert parse_complex(token) == expected


def test_parse_complex_rejects_garbage():
    with pytest.raises(SpecParseError):
        parse_complex("half")


def test_parse_map_poly_and_templates():
    assert parse_map("map poly 0.5,0,0.5").coeffs == half_one_plus_z2().coeffs
    assert parse_map("template half_one_plus_z2") == half_one_plus_z2()
    assert parse_map("map template scaled c=0.3") == scaled(0.3)
    assert parse_map("map template constant c=0.2+0.1i") == constant(0.2 + 0.1j)
    assert parse_map("map template sec4_psi") == contact_perturbation()
    assert set(TEMPLATES) >= {"identity", "contact_perturbation", "sec4_psi"}


def test_unnamed_map_round_trips():
    phi = SelfMap((0.25, 0.5j))
    assert parse_map(str(phi)) == phi


@pytest.mark.parametrize(
    "text",
    [
        "",
        "map",
        "map spline 1,2",
        "map poly",
        "map template nope",
        "map template scaled q=1",
        "map template scaled c",
    ],
)
def test_parse_map_rejects_malformed(text: str):
    with pytest.raises(SpecParseError):
        parse_map(text)


def test_parse_map_rejects_non_self_map():
    with pytest.raises(SelfMapError):
        parse_map("map poly 2,0")


# ── weight ratio and boundedness ─────────────────────────────────────────────


def test_weight_ratio_real_axis(spec: WeightSpec):
    # eta((1 + r^2) / 2) - eta(r) = 1 / (1 + r)
    r = np.array([0.0, 0.5, 0.9])
    np.testing.assert_allclose(weight_ratio(spec, half_one_plus_z2(), r), 1.0 / (1.0 + r))
    assert isinstance(weight_ratio(spec, identity(), 0.3), float)


def test_weight_ratio_errors(spec: WeightSpec):
    with pytest.raises(DomainError):
        weight_ratio(spec, identity(), 1.0)
    with pytest.raises(BoundaryTouchError):
        weight_ratio(spec, constant(1.0), 0.5)


@pytest.mark.parametrize(
    "phi, verdict",
    [
        (identity(), "bounded-nonvanishing"),
        (scaled(0.5), "decays-to-zero"),
        (half_one_plus_z2(), "bounded-nonvanishing"),
        (half_one_plus_z(), "unbounded"),
    ],
)
def test_boundedness_verdicts(spec: WeightSpec, phi: SelfMap, verdict: str):
    report = boundedness_profile(spec, phi, RADII)
    assert report.verdict == verdict
    assert report.kind == "boundedness"
    assert VERDICT_LABELS["boundedness"][report.verdict]


def test_boundedness_profile_values(spec: WeightSpec):
    report = boundedness_profile(spec, half_one_plus_z2(), RADII)
    for r, log_sup in zip(RADII, report.log_sup_values):
        assert log_sup >= 1.0 / (1.0 + r) - 1e-9
    frame = report.to_frame()
    assert list(frame.columns) == ["r", "sup_value", "log_sup_value", "argmax_theta"]
    assert len(report.angular_slices) == 8 * len(RADII)


def test_profile_argument_checks(spec: WeightSpec):
    with pytest.raises(DomainError):
        boundedness_profile(spec, identity(), RADII, angular_n=512)
    with pytest.raises(DomainError):
        boundedness_profile(spec, identity(), (0.9, 0.95))
    with pytest.raises(DomainError):
        boundedness_profile(spec, identity(), (0.9, 0.95, 0.94))
    with pytest.raises(DomainError):
        boundedness_profile(spec, identity(), (0.9, 0.95, 0.9995))


@pytest.mark.parametrize(
    "logs, verdict",
    [
        ([-math.inf] * 3, "decays-to-zero"),
        ([0.0, -1.0, -3.0], "decays-to-zero"),
        ([0.0, -0.1, -0.2], "bounded-nonvanishing"),
        ([0.0, 0.1, 0.2], "bounded-nonvanishing"),
        ([1.0, 2.0, 3.0], "unbounded"),
        ([0.0, 0.0, 60.0], "unbounded"),
        ([5.0, 0.0, 0.5, 1.0], "bounded-nonvanishing"),
    ],
)
def test_trend_verdict(logs: list[float], verdict: str):
    assert trend_verdict(logs) == verdict


# ── difference criteria ──────────────────────────────────────────────────────


def test_difference_of_equal_maps_is_compact(spec: WeightSpec):
    phi = half_one_plus_z2()
    report = difference_criterion(spec, phi, phi, RADII)
    assert report.verdict == "decays-to-zero"
    assert np.all(report.log_sup_values == -np.inf)
    assert VERDICT_LABELS["difference"][report.verdict] == "compact"


def test_difference_requires_bounded_operators(spec: WeightSpec):
    with pytest.raises(HypothesisError):
        difference_criterion(spec, half_one_plus_z(), half_one_plus_z2(), RADII)


def test_difference_boundedness_skips_hypothesis(spec: WeightSpec):
    phi = half_one_plus_z()
    report = difference_boundedness_check(spec, phi, phi, RADII)
    assert report.kind == "difference-boundedness"
    assert report.verdict == "decays-to-zero"


def test_weighted_compactness_of_equal_maps(spec: WeightSpec):
    phi = scaled(0.5)
    out = weighted_compactness_check(spec, phi, phi, RADII)
    assert set(out) == {"phi", "psi"}
    assert all(rep.verdict == "decays-to-zero" for rep in out.values())


def test_essential_norm_lower_without_separated_samples(spec: WeightSpec):
    phi = half_one_plus_z2()
    assert essential_norm_lower(spec, phi, phi) == 0.0


def test_essential_norm_lower_for_antipodal_maps(spec: WeightSpec):
    value = essential_norm_lower(spec, scaled(0.999), scaled(-0.999))
    assert 0.0 < value < math.inf


def test_uniform_bound_along_segment(spec: WeightSpec):
    result = uniform_bound_check(
        spec, half_one_plus_z2(), contact_perturbation(), (0.0, 0.5, 1.0), RADII
    )
    assert result["holds"]
    assert len(result["frame"]) == 3 * len(RADII)


# ── boundary regularity ──────────────────────────────────────────────────────


def test_angular_derivative():
    assert angular_derivative(identity(), 1.0) == pytest.approx(1.0)
    assert angular_derivative(half_one_plus_z(), 1.0) == pytest.approx(0.5)
    assert angular_derivative(half_one_plus_z2(), 1.0) == pytest.approx(1.0)
    assert angular_derivative(scaled(0.5), 1.0) == math.inf
    with pytest.raises(DomainError):
        angular_derivative(identity(), 0.5)


def test_order_data():
    phi, psi = half_one_plus_z2(), contact_perturbation()
    assert order_data_check(phi, psi, 1.0, 4)
    assert order_data_check(phi, psi, -1.0, 4)
    assert not order_data_check(phi, psi, 1.0, 5)
    assert not order_data_check(phi, psi, 1j, 0)
    with pytest.raises(DomainError):
        order_data_check(phi, psi, 1.0, -1)


def test_contact_order():
    report = contact_order_check(half_one_plus_z2(), 1.0, 4)
    assert report["status"] == "holds"
    assert report["samples"] > 0
    assert report["inf_value"] > 1e-3
    off = contact_order_check(half_one_plus_z2(), 1j, 2)
    assert off["status"] == "inconclusive"
    assert off["holds"] is None
    with pytest.raises(DomainError):
        contact_order_check(identity(), 1.0, 0.0)


@pytest.mark.parametrize("zeta", [1.0, -1.0])
def test_contact_order_two_at_both_preimages(zeta: float):
    # Both zeta = 1 and zeta = -1 map to the contact point 1.
    report = contact_order_check(half_one_plus_z2(), zeta, 2)
    assert report["status"] == "holds"
    assert report["inf_value"] >= 0.5


def test_omegatau_decay(spec: WeightSpec):
    report = omegatau_check(spec, half_one_plus_z2(), contact_perturbation(), 1.0)
    assert report["m"] == 2
    assert report["order_data"]
    assert report["hypotheses_hold"]
    assert report["decays"]
    assert len(report["profile"]) == 8


# ── pullback measures ────────────────────────────────────────────────────────


def test_carleson_ratio_identity_is_disk_area(spec: WeightSpec):
    est = carleson_ratio(spec, identity(), 0.0, seed=4)
    assert est["delta"] == pytest.approx(1.0 / 12.0)
    assert abs(est["ratio"] - est["delta"] ** 2) < 5 * est["std_err"]
    assert est["note"] == ""


def test_carleson_ratio_without_hits(spec: WeightSpec):
    est = carleson_ratio(spec, constant(0.9), -0.5)
    assert est["ratio"] == 0.0
    assert est["note"]


def test_carleson_ratio_argument_checks(spec: WeightSpec):
    with pytest.raises(DomainError):
        carleson_ratio(spec, identity(), 0.0, mc_samples=1000)
    with pytest.raises(DomainError):
        carleson_ratio(spec, identity(), 1.0)
