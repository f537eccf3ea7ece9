"""Unit tests for the BergmanLab dataclass and its mixins."""

import math
import tomllib
from pathlib import Path

import numpy as np
import pytest

from bergman_lab import BergmanLab, WeightSpec, __version__
from bergman_lab.compop import constant, half_one_plus_z2, identity, scaled
from bergman_lab.exceptions import DomainError, SpecParseError, TruncationError, WeightClassError

RADII = (0.9, 0.95, 0.99, 0.995)

# ── settings ─────────────────────────────────────────────────────────────────


def test_builtin_defaults():
    lab = BergmanLab()
    assert lab.weight == WeightSpec(1.0, 1.0)
    assert lab.tol == 1e-10
    assert lab.r_max == 0.999
    assert lab.n_max == 20000
    assert lab.resolution == 64
    assert lab.angular_n == 1024
    assert lab.seed == 0
    assert lab.threads == 4
    assert lab.locality_r == 0.5


def test_env_defaults(monkeypatch: pytest.MonkeyPatch):
    monkeypatch.setenv("BERGMAN_LAB_WEIGHT", "A=2 alpha=3")
    monkeypatch.setenv("BERGMAN_LAB_RESOLUTION", "32")
    monkeypatch.setenv("BERGMAN_LAB_TOL", "1e-8")
    lab = BergmanLab()
    assert lab.weight == WeightSpec(2.0, 3.0)
    assert lab.resolution == 32
    assert lab.tol == 1e-8


def test_explicit_settings_beat_env(monkeypatch: pytest.MonkeyPatch):
    monkeypatch.setenv("BERGMAN_LAB_SEED", "9")
    assert BergmanLab(seed=3).seed == 3


@pytest.mark.parametrize(
    "kwargs",
    [
        {"tol": 0.0},
        {"r_max": 1.0},
        {"resolution": 4},
        {"n_max": 8},
        {"seed": "seven"},
    ],
)
def test_invalid_settings(kwargs: dict):
    with pytest.raises(DomainError):
        BergmanLab(**kwargs)


def test_invalid_weight_text():
    with pytest.raises(SpecParseError):
        BergmanLab(weight="A=one")
    with pytest.raises(WeightClassError):
        BergmanLab(weight="alpha=-1")


def test_with_settings_gives_fresh_lab(lab: BergmanLab):
    lab.distance(0.1, 0.5j)
    other = lab.with_settings(resolution=32)
    assert other.resolution == 32
    assert other.weight == lab.weight
    assert not hasattr(other, "_cache_distance")


def test_provenance(lab: BergmanLab):
    prov = lab.provenance(command="hsnorm")
    assert prov["version"] == __version__
    assert prov["weight"] == "weight A=1 alpha=1"
    assert prov["command"] == "hsnorm"
    assert prov["resolution"] == 64


def test_runtime_dependencies_carry_no_extras():
    manifest = Path(__file__).resolve().parents[1] / "pyproject.toml"
    deps = tomllib.loads(manifest.read_text(encoding="utf-8"))["project"]["dependencies"]
    assert "pandas>=2.2.3" in deps
    assert not any("[" in dep for dep in deps)


def test_map_keeps_order():
    lab = BergmanLab(threads=3)
    assert lab.map(lambda x: x * x, range(10)) == [x * x for x in range(10)]


# ── mixins ───────────────────────────────────────────────────────────────────


def test_weight_audit(lab: BergmanLab):
    audit = lab.weight_audit(samples=400)
    assert audit["c2"] == pytest.approx(1.5)
    assert audit["lipschitz_violations"] == 0
    assert audit["equiquan_violations"] == 0
    profile = lab.weight_profile(grid_size=200)
    assert (profile["tau2_laplacian"] > 1.9).all()


def test_moments_are_cached(lab: BergmanLab):
    assert lab.moments() is lab.moments()
    assert lab.table.N == 256
    assert len(lab.moment_frame(16)) == 17


def test_kernel_values(lab: BergmanLab):
    frame = lab.kernel_values([(0.0, 0.5), (0.3 + 0.1j, 0.3 + 0.1j)])
    assert len(frame) == 2
    assert frame.loc[0, "log_abs"] == pytest.approx(-lab.table.log_m[0])
    assert frame.loc[1, "phase"] == 0.0


def test_gram_eigenvalues(lab: BergmanLab):
    eig = lab.gram_eigenvalues([0.1, 0.5j, -0.4 + 0.2j])
    assert eig.min() > -1e-10
    assert eig.sum() == pytest.approx(3.0)


def test_reproducing_errors(lab: BergmanLab):
    frame = lab.with_settings(angular_n=64).reproducing_errors([0.4 + 0.2j], [0, 2])
    assert list(frame["k"]) == [0, 2]
    assert (frame["error"] < 1e-6).all()


def test_distance_field(lab: BergmanLab):
    frame = lab.distance_field(0j, [0.75, 0.5j])
    assert frame.loc[0, "d_tau"] == pytest.approx(2.0)
    assert frame.loc[0, "rho_tau"] == pytest.approx(1.0 - math.exp(-2.0))
    assert 0.0 < frame.loc[1, "skwarczynski"] <= 1.0
    bare = lab.distance_field(0j, [0.75], with_kernel=False)
    assert np.isnan(bare.loc[0, "skwarczynski"])


def test_sample_pairs_are_reproducible(lab: BergmanLab):
    a = lab.sample_pairs(20, radius=0.9)
    assert a == lab.sample_pairs(20, radius=0.9)
    assert a != lab.sample_pairs(20, radius=0.9, seed=1)
    assert all(abs(z) <= 0.9 and abs(w) <= 0.9 for z, w in a)


def test_boundedness_and_difference(lab: BergmanLab):
    assert lab.boundedness(scaled(0.5), RADII).verdict == "decays-to-zero"
    phi = half_one_plus_z2()
    assert lab.difference(phi, phi, RADII).verdict == "decays-to-zero"


def test_carleson_uses_lab_seed(lab: BergmanLab):
    a = lab.carleson(identity(), 0.0)
    b = lab.carleson(identity(), 0.0)
    assert a == b
    assert a["samples"] == 100_000


def test_hs_norm_routes(lab: BergmanLab):
    out = lab.hs_norm(constant(0.0), constant(0.5), route="integral")
    assert set(out) == {"integral"}
    assert out["integral"].finite


def test_segment_bound(lab: BergmanLab):
    out = lab.with_settings(resolution=32).segment_bound(0.1, 0.6j, (0.0, 1.0))
    assert out["constant"] == pytest.approx(1.0)


def test_tau_constants_cached(lab: BergmanLab):
    assert lab.tau_constants() is lab.tau_constants()
    assert lab.tau_constants().c2 == pytest.approx(1.5)


def test_kernel_diagnostics(lab: BergmanLab):
    m0 = math.exp(lab.table.log_m[0])
    assert lab.lp_ratio(0.0) == pytest.approx(math.exp(-2.0) / m0, rel=1e-6)
    assert lab.test_function(0.5, 0.52) > 0
    fit = lab.decay_rate([(0.0, 0.5), (0.0, 0.75), (0.1j, 0.8j)])
    assert len(fit["pairs"]) == 3


def test_ring_diagnostics_outrun_point_budget():
    lab = BergmanLab(weight=WeightSpec(1.0, 1.0), n_max=500, threads=1, progress=False)
    assert math.isfinite(lab.lp_ratio(0.9, 1.0))
    with pytest.raises(TruncationError):
        lab.kernel_value(0.99, 0.99)


def test_local_metric_checks(lab: BergmanLab):
    assert lab.setinclus(0.5, 0.52)["holds"] is True
    audit = lab.with_settings(resolution=32).triangles(n=2)
    assert audit["checked"] == 2
    assert audit["violations"] == 0


@pytest.mark.slow
def test_bounded_pair_example(lab: BergmanLab):
    rep = lab.bounded_pair_example(radii=RADII)
    assert rep["phi"] == "bounded-noncompact"
    assert rep["psi"] == "bounded-noncompact"
    assert rep["difference"] == "compact"
    assert rep["real_axis_ratio"] == pytest.approx(math.exp(0.5), rel=0.02)
    assert set(rep["omegatau"]) == {"1.0", "-1.0"}
    assert set(rep["profiles"]["kind"]) == {"phi", "psi", "difference"}
