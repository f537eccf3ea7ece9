"""Shared pytest fixtures for the unit test suite."""

import pytest

from bergman_lab import BergmanLab, WeightSpec, compute_moments
from bergman_lab.kernel import MomentTable

# Every BERGMAN_LAB_* setting, so a developer's environment cannot leak into tests.
_ENV_VARS = (
    "BERGMAN_LAB_WEIGHT",
    "BERGMAN_LAB_TOL",
    "BERGMAN_LAB_R_MAX",
    "BERGMAN_LAB_N_MAX",
    "BERGMAN_LAB_RESOLUTION",
    "BERGMAN_LAB_ANGULAR_N",
    "BERGMAN_LAB_SEED",
    "BERGMAN_LAB_THREADS",
    "BERGMAN_LAB_LOCALITY_R",
)


@pytest.fixture(autouse=True)
def _clean_env(monkeypatch: pytest.MonkeyPatch) -> None:
    for var in _ENV_VARS:
        monkeypatch.delenv(var, raising=False)


@pytest.fixture(scope="session")
def spec() -> WeightSpec:
    """The reference weight ``eta = 1 / (1 - r)``."""
    return WeightSpec(A=1.0, alpha=1.0)


@pytest.fixture(scope="session")
def table(spec: WeightSpec) -> MomentTable:
    return compute_moments(spec, 256, 1e-10)


@pytest.fixture
def lab() -> BergmanLab:
    """Lab on the reference weight with progress bars off and inline sweeps."""
    return BergmanLab(weight=WeightSpec(1.0, 1.0), threads=1, progress=False)
