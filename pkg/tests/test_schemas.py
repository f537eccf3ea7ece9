"""Schema tests: real frames validate, and every schema has consistent bounds.

``DataFrame[Schema](frame)`` is only an annotation, so the frames each
producer returns are validated here explicitly.  Hypothesis then draws
frames from every schema's strategy to catch bounds that contradict each
other.
"""

from __future__ import annotations

from collections.abc import Callable

import pandas as pd
import pandera.pandas as pa
import pytest

from bergman_lab import BergmanLab, schemas
from bergman_lab.compop import constant, half_one_plus_z2
from bergman_lab.hilbert_schmidt import hs_diff_basis_sum, hs_diff_integral
from bergman_lab.verify import run_checks

RADII = (0.9, 0.95, 0.99, 0.995)


def _iter_dataframe_models() -> list[type[pa.DataFrameModel]]:
    """Every public DataFrameModel in schemas.py."""
    return [
        obj
        for name, obj in vars(schemas).items()
        if isinstance(obj, type)
        and issubclass(obj, pa.DataFrameModel)
        and obj is not pa.DataFrameModel
        and not name.startswith("_")
    ]


SCHEMAS = _iter_dataframe_models()


def _annuli(lab: BergmanLab) -> pd.DataFrame:
    return hs_diff_integral(lab.weight, lab.table, constant(0), constant(0.5), angular_n=8).detail


def _partial_sums(lab: BergmanLab) -> pd.DataFrame:
    return hs_diff_basis_sum(lab.weight, lab.table, constant(0), constant(0.5), angular_n=8).detail


PRODUCERS: dict[str, tuple[type[pa.DataFrameModel], Callable[[BergmanLab], pd.DataFrame]]] = {
    "moments": (schemas.MomentSchema, lambda lab: lab.moment_frame(16)),
    "kernel-probe": (schemas.KernelValueSchema, lambda lab: lab.kernel_values([(0, 0.5)])),
    "weight-profile": (schemas.WeightCheckSchema, lambda lab: lab.weight_profile(grid_size=100)),
    "distance-field": (
        schemas.DistanceFieldSchema,
        lambda lab: lab.distance_field(0j, [0.75, 0.5j]),
    ),
    "profile": (
        schemas.ProfileSchema,
        lambda lab: lab.boundedness(half_one_plus_z2(), RADII).to_frame(),
    ),
    "slices": (
        schemas.SliceSchema,
        lambda lab: lab.boundedness(half_one_plus_z2(), RADII).angular_slices,
    ),
    "annuli": (schemas.AnnulusSchema, _annuli),
    "partial-sums": (schemas.PartialSumSchema, _partial_sums),
    "segment": (
        schemas.SegmentSchema,
        lambda lab: lab.with_settings(resolution=32).segment_bound(0.1, 0.6j)["pairs"],
    ),
    "verify": (schemas.VerifySchema, lambda lab: run_checks(lab, ["kernel-origin"])),
}


# ── produced frames ──────────────────────────────────────────────────────────


@pytest.mark.parametrize("name", PRODUCERS)
def test_produced_frame_validates(lab: BergmanLab, name: str) -> None:
    schema_cls, produce = PRODUCERS[name]
    frame = produce(lab)
    assert len(frame) > 0
    schema_cls.validate(frame)


# ── strategies ───────────────────────────────────────────────────────────────


def test_every_schema_is_discovered():
    names = {s.__name__ for s in SCHEMAS}
    assert {cls.__name__ for cls, _ in PRODUCERS.values()} <= names
    assert "_Lenient" not in names


@pytest.mark.parametrize("schema_cls", SCHEMAS, ids=lambda s: s.__name__)
def test_schema_strategy_round_trips(schema_cls: type[pa.DataFrameModel]) -> None:
    """Every schema must yield a DataFrame that re-validates under itself."""
    schema = schema_cls.to_schema()
    try:
        strategy = schema.strategy(size=5)
    except pa.errors.SchemaDefinitionError:
        pytest.skip(f"{schema_cls.__name__} has no hypothesis strategy")
    schema.validate(strategy.example())
