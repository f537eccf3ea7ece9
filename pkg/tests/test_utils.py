"""Unit tests for bergman_lab.utils."""

import math

import numpy as np
import orjson
import pandas as pd
import pytest

from bergman_lab.exceptions import SpecParseError
from bergman_lab.metric import GeodesicResult
from bergman_lab.utils import (
    dumps,
    frame_to_csv,
    instance_cache,
    parse_float_list,
    parse_point_list,
    thread_map,
    to_jsonable,
)

# ── parsing ──────────────────────────────────────────────────────────────────


def test_parse_float_list():
    assert parse_float_list("0.9, 0.95 0.99") == (0.9, 0.95, 0.99)
    assert parse_float_list([1, 2]) == (1.0, 2.0)
    with pytest.raises(SpecParseError):
        parse_float_list("0.9, x")
    with pytest.raises(SpecParseError):
        parse_float_list(" , ")


def test_parse_point_list():
    assert parse_point_list("0.5 0.25+0.1i -0.3i") == (0.5, 0.25 + 0.1j, -0.3j)
    assert parse_point_list([1, 1j]) == (1 + 0j, 1j)
    with pytest.raises(SpecParseError):
        parse_point_list("")


# ── caching and sweeps ───────────────────────────────────────────────────────


class _Counter:
    def __init__(self) -> None:
        self.calls = 0

    @instance_cache(maxsize=2)
    def square(self, x: int) -> int:
        self.calls += 1
        return x * x


def test_instance_cache_is_per_instance():
    a, b = _Counter(), _Counter()
    assert a.square(3) == 9
    assert a.square(3) == 9
    assert a.calls == 1
    b.square(3)
    assert b.calls == 1
    a.square(4)
    a.square(5)
    a.square(3)
    assert a.calls == 4


def test_thread_map_preserves_order():
    items = list(range(20))
    assert thread_map(lambda x: -x, items, threads=4) == [-x for x in items]
    assert thread_map(lambda x: -x, items) == [-x for x in items]


# ── serialization ────────────────────────────────────────────────────────────


def test_to_jsonable_handles_numeric_types():
    value = {
        "c": 0.5 - 0.25j,
        "inf": math.inf,
        "nan": float("nan"),
        "flag": np.bool_(True),
        "n": np.int64(3),
        "arr": np.array([1.0, -np.inf]),
        "frame": pd.DataFrame({"a": [1, 2]}),
    }
    out = to_jsonable(value)
    assert out["c"] == {"re": 0.5, "im": -0.25}
    assert out["inf"] == "inf"
    assert out["nan"] == "nan"
    assert out["flag"] is True
    assert out["n"] == 3
    assert out["arr"] == [1.0, "-inf"]
    assert out["frame"] == [{"a": 1}, {"a": 2}]


def test_to_jsonable_dataclass_skips_repr_false_fields():
    res = GeodesicResult(1.5, np.array([0j, 1j]), "grid", 0.02)
    assert to_jsonable(res) == {"distance": 1.5, "method": "grid", "err": 0.02}


def test_dumps_sorts_keys():
    text = dumps({"b": 1, "a": math.inf}, indent=False)
    assert text == b'{"a":"inf","b":1}'
    assert orjson.loads(dumps({"x": [1, 2]})) == {"x": [1, 2]}


def test_frame_to_csv_header():
    text = frame_to_csv(pd.DataFrame({"r": [0.5], "v": [1.0]}), {"command": "criterion"})
    header, body = text.split("\n", 1)
    assert header == '# provenance: {"command":"criterion"}'
    assert body.splitlines()[0] == "r,v"
