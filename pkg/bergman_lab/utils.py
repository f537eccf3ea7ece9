from __future__ import annotations

import math
import threading
from collections.abc import Callable, Iterable, Sequence
from concurrent.futures import ThreadPoolExecutor
from typing import Any, TypeVar

import numpy as np
import orjson
import pandas as pd
from tqdm.auto import tqdm

from bergman_lab.exceptions import SpecParseError

__all__ = [
    "dumps",
    "frame_to_csv",
    "instance_cache",
    "parse_float_list",
    "parse_point_list",
    "thread_map",
    "to_jsonable",
]

T = TypeVar("T")
R = TypeVar("R")


def instance_cache(method=None, *, maxsize: int = 256):
    """Cache results of an instance method, keyed by arguments.

    Wraps :func:`cachetools.cachedmethod`, storing a per-method cache on the
    instance as ``_cache_{method_name}``.  Arguments must be hashable
    (weights, self-maps and complex points all are).  Cache access is
    serialized by a per-instance lock so sweeps may run on threads.

    Usage::

        @instance_cache
        def moments(self, N): ...

        @instance_cache(maxsize=4096)
        def distance(self, z, w): ...
    """
    from cachetools import LRUCache, cachedmethod

    def decorator(fn):
        attr = f"_cache_{fn.__name__}"

        def _get_cache(self):
            cache = getattr(self, attr, None)
            if cache is None:
                cache = LRUCache(maxsize=maxsize)
                setattr(self, attr, cache)
            return cache

        def _get_lock(self):
            lock = getattr(self, "_cache_lock", None)
            if lock is None:
                lock = threading.RLock()
                self._cache_lock = lock
            return lock

        return cachedmethod(_get_cache, lock=_get_lock)(fn)

    if method is not None:
        return decorator(method)
    return decorator


# ── Text parsing ──────────────────────────────────────────────────────


def _tokens(text: str) -> list[str]:
    return [t for t in text.replace(",", " ").split() if t]


def parse_float_list(text: str | Sequence[float]) -> tuple[float, ...]:
    """Parse ``"0.9, 0.95 0.99"`` (commas and/or spaces) into floats."""
    if not isinstance(text, str):
        return tuple(float(v) for v in text)
    try:
        values = tuple(float(t) for t in _tokens(text))
    except ValueError:
        raise SpecParseError(text, "expected a list of numbers") from None
    if not values:
        raise SpecParseError(text, "empty list")
    return values


def parse_point_list(text: str | Sequence[complex]) -> tuple[complex, ...]:
    """Parse ``"0.5 0.25+0.1i -0.3i"`` into complex points."""
    if not isinstance(text, str):
        return tuple(complex(v) for v in text)
    from bergman_lab.compop import parse_complex

    values = tuple(parse_complex(t) for t in _tokens(text))
    if not values:
        raise SpecParseError(text, "empty point list")
    return values


# ── Parallel sweeps ──────────────────────────────────────────────────


def thread_map(
    fn: Callable[[T], R],
    items: Iterable[T],
    *,
    threads: int = 1,
    progress: bool = False,
    desc: str = "",
) -> list[R]:
    """Ordered ``map`` over a thread pool with an optional progress bar.

    ``threads <= 1`` runs inline.  numpy and scipy release the GIL in the
    heavy kernels, so threads give real overlap on sweeps.
    """
    jobs = list(items)
    bar = tqdm(total=len(jobs), desc=desc, disable=not progress, leave=False)
    try:
        if threads <= 1:
            out = []
            for job in jobs:
                out.append(fn(job))
                bar.update(1)
            return out
        with ThreadPoolExecutor(max_workers=threads) as pool:
            out = []
            for result in pool.map(fn, jobs):
                out.append(result)
                bar.update(1)
            return out
    finally:
        bar.close()


# ── Serialization ─────────────────────────────────────────────────────


def to_jsonable(value: Any) -> Any:
    """Convert reports (TypedDicts with DataFrames, numpy scalars, complex) for orjson.

    Non-finite floats become the strings ``"inf"``, ``"-inf"`` and ``"nan"``.
    """
    if isinstance(value, pd.DataFrame):
        return [to_jsonable(r) for r in value.to_dict("records")]
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return [to_jsonable(v) for v in value.tolist()]
    if isinstance(value, (complex, np.complexfloating)):
        return {"re": to_jsonable(value.real), "im": to_jsonable(value.imag)}
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, (float, np.floating)):
        v = float(value)
        return v if math.isfinite(v) else str(v)
    if hasattr(value, "__dataclass_fields__"):
        return {
            k: to_jsonable(getattr(value, k))
            for k, f in value.__dataclass_fields__.items()
            if f.repr
        }
    return value


def dumps(value: Any, *, indent: bool = True) -> bytes:
    option = orjson.OPT_INDENT_2 | orjson.OPT_SORT_KEYS if indent else orjson.OPT_SORT_KEYS
    return orjson.dumps(to_jsonable(value), option=option)


def frame_to_csv(frame: pd.DataFrame, provenance: dict[str, Any]) -> str:
    """CSV text whose first line is ``# provenance: {json}``."""
    header = "# provenance: " + dumps(provenance, indent=False).decode()
    return header + "\n" + frame.to_csv(index=False)
