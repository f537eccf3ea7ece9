"""Radial exponential weights ``omega = exp(-eta)`` with ``eta(r) = A (1 - r)^(-alpha)``.

The radius function is fixed to the canonical representative
``tau(r) = (1 - r)^((alpha + 2) / 2)``.  Weights are always carried in the log
domain (``log omega = -eta``); ``omega`` itself underflows long before the
boundary (``omega(0.999) = exp(-1000)`` for ``A = alpha = 1``).
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import overload

import numpy as np
import numpy.typing as npt

from bergman_lab.exceptions import DomainError, SpecParseError, WeightClassError

__all__ = [
    "TauConstants",
    "WeightSpec",
    "check_equiquan",
    "check_lipschitz",
    "eta",
    "parse_weight",
    "power_rescale",
    "tau",
    "validate_class_W",
]

ArrayLike = float | npt.NDArray[np.float64]


def _radius(r: ArrayLike, name: str = "r") -> npt.NDArray[np.float64]:
    arr = np.asarray(r, dtype=float)
    if not np.all((arr >= 0.0) & (arr < 1.0)):
        bad = arr[~((arr >= 0.0) & (arr < 1.0))].ravel()[0] if arr.ndim else float(arr)
        raise DomainError(name, float(bad), "radius must lie in [0, 1)")
    return arr


@overload
def _out(arr: npt.NDArray[np.float64], like: float) -> float: ...
@overload
def _out(
    arr: npt.NDArray[np.float64], like: npt.NDArray[np.float64]
) -> npt.NDArray[np.float64]: ...
def _out(arr, like):
    return float(arr) if np.ndim(like) == 0 else arr


@dataclass(frozen=True)
class WeightSpec:
    """Weight ``eta(r) = A (1 - r)^(-alpha)``.

    All closed forms accept scalars or arrays of radii in ``[0, 1)``.
    """

    A: float = 1.0
    alpha: float = 1.0

    def __post_init__(self) -> None:
        if not (math.isfinite(self.A) and self.A > 0):
            raise WeightClassError(self.alpha, f"scale A must be positive, got {self.A!r}")
        if not (math.isfinite(self.alpha) and self.alpha > 0):
            raise WeightClassError(self.alpha, "exponent alpha must be positive")

    def __str__(self) -> str:
        return f"weight A={self.A:g} alpha={self.alpha:g}"

    @property
    def tau_exponent(self) -> float:
        """Exponent ``(alpha + 2) / 2`` of the radius function."""
        return (self.alpha + 2.0) / 2.0

    @property
    def contact_m(self) -> int:
        """Smallest integer ``m`` with ``tau(r) / (1 - r)^m`` bounded below."""
        return math.ceil(self.tau_exponent)

    # ── closed forms ────────────────────────────────────────────────────

    def eta(self, r: ArrayLike) -> ArrayLike:
        x = _radius(r)
        return _out(self.A * (1.0 - x) ** (-self.alpha), r)

    def deta(self, r: ArrayLike) -> ArrayLike:
        x = _radius(r)
        return _out(self.A * self.alpha * (1.0 - x) ** (-self.alpha - 1.0), r)

    def d2eta(self, r: ArrayLike) -> ArrayLike:
        x = _radius(r)
        a = self.alpha
        return _out(self.A * a * (a + 1.0) * (1.0 - x) ** (-a - 2.0), r)

    def laplacian_eta(self, r: ArrayLike) -> ArrayLike:
        """``eta'' + eta'/r``; only defined for ``0 < r < 1``."""
        x = _radius(r)
        if np.any(x == 0.0):
            raise DomainError("r", 0.0, "the radial Laplacian is evaluated for r > 0")
        return _out(np.asarray(self.d2eta(x)) + np.asarray(self.deta(x)) / x, r)

    def log_omega(self, r: ArrayLike) -> ArrayLike:
        x = _radius(r)
        return _out(-self.A * (1.0 - x) ** (-self.alpha), r)

    def omega(self, r: ArrayLike) -> ArrayLike:
        return _out(np.exp(np.asarray(self.log_omega(r))), r)

    def tau(self, r: ArrayLike) -> ArrayLike:
        x = _radius(r)
        return _out((1.0 - x) ** self.tau_exponent, r)

    def dtau(self, r: ArrayLike) -> ArrayLike:
        x = _radius(r)
        c = self.tau_exponent
        return _out(-c * (1.0 - x) ** (c - 1.0), r)

    # Unchecked kernels on the boundary gap ``1 - r``; used in inner loops
    # where the gap is already known to be in (0, 1].
    def tau_gap(self, gap: npt.NDArray[np.float64]) -> npt.NDArray[np.float64]:
        return gap**self.tau_exponent

    def eta_gap(self, gap: npt.NDArray[np.float64]) -> npt.NDArray[np.float64]:
        return self.A * gap ** (-self.alpha)


@dataclass(frozen=True)
class TauConstants:
    """Measured constants of the radius function.

    ``tau(z) < c1 (1 - |z|)``, ``|tau(z) - tau(w)| <= c2 |z - w|`` and
    ``m_tau = min(1, 1/c1, 1/c2) / 4``.  ``delta`` is the disk-size factor used
    for the Carleson disks ``D(z, delta tau(z))``.
    """

    c1: float
    c2: float
    m_tau: float
    delta: float
    laplacian_band: tuple[float, float]
    grid_size: int


def eta(spec: WeightSpec, r: ArrayLike) -> ArrayLike:
    """Return ``A (1 - r)^(-alpha)``.

    Raises:
        DomainError: if ``r`` is outside ``[0, 1)``.
    """
    return spec.eta(r)


def tau(spec: WeightSpec, r: ArrayLike) -> ArrayLike:
    """Return ``(1 - r)^((alpha + 2) / 2)``.

    Raises:
        DomainError: if ``r`` is outside ``[0, 1)``.
    """
    return spec.tau(r)


def validate_class_W(spec: WeightSpec, grid_size: int = 1000) -> TauConstants:  # noqa: N802
    """Measure ``c1``, ``c2`` and ``m_tau`` on a boundary-refined radial grid.

    Args:
        spec: Weight to validate.
        grid_size: Number of radii; spacing is geometric in ``1 - r`` down to
            ``1e-12``.

    Returns:
        TauConstants with ``delta = m_tau / 2``.

    Raises:
        DomainError: ``grid_size < 100``.
        WeightClassError: ``alpha <= 0``, ``tau'`` not vanishing at the
            boundary, or ``tau^2 * Laplacian(eta)`` not bounded away from 0.
    """
    if grid_size < 100:
        raise DomainError("grid_size", grid_size, "at least 100 radii are required")
    if spec.alpha <= 0:
        raise WeightClassError(spec.alpha, "exponent alpha must be positive")

    gaps = np.geomspace(1.0, 1e-12, grid_size)
    r = 1.0 - gaps
    slope = np.abs(np.asarray(spec.dtau(r)))
    if not (np.all(np.diff(slope) < 0) and slope[-1] < slope[0]):
        raise WeightClassError(spec.alpha, "tau' does not vanish at the boundary")
    c2 = float(slope.max())
    c1 = float(np.nextafter(np.max(spec.tau_gap(gaps) / gaps), np.inf))

    band_r = r[(r >= 0.5)]
    band = np.asarray(spec.tau(band_r)) ** 2 * np.asarray(spec.laplacian_eta(band_r))
    lo, hi = float(band.min()), float(band.max())
    if not (lo > 0 and math.isfinite(hi)):
        raise WeightClassError(spec.alpha, "tau^2 * Laplacian(eta) is not bounded on [1/2, 1)")

    m_tau = min(1.0, 1.0 / c1, 1.0 / c2) / 4.0
    return TauConstants(
        c1=c1,
        c2=c2,
        m_tau=m_tau,
        delta=m_tau / 2.0,
        laplacian_band=(lo, hi),
        grid_size=grid_size,
    )


def check_lipschitz(
    spec: WeightSpec,
    constants: TauConstants,
    z: npt.ArrayLike,
    w: npt.ArrayLike,
) -> int:
    """Count pairs violating ``|tau(|z|) - tau(|w|)| <= c2 |z - w|``."""
    z = np.asarray(z, dtype=complex)
    w = np.asarray(w, dtype=complex)
    lhs = np.abs(np.asarray(spec.tau(np.abs(z))) - np.asarray(spec.tau(np.abs(w))))
    rhs = constants.c2 * np.abs(z - w)
    return int(np.count_nonzero(lhs > rhs * (1.0 + 1e-12) + 1e-15))


def check_equiquan(
    spec: WeightSpec,
    constants: TauConstants,
    centers: npt.ArrayLike,
    per_center: int = 64,
    seed: int = 0,
) -> int:
    """Count samples ``w`` in ``D(z, delta tau(z))`` with ``tau(w) / tau(z)`` outside [1/2, 2]."""
    centers = np.asarray(centers, dtype=complex).ravel()
    rng = np.random.default_rng(seed)
    radius = constants.delta * np.asarray(spec.tau(np.abs(centers)))
    u = rng.random((centers.size, per_center))
    theta = rng.uniform(0.0, 2 * np.pi, (centers.size, per_center))
    w = centers[:, None] + radius[:, None] * np.sqrt(u) * np.exp(1j * theta)
    tz = np.asarray(spec.tau(np.abs(centers)))[:, None]
    tw = np.asarray(spec.tau(np.abs(w)))
    return int(np.count_nonzero((tw < tz / 2) | (tw > 2 * tz)))


def power_rescale(spec: WeightSpec, p: float) -> WeightSpec:
    """Return the weight ``omega^(2/p)``, i.e. ``A -> 2A/p`` with the same exponent."""
    if not p > 0:
        raise DomainError("p", p, "exponent must be positive")
    return WeightSpec(A=2.0 * spec.A / p, alpha=spec.alpha)


_WEIGHT_TOKEN = re.compile(r"^(A|alpha)=(.+)$")


def parse_weight(text: str) -> WeightSpec:
    """Parse ``weight A=<float> alpha=<float>`` (the leading keyword is optional).

    Raises:
        SpecParseError: on unknown keys, repeated keys or non-numeric values.
        WeightClassError: on non-positive parameters.
    """
    tokens = text.split()
    if tokens and tokens[0] == "weight":
        tokens = tokens[1:]
    values: dict[str, float] = {}
    for token in tokens:
        match = _WEIGHT_TOKEN.match(token)
        if match is None:
            raise SpecParseError(text, f"unexpected token {token!r}")
        key, raw = match.groups()
        if key in values:
            raise SpecParseError(text, f"{key} given twice")
        try:
            values[key] = float(raw)
        except ValueError:
            raise SpecParseError(text, f"{key} is not a number: {raw!r}") from None
    return WeightSpec(A=values.get("A", 1.0), alpha=values.get("alpha", 1.0))
