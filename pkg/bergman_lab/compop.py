"""Polynomial self-maps of the disk and the composition-operator criteria.

Boundary limits (``limsup`` as ``|z| -> 1``) are approximated by suprema over
circles ``|z| = r`` on a finite increasing list of radii; the verdict reads
the trend of the last three suprema.  All ratios ``omega(z) / omega(phi(z))``
are carried as logarithms ``eta(|phi(z)|) - eta(|z|)``.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Callable, Iterable, Sequence
from dataclasses import dataclass, field
from functools import cached_property
from typing import Literal

import numpy as np
import numpy.typing as npt
import pandas as pd
from numpy.polynomial import Polynomial
from pandera.typing import DataFrame

from bergman_lab.exceptions import (
    BoundaryTouchError,
    DomainError,
    HypothesisError,
    SelfMapError,
    SpecParseError,
)
from bergman_lab.kernel import R_MAX
from bergman_lab.metric import chord_cost, d_tau, rho_tau_array
from bergman_lab.quad import mc_disk
from bergman_lab.schemas import ContactSchema, DecayProfileSchema, ProfileSchema, SliceSchema
from bergman_lab.types import CarlesonEstimate, ContactReport, OmegaTauReport, UniformBound
from bergman_lab.weights import WeightSpec, validate_class_W

__all__ = [
    "DEFAULT_RADII",
    "PERTURBATION_EPS",
    "TEMPLATES",
    "VERDICT_LABELS",
    "CriterionReport",
    "SelfMap",
    "angular_derivative",
    "boundedness_profile",
    "carleson_ratio",
    "constant",
    "contact_perturbation",
    "contact_order_check",
    "difference_boundedness_check",
    "difference_criterion",
    "essential_norm_lower",
    "half_one_plus_z",
    "half_one_plus_z2",
    "identity",
    "omegatau_check",
    "order_data_check",
    "parse_complex",
    "parse_map",
    "scaled",
    "uniform_bound_check",
    "weight_ratio",
    "weighted_compactness_check",
]

logger = logging.getLogger("bergman_lab")

Verdict = Literal["decays-to-zero", "bounded-nonvanishing", "unbounded"]

DEFAULT_RADII: tuple[float, ...] = tuple(1.0 - 2.0**-k for k in range(3, 10))

# Operator-level reading of a boundary verdict.
VERDICT_LABELS: dict[str, dict[Verdict, str]] = {
    "boundedness": {
        "decays-to-zero": "compact",
        "bounded-nonvanishing": "bounded-noncompact",
        "unbounded": "unbounded",
    },
    "difference": {
        "decays-to-zero": "compact",
        "bounded-nonvanishing": "noncompact",
        "unbounded": "unbounded",
    },
}

# Strictly below 1/2^7 = 0.0078125.
PERTURBATION_EPS = 0.0078
_BOUNDARY_SAMPLES = 4096
_SELF_MAP_SLACK = 1e-12
_TREND = math.log(4.0)
_UNBOUNDED_LOG = 50.0


# ── Self-maps ────────────────────────────────────────────────────────────


@dataclass(frozen=True)
class SelfMap:
    """Polynomial ``phi(z) = sum_k coeffs[k] z^k`` mapping the disk into itself.

    The self-map property is checked on 4096 boundary samples (maximum
    modulus principle) with slack ``1e-12``.

    Raises:
        SelfMapError: the boundary maximum exceeds ``1 + 1e-12``.
    """

    coeffs: tuple[complex, ...]
    name: str | None = None
    _poly: Polynomial = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        coeffs = tuple(complex(c) for c in self.coeffs) or (0j,)
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "_poly", Polynomial(np.array(coeffs, dtype=complex)))
        if self.max_modulus > 1.0 + _SELF_MAP_SLACK:
            raise SelfMapError(self.max_modulus, self.name or "")

    def __call__(self, z: npt.ArrayLike) -> npt.NDArray[np.complex128] | complex:
        out = self._poly(np.asarray(z, dtype=complex))
        return complex(out) if np.ndim(out) == 0 else out

    def __str__(self) -> str:
        if self.name:
            return self.name
        return "map poly " + ",".join(_format_complex(c) for c in self.coeffs)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @cached_property
    def max_modulus(self) -> float:
        theta = 2 * np.pi * np.arange(_BOUNDARY_SAMPLES) / _BOUNDARY_SAMPLES
        return float(np.abs(self._poly(np.exp(1j * theta))).max())

    def derivative(self, order: int = 1) -> Polynomial:
        """Exact ``order``-th derivative as a polynomial."""
        return self._poly.deriv(order) if order else self._poly

    def blend(self, other: SelfMap, s: float) -> SelfMap:
        """``(1 - s) phi + s psi``; a self-map for ``s`` in ``[0, 1]``."""
        if not 0.0 <= s <= 1.0:
            raise DomainError("s", s, "blend parameter must lie in [0, 1]")
        size = max(len(self.coeffs), len(other.coeffs))
        a = np.pad(np.array(self.coeffs), (0, size - len(self.coeffs)))
        b = np.pad(np.array(other.coeffs), (0, size - len(other.coeffs)))
        return SelfMap(tuple((1.0 - s) * a + s * b))

    def rotate(self, theta: float) -> SelfMap:
        """Conjugate by the rotation ``z -> e^{i theta} z``."""
        k = np.arange(len(self.coeffs))
        rotated = np.array(self.coeffs) * np.exp(1j * theta * (1 - k))
        return SelfMap(tuple(rotated), f"{self.name} rotated {theta:g}" if self.name else None)

    def checked(self, z: npt.ArrayLike) -> npt.NDArray[np.complex128]:
        """Evaluate and raise if an image reaches the unit circle."""
        zz = np.asarray(z, dtype=complex)
        w = np.asarray(self._poly(zz))
        mod = np.abs(w)
        if np.any(mod >= 1.0):
            j = int(np.argmax(mod))
            raise BoundaryTouchError(complex(zz.ravel()[j]), float(mod.ravel()[j]))
        return w


def identity() -> SelfMap:
    return SelfMap((0.0, 1.0), "identity")


def half_one_plus_z() -> SelfMap:
    return SelfMap((0.5, 0.5), "half_one_plus_z")


def half_one_plus_z2() -> SelfMap:
    return SelfMap((0.5, 0.0, 0.5), "half_one_plus_z2")


def contact_perturbation(eps: float = PERTURBATION_EPS) -> SelfMap:
    """``(1 + z^2) / 2 + eps (1 - z^2)^5``; same 4-order data as ``half_one_plus_z2`` at ``+-1``."""
    bump = Polynomial([1.0, 0.0, -1.0]) ** 5
    coeffs = Polynomial([0.5, 0.0, 0.5]) + eps * bump
    return SelfMap(tuple(coeffs.coef), f"contact_perturbation eps={eps:g}")


def scaled(c: complex = 0.5) -> SelfMap:
    return SelfMap((0.0, complex(c)), f"scaled c={_format_complex(complex(c))}")


def constant(c: complex = 0.5) -> SelfMap:
    return SelfMap((complex(c),), f"constant c={_format_complex(complex(c))}")


TEMPLATES: dict[str, Callable[..., SelfMap]] = {
    "identity": identity,
    "half_one_plus_z": half_one_plus_z,
    "half_one_plus_z2": half_one_plus_z2,
    "contact_perturbation": contact_perturbation,
    "scaled": scaled,
    "constant": constant,
    "sec4_psi": contact_perturbation,
}


def _format_complex(c: complex) -> str:
    if c.imag == 0:
        return f"{c.real:g}"
    return f"{c.real:g}{c.imag:+g}i"


def parse_complex(token: str) -> complex:
    """Parse ``a``, ``a+bi``, ``bi`` or ``-i``."""
    text = token.strip().lower().replace(" ", "")
    try:
        return complex(text.replace("i", "j"))
    except ValueError:
        raise SpecParseError(token, "expected a complex number such as 0.5 or 0.5-0.25i") from None


def parse_map(text: str) -> SelfMap:
    """Parse ``map poly c0,c1,...`` or ``map template <name> [key=value ...]``.

    Raises:
        SpecParseError: malformed text or unknown template.
        SelfMapError: the polynomial is not a self-map.
    """
    tokens = text.split()
    if tokens and tokens[0] == "map":
        tokens = tokens[1:]
    if not tokens:
        raise SpecParseError(text, "empty map description")
    kind, rest = tokens[0], tokens[1:]
    if kind == "poly":
        if len(rest) != 1:
            raise SpecParseError(text, "poly expects one comma-separated coefficient list")
        return SelfMap(tuple(parse_complex(t) for t in rest[0].split(",")))
    if kind != "template" or not rest:
        raise SpecParseError(text, "expected 'poly' or 'template <name>'")
    name, params = rest[0], rest[1:]
    factory = TEMPLATES.get(name)
    if factory is None:
        raise SpecParseError(text, f"unknown template {name!r}; known: {', '.join(TEMPLATES)}")
    kwargs: dict[str, complex | float] = {}
    for param in params:
        key, sep, raw = param.partition("=")
        if not sep:
            raise SpecParseError(text, f"expected key=value, got {param!r}")
        value = parse_complex(raw)
        kwargs[key] = value.real if value.imag == 0 else value
    try:
        return factory(**kwargs)
    except TypeError as exc:
        raise SpecParseError(text, str(exc)) from None


# ── Profiles ─────────────────────────────────────────────────────────────


@dataclass(frozen=True)
class CriterionReport:
    """Per-circle suprema of a boundary functional and the trend verdict.

    ``log_sup_values[i]`` is ``log sup_{|z| = radii[i]}`` of the functional
    (``-inf`` when it vanishes on the circle).  ``angular_slices`` holds the
    functional along eight fixed directions.
    """

    kind: str
    radii: npt.NDArray[np.float64]
    log_sup_values: npt.NDArray[np.float64]
    argmax_theta: npt.NDArray[np.float64]
    angular_slices: DataFrame[SliceSchema] = field(repr=False)
    verdict: Verdict

    @property
    def sup_values(self) -> npt.NDArray[np.float64]:
        return np.exp(self.log_sup_values)

    def to_frame(self) -> DataFrame[ProfileSchema]:
        return DataFrame[ProfileSchema](
            pd.DataFrame(
                {
                    "r": self.radii,
                    "sup_value": self.sup_values,
                    "log_sup_value": self.log_sup_values,
                    "argmax_theta": self.argmax_theta,
                }
            )
        )


def trend_verdict(log_sups: Sequence[float]) -> Verdict:
    """Classify the last three circle suprema.

    Decay needs a strictly decreasing tail that drops by more than a factor
    4 (or a functional that vanishes); growth needs a strictly increasing
    tail rising by more than a factor 4, or a last value above ``e^50``.
    """
    tail = np.asarray(log_sups, dtype=float)[-3:]
    if np.all(tail == -np.inf):
        return "decays-to-zero"
    if tail[-1] > _UNBOUNDED_LOG:
        return "unbounded"
    steps = np.diff(tail)
    if np.all(steps < 0) and tail[0] - tail[-1] > _TREND:
        return "decays-to-zero"
    if np.all(steps > 0) and tail[-1] - tail[0] > _TREND:
        return "unbounded"
    return "bounded-nonvanishing"


def _check_radii(radii: Iterable[float] | None, r_max: float) -> npt.NDArray[np.float64]:
    arr = np.asarray(DEFAULT_RADII if radii is None else list(radii), dtype=float)
    if arr.size < 3:
        raise DomainError("radii", arr.tolist(), "at least three radii are needed for a trend")
    if np.any(np.diff(arr) <= 0) or arr[0] <= 0 or arr[-1] > r_max:
        raise DomainError("radii", arr.tolist(), f"radii must increase within (0, {r_max}]")
    return arr


def _circle(r: float, angular_n: int) -> tuple[npt.NDArray[np.float64], npt.NDArray[np.complex128]]:
    theta = 2 * np.pi * np.arange(angular_n) / angular_n
    return theta, r * np.exp(1j * theta)


def _slice_index(angular_n: int) -> npt.NDArray[np.intp]:
    return (np.arange(8) * angular_n) // 8


def weight_ratio(spec: WeightSpec, phi: SelfMap, z: npt.ArrayLike) -> npt.ArrayLike:
    """``log(omega(z) / omega(phi(z))) = eta(|phi(z)|) - eta(|z|)``.

    Raises:
        DomainError: ``|z| >= 1``.
        BoundaryTouchError: ``|phi(z)| >= 1`` numerically.
    """
    zz = np.asarray(z, dtype=complex)
    if np.any(np.abs(zz) >= 1.0):
        raise DomainError("z", complex(zz.ravel()[np.argmax(np.abs(zz))]), "need |z| < 1")
    w = phi.checked(zz)
    out = spec.eta_gap(1.0 - np.abs(w)) - spec.eta_gap(1.0 - np.abs(zz))
    return float(out) if out.ndim == 0 else out


def boundedness_profile(
    spec: WeightSpec,
    phi: SelfMap,
    radii: Iterable[float] | None = None,
    *,
    angular_n: int = 1024,
    r_max: float = R_MAX,
) -> CriterionReport:
    """Circle suprema of ``omega(z) / omega(phi(z))``.

    ``bounded-nonvanishing`` means a bounded, non-compact operator;
    ``decays-to-zero`` means compact.
    """
    if angular_n < 1024:
        raise DomainError("angular_n", angular_n, "at least 1024 angles per circle")
    rr = _check_radii(radii, r_max)
    logs, arg, slices = [], [], []
    picks = _slice_index(angular_n)
    for r in rr:
        theta, z = _circle(float(r), angular_n)
        vals = np.asarray(weight_ratio(spec, phi, z))
        j = int(np.argmax(vals))
        logs.append(float(vals[j]))
        arg.append(float(theta[j]))
        slices.append(
            pd.DataFrame({"theta": theta[picks], "r": r, "log_value": vals[picks]})
        )
    logs_arr = np.array(logs)
    return CriterionReport(
        kind="boundedness",
        radii=rr,
        log_sup_values=logs_arr,
        argmax_theta=np.array(arg),
        angular_slices=DataFrame[SliceSchema](pd.concat(slices, ignore_index=True)),
        verdict=trend_verdict(logs_arr),
    )


def _rho_weighted_profile(
    spec: WeightSpec,
    phi: SelfMap,
    psi: SelfMap,
    log_weight: Callable[[npt.NDArray[np.complex128]], npt.NDArray[np.float64]],
    radii: npt.NDArray[np.float64],
    angular_n: int,
    resolution: int,
    r_max: float,
    kind: str,
) -> CriterionReport:
    """Circle suprema of ``rho_tau(phi(z), psi(z)) * exp(log_weight(z))``.

    Branch and bound: ``d_tau`` never exceeds the straight-chord cost, so
    ``1 - exp(-chord)`` bounds ``rho_tau`` from above and angles are visited
    in decreasing order of that bound until it drops below the best exact
    value.
    """
    logs, arg, slices = [], [], []
    picks = _slice_index(angular_n)
    exact_calls = 0
    for r in radii:
        theta, z = _circle(float(r), angular_n)
        a, b = phi.checked(z), psi.checked(z)
        lw = log_weight(z)
        with np.errstate(divide="ignore"):
            log_upper = np.log(np.minimum(1.0, -np.expm1(-np.asarray(chord_cost(spec, a, b))))) + lw
        best, best_j = -math.inf, 0
        for j in np.argsort(-log_upper):
            if log_upper[j] <= best or log_upper[j] == -np.inf:
                break
            rho = d_tau(spec, a[j], b[j], resolution=resolution, r_max=r_max).rho
            exact_calls += 1
            value = math.log(rho) + lw[j] if rho > 0 else -math.inf
            if value > best:
                best, best_j = value, int(j)
        logs.append(best)
        arg.append(float(theta[best_j]))
        rho_picks = rho_tau_array(spec, a[picks], b[picks], resolution=resolution, r_max=r_max)
        with np.errstate(divide="ignore"):
            slice_vals = np.log(rho_picks) + lw[picks]
        slices.append(pd.DataFrame({"theta": theta[picks], "r": r, "log_value": slice_vals}))
    logger.debug("%s profile: %d exact distance evaluations", kind, exact_calls)
    logs_arr = np.array(logs)
    return CriterionReport(
        kind=kind,
        radii=radii,
        log_sup_values=logs_arr,
        argmax_theta=np.array(arg),
        angular_slices=DataFrame[SliceSchema](pd.concat(slices, ignore_index=True)),
        verdict=trend_verdict(logs_arr),
    )


def _log_ratio_sum(spec: WeightSpec, phi: SelfMap, psi: SelfMap):
    def log_weight(z: npt.NDArray[np.complex128]) -> npt.NDArray[np.float64]:
        return np.logaddexp(weight_ratio(spec, phi, z), weight_ratio(spec, psi, z))

    return log_weight


def difference_criterion(
    spec: WeightSpec,
    phi: SelfMap,
    psi: SelfMap,
    radii: Iterable[float] | None = None,
    *,
    angular_n: int = 1024,
    resolution: int = 64,
    r_max: float = R_MAX,
) -> CriterionReport:
    """Circle suprema of ``rho_tau(phi, psi) (omega / omega(phi) + omega / omega(psi))``.

    ``decays-to-zero`` characterizes a compact difference ``C_phi - C_psi``.

    Raises:
        HypothesisError: one of the operators is unbounded.
    """
    rr = _check_radii(radii, r_max)
    for label, m in (("phi", phi), ("psi", psi)):
        verdict = boundedness_profile(spec, m, rr, angular_n=angular_n, r_max=r_max).verdict
        if verdict == "unbounded":
            raise HypothesisError(f"C_{label} is unbounded ({m}); the criterion needs both bounded")
    return _rho_weighted_profile(
        spec,
        phi,
        psi,
        _log_ratio_sum(spec, phi, psi),
        rr,
        angular_n,
        resolution,
        r_max,
        "difference",
    )


def difference_boundedness_check(
    spec: WeightSpec,
    phi: SelfMap,
    psi: SelfMap,
    radii: Iterable[float] | None = None,
    *,
    angular_n: int = 1024,
    resolution: int = 64,
    r_max: float = R_MAX,
) -> CriterionReport:
    """The same functional without requiring either operator to be bounded.

    A verdict other than ``unbounded`` is the necessary condition for a
    bounded difference.
    """
    rr = _check_radii(radii, r_max)
    return _rho_weighted_profile(
        spec,
        phi,
        psi,
        _log_ratio_sum(spec, phi, psi),
        rr,
        angular_n,
        resolution,
        r_max,
        "difference-boundedness",
    )


def weighted_compactness_check(
    spec: WeightSpec,
    phi: SelfMap,
    psi: SelfMap,
    radii: Iterable[float] | None = None,
    *,
    angular_n: int = 1024,
    resolution: int = 64,
    r_max: float = R_MAX,
) -> dict[str, CriterionReport]:
    """Profiles of ``rho_tau(phi, psi) omega / omega(phi)`` and of the ``psi`` analogue."""
    rr = _check_radii(radii, r_max)
    out = {}
    for label, m in (("phi", phi), ("psi", psi)):

        def log_weight(z: npt.NDArray[np.complex128], m: SelfMap = m) -> npt.NDArray:
            return np.asarray(weight_ratio(spec, m, z))

        out[label] = _rho_weighted_profile(
            spec, phi, psi, log_weight, rr, angular_n, resolution, r_max, f"weighted-{label}"
        )
    return out


def essential_norm_lower(
    spec: WeightSpec,
    phi: SelfMap,
    psi: SelfMap,
    samples: npt.ArrayLike | None = None,
    *,
    threshold: float = 0.99,
    resolution: int = 64,
    r_max: float = R_MAX,
) -> float:
    """Largest weight-ratio sum over samples with ``rho_tau(phi(z), psi(z)) > threshold``.

    Samples default to 256 angles on each default radius.  Returns 0 when no
    sample qualifies.  Samples are visited by decreasing ratio sum; the
    chord bound skips pairs that cannot reach the threshold.
    """
    if samples is None:
        theta = 2 * np.pi * np.arange(256) / 256
        pts = (np.asarray(DEFAULT_RADII)[:, None] * np.exp(1j * theta)[None, :]).ravel()
    else:
        pts = np.asarray(samples, dtype=complex).ravel()
    a, b = phi.checked(pts), psi.checked(pts)
    log_sum = _log_ratio_sum(spec, phi, psi)(pts)
    rho_upper = -np.expm1(-np.asarray(chord_cost(spec, a, b)))
    for j in np.argsort(-log_sum):
        if rho_upper[j] <= threshold:
            continue
        if d_tau(spec, a[j], b[j], resolution=resolution, r_max=r_max).rho > threshold:
            return float(np.exp(log_sum[j]))
    return 0.0


# ── Boundary regularity ──────────────────────────────────────────────────


def angular_derivative(
    phi: SelfMap, zeta: complex, radii: Iterable[float] | None = None
) -> float:
    """Radial limit of ``(1 - |phi(r zeta)|) / (1 - r)`` by Richardson extrapolation.

    The default radii are ``1 - 2^-k`` for ``k = 4..20``.  Returns ``inf``
    when the quotient keeps growing (no finite angular derivative).
    """
    if abs(abs(complex(zeta)) - 1.0) > 1e-12:
        raise DomainError("zeta", zeta, "boundary point must be unimodular")
    rr = np.asarray(
        [1.0 - 2.0**-k for k in range(4, 21)] if radii is None else list(radii), dtype=float
    )
    h = 1.0 - rr
    q = (1.0 - np.abs(np.asarray(phi(rr * complex(zeta))))) / h
    if q.size >= 3 and np.all(q[-3:] > 0) and np.all(q[-2:] / q[-3:-1] > 1.5):
        return math.inf
    # Halving steps: R = (h1 q(h2) - h2 q(h1)) / (h1 - h2) removes the O(h) term.
    h1, h2, q1, q2 = h[-2], h[-1], q[-2], q[-1]
    return float((h1 * q2 - h2 * q1) / (h1 - h2))


def order_data_check(phi: SelfMap, psi: SelfMap, zeta: complex, M: int) -> bool:  # noqa: N803
    """``phi^(n)(zeta) == psi^(n)(zeta)`` for ``n = 0..M``, relative to the coefficient scale."""
    if M < 0:
        raise DomainError("M", M, "order must be non-negative")
    size = max(len(phi.coeffs), len(psi.coeffs))
    diff = Polynomial(
        np.pad(np.array(phi.coeffs), (0, size - len(phi.coeffs)))
        - np.pad(np.array(psi.coeffs), (0, size - len(psi.coeffs)))
    )
    scale_poly = Polynomial(
        np.abs(np.pad(np.array(phi.coeffs), (0, size - len(phi.coeffs))))
        + np.abs(np.pad(np.array(psi.coeffs), (0, size - len(psi.coeffs))))
    )
    radius = max(abs(complex(zeta)), 1.0)
    for n in range(M + 1):
        value = abs(diff.deriv(n)(complex(zeta))) if n else abs(diff(complex(zeta)))
        scale = max(1.0, float(scale_poly.deriv(n)(radius)) if n else float(scale_poly(radius)))
        if value > 1e-12 * scale:
            return False
    return True


def contact_order_check(
    phi: SelfMap,
    zeta: complex,
    k: float,
    *,
    approach: Literal["full", "radial"] = "full",
    threshold: float = 1e-3,
    neighbourhood: float = 0.1,
    samples: int = 64,
) -> ContactReport:
    """``inf (1 - |w|) / |c - w|^k`` over images ``w = phi(z)`` with ``z`` near ``zeta``.

    ``c = phi(zeta)`` is the contact point, which is ``zeta`` itself for maps
    fixing ``zeta``; ``(1 + z^2) / 2`` reaches the contact point 1 from both
    ``zeta = 1`` and ``zeta = -1``.  ``phi`` has order of contact at most ``k``
    there when the infimum stays above ``threshold``.  ``"full"``
    samples a sector of approach directions, ``"radial"`` only ``r zeta``.
    The status is ``"inconclusive"`` when ``phi(zeta)`` is off the circle
    or no image lands within ``neighbourhood`` of it.
    """
    if not k > 0:
        raise DomainError("k", k, "contact order must be positive")
    zeta = complex(zeta)
    if abs(abs(zeta) - 1.0) > 1e-12:
        raise DomainError("zeta", zeta, "boundary point must be unimodular")
    contact = complex(phi(zeta))
    empty: ContactReport = {
        "status": "inconclusive",
        "holds": None,
        "inf_value": math.nan,
        "samples": 0,
        "profile": DataFrame[ContactSchema](
            pd.DataFrame({"h": [], "beta": [], "value": []}, dtype=float)
        ),
    }
    if abs(abs(contact) - 1.0) > 1e-9:
        return empty
    h = np.geomspace(1e-5, neighbourhood, samples)
    beta = np.linspace(-1.5, 1.5, samples) if approach == "full" else np.zeros(1)
    hh, bb = np.meshgrid(h, beta, indexing="ij")
    z = zeta * (1.0 - hh * np.exp(1j * bb))
    inside = np.abs(z) < 1.0
    w = np.asarray(phi(z[inside]))
    gap = np.abs(contact - w)
    near = (gap < neighbourhood) & (gap > 0)
    if not near.any():
        return empty
    values = (1.0 - np.abs(w[near])) / gap[near] ** k
    inf_value = float(values.min())
    holds = inf_value > threshold
    return {
        "status": "holds" if holds else "fails",
        "holds": holds,
        "inf_value": inf_value,
        "samples": int(near.sum()),
        "profile": DataFrame[ContactSchema](
            pd.DataFrame({"h": hh[inside][near], "beta": bb[inside][near], "value": values})
        ),
    }


def omegatau_check(
    spec: WeightSpec,
    phi: SelfMap,
    psi: SelfMap,
    zeta: complex,
    m: int | None = None,
    M: int = 4,  # noqa: N803
    *,
    levels: Iterable[int] = range(2, 10),
    resolution: int = 64,
    r_max: float = R_MAX,
) -> OmegaTauReport:
    """Decay of ``rho_tau(phi(z), psi(z))`` as ``z -> zeta`` radially.

    Hypotheses: equal ``M``-order data at ``zeta`` and order of contact at
    most ``M / m`` for ``phi``, with ``m = ceil((alpha + 2) / 2)`` by
    default.  A failed hypothesis is reported; the decay is measured anyway.
    """
    m = spec.contact_m if m is None else m
    order_ok = order_data_check(phi, psi, zeta, M)
    contact = contact_order_check(phi, zeta, M / m)
    rows = []
    for k in levels:
        h = 2.0**-k
        z = complex(zeta) * (1.0 - h)
        a, b = complex(phi(z)), complex(psi(z))
        if max(abs(a), abs(b)) > r_max:
            break
        rho = d_tau(spec, a, b, resolution=resolution, r_max=r_max).rho
        rows.append({"h": h, "r": 1.0 - h, "rho": rho})
    profile = DataFrame[DecayProfileSchema](pd.DataFrame(rows))
    rho = profile["rho"].to_numpy()
    decays = bool(
        rho.size >= 3
        and (
            np.all(rho == 0)
            or (np.all(np.diff(rho[-3:]) < 0) and rho[-1] <= 0.01 * rho.max())
        )
    )
    return {
        "m": m,
        "M": M,
        "order_data": order_ok,
        "contact": contact,
        "hypotheses_hold": bool(order_ok and contact["holds"]),
        "decays": decays,
        "profile": profile,
    }


# ── Pullback measures ────────────────────────────────────────────────────


def carleson_ratio(
    spec: WeightSpec,
    phi: SelfMap,
    xi: complex,
    p: float = 2.0,
    u: Callable[[npt.NDArray[np.complex128]], npt.ArrayLike] | None = None,
    *,
    mc_samples: int = 10**5,
    seed: int = 0,
    delta: float | None = None,
    tasks: int = 1,
    map_fn: Callable[..., Iterable] = map,
) -> CarlesonEstimate:
    """Monte Carlo ``mu_{u,phi,p}(D(xi, delta tau(xi))) / tau(xi)^2``.

    ``mu(E) = int_{phi^-1(E)} |u|^p omega^p / omega(phi)^p dA``; ``delta``
    defaults to ``m_tau / 2``.  Zero hits give ratio 0 with a note.
    """
    if mc_samples < 10**5:
        raise DomainError("mc_samples", mc_samples, "at least 1e5 samples")
    if not p > 0:
        raise DomainError("p", p, "exponent must be positive")
    xi = complex(xi)
    if abs(xi) >= 1.0:
        raise DomainError("xi", xi, "center must lie in the disk")
    delta = validate_class_W(spec).delta if delta is None else delta
    t = float(spec.tau(abs(xi)))
    radius = delta * t

    def integrand(z: npt.NDArray[np.complex128]) -> npt.NDArray[np.float64]:
        w = np.asarray(phi(z))
        hit = np.abs(w - xi) < radius
        out = np.zeros(z.shape)
        if hit.any():
            zh, wh = z[hit], w[hit]
            log_val = p * (spec.eta_gap(1.0 - np.abs(wh)) - spec.eta_gap(1.0 - np.abs(zh)))
            weight = np.ones(zh.shape) if u is None else np.abs(np.asarray(u(zh))) ** p
            out[hit] = weight * np.exp(log_val)
        return out

    est = mc_disk(seed, mc_samples, integrand, tasks=tasks, map_fn=map_fn)
    note = "" if est.value > 0 else "no sample landed in the preimage; ratio reported as 0"
    return {
        "ratio": est.value / (t * t),
        "std_err": est.std_err / (t * t),
        "delta": delta,
        "samples": est.n,
        "note": note,
    }


def uniform_bound_check(
    spec: WeightSpec,
    phi: SelfMap,
    psi: SelfMap,
    s_values: Sequence[float] = (0.0, 0.25, 0.5, 0.75, 1.0),
    radii: Iterable[float] | None = None,
    *,
    angular_n: int = 1024,
    r_max: float = R_MAX,
) -> UniformBound:
    """Check that the circle suprema for ``phi_s`` never exceed those of ``phi`` plus ``psi``."""
    rr = _check_radii(radii, r_max)
    base_phi = np.exp(boundedness_profile(spec, phi, rr, angular_n=angular_n).log_sup_values)
    base_psi = np.exp(boundedness_profile(spec, psi, rr, angular_n=angular_n).log_sup_values)
    bound = base_phi + base_psi
    rows = []
    for s in s_values:
        sup_s = boundedness_profile(spec, phi.blend(psi, s), rr, angular_n=angular_n).sup_values
        rows += [
            {"s": s, "r": r, "sup_ratio": v, "bound": b} for r, v, b in zip(rr, sup_s, bound)
        ]
    frame = pd.DataFrame(rows)
    holds = bool(np.all(frame["sup_ratio"] <= frame["bound"] * (1.0 + 1e-12)))
    return {"holds": holds, "frame": frame}
