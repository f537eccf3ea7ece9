"""Acceptance suite: closed-form oracles and property checks.

Each check takes a :class:`~bergman_lab.lab.BergmanLab` and returns a
:class:`CheckOutcome`; :func:`run_checks` runs a selection and collects one
row per check.  A check that raises a library error fails with the error as
its detail instead of aborting the suite.
"""

from __future__ import annotations

import logging
import math
import time
from collections.abc import Callable, Iterable
from dataclasses import dataclass

import numpy as np
import pandas as pd
from pandera.typing import DataFrame
from tqdm.auto import tqdm

from bergman_lab.compop import constant, contact_perturbation, half_one_plus_z2, scaled
from bergman_lab.exceptions import BergmanLabError, DomainError
from bergman_lab.kernel import moment_oracle, reproducing_identity
from bergman_lab.lab import BergmanLab
from bergman_lab.metric import d_tau, d_tau_grid, d_tau_radial, d_tau_refine
from bergman_lab.schemas import VerifySchema

__all__ = ["CHECKS", "EXAMPLE_RADII", "CheckOutcome", "run_checks"]

logger = logging.getLogger("bergman_lab")

EXAMPLE_RADII = (0.9, 0.95, 0.99, 0.995)
# n_max for kernel distances with both points out to |z| = 0.995.
COMPARABILITY_N_MAX = 10**5


@dataclass(frozen=True)
class CheckOutcome:
    passed: bool
    value: float
    detail: str


Check = Callable[[BergmanLab], CheckOutcome]
CHECKS: dict[str, Check] = {}


def check(name: str) -> Callable[[Check], Check]:
    def register(fn: Check) -> Check:
        CHECKS[name] = fn
        return fn

    return register


def _rel(a: float, b: float) -> float:
    return abs(a - b) / abs(b)


# ── Moments and kernel ───────────────────────────────────────────────────


@check("moments-oracle")
def moments_oracle(lab: BergmanLab) -> CheckOutcome:
    """``m_n`` against a 10^7-cell midpoint rule for ``n`` in 0, 1, 5, 20."""
    table = lab.moments(20)
    errs = {
        n: abs(math.expm1(table.log_m[n] - moment_oracle(lab.weight, n))) for n in (0, 1, 5, 20)
    }
    worst = max(errs, key=errs.__getitem__)
    return CheckOutcome(errs[worst] <= 1e-8, errs[worst], f"worst at n={worst}")


@check("moments-shape")
def moments_shape(lab: BergmanLab) -> CheckOutcome:
    """Strict decrease and log-convexity up to degree 200."""
    table = lab.moments(200)
    lm, err = table.log_m, table.err
    decreasing = bool(np.all(np.diff(lm) < 0))
    second = lm[:-2] - 2.0 * lm[1:-1] + lm[2:]
    slack = err[:-2] + 2.0 * err[1:-1] + err[2:]
    convex = bool(np.all(second >= -slack))
    return CheckOutcome(
        decreasing and convex,
        float(second.min()),
        f"decreasing={decreasing} log-convex={convex}",
    )


@check("kernel-origin")
def kernel_origin(lab: BergmanLab) -> CheckOutcome:
    """``K(0, w) = 1 / m_0`` for points across the disk."""
    log_m0 = float(lab.table.log_m[0])
    errs = [
        abs(math.expm1(lab.kernel_value(0j, w).log_abs + log_m0))
        for w in (0.3, 0.9j, -0.95, 0.6 - 0.6j)
    ]
    return CheckOutcome(max(errs) <= 1e-12, max(errs), "4 points")


@check("reproducing-identity")
def reproducing(lab: BergmanLab) -> CheckOutcome:
    """``<xi^k, K_z> = z^k`` for ``k <= 10`` at two points with ``|z| <= 0.9``."""
    worst = 0.0
    for z in (0.45 + 0.2j, 0.9 * complex(math.cos(0.6), math.sin(0.6))):
        for k in range(11):
            got = reproducing_identity(lab.table, k, z, n_max=lab.n_max)
            worst = max(worst, abs(got - z**k) / abs(z**k))
    return CheckOutcome(worst <= 1e-6, worst, "k = 0..10")


# ── Geodesic distance ────────────────────────────────────────────────────


@check("geodesic-oracle")
def geodesic_oracle(lab: BergmanLab) -> CheckOutcome:
    """Grid and refined ``d_tau(0, 0.75)`` against the radial closed form."""
    exact = d_tau_radial(lab.weight, 0.0, 0.75)
    grid = d_tau_grid(lab.weight, 0j, 0.75 + 0j, lab.resolution, r_max=lab.r_max)
    refined = d_tau_refine(lab.weight, grid)
    grid_err, refined_err = _rel(grid.distance, exact), _rel(refined.distance, exact)
    return CheckOutcome(
        grid_err <= 0.01 and refined_err <= 1e-3,
        refined_err,
        f"exact={exact:.6f} grid_err={grid_err:.2e}",
    )


@check("geodesic-agreement")
def geodesic_agreement(lab: BergmanLab) -> CheckOutcome:
    """Refined distances from two grid resolutions agree on 20 pairs in ``|z| <= 0.99``.

    Refinement must also never exceed its grid seed.
    """
    worst, above = 0.0, 0
    for z, w in lab.sample_pairs(20, radius=0.99):
        grid = d_tau_grid(lab.weight, z, w, lab.resolution, r_max=lab.r_max)
        refined = d_tau_refine(lab.weight, grid)
        fine = d_tau(lab.weight, z, w, resolution=2 * lab.resolution, r_max=lab.r_max)
        above += refined.distance > grid.distance * (1.0 + 1e-12)
        worst = max(worst, _rel(refined.distance, fine.distance))
    return CheckOutcome(worst <= 0.01 and above == 0, worst, f"refined above grid: {above}")


@check("comparability")
def comparability(lab: BergmanLab) -> CheckOutcome:
    """``S / rho_tau`` band on 500 pairs in ``|z| <= 0.995`` and its refinement stability."""
    deep = lab.with_settings(n_max=max(lab.n_max, COMPARABILITY_N_MAX))
    report = deep.comparability(deep.sample_pairs(500, radius=0.995))
    passed = (
        report["spread"] < 100
        and report["median_change"] < 0.10
        and report["kernel_spread"] < 100
    )
    return CheckOutcome(
        passed,
        report["spread"],
        f"median_change={report['median_change']:.3f} "
        f"kernel_spread={report['kernel_spread']:.2f}",
    )


# ── Worked example ───────────────────────────────────────────────────────


@check("bounded-pair-example")
def bounded_pair(lab: BergmanLab) -> CheckOutcome:
    """Both maps bounded and non-compact, the difference decaying.

    ``phi``'s circle suprema stay in ``[1, e^0.6]`` and its real-axis ratio
    at ``r_max`` is ``e^{1/2}`` within 2%; ``psi`` keeps a finite band; the
    difference profile decreases to below 10% of its first value.
    """
    phi, psi = half_one_plus_z2(), contact_perturbation()
    rep_phi = lab.boundedness(phi, EXAMPLE_RADII)
    rep_psi = lab.boundedness(psi, EXAMPLE_RADII)
    diff = lab.difference(phi, psi, EXAMPLE_RADII)
    example = lab.bounded_pair_example(radii=EXAMPLE_RADII)

    phi_band = bool(np.all((rep_phi.log_sup_values >= -1e-9) & (rep_phi.log_sup_values <= 0.6)))
    psi_band = bool(np.all(np.isfinite(rep_psi.log_sup_values)))
    real_axis = _rel(example["real_axis_ratio"], math.exp(0.5))
    noncompact = "decays-to-zero" not in (rep_phi.verdict, rep_psi.verdict)
    d = diff.sup_values
    decays = bool(np.all(np.diff(d) < 0) and d[-1] < 0.1 * d[0])
    passed = phi_band and psi_band and real_axis <= 0.02 and noncompact and decays
    return CheckOutcome(
        passed,
        float(d[-1] / d[0]) if d[0] > 0 else math.nan,
        f"phi_band={phi_band} psi_band={psi_band} real_axis_err={real_axis:.2e} "
        f"noncompact={noncompact} difference_decays={decays}",
    )


# ── Hilbert-Schmidt ──────────────────────────────────────────────────────


@check("hs-route-agreement")
def hs_routes(lab: BergmanLab) -> CheckOutcome:
    """Integral and basis-sum routes within 2%; constants match ``m_0 K(c, c) - 1`` within 1%."""
    c = 0.5
    worst, closed_err = 0.0, 0.0
    for phi, psi in ((constant(0), constant(c)), (scaled(0.5), scaled(1 / 3))):
        routes = lab.hs_norm(phi, psi, route="both")
        a, b = routes["integral"].value_sq, routes["basis-sum"].value_sq
        worst = max(worst, abs(a - b) / max(a, b))
        if phi.degree == 0:
            closed = math.exp(lab.table.log_m[0] + lab.kernel_value(c, c).log_abs) - 1.0
            closed_err = _rel(a, closed)
    return CheckOutcome(
        worst <= 0.02 and closed_err <= 0.01, worst, f"closed_form_err={closed_err:.2e}"
    )


@check("path-experiment")
def path(lab: BergmanLab) -> CheckOutcome:
    """Constant endpoints: every entry finite, adjacent entries shrink when the mesh halves."""
    phi, psi = constant(0), constant(0.5)
    coarse = lab.path(phi, psi, np.linspace(0.0, 1.0, 5))
    fine = lab.path(phi, psi, np.linspace(0.0, 1.0, 9))
    finite = coarse["all_finite"] and fine["all_finite"]
    shrinks = fine["max_adjacent"] < coarse["max_adjacent"]
    return CheckOutcome(
        finite and shrinks and fine["triangle_violations"] == 0,
        fine["max_adjacent"],
        f"coarse_max_adjacent={coarse['max_adjacent']:.4g} status={fine['status']}",
    )


@check("segment-stability")
def segment(lab: BergmanLab) -> CheckOutcome:
    """Segment ``rho_tau`` constant stable within 20% when the s-grid is refined."""
    z, w = 0.2 - 0.1j, 0.7 + 0.4j
    coarse = lab.segment_bound(z, w, np.linspace(0.0, 1.0, 9))["constant"]
    fine = lab.segment_bound(z, w, np.linspace(0.0, 1.0, 17))["constant"]
    change = _rel(fine, coarse)
    return CheckOutcome(change <= 0.2, change, f"coarse={coarse:.4f} fine={fine:.4f}")


@check("weight-class")
def weight_class(lab: BergmanLab) -> CheckOutcome:
    """Class constants measured and the Lipschitz and comparability audits clean."""
    audit = lab.weight_audit()
    bad = audit["lipschitz_violations"] + audit["equiquan_violations"]
    return CheckOutcome(
        bad == 0, audit["m_tau"], f"c1={audit['c1']:.4g} c2={audit['c2']:.4g} violations={bad}"
    )


# ── Runner ───────────────────────────────────────────────────────────────


def run_checks(
    lab: BergmanLab, names: Iterable[str] | None = None
) -> DataFrame[VerifySchema]:
    """Run the named checks (all by default) in registration order.

    Raises:
        DomainError: an unknown check name.
    """
    selected = list(CHECKS) if names is None else list(names)
    unknown = [n for n in selected if n not in CHECKS]
    if unknown:
        raise DomainError("checks", unknown, f"known checks: {', '.join(CHECKS)}")
    rows = []
    for name in tqdm(selected, desc="verify", disable=not lab.progress, leave=False):
        start = time.perf_counter()
        try:
            outcome = CHECKS[name](lab)
        except BergmanLabError as exc:
            logger.warning("check %s raised %s", name, exc)
            outcome = CheckOutcome(False, math.nan, f"{type(exc).__name__}: {exc}")
        seconds = time.perf_counter() - start
        logger.info(
            "%s %s (%.1fs) %s", "PASS" if outcome.passed else "FAIL", name, seconds, outcome.detail
        )
        rows.append(
            {
                "check": name,
                "passed": outcome.passed,
                "value": outcome.value,
                "detail": outcome.detail,
                "seconds": seconds,
            }
        )
    return DataFrame[VerifySchema](pd.DataFrame(rows))
