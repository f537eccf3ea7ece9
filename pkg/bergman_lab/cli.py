"""``bergman-lab`` command line.

Usage::

    bergman-lab verify-weights --weight "A=1 alpha=1"
    bergman-lab kernel-probe --z 0.5 --w 0.25+0.1i
    bergman-lab distance-field --from 0.3i --grid 41 --out field.csv
    bergman-lab criterion --phi "template half_one_plus_z2" --psi "poly 0.5,0,0.5"
    bergman-lab hsnorm --phi "template constant c=0" --psi "template constant c=0.5"
    bergman-lab path-experiment --s-grid 0,0.125,0.25,0.5,1 --out path.csv
    bergman-lab example-sec4 -v
    bergman-lab verify-all --out verify.csv

Settings come from ``--config FILE`` (see :mod:`bergman_lab.config`), then
flags, then ``BERGMAN_LAB_*`` environment variables.  CSV artifacts start
with a ``# provenance: {...}`` line and JSON artifacts carry a
``provenance`` key; either is enough to re-run the command.

Exit status: 0 on success, 1 when a check fails or a computation does not
converge, 2 on invalid input.
"""

from __future__ import annotations

import argparse
import logging
import math
import sys
from collections.abc import Callable, Sequence
from pathlib import Path
from typing import Any, TextIO

import pandas as pd

from bergman_lab._version import __version__
from bergman_lab.compop import VERDICT_LABELS
from bergman_lab.config import ExperimentConfig
from bergman_lab.exceptions import (
    BergmanLabError,
    DomainError,
    HypothesisError,
    SelfMapError,
    SpecParseError,
    WeightClassError,
)
from bergman_lab.hilbert_schmidt import HSResult
from bergman_lab.lab import BergmanLab
from bergman_lab.types import OmegaTauReport
from bergman_lab.utils import dumps, frame_to_csv
from bergman_lab.verify import CHECKS, run_checks

__all__ = ["build_parser", "main"]

logger = logging.getLogger("bergman_lab")

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_INVALID = 2

_INVALID_INPUT = (SpecParseError, DomainError, WeightClassError, SelfMapError, HypothesisError)
# Route agreement demanded by ``hsnorm --route both``.
HS_ROUTE_RTOL = 0.02
EXPECTED_EXAMPLE = {
    "phi": "bounded-noncompact",
    "psi": "bounded-noncompact",
    "difference": "compact",
}


# ── Output ───────────────────────────────────────────────────────────────


class Command:
    """One subcommand run: merged config, lab, and artifact writers."""

    def __init__(self, name: str, cfg: ExperimentConfig, lab: BergmanLab) -> None:
        self.name = name
        self.cfg = cfg
        self.lab = lab

    def provenance(self) -> dict[str, Any]:
        return {"command": self.name, "config": self.cfg.to_dict(), "lab": self.lab.provenance()}

    def _emit(self, text: str, path: str | None, stream: TextIO | None = None) -> None:
        if path is None:
            (stream or sys.stdout).write(text)
            return
        Path(path).write_text(text, encoding="utf-8")
        logger.info("wrote %s", path)

    def csv(self, frame: pd.DataFrame) -> None:
        self._emit(frame_to_csv(frame, self.provenance()), self.cfg.out)

    def json(self, record: dict[str, Any], *, sidecar: bool = False) -> None:
        """Write a JSON record to ``--out``.

        A ``sidecar`` record accompanies a CSV artifact: it goes next to
        ``--out`` with a ``.json`` suffix, or to stderr without ``--out``.
        """
        text = dumps({"provenance": self.provenance(), **record}).decode() + "\n"
        if not sidecar:
            self._emit(text, self.cfg.out)
        elif self.cfg.out is None:
            self._emit(text, None, sys.stderr)
        else:
            self._emit(text, str(Path(self.cfg.out).with_suffix(".json")))


def _hs_record(res: HSResult) -> dict[str, Any]:
    return {
        "value_sq": res.value_sq,
        "norm": res.norm,
        "status": res.status,
        "truncation": res.truncation,
        "err": res.err,
    }


def _omegatau_record(rep: OmegaTauReport) -> dict[str, Any]:
    return {
        "m": rep["m"],
        "M": rep["M"],
        "order_data": rep["order_data"],
        "contact": rep["contact"]["status"],
        "contact_inf": rep["contact"]["inf_value"],
        "hypotheses_hold": rep["hypotheses_hold"],
        "decays": rep["decays"],
    }


# ── Subcommands ──────────────────────────────────────────────────────────


def cmd_verify_weights(cmd: Command) -> int:
    audit = cmd.lab.weight_audit()
    bad = audit["lipschitz_violations"] + audit["equiquan_violations"]
    cmd.json({"weight": str(cmd.lab.weight), "audit": audit, "passed": bad == 0})
    return EXIT_OK if bad == 0 else EXIT_FAILED


def cmd_kernel_value(cmd: Command) -> int:
    z = cmd.cfg.z
    w = z if cmd.cfg.w is None else cmd.cfg.w
    val = cmd.lab.kernel_value(z, w)
    cmd.json(
        {
            "z": z,
            "w": w,
            "log_abs": val.log_abs,
            "phase": val.phase,
            "terms_used": val.terms_used,
            "tail_bound": val.tail_bound,
        }
    )
    return EXIT_OK


def cmd_distance_field(cmd: Command) -> int:
    frame = cmd.lab.distance_field(cmd.cfg.z, cmd.cfg.field_points())
    cmd.csv(frame)
    return EXIT_OK


def cmd_criterion(cmd: Command) -> int:
    phi, psi = cmd.cfg.maps()
    radii = cmd.cfg.radii
    xi, p, samples = cmd.cfg.z, cmd.cfg.p, cmd.cfg.mc_samples
    carleson = {
        "xi": xi,
        "p": p,
        "phi": cmd.lab.carleson(phi, xi, p, samples),
        "psi": cmd.lab.carleson(psi, xi, p, samples),
    }
    rep = cmd.lab.difference(phi, psi, radii)
    cmd.csv(rep.to_frame()[["r", "sup_value", "log_sup_value", "argmax_theta"]])
    cmd.json(
        {
            "phi": str(phi),
            "psi": str(psi),
            "verdict": rep.verdict,
            "difference": VERDICT_LABELS["difference"][rep.verdict],
            "phi_boundedness": cmd.lab.boundedness(phi, radii).verdict,
            "psi_boundedness": cmd.lab.boundedness(psi, radii).verdict,
            "carleson": carleson,
        },
        sidecar=True,
    )
    return EXIT_OK


def cmd_hsnorm(cmd: Command) -> int:
    phi, psi = cmd.cfg.maps()
    routes = cmd.lab.hs_norm(phi, psi, route=cmd.cfg.route)  # type: ignore[arg-type]
    record: dict[str, Any] = {
        "phi": str(phi),
        "psi": str(psi),
        "routes": {name: _hs_record(res) for name, res in routes.items()},
    }
    status = EXIT_OK
    if len(routes) == 2:
        a, b = (res.value_sq for res in routes.values())
        if math.isfinite(a) and math.isfinite(b):
            rel = abs(a - b) / max(a, b) if max(a, b) > 0 else 0.0
            record["relative_difference"] = rel
            record["agree"] = rel <= HS_ROUTE_RTOL
        else:
            record["agree"] = math.isinf(a) == math.isinf(b)
        if not record["agree"]:
            logger.warning("HS routes disagree for %s vs %s", phi, psi)
            status = EXIT_FAILED
    cmd.json(record)
    return status


def cmd_path_experiment(cmd: Command) -> int:
    phi, psi = cmd.cfg.maps()
    res = cmd.lab.path(phi, psi, cmd.cfg.s_grid)
    cmd.csv(res["matrix"])
    cmd.json(
        {
            "status": res["status"],
            "all_finite": res["all_finite"],
            "max_adjacent": res["max_adjacent"],
            "triangle_violations": res["triangle_violations"],
        },
        sidecar=True,
    )
    if res["status"] == "contradiction" or res["triangle_violations"]:
        return EXIT_FAILED
    return EXIT_OK


def cmd_example_sec4(cmd: Command) -> int:
    """Bounded, non-compact pair with a compact difference."""
    rep = cmd.lab.bounded_pair_example(radii=cmd.cfg.radii)
    verdicts = {k: rep[k] for k in EXPECTED_EXAMPLE}  # type: ignore[literal-required]
    ok = verdicts == EXPECTED_EXAMPLE
    cmd.json(
        {
            **verdicts,
            "expected": EXPECTED_EXAMPLE,
            "passed": ok,
            "real_axis_ratio": rep["real_axis_ratio"],
            "omegatau": {z: _omegatau_record(r) for z, r in rep["omegatau"].items()},
            "profiles": rep["profiles"],
        }
    )
    return EXIT_OK if ok else EXIT_FAILED


def cmd_verify_all(cmd: Command, checks: Sequence[str] | None = None) -> int:
    frame = run_checks(cmd.lab, checks)
    cmd.csv(frame)
    failed = frame.loc[~frame["passed"], "check"].tolist()
    if failed:
        logger.warning("failed checks: %s", ", ".join(failed))
        return EXIT_FAILED
    return EXIT_OK


COMMANDS: dict[str, tuple[Callable[..., int], str]] = {
    "verify-weights": (cmd_verify_weights, "class-W constants and property audits"),
    "kernel-probe": (cmd_kernel_value, "log-domain K(z, w) as JSON"),
    "distance-field": (cmd_distance_field, "d_tau, rho_tau and S from one point, as CSV"),
    "criterion": (cmd_criterion, "difference-criterion profile (CSV) and verdict (JSON)"),
    "hsnorm": (cmd_hsnorm, "Hilbert-Schmidt norm of C_phi - C_psi"),
    "path-experiment": (cmd_path_experiment, "pairwise HS matrix along the segment"),
    "example-sec4": (cmd_example_sec4, "reproduce the bounded pair with compact difference"),
    "verify-all": (cmd_verify_all, "run the acceptance suite"),
}


# ── Parser ───────────────────────────────────────────────────────────────


def _common() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="settings file of 'key value' lines")
    common.add_argument("--weight", help="'A=<float> alpha=<float>'")
    common.add_argument("--phi", help="'poly c0,c1,...' or 'template <name> [k=v ...]'")
    common.add_argument("--psi", help="second self-map, same grammar as --phi")
    common.add_argument("--radii", help="increasing radii for boundary profiles")
    common.add_argument("--tol", help="relative tolerance of the radial quadrature")
    common.add_argument("--seed", help="seed for sampled pairs and Monte Carlo")
    common.add_argument("--resolution", help="polar grid resolution for d_tau")
    common.add_argument("--angular-n", dest="angular_n", help="points per circle")
    common.add_argument("--n-max", dest="n_max", help="kernel series cap")
    common.add_argument("--r-max", dest="r_max", help="largest admissible radius")
    common.add_argument("--threads", help="worker threads for sweeps")
    common.add_argument("--out", help="artifact path (stdout when omitted)")
    common.add_argument("--progress", action="store_true", help="show progress bars")
    common.add_argument(
        "-v", "--verbose", action="count", default=0, help="-v for INFO, -vv for DEBUG"
    )
    return common


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bergman-lab",
        description="Composition operators on Bergman spaces with exponential weights.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")
    common = _common()
    parsers = {
        name: sub.add_parser(name, parents=[common], help=help_)
        for name, (_, help_) in COMMANDS.items()
    }
    parsers["kernel-probe"].add_argument("--z", help="first point, e.g. 0.5-0.25i")
    parsers["kernel-probe"].add_argument("--w", help="second point (defaults to z)")
    field = parsers["distance-field"]
    field.add_argument("--from", dest="z", help="base point")
    field.add_argument("--grid", type=int, help="grid points per side")
    field.add_argument("--grid-radius", type=float, help="grid half-width (default 0.95)")
    field.add_argument("--points", help="explicit points instead of a grid")
    criterion = parsers["criterion"]
    criterion.add_argument("--z", help="center of the pullback-measure disk (default 0)")
    criterion.add_argument("--p", help="exponent of the pullback measure (default 2)")
    criterion.add_argument("--mc-samples", dest="mc_samples", help="Monte Carlo samples")
    parsers["hsnorm"].add_argument("--route", choices=("integral", "basis", "both"))
    parsers["path-experiment"].add_argument("--s-grid", dest="s_grid", help="values in [0, 1]")
    parsers["verify-all"].add_argument(
        "--check", action="append", choices=list(CHECKS), help="run only this check (repeatable)"
    )
    return parser


_SETTINGS = (
    "weight", "phi", "psi", "radii", "tol", "seed", "resolution", "angular_n",
    "n_max", "r_max", "threads", "out", "z", "w", "points", "route", "s_grid", "p",
    "mc_samples",
)  # fmt: skip


def load_config(args: argparse.Namespace) -> ExperimentConfig:
    """Config file (if any) overridden by flags."""
    cfg = ExperimentConfig.from_file(args.config) if args.config else ExperimentConfig()
    overrides = {key: getattr(args, key, None) for key in _SETTINGS}
    if getattr(args, "grid", None) is not None or getattr(args, "grid_radius", None) is not None:
        n = args.grid if args.grid is not None else cfg.grid[0]
        radius = args.grid_radius if args.grid_radius is not None else cfg.grid[1]
        overrides["grid"] = (n, radius)
    return cfg.merged(overrides)


def _configure_logging(verbosity: int) -> None:
    level = logging.WARNING if verbosity == 0 else logging.INFO if verbosity == 1 else logging.DEBUG
    logging.basicConfig(
        level=level, format="%(asctime)s %(name)s %(levelname)s %(message)s", force=True
    )


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_INVALID
    _configure_logging(args.verbose)
    fn = COMMANDS[args.command][0]
    try:
        cfg = load_config(args)
        cmd = Command(args.command, cfg, cfg.lab(progress=args.progress))
        if args.command == "verify-all":
            return cmd_verify_all(cmd, args.check)
        return fn(cmd)
    except _INVALID_INPUT as exc:
        print(f"bergman-lab {args.command}: invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except OSError as exc:
        print(f"bergman-lab {args.command}: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except BergmanLabError as exc:
        logger.error("%s failed: %s", args.command, exc)
        return EXIT_FAILED


if __name__ == "__main__":
    sys.exit(main())
