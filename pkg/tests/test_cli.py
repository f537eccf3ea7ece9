"""Tests for the ``bergman-lab`` command line."""

from pathlib import Path

import orjson
import pandas as pd
import pytest

from bergman_lab.cli import EXIT_FAILED, EXIT_INVALID, EXIT_OK, build_parser, main

RADII = "0.9 0.95 0.99 0.995"


def _provenance(path: Path) -> dict:
    first = path.read_text(encoding="utf-8").splitlines()[0]
    prefix = "# provenance: "
    assert first.startswith(prefix)
    return orjson.loads(first[len(prefix) :])


# ── parsing ──────────────────────────────────────────────────────────────────


def test_help_exits_ok():
    assert main(["--help"]) == EXIT_OK


def test_parser_knows_every_subcommand():
    parser = build_parser()
    for name in (
        "verify-weights",
        "kernel-probe",
        "distance-field",
        "criterion",
        "hsnorm",
        "path-experiment",
        "example-sec4",
        "verify-all",
    ):
        assert parser.parse_args([name]).command == name


@pytest.mark.parametrize(
    "argv",
    [
        [],
        ["no-such-command"],
        ["verify-all", "--check", "no-such-check"],
        ["hsnorm", "--route", "sideways"],
        ["kernel-probe", "--weight", "A=one"],
        ["kernel-probe", "--weight", "alpha=-1"],
        ["kernel-probe", "--z", "half"],
        ["kernel-probe", "--z", "1.5"],
        ["criterion", "--phi", "map poly 2,0"],
        ["criterion", "--radii", "0.9 0.95"],
        ["kernel-probe", "--config", "/nonexistent/run.cfg"],
    ],
)
def test_invalid_input_exits_2(argv: list[str]):
    assert main(argv) == EXIT_INVALID


def test_unbounded_operator_is_invalid_for_criterion(capsys: pytest.CaptureFixture):
    argv = ["criterion", "--phi", "template half_one_plus_z", "--radii", RADII]
    assert main(argv) == EXIT_INVALID
    assert "invalid input" in capsys.readouterr().err


# ── subcommands ──────────────────────────────────────────────────────────────


def test_kernel_command_json(tmp_path: Path):
    out = tmp_path / "kernel.json"
    argv = ["kernel-probe", "--z", "0", "--w", "0.5", "--threads", "1", "--out", str(out)]
    assert main(argv) == EXIT_OK
    record = orjson.loads(out.read_bytes())
    assert record["provenance"]["command"] == "kernel-probe"
    assert record["provenance"]["lab"]["weight"] == "weight A=1 alpha=1"
    assert record["w"] == {"re": 0.5, "im": 0.0}
    assert record["phase"] == 0.0
    assert record["terms_used"] >= 1


def test_kernel_command_to_stdout(capsys: pytest.CaptureFixture):
    assert main(["kernel-probe", "--z", "0.3+0.1i"]) == EXIT_OK
    record = orjson.loads(capsys.readouterr().out)
    assert record["z"] == {"re": 0.3, "im": 0.1}
    assert record["w"] == record["z"]


def test_criterion_equal_maps(tmp_path: Path):
    out = tmp_path / "criterion.csv"
    argv = [
        "criterion",
        "--phi", "template half_one_plus_z2",
        "--psi", "template half_one_plus_z2",
        "--radii", RADII,
        "--out", str(out),
    ]  # fmt: skip
    assert main(argv) == EXIT_OK
    prov = _provenance(out)
    assert prov["command"] == "criterion"
    assert prov["config"]["radii"] == [0.9, 0.95, 0.99, 0.995]
    frame = pd.read_csv(out, skiprows=1)
    assert list(frame["r"]) == [0.9, 0.95, 0.99, 0.995]
    verdict = orjson.loads(out.with_suffix(".json").read_bytes())
    assert verdict["verdict"] == "decays-to-zero"
    assert verdict["difference"] == "compact"
    assert verdict["phi_boundedness"] == "bounded-nonvanishing"


def test_criterion_carleson_settings(tmp_path: Path):
    out = tmp_path / "criterion.csv"
    argv = [
        "criterion",
        "--phi", "template scaled c=0.5",
        "--psi", "template constant c=0",
        "--radii", RADII,
        "--z", "0.25",
        "--p", "1",
        "--mc-samples", "200000",
        "--threads", "1",
        "--out", str(out),
    ]  # fmt: skip
    assert main(argv) == EXIT_OK
    prov = _provenance(out)
    assert prov["config"]["p"] == 1.0
    assert prov["config"]["mc_samples"] == 200000
    carleson = orjson.loads(out.with_suffix(".json").read_bytes())["carleson"]
    assert carleson["p"] == 1.0
    assert carleson["xi"] == {"re": 0.25, "im": 0.0}
    assert carleson["phi"]["samples"] == 200000
    assert carleson["phi"]["ratio"] > 0
    assert carleson["psi"]["ratio"] == 0.0


def test_criterion_rejects_too_few_samples(tmp_path: Path):
    argv = [
        "criterion",
        "--phi", "template scaled c=0.5",
        "--psi", "template constant c=0",
        "--radii", RADII,
        "--mc-samples", "10",
        "--out", str(tmp_path / "criterion.csv"),
    ]  # fmt: skip
    assert main(argv) == EXIT_INVALID


def test_config_file_and_flag_override(tmp_path: Path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text(
        "phi template scaled c=0.5\npsi template scaled c=0.5\nradii 0.9 0.95 0.99\nseed 3\n",
        encoding="utf-8",
    )
    out = tmp_path / "criterion.csv"
    argv = ["criterion", "--config", str(cfg), "--seed", "5", "--radii", RADII, "--out", str(out)]
    assert main(argv) == EXIT_OK
    prov = _provenance(out)
    assert prov["config"]["phi"] == "template scaled c=0.5"
    assert prov["config"]["seed"] == 5
    assert prov["lab"]["seed"] == 5
    assert len(pd.read_csv(out, skiprows=1)) == 4


def test_distance_field_csv(tmp_path: Path):
    out = tmp_path / "field.csv"
    argv = ["distance-field", "--from", "0", "--points", "0.75 0.5i", "--out", str(out)]
    assert main(argv) == EXIT_OK
    frame = pd.read_csv(out, skiprows=1)
    assert len(frame) == 2
    assert frame.loc[0, "d_tau"] == pytest.approx(2.0, rel=1e-3)
    assert _provenance(out)["config"]["points"] == [
        {"re": 0.75, "im": 0.0},
        {"re": 0.0, "im": 0.5},
    ]


def test_hsnorm_integral_route(tmp_path: Path):
    out = tmp_path / "hs.json"
    argv = [
        "hsnorm",
        "--phi", "template constant c=0",
        "--psi", "template constant c=0.5",
        "--route", "integral",
        "--out", str(out),
    ]  # fmt: skip
    assert main(argv) == EXIT_OK
    record = orjson.loads(out.read_bytes())
    assert set(record["routes"]) == {"integral"}
    assert record["routes"]["integral"]["status"] == "finite"
    assert "agree" not in record


def test_verify_weights(tmp_path: Path):
    out = tmp_path / "weights.json"
    assert main(["verify-weights", "--out", str(out)]) == EXIT_OK
    record = orjson.loads(out.read_bytes())
    assert record["passed"] is True
    assert record["audit"]["lipschitz_violations"] == 0


def test_verify_all_single_check(tmp_path: Path):
    out = tmp_path / "verify.csv"
    assert main(["verify-all", "--check", "kernel-origin", "--out", str(out)]) == EXIT_OK
    frame = pd.read_csv(out, skiprows=1)
    assert list(frame["check"]) == ["kernel-origin"]
    assert bool(frame.loc[0, "passed"])


def test_failed_check_exits_1(monkeypatch: pytest.MonkeyPatch, tmp_path: Path):
    from bergman_lab import verify

    monkeypatch.setitem(
        verify.CHECKS, "kernel-origin", lambda lab: verify.CheckOutcome(False, 1.0, "forced")
    )
    out = tmp_path / "verify.csv"
    assert main(["verify-all", "--check", "kernel-origin", "--out", str(out)]) == EXIT_FAILED


def test_path_experiment_between_constants(tmp_path: Path):
    out = tmp_path / "path.csv"
    argv = [
        "path-experiment",
        "--phi", "template constant c=0",
        "--psi", "template constant c=0.5",
        "--s-grid", "0,0.5,1",
        "--out", str(out),
    ]  # fmt: skip
    assert main(argv) == EXIT_OK
    assert len(pd.read_csv(out, skiprows=1)) == 9
    summary = orjson.loads(out.with_suffix(".json").read_bytes())
    assert summary["status"] == "ok"
    assert summary["all_finite"] is True


@pytest.mark.slow
def test_bounded_pair_command(tmp_path: Path):
    out = tmp_path / "example.json"
    assert main(["example-sec4", "--radii", RADII, "--out", str(out)]) == EXIT_OK
    record = orjson.loads(out.read_bytes())
    assert record["passed"] is True
    assert record["difference"] == "compact"
