"""Integration tests for the main processing flow."""

import io
import json
import os
import sys
from dataclasses import replace
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent.parent.parent))

from wz_borel.cli import DEFAULT_MAIN_DEPS, EXIT_DOMAIN_ERROR, EXIT_OK, main
from wz_borel.models import RunConfig
from wz_borel.report import DEFAULT_REPORT_DEPS, build_report


def small_config(output_dir: str) -> RunConfig:
    return RunConfig(
        order=4,
        asymptotic_order=40,
        ray_endpoint=complex(1.0, 1.0),
        ray_steps=40,
        output_dir=output_dir,
    )


def run_main(argv, **overrides):
    stdout = io.StringIO()
    deps = replace(DEFAULT_MAIN_DEPS, stdout=stdout, **overrides)
    code = main(["--no_rich", *argv], deps)
    return code, stdout.getvalue()


@pytest.mark.integration
class TestReportFlow:
    """End-to-end report assembly."""

    def test_all_sections_succeed(self, temp_dir):
        seen = []
        report = build_report(small_config(temp_dir), on_section=lambda s: seen.append(s.name))
        assert report.failed == []
        assert seen == ["gamma", "ratios", "singularities", "exponents", "weights", "ray", "invariants"]

        data = report.to_dict()
        sections = data["sections"]
        assert sections["gamma"]["order"] == 4
        assert sections["ratios"]["order"] == 40
        assert sections["ray"]["steps"] == 40
        assert sections["singularities"]["data"]["alternating"] is True
        assert sections["weights"]["data"]["exceptions"] == [1, 2]
        assert len(sections["exponents"]["data"]) == 10
        assert all(row["consistent"] for row in sections["exponents"]["data"])
        assert data["header"]["defaults"]["ray_steps"] == 2000

        suites = sections["invariants"]["data"]["suites"]
        assert sections["invariants"]["status"] == "ok"
        assert suites["weights"]["exceptions"] == [1, 2]
        assert suites["ratio_laws"]["series"]["gamma"]["skipped"] is False
        assert suites["ratio_laws"]["series"]["gamma"]["max_deviation"] <= 0.1
        assert suites["exp_additivity"]["leibniz"] is True

    def test_report_is_deterministic(self, temp_dir):
        config = small_config(temp_dir)
        assert build_report(config).to_dict() == build_report(config).to_dict()

    def test_failing_section_does_not_stop_report(self, temp_dir):
        config = replace(small_config(temp_dir), window=(30, 32))
        report = build_report(config)
        assert report.failed == ["singularities"]
        assert report.to_dict()["sections"]["ray"]["status"] == "ok"

    def test_unexpected_exception_is_recorded_per_section(self, temp_dir):
        def broken_fit(*args, **kwargs):
            raise ZeroDivisionError("float division by zero")

        deps = replace(DEFAULT_REPORT_DEPS, domb_sykes=broken_fit)
        report = build_report(small_config(temp_dir), deps=deps)
        assert report.failed == ["singularities"]
        sections = report.to_dict()["sections"]
        assert sections["singularities"]["error"] == "ZeroDivisionError: float division by zero"
        assert sections["ray"]["status"] == "ok"
        assert sections["invariants"]["status"] == "ok"

    def test_report_command_survives_solver_crash(self, temp_dir, mocker, capsys):
        config_path = os.path.join(temp_dir, "report.conf")
        with open(config_path, "w", encoding="utf-8") as f:
            f.write("ray_endpoint = 1,1\n")
        code, stdout = run_main(
            [
                "--out-dir", temp_dir,
                "--config", config_path,
                "report",
                "--order", "3",
                "--asymptotic-order", "40",
                "--steps", "20",
            ],
            solve_ray=mocker.Mock(side_effect=FloatingPointError("overflow in march")),
        )
        assert code == EXIT_DOMAIN_ERROR
        data = json.loads(stdout)
        assert data["failed_sections"] == ["ray"]
        assert data["sections"]["gamma"]["status"] == "ok"
        assert data["sections"]["invariants"]["status"] == "ok"
        assert "SECTION:ray:error" in capsys.readouterr().err

    def test_report_command_writes_file(self, temp_dir):
        config_path = os.path.join(temp_dir, "report.conf")
        with open(config_path, "w", encoding="utf-8") as f:
            f.write("ray_endpoint = 1,1\nray_steps = 40\n")
        code, stdout = run_main(
            [
                "--out-dir", temp_dir,
                "--config", config_path,
                "report",
                "--order", "3",
                "--asymptotic-order", "40",
                "--steps", "20",
                "--output", "report.json",
            ]
        )
        assert code == EXIT_OK
        assert stdout == ""
        with open(os.path.join(temp_dir, "report.json"), "r", encoding="utf-8") as f:
            data = json.load(f)
        assert data["header"]["config"]["order"] == 3
        assert data["failed_sections"] == []


@pytest.mark.integration
class TestCheckpointFlow:
    """An interrupted exact solve resumes to the uninterrupted result."""

    def test_resume_after_interruption(self, temp_dir, mocker):
        checkpoint_dir = os.path.join(temp_dir, "gamma-full.checkpoint")

        # Leave the checkpoint behind as an interrupted run would.
        code, _ = run_main(
            ["--out-dir", temp_dir, "gamma", "--order", "3", "--checkpoint"],
            cleanup_checkpoint=mocker.Mock(),
        )
        assert code == EXIT_OK
        assert os.path.exists(os.path.join(checkpoint_dir, "state.json"))

        _, resumed = run_main(["--out-dir", temp_dir, "gamma", "--order", "5", "--resume"])
        _, fresh = run_main(["--out-dir", temp_dir, "gamma", "--order", "5"])
        assert resumed == fresh
        assert not os.path.exists(checkpoint_dir)

    def test_incompatible_checkpoint_is_reported(self, temp_dir, mocker, capsys):
        run_main(
            ["--out-dir", temp_dir, "gamma", "--order", "3", "--checkpoint"],
            cleanup_checkpoint=mocker.Mock(),
        )
        capsys.readouterr()
        run_main(["--out-dir", temp_dir, "gamma", "--order", "4", "--kernel", "approx", "--resume"])
        assert "CHECKPOINT:INVALID:config_mismatch" in capsys.readouterr().err
