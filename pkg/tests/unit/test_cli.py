"""Tests for command dispatch with injected dependencies."""

import io
import json
import sys
from dataclasses import replace
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent.parent.parent))

from checkpoint import CheckpointState, save_checkpoint
from wz_borel.cli import DEFAULT_MAIN_DEPS, EXIT_DOMAIN_ERROR, EXIT_OK, EXIT_USAGE, dispatch, main
from wz_borel.errors import ConfigError
from wz_borel.models import Report, ReportSection, RunConfig
from wz_borel.physical import ode_reference
from wz_borel.scalars import get_max_zeta_index


def make_deps(**overrides):
    stdout = io.StringIO()
    return replace(DEFAULT_MAIN_DEPS, stdout=stdout, **overrides), stdout


@pytest.mark.unit
class TestMain:
    def test_exponent_is_printed(self, tmp_path):
        deps, stdout = make_deps()
        code = main(["--no_rich", "--out-dir", str(tmp_path), "exponents", "--k", "1", "--sign", "-"], deps)
        assert code == EXIT_OK
        assert stdout.getvalue() == "-5/3\n"

    def test_exponent_json_carries_balance(self, tmp_path):
        deps, stdout = make_deps()
        main(
            ["--no_rich", "--out-dir", str(tmp_path), "exponents", "--k", "2", "--sign", "-", "--out", "json"],
            deps,
        )
        data = json.loads(stdout.getvalue())
        assert data["exponent"] == "-2/3"
        assert data["coefficient"] == "-9/10*f_2"
        assert data["balance"]["location"] == "-2/3"

    def test_events_stay_off_stdout(self, tmp_path, capsys):
        deps, stdout = make_deps()
        main(["--no_rich", "--out-dir", str(tmp_path), "exponents", "--k", "3", "--sign", "+"], deps)
        captured = capsys.readouterr()
        assert stdout.getvalue() == "4/3\n"
        assert "METADATA:command:exponents" in captured.err
        assert "DONE" in captured.err

    def test_gamma_csv(self, tmp_path):
        deps, stdout = make_deps()
        main(["--no_rich", "--out-dir", str(tmp_path), "gamma", "--model", "ode", "--order", "4"], deps)
        assert stdout.getvalue() == "n,coefficient\n0,0\n1,1\n2,-2\n3,12\n4,-124\n"

    def test_gamma_written_to_file(self, tmp_path, capsys):
        deps, stdout = make_deps()
        main(
            ["--no_rich", "--out-dir", str(tmp_path), "gamma", "--model", "ode", "--order", "2", "--output", "g.csv"],
            deps,
        )
        assert stdout.getvalue() == ""
        assert (tmp_path / "g.csv").read_text(encoding="utf-8").startswith("n,coefficient\n")
        assert "ARTIFACT:series:" in capsys.readouterr().out

    def test_approx_only_series(self, tmp_path):
        deps, _ = make_deps()
        with pytest.raises(ConfigError, match="approx model"):
            main(["--no_rich", "--out-dir", str(tmp_path), "gamma", "--model", "ode", "--order", "2", "--series", "F"], deps)

    def test_full_model_checkpoints_every_order(self, tmp_path, mocker):
        save_spy = mocker.Mock(wraps=save_checkpoint)
        cleanup = mocker.Mock()
        deps, stdout = make_deps(save_checkpoint=save_spy, cleanup_checkpoint=cleanup)
        code = main(["--no_rich", "--out-dir", str(tmp_path), "gamma", "--order", "3", "--checkpoint"], deps)
        assert code == EXIT_OK
        assert save_spy.call_count == 3
        state = save_spy.call_args.args[1]
        assert state.completed_order == 3
        assert state.config["kernel"] == "taylor"
        cleanup.assert_called_once_with(str(tmp_path / "gamma-full.checkpoint"))
        assert stdout.getvalue().splitlines()[-1] == "3,12"

    def test_resume_passes_stored_coefficients(self, tmp_path, mocker):
        model_series = mocker.Mock(return_value={"gamma": ode_reference(4)})
        deps, _ = make_deps(model_series=model_series)
        checkpoint_dir = str(tmp_path / "gamma-full.checkpoint")
        config = {"kernel": "taylor", "max_zeta_index": get_max_zeta_index()}
        save_checkpoint(checkpoint_dir, CheckpointState("full", 4, config, [1, -2]))
        main(["--no_rich", "--out-dir", str(tmp_path), "gamma", "--order", "4", "--resume"], deps)
        assert model_series.call_args.kwargs["initial"] == [1, -2]

    def test_checkpoint_ignored_for_other_models(self, tmp_path, capsys, mocker):
        save_spy = mocker.Mock()
        deps, _ = make_deps(save_checkpoint=save_spy)
        main(["--no_rich", "--out-dir", str(tmp_path), "gamma", "--model", "ode", "--order", "3", "--checkpoint"], deps)
        assert "only apply to the full model" in capsys.readouterr().err
        save_spy.assert_not_called()

    def test_ray_json(self, tmp_path):
        deps, stdout = make_deps()
        main(
            ["--no_rich", "--out-dir", str(tmp_path), "ray", "--to", "1,1", "--steps", "8", "--system", "cosine", "--out", "json"],
            deps,
        )
        data = json.loads(stdout.getvalue())
        assert data["metadata"]["system"] == "cosine"
        assert data["metadata"]["steps"] == 8
        assert data["boundedness"]["finite"] is True

    def test_mellin_json(self, tmp_path):
        deps, stdout = make_deps()
        main(["--no_rich", "--out-dir", str(tmp_path), "mellin", "--order", "1"], deps)
        data = json.loads(stdout.getvalue())
        assert [(row["m"], row["n"]) for row in data["coefficients"]] == [(0, 0), (1, 0), (0, 1)]
        assert "convention" not in data

    def test_report_with_failed_section(self, tmp_path, mocker):
        report = Report(
            config=RunConfig(),
            defaults=RunConfig().to_dict(),
            sections=[ReportSection("singularities", "singular.domb_sykes", "error", error="too short")],
        )
        deps, stdout = make_deps(build_report=mocker.Mock(return_value=report))
        code = main(["--no_rich", "--out-dir", str(tmp_path), "report"], deps)
        assert code == EXIT_DOMAIN_ERROR
        assert json.loads(stdout.getvalue())["failed_sections"] == ["singularities"]


@pytest.mark.unit
class TestDispatch:
    def test_bad_flag_is_usage_error(self):
        deps, _ = make_deps()
        assert dispatch(["gamma", "--colour", "blue"], deps) == EXIT_USAGE

    def test_domain_error_exit_code(self, tmp_path, capsys):
        deps, _ = make_deps()
        code = dispatch(["--no_rich", "--out-dir", str(tmp_path), "gamma", "--order", "0"], deps)
        assert code == EXIT_DOMAIN_ERROR
        assert "order must be >= 1" in capsys.readouterr().err

    def test_unexpected_exception_is_domain_error(self, tmp_path, capsys, mocker):
        deps, _ = make_deps(solve_ray=mocker.Mock(side_effect=RuntimeError("march exploded")))
        code = dispatch(["--no_rich", "--out-dir", str(tmp_path), "ray", "--to", "0.5,0.5", "--steps", "20"], deps)
        assert code == EXIT_DOMAIN_ERROR
        assert "RuntimeError: march exploded" in capsys.readouterr().err

    def test_success(self, tmp_path):
        deps, _ = make_deps()
        assert dispatch(["--out-dir", str(tmp_path), "exponents", "--k", "1", "--sign", "+"], deps) == EXIT_OK
