# tests/test_pipeline.py
"""
Verification Pipeline Tests

Purpose:
- Test the pipeline end to end on reduced run configurations
- Test run directory artifacts (tables, summaries, manifest)
- Test reproducibility of reruns and exit codes for bad input

Test Coverage:
- run_verification / VerificationPipeline with the lattice and reduce suites
- CSV column order and manifest contents
- Byte-identical reruns and worker-count independence
- Configuration and usage errors (exit code 2)
- Normalization check at setup (exit code 1)
- RunConfig round trip, config digest and schema errors
- five_point_derivative, gaussian_bump_critical_r, handle_numeric_error
"""

import json
import math

import pandas as pd
import pytest
from pydantic import ValidationError

from scripts.compare_runs import compare_runs
from src.core.config import config_digest, dump_run_config, load_run_config, settings
from src.core.exceptions import MissingConfigException, NumericException, handle_numeric_error
from src.core.models import InteractionSuiteSpec, PotentialSpec, RunConfig
from src.processing.verification_pipeline import (
    VALUE_COLUMNS,
    VerificationPipeline,
    five_point_derivative,
    gaussian_bump_critical_r,
    run_verification,
)
from tests.conftest import R_STAR_BUMP

MANIFEST_KEYS = {
    "config_digest", "config", "seed", "version", "tolerances", "eta_profile", "c_Ns",
    "a2_resolution", "solution_assumption", "suites", "checks", "files",
}


class TestPipelineRun:
    """Test a full run of the fast suites"""

    @pytest.mark.slow
    def test_lattice_and_reduce_pass(self, small_run_config, temp_run_dir):
        result = run_verification(small_run_config, out_dir=str(temp_run_dir))
        assert result["exit_code"] == 0, result.get("error") or result["failed_checks"]
        assert result["status"] == "success"
        assert result["stats"]["suites_run"] == ["lattice", "reduce"]
        assert all(check["passed"] for check in result["checks"])
        for name in ("lattice.csv", "lattice.json", "reduce.csv", "reduce.json", "manifest.json"):
            assert (temp_run_dir / name).exists()
        reduce = pd.read_csv(temp_run_dir / "reduce.csv").set_index("quantity")
        assert reduce.loc["r_star", "value_est"] == pytest.approx(R_STAR_BUMP, abs=1e-8)

    @pytest.mark.slow
    def test_constants_table(self, small_run_config, temp_run_dir):
        result = run_verification(small_run_config, suites=["constants"], out_dir=str(temp_run_dir))
        assert result["exit_code"] == 0, result.get("error") or result["failed_checks"]
        table = pd.read_csv(temp_run_dir / "constants.csv")
        row = table[table["quantity"] == "two_s_star"].iloc[0]
        assert row["value_est"] == pytest.approx(20.0 / 7.0, rel=1e-15)

    @pytest.mark.slow
    def test_table_columns(self, small_run_config, temp_run_dir):
        run_verification(small_run_config, suites=["lattice"], out_dir=str(temp_run_dir))
        table = pd.read_csv(temp_run_dir / "lattice.csv")
        assert list(table.columns) == ["quantity", "k", "h_bar", "kh", *VALUE_COLUMNS]
        assert set(table["quantity"]) >= {"A441_sameside", "A441_cross_Nm2s"}

    @pytest.mark.slow
    def test_manifest(self, small_run_config, temp_run_dir):
        run_verification(small_run_config, suites=["reduce"], seed=7, out_dir=str(temp_run_dir))
        manifest = json.loads((temp_run_dir / "manifest.json").read_text(encoding="utf-8"))
        assert MANIFEST_KEYS <= set(manifest)
        assert manifest["seed"] == 7
        assert manifest["suites"] == ["reduce"]
        assert "reduce.csv" in manifest["files"]
        assert "start_time" not in manifest

    @pytest.mark.slow
    def test_suites_run_in_canonical_order(self, small_run_config, temp_run_dir):
        pipeline = VerificationPipeline(small_run_config, out_dir=str(temp_run_dir))
        result = pipeline.run(["reduce", "lattice"])
        assert result["stats"]["suites_run"] == ["lattice", "reduce"]


class TestReproducibility:
    """Test byte-identical reruns"""

    @pytest.mark.slow
    def test_rerun_is_byte_identical(self, small_run_config, tmp_path):
        first, second = tmp_path / "a", tmp_path / "b"
        run_verification(small_run_config, out_dir=str(first))
        run_verification(small_run_config, out_dir=str(second))
        report = compare_runs(first, second, ["*.csv", "*.json"])
        assert not report["different"] and not report["missing"] and not report["extra"]
        assert "manifest.json" in report["identical"]

    @pytest.mark.slow
    def test_worker_count_does_not_matter(self, small_run_config, tmp_path, monkeypatch):
        config = small_run_config.model_copy(update={
            "interactions": InteractionSuiteSpec(lambda_d_grid=[10.0], n_samples=20_000),
        })
        monkeypatch.setattr(settings, "workers", 1)
        run_verification(config, suites=["interactions"], out_dir=str(tmp_path / "one"))
        monkeypatch.setattr(settings, "workers", 4)
        run_verification(config, suites=["interactions"], out_dir=str(tmp_path / "four"))
        report = compare_runs(tmp_path / "one", tmp_path / "four", ["*.csv"])
        assert report["identical"] == ["interactions.csv"]


class TestPipelineErrors:
    """Test exit codes for bad input and failed setup"""

    @pytest.mark.unit
    def test_inadmissible_s(self, small_run_config, temp_run_dir):
        config = small_run_config.model_copy(update={"s": 0.3})
        result = run_verification(config, out_dir=str(temp_run_dir))
        assert result["exit_code"] == 2
        assert result["error_field"] == "s"
        assert result["status"] == "failed"

    @pytest.mark.unit
    def test_unknown_suite(self, small_run_config, temp_run_dir):
        result = run_verification(small_run_config, suites=["lattice", "bogus"], out_dir=str(temp_run_dir))
        assert result["exit_code"] == 2
        assert result["error_field"] == "suites"
        assert result["stats"]["suites_run"] == []

    @pytest.mark.unit
    def test_initial_guess_dimension(self, small_run_config, temp_run_dir):
        guess = small_run_config.initial_guess.model_copy(update={"y2": [0.0]})
        config = small_run_config.model_copy(update={"initial_guess": guess})
        result = run_verification(config, suites=["reduce"], out_dir=str(temp_run_dir))
        assert result["exit_code"] == 2
        assert result["error_field"] == "initial_guess.y2"

    @pytest.mark.slow
    def test_failed_check_exits_one(self, small_run_config, temp_run_dir, monkeypatch):
        monkeypatch.setitem(settings.checks, "lattice_same_side", 1e-12)
        result = run_verification(small_run_config, suites=["lattice"], out_dir=str(temp_run_dir))
        assert result["exit_code"] == 1
        assert "lattice.same_side" in result["failed_checks"]
        assert result["error"].startswith("check 'lattice.same_side' failed")
        assert (temp_run_dir / "manifest.json").exists()

    @pytest.mark.unit
    def test_bad_normalization_stops_before_suites(self, small_run_config, temp_run_dir, monkeypatch):
        monkeypatch.setattr("src.fractional.pv_quadrature.bubble_pde_residual", lambda *args, **kwargs: 0.5)
        result = run_verification(small_run_config, suites=["lattice"], out_dir=str(temp_run_dir))
        assert result["exit_code"] == 1
        assert result["error_field"] is None
        assert "c(N,s) is inconsistent" in result["error"]
        assert result["stats"]["suites_run"] == []
        assert not (temp_run_dir / "lattice.csv").exists()


class TestRunConfig:
    """Test run file loading and canonical serialisation"""

    @pytest.mark.unit
    def test_round_trip(self, small_run_config, run_config_file):
        loaded = load_run_config(run_config_file)
        assert loaded == small_run_config
        again = RunConfig.model_validate(json.loads(dump_run_config(loaded)))
        assert dump_run_config(again) == dump_run_config(loaded)
        assert config_digest(again) == config_digest(small_run_config)

    @pytest.mark.unit
    def test_digest_tracks_content(self, small_run_config):
        assert config_digest(small_run_config) != config_digest(small_run_config.model_copy(update={"s": 0.85}))

    @pytest.mark.unit
    def test_json_file(self, small_run_config, tmp_path):
        path = tmp_path / "run.json"
        path.write_text(dump_run_config(small_run_config), encoding="utf-8")
        assert load_run_config(path) == small_run_config

    @pytest.mark.unit
    def test_schema_errors(self, small_run_config):
        data = small_run_config.model_dump(mode="json")
        with pytest.raises(ValidationError):
            RunConfig.model_validate({**data, "k_list": [16, 8]})
        with pytest.raises(ValidationError):
            RunConfig.model_validate({**data, "suites": ["lattice", "bogus"]})
        with pytest.raises(ValidationError):
            RunConfig.model_validate({**data, "unexpected": 1})

    @pytest.mark.unit
    def test_missing_file_and_threshold(self, tmp_path):
        with pytest.raises(MissingConfigException):
            load_run_config(tmp_path / "absent.yaml")
        with pytest.raises(MissingConfigException):
            settings.threshold("no_such_check")


class TestPipelineHelpers:
    """Test module-level helpers"""

    @pytest.mark.unit
    def test_five_point_derivative_is_exact_on_quartics(self):
        def f(x):
            return x ** 4 - 3.0 * x ** 2 + x

        assert five_point_derivative(f, 1.5, 0.1) == pytest.approx(4 * 1.5 ** 3 - 6 * 1.5 + 1, rel=1e-12)

    @pytest.mark.unit
    def test_five_point_derivative_of_exp(self):
        assert five_point_derivative(math.exp, 0.3, 1e-3) == pytest.approx(math.exp(0.3), rel=1e-11)

    @pytest.mark.unit
    def test_numeric_errors_are_wrapped(self):
        @handle_numeric_error
        def ratio(a, b):
            return a / b

        assert ratio(1.0, 4.0) == 0.25
        with pytest.raises(NumericException) as info:
            ratio(1.0, 0.0)
        assert info.value.to_dict()["error_code"] == "NUMERIC_ERROR"

    @pytest.mark.unit
    def test_gaussian_bump_critical_r(self):
        assert gaussian_bump_critical_r(PotentialSpec(), 0.9) == pytest.approx(R_STAR_BUMP, rel=1e-15)
        assert gaussian_bump_critical_r(PotentialSpec(a=0.5), 0.9) is None
        assert gaussian_bump_critical_r(PotentialSpec(family="constant", level=1.0), 0.9) is None
