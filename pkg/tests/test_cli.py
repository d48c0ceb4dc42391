# tests/test_cli.py
"""
Command Line Tests

Purpose:
- Test subcommands against a reduced run configuration file
- Test exit codes and stderr messages for bad configuration and arguments
- Test the run comparison script

Test Coverage:
- fracbubble <suite> --config --out [--seed]
- fracbubble all --suite a,b
- Validation errors reported as "<field>: <message>"
- Exit code 1 when the bubble identity check fails at start
- scripts/compare_runs.py main
"""

import pytest
import yaml

from scripts import compare_runs
from src.cli.main import EXIT_CONFIG, EXIT_FAILED, EXIT_OK, build_parser, main


def _write_config(path, data):
    path.write_text(yaml.safe_dump(data, sort_keys=True), encoding="utf-8")
    return str(path)


class TestSubcommands:
    """Test running suites from the command line"""

    @pytest.mark.cli
    @pytest.mark.slow
    def test_lattice_subcommand(self, run_config_file, temp_run_dir):
        code = main(["lattice", "--config", str(run_config_file), "--out", str(temp_run_dir)])
        assert code == EXIT_OK
        assert (temp_run_dir / "lattice.csv").exists()
        assert (temp_run_dir / "manifest.json").exists()

    @pytest.mark.cli
    @pytest.mark.slow
    def test_all_with_suite_list(self, run_config_file, temp_run_dir):
        code = main(["all", "--config", str(run_config_file), "--out", str(temp_run_dir),
                     "--suite", "lattice,reduce", "--seed", "7"])
        assert code == EXIT_OK
        assert (temp_run_dir / "reduce.csv").exists()

    @pytest.mark.cli
    def test_parser_lists_every_suite(self):
        parser = build_parser()
        for name in ("constants", "lattice", "interactions", "energy", "reduce", "residual", "pohozaev", "all"):
            args = parser.parse_args([name])
            assert args.command == name


class TestConfigErrors:
    """Test nonzero exit codes for bad configuration and failed setup"""

    @pytest.mark.cli
    def test_out_of_range_field(self, tmp_path, small_run_config, capsys):
        data = small_run_config.model_dump(mode="json")
        data["s"] = 1.5
        code = main(["lattice", "--config", _write_config(tmp_path / "bad.yaml", data)])
        assert code == EXIT_CONFIG
        assert any(line.startswith("s: ") for line in capsys.readouterr().err.splitlines())

    @pytest.mark.cli
    def test_inadmissible_s(self, tmp_path, small_run_config, capsys):
        data = small_run_config.model_dump(mode="json")
        data["s"] = 0.3
        code = main(["lattice", "--config", _write_config(tmp_path / "window.yaml", data),
                     "--out", str(tmp_path / "out")])
        assert code == EXIT_CONFIG
        assert any(line.startswith("s: ") for line in capsys.readouterr().err.splitlines())

    @pytest.mark.cli
    def test_missing_config_file(self, tmp_path):
        assert main(["lattice", "--config", str(tmp_path / "absent.yaml")]) == EXIT_CONFIG

    @pytest.mark.cli
    def test_config_must_be_mapping(self, tmp_path):
        path = tmp_path / "list.yaml"
        path.write_text("- 1\n- 2\n", encoding="utf-8")
        assert main(["lattice", "--config", str(path)]) == EXIT_CONFIG

    @pytest.mark.cli
    @pytest.mark.parametrize("seed", ["-1", "abc", str(2 ** 64)])
    def test_bad_seed(self, run_config_file, seed):
        assert main(["lattice", "--config", str(run_config_file), "--seed", seed]) == EXIT_CONFIG

    @pytest.mark.cli
    def test_unknown_suite_in_list(self, run_config_file):
        assert main(["all", "--config", str(run_config_file), "--suite", "lattice,bogus"]) == EXIT_CONFIG

    @pytest.mark.cli
    def test_unknown_subcommand(self):
        assert main(["bogus"]) == EXIT_CONFIG


    @pytest.mark.cli
    def test_bad_normalization_exits_one(self, run_config_file, temp_run_dir, monkeypatch, capsys):
        monkeypatch.setattr("src.fractional.pv_quadrature.bubble_pde_residual", lambda *args, **kwargs: 0.5)
        code = main(["lattice", "--config", str(run_config_file), "--out", str(temp_run_dir)])
        assert code == EXIT_FAILED
        assert "bubble identity residual" in capsys.readouterr().err
        assert not (temp_run_dir / "lattice.csv").exists()


class TestCompareRuns:
    """Test the run comparison script"""

    @pytest.mark.cli
    def test_identical_and_different_runs(self, run_config_file, tmp_path):
        first, second = tmp_path / "a", tmp_path / "b"
        assert main(["lattice", "--config", str(run_config_file), "--out", str(first)]) == EXIT_OK
        assert main(["lattice", "--config", str(run_config_file), "--out", str(second)]) == EXIT_OK
        assert compare_runs.main([str(first), str(second), "--include-json"]) == 0

        table = second / "lattice.csv"
        lines = table.read_text(encoding="utf-8").splitlines(keepends=True)
        table.write_text("".join(lines[:-1]), encoding="utf-8")
        assert compare_runs.main([str(first), str(second)]) == 1

    @pytest.mark.cli
    def test_first_difference(self):
        assert compare_runs.first_difference(b"a\nb\n", b"a\nb\n") is None
        assert compare_runs.first_difference(b"a\nb\n", b"a\nc\n") == 2

    @pytest.mark.cli
    def test_not_a_directory(self, tmp_path):
        assert compare_runs.main([str(tmp_path / "x"), str(tmp_path)]) == 2
