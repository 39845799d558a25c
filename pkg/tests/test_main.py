# SPDX-FileCopyrightText: Copyright 2026, Contributors to wave-control-lab
# SPDX-PackageHomePage: https://github.com/wave-control-lab/wave-control-lab
# SPDX-License-Identifier: Apache-2.0

"""Tests for the command-line interface."""

import sys
from collections.abc import Generator
from pathlib import Path

import pytest
from loguru import logger
from typer.testing import CliRunner

from wave_control_lab.__main__ import RunDirectory, cli, configure_logging, log_level, log_sink
from wave_control_lab._about import __about__
from wave_control_lab.experiments.persistence import SCHEMA, load_summary

from . import Helper

H = Helper()
runner = CliRunner()


@pytest.fixture(autouse=True)
def _restore_logger() -> Generator[None]:
    # The CLI points loguru at the runner's streams, which close after each invocation.
    yield
    logger.remove()
    logger.add(sys.stderr)


class TestInfo:
    def test_info(self) -> None:
        result = runner.invoke(cli, ["info"])
        assert result.exit_code == 0
        lines = result.stdout.splitlines()
        assert lines[0] == f"wave-control-lab v{__about__['version']}"
        assert lines[1] == f"run schema: {SCHEMA}"
        assert lines[2].startswith("runs dir: ")

    def test_no_args_shows_help(self) -> None:
        result = runner.invoke(cli, [])
        assert "Usage" in result.output


class TestModes:
    def test_stdout(self) -> None:
        result = runner.invoke(cli, ["modes", "3"])
        assert result.exit_code == 0
        lines = result.stdout.splitlines()
        assert lines[0] == "j,k,l,lambda"
        assert [line.rsplit(",", 1)[0] for line in lines[1:]] == ["1,1,1", "2,1,2", "3,2,1"]

    def test_out(self, tmp_path: Path) -> None:
        result = runner.invoke(cli, ["modes", "4", "--out", str(tmp_path / "m")])
        assert result.exit_code == 0
        assert {p.name for p in (tmp_path / "m").iterdir()} == {"modes.csv", "modes.json"}

    def test_out_must_be_empty(self, tmp_path: Path) -> None:
        (tmp_path / "x.txt").write_text("x", encoding="utf-8")
        result = runner.invoke(cli, ["modes", "4", "--out", str(tmp_path)])
        assert result.exit_code == 2
        assert "already" in result.output

    def test_count_must_be_positive(self) -> None:
        assert runner.invoke(cli, ["modes", "0"]).exit_code == 2


class TestRuns:
    def test_control(self, tmp_path: Path) -> None:
        out = tmp_path / "run"
        config = str(H.resource("custom-small.json"))
        result = runner.invoke(cli, ["control", "--config", config, "--out", str(out)])
        assert result.exit_code == 0, result.output
        summary = load_summary(out)
        assert summary["status"] == "ok"
        assert summary["G"] == 6

    def test_example1_overrides(self, tmp_path: Path) -> None:
        args = ["-c", str(H.resource("example1-small.yaml")), "-o", str(tmp_path / "run")]
        result = runner.invoke(cli, ["example1", *args, "-G", "5", "--set", "N=1", "--plot-data"])
        assert result.exit_code == 0, result.output
        summary = load_summary(tmp_path / "run")
        assert (summary["G"], summary["N"]) == (5, 1)
        assert (tmp_path / "run" / "d.dat").exists()

    def test_wrong_experiment(self, tmp_path: Path) -> None:
        args = ["-c", str(H.resource("custom-small.json")), "-o", str(tmp_path / "run")]
        result = runner.invoke(cli, ["example1", *args])
        assert result.exit_code == 1
        assert "'custom' config" in result.output

    def test_invalid_override(self, tmp_path: Path) -> None:
        result = runner.invoke(cli, ["control", "--set", "N=-3", "-o", str(tmp_path / "run")])
        assert result.exit_code == 1
        assert "'N'" in result.output


class TestVerify:
    def test_passing_suite(self, tmp_path: Path) -> None:
        result = runner.invoke(cli, ["verify", "--suite", "spectral", "-o", str(tmp_path / "v")])
        assert result.exit_code == 0, result.output
        assert "✓ mass_matrix.closed_form_vs_quadrature" in result.stdout
        assert (tmp_path / "v" / "report.json").exists()
        assert (tmp_path / "v" / "config.json").exists()

    def test_injected_fault(self, tmp_path: Path) -> None:
        args = ["--suite", "spectral", "--fault", "mass_matrix", "-o", str(tmp_path / "v")]
        result = runner.invoke(cli, ["verify", *args])
        assert result.exit_code == 1
        assert "✗ mass_matrix.closed_form_vs_quadrature" in result.stdout
        assert (tmp_path / "v" / "report.json").exists()

    def test_unknown_suite(self, tmp_path: Path) -> None:
        result = runner.invoke(cli, ["verify", "--suite", "nope", "-o", str(tmp_path / "v")])
        assert result.exit_code == 1
        assert "Unknown suite" in result.output


class TestHelpers:
    def test_log_levels(self) -> None:
        assert log_level(quiet=0, verbose=0) == "SUCCESS"
        assert log_level(quiet=0, verbose=1) == "INFO"
        assert log_level(quiet=0, verbose=9) == "TRACE"
        assert log_level(quiet=9, verbose=0) == "ERROR"
        assert configure_logging(quiet=1, verbose=0, to="stderr", fmt="") == "WARNING"

    def test_log_sink(self, tmp_path: Path) -> None:
        assert log_sink("STDOUT") is sys.stdout
        assert log_sink("stderr") is sys.stderr
        assert log_sink(str(tmp_path / "a.log")) == tmp_path / "a.log"
        assert log_sink((tmp_path / "b.log").as_uri()) == tmp_path / "b.log"

    def test_run_directory(self, tmp_path: Path) -> None:
        assert RunDirectory.problem(tmp_path / "new") is None
        assert RunDirectory.problem(tmp_path) is None
        (tmp_path / "f").write_text("", encoding="utf-8")
        assert "already holds files" in (RunDirectory.problem(tmp_path) or "")
        assert "not a directory" in (RunDirectory.problem(tmp_path / "f") or "")


if __name__ == "__main__":
    pytest.main()
