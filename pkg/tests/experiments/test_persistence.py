# SPDX-FileCopyrightText: Copyright 2026, Contributors to wave-control-lab
# SPDX-PackageHomePage: https://github.com/wave-control-lab/wave-control-lab
# SPDX-License-Identifier: Apache-2.0

from datetime import datetime
from pathlib import Path

import numpy as np
import pytest

from wave_control_lab._core import JSON
from wave_control_lab.experiments.config import ExperimentConfig
from wave_control_lab.experiments.persistence import (
    SCHEMA,
    RunFormatError,
    RunWriter,
    check_schema,
    format_cell,
    load_summary,
    new_run_dir,
)


class TestFormatCell:
    @pytest.mark.parametrize(
        ("value", "text"),
        [
            (True, "1"),
            (np.bool_(False), "0"),
            (7, "7"),
            (np.int64(-3), "-3"),
            (0.1, "0.1"),
            (np.float64(1e-300), "1e-300"),
            (2.0, "2.0"),
            ("e1", "e1"),
        ],
    )
    def test_cells(self, value: object, text: str) -> None:
        assert format_cell(value) == text

    def test_round_trip(self) -> None:
        x = 0.1 + 0.2
        assert float(format_cell(np.float64(x))) == x


class TestRunWriter:
    def test_table(self, tmp_path: Path) -> None:
        writer = RunWriter(tmp_path / "run")
        path = writer.write_table("d", ("j", "d"), [(-1, 0.5), (0, 0.25)])
        assert path.read_bytes() == b"j,d\r\n-1,0.5\r\n0,0.25\r\n"
        assert not (tmp_path / "run" / "d.dat").exists()

    def test_plot_data(self, tmp_path: Path) -> None:
        writer = RunWriter(tmp_path, plot_data=True)
        writer.write_table("energy", ("t", "energy"), [(0.0, 1.5)])
        assert (tmp_path / "energy.dat").read_text(encoding="utf-8") == "# t energy\n0.0 1.5\n"
        assert writer.written == [tmp_path / "energy.csv", tmp_path / "energy.dat"]

    def test_no_temp_files(self, tmp_path: Path) -> None:
        writer = RunWriter(tmp_path)
        writer.write_json("run.json", {"a": 1})
        writer.write_json("run.json", {"a": 2})
        assert [p.name for p in tmp_path.iterdir()] == ["run.json"]
        assert writer.written == [tmp_path / "run.json"] * 2

    def test_tagged(self, tmp_path: Path) -> None:
        writer = RunWriter(tmp_path)
        writer.write_config(ExperimentConfig(G=4))
        writer.write_summary({"status": "ok", "d": [1.0, 0.5]})
        summary = load_summary(tmp_path)
        assert summary == {"schema": SCHEMA, "status": "ok", "d": [1.0, 0.5]}
        config = JSON.decode((tmp_path / "config.json").read_text(encoding="utf-8"))
        assert config.pop("schema") == SCHEMA
        assert ExperimentConfig.from_json(config) == ExperimentConfig(G=4)


class TestRunDir:
    def test_name(self, tmp_path: Path) -> None:
        now = datetime(2026, 10, 16, 10, 15, 0)  # noqa: DTZ001
        first = new_run_dir(tmp_path, "example1", now)
        assert first.name == "example1-20261016T101500"
        first.mkdir()
        second = new_run_dir(tmp_path, "example1", now)
        assert second.name == "example1-20261016T101500-1"
        assert not second.exists()


class TestLoadSummary:
    def test_missing(self, tmp_path: Path) -> None:
        with pytest.raises(RunFormatError, match="summary.json"):
            load_summary(tmp_path)

    @pytest.mark.parametrize(
        ("content", "match"),
        [
            ("{", "invalid JSON"),
            ("[1, 2]", "not a JSON object"),
            ('{"status": "ok"}', "missing or malformed"),
            ('{"schema": "other-tool/run@1.0.0"}', "is not"),
            ('{"schema": "wave-control-lab/run@2.0.0"}', "incompatible"),
            ('{"schema": "wave-control-lab/run@one"}', "not semver"),
        ],
    )
    def test_rejects(self, tmp_path: Path, content: str, match: str) -> None:
        (tmp_path / "summary.json").write_text(content, encoding="utf-8")
        with pytest.raises(RunFormatError, match=match):
            load_summary(tmp_path)

    def test_minor_versions_are_compatible(self, tmp_path: Path) -> None:
        assert str(check_schema("wave-control-lab/run@1.7.2", tmp_path)) == "1.7.2"


if __name__ == "__main__":
    pytest.main()
