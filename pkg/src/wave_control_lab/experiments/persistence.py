# SPDX-FileCopyrightText: Copyright 2026, Contributors to wave-control-lab
# SPDX-PackageHomePage: https://github.com/wave-control-lab/wave-control-lab
# SPDX-License-Identifier: Apache-2.0

"""Run directories: atomic CSV, JSON and gnuplot files, tagged with a schema version.

Every run directory holds `config.json` and `summary.json`, both carrying
`"schema": "wave-control-lab/run@<semver>"`.
"""

from __future__ import annotations

import csv
import io
import shutil
from dataclasses import dataclass, field
from datetime import datetime
from pathlib import Path
from typing import TYPE_CHECKING, Any, Final

import numpy as np
from loguru import logger
from semver import Version

from wave_control_lab._about import __about__
from wave_control_lab._core import JSON, Json

if TYPE_CHECKING:
    from collections.abc import Iterable, Sequence

    from wave_control_lab.experiments.config import ExperimentConfig

__all__ = [
    "SCHEMA",
    "RunFormatError",
    "RunWriter",
    "check_schema",
    "format_cell",
    "load_summary",
    "new_run_dir",
]

SCHEMA_NAME: Final = f"{__about__['name']}/run"
SCHEMA: Final = f"{SCHEMA_NAME}@{__about__['run_schema']}"


@dataclass(frozen=True, slots=True)
class RunFormatError(Exception):
    """A run directory is missing files or was written by an incompatible schema."""

    path: Path
    issue: str

    def __str__(self) -> str:
        return f"Cannot read run at {self.path}: {self.issue}"


def format_cell(value: Any) -> str:
    """Integers as-is; floats with round-trip `repr`."""
    match value:
        case bool() | np.bool_():
            return str(int(value))
        case int() | np.integer():
            return str(int(value))
        case float() | np.floating():
            return repr(float(value))
        case _:
            return str(value)


def new_run_dir(parent: Path, experiment: str, now: datetime) -> Path:
    """A fresh directory name under `parent`, e.g. `example1-20261016T101500`."""
    stamp = now.strftime("%Y%m%dT%H%M%S")
    path = parent / f"{experiment}-{stamp}"
    i = 1
    while path.exists():
        path = parent / f"{experiment}-{stamp}-{i}"
        i += 1
    return path


@dataclass(slots=True)
class RunWriter:
    """Writes the files of one run.

    Attributes:
        root: The run directory (created on first write).
        plot_data: Also write a whitespace-separated `.dat` twin of every CSV.
        written: Files written so far, in order.
    """

    root: Path
    plot_data: bool = False
    written: list[Path] = field(default_factory=list)

    def write_text(self, name: str, content: str) -> Path:
        path = self.root / name
        path.parent.mkdir(parents=True, exist_ok=True)
        temp_file = path.with_name(f".~{path.name}.temp")
        try:
            # `newline=""` keeps CSV's `\r\n` terminators.
            temp_file.write_text(content, encoding="utf-8", newline="")
            shutil.move(str(temp_file), str(path))
        finally:
            temp_file.unlink(missing_ok=True)
        self.written.append(path)
        logger.debug(f"Wrote {path}")
        return path

    def write_json(self, name: str, data: Json) -> Path:
        return self.write_text(name, JSON.encode(data) + "\n")

    def write_table(self, name: str, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> Path:
        """Writes `<name>.csv` (RFC 4180), plus `<name>.dat` for gnuplot when enabled."""
        cells = [[format_cell(v) for v in row] for row in rows]
        buffer = io.StringIO(newline="")
        writer = csv.writer(buffer, lineterminator="\r\n")
        writer.writerow(header)
        writer.writerows(cells)
        path = self.write_text(f"{name}.csv", buffer.getvalue())
        if self.plot_data:
            lines = ["# " + " ".join(header)]
            lines += [" ".join(row) for row in cells]
            self.write_text(f"{name}.dat", "\n".join(lines) + "\n")
        return path

    def write_config(self, cfg: ExperimentConfig) -> Path:
        return self.write_json("config.json", {"schema": SCHEMA, **cfg.to_json()})

    def write_summary(self, summary: dict[str, Json]) -> Path:
        return self.write_json("summary.json", {"schema": SCHEMA, **summary})


def check_schema(tag: Any, path: Path) -> Version:
    """Parses `<name>@<semver>` and requires this package's name and major version.

    Raises:
        RunFormatError: If the tag is missing, malformed, or incompatible.
    """
    if not isinstance(tag, str) or "@" not in tag:
        raise RunFormatError(path, f"missing or malformed schema tag {tag!r}")
    name, _, version = tag.rpartition("@")
    if name != SCHEMA_NAME:
        raise RunFormatError(path, f"schema '{name}' is not '{SCHEMA_NAME}'")
    try:
        found = Version.parse(version)
    except ValueError:
        raise RunFormatError(path, f"schema version '{version}' is not semver") from None
    ours = Version.parse(__about__["run_schema"])
    if found.major != ours.major:
        raise RunFormatError(path, f"schema {found} is incompatible with {ours}")
    return found


def load_summary(run_dir: Path) -> dict[str, Json]:
    """Reads `summary.json` from a run directory after checking its schema tag.

    Raises:
        RunFormatError: If the file is missing, not JSON, or has an incompatible schema.
    """
    path = run_dir / "summary.json"
    try:
        data = JSON.decode(path.read_text(encoding="utf-8"))
    except OSError as e:
        raise RunFormatError(path, e.strerror or "unreadable") from None
    except ValueError as e:
        raise RunFormatError(path, f"invalid JSON: {e}") from None
    if not isinstance(data, dict):
        raise RunFormatError(path, "summary is not a JSON object")
    check_schema(data.get("schema"), path)
    return data
