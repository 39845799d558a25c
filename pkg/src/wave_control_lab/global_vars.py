# SPDX-FileCopyrightText: Copyright 2026, Contributors to wave-control-lab
# SPDX-PackageHomePage: https://github.com/wave-control-lab/wave-control-lab
# SPDX-License-Identifier: Apache-2.0

"""Process-wide settings read from `WAVELAB_*` environment variables."""

from __future__ import annotations

from dataclasses import dataclass
from datetime import datetime
from pathlib import Path
from typing import TYPE_CHECKING, Final, Self

import platformdirs

from wave_control_lab._about import __about__

if TYPE_CHECKING:
    from collections.abc import Mapping

__all__ = ["STARTUP", "GlobalConfigError", "GlobalVars", "Startup"]

ENV_PREFIX: Final = "WAVELAB_"


@dataclass(frozen=True, slots=True)
class Startup:
    """Process start in local time; default run directories are named after it."""

    local: datetime

    @classmethod
    def now(cls) -> Self:
        return cls(local=datetime.now().astimezone())


@dataclass(frozen=True, slots=True)
class GlobalConfigError(Exception):
    """A `WAVELAB_*` variable (or the platform default it replaces) is unusable."""

    source: str
    value: str
    issue: str

    def __str__(self) -> str:
        return f"{self.source} (={self.value}) {self.issue}."


@dataclass(frozen=True, slots=True, kw_only=True)
class GlobalVars:
    """Settings that apply to every command.

    Attributes:
        data_dir: Where run directories go when `--out` is not given.
            `$WAVELAB_DATA_DIR`, else the per-user data directory for this major version.
        log_format: loguru format string from `$WAVELAB_LOG_FORMAT`;
            empty means the CLI chooses one per log level.
        debug_mode: `$WAVELAB_DEBUG_MODE=1` shows locals in CLI tracebacks.
    """

    data_dir: Path
    log_format: str
    debug_mode: bool

    @property
    def runs_dir(self) -> Path:
        return self.data_dir / "runs"

    @classmethod
    def from_env(cls, env: Mapping[str, str]) -> Self:
        return cls(
            data_dir=_data_dir(env),
            log_format=env.get(ENV_PREFIX + "LOG_FORMAT", ""),
            debug_mode=_switch(env, ENV_PREFIX + "DEBUG_MODE"),
        )


def _data_dir(env: Mapping[str, str]) -> Path:
    var = ENV_PREFIX + "DATA_DIR"
    if raw := env.get(var):
        source = "$" + var
    else:
        source = "platform data dir"
        raw = platformdirs.user_data_dir(
            appname=__about__["name"],
            appauthor=False,
            version=str(__about__["version_parts"].major),
        )
    path = Path(raw).expanduser()
    if not path.is_absolute():
        raise GlobalConfigError(source, raw, "is not an absolute path")
    if path.exists() and not path.is_dir():
        raise GlobalConfigError(source, raw, "exists and is not a directory")
    return path


def _switch(env: Mapping[str, str], var: str) -> bool:
    # Unset and empty both mean off.
    value = env.get(var, "") or "0"
    if value not in {"0", "1"}:
        raise GlobalConfigError("$" + var, value, "is neither 0 nor 1")
    return value == "1"


STARTUP: Final = Startup.now()
