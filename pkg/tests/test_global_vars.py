# SPDX-FileCopyrightText: Copyright 2026, Contributors to wave-control-lab
# SPDX-PackageHomePage: https://github.com/wave-control-lab/wave-control-lab
# SPDX-License-Identifier: Apache-2.0

from pathlib import Path

import pytest

from wave_control_lab.global_vars import GlobalConfigError, GlobalVars, Startup


class TestGlobalVars:
    def test_data_dir(self, tmp_path: Path) -> None:
        env = GlobalVars.from_env({"WAVELAB_DATA_DIR": str(tmp_path)})
        assert env.data_dir == tmp_path
        assert env.runs_dir == tmp_path / "runs"

    def test_platform_default(self) -> None:
        env = GlobalVars.from_env({})
        assert env.data_dir.is_absolute()
        assert env.log_format == ""
        assert env.debug_mode is False

    def test_relative(self) -> None:
        with pytest.raises(GlobalConfigError, match="not an absolute path"):
            GlobalVars.from_env({"WAVELAB_DATA_DIR": "runs"})

    def test_not_a_directory(self, tmp_path: Path) -> None:
        file = tmp_path / "f"
        file.write_text("", encoding="utf-8")
        with pytest.raises(GlobalConfigError, match=r"\$WAVELAB_DATA_DIR"):
            GlobalVars.from_env({"WAVELAB_DATA_DIR": str(file)})

    @pytest.mark.parametrize(("value", "expected"), [("1", True), ("0", False), ("", False)])
    def test_debug_mode(self, value: str, expected: bool) -> None:  # noqa: FBT001
        assert GlobalVars.from_env({"WAVELAB_DEBUG_MODE": value}).debug_mode is expected

    def test_bad_flag(self) -> None:
        with pytest.raises(GlobalConfigError, match="neither 0 nor 1"):
            GlobalVars.from_env({"WAVELAB_DEBUG_MODE": "yes"})

    def test_log_format(self) -> None:
        env = GlobalVars.from_env({"WAVELAB_LOG_FORMAT": "{message}"})
        assert env.log_format == "{message}"


class TestStartup:
    def test_local_time_is_aware(self) -> None:
        assert Startup.now().local.tzinfo is not None


if __name__ == "__main__":
    pytest.main()
