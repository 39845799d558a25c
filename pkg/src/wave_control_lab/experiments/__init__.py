# SPDX-FileCopyrightText: Copyright 2026, Contributors to wave-control-lab
# SPDX-PackageHomePage: https://github.com/wave-control-lab/wave-control-lab
# SPDX-License-Identifier: Apache-2.0

"""Experiment configs, the two reference experiments, property suites, and run directories."""

from wave_control_lab.experiments.config import (
    EXPERIMENTS,
    BeamParams,
    ConfigError,
    ExperimentConfig,
    GaussianBeam,
    StateSpec,
    apply_overrides,
    load_config,
)
from wave_control_lab.experiments.examples import (
    build_problem,
    project_beam,
    run_custom,
    run_example1,
    run_example2,
)
from wave_control_lab.experiments.persistence import (
    SCHEMA,
    RunFormatError,
    RunWriter,
    load_summary,
)
from wave_control_lab.experiments.suites import (
    SUITES,
    CheckResult,
    SuiteFailedError,
    SuiteReport,
    run_property_suites,
)

__all__ = [
    "EXPERIMENTS",
    "SCHEMA",
    "SUITES",
    "BeamParams",
    "CheckResult",
    "ConfigError",
    "ExperimentConfig",
    "GaussianBeam",
    "RunFormatError",
    "RunWriter",
    "StateSpec",
    "SuiteFailedError",
    "SuiteReport",
    "apply_overrides",
    "build_problem",
    "load_config",
    "load_summary",
    "project_beam",
    "run_custom",
    "run_example1",
    "run_example2",
    "run_property_suites",
]
