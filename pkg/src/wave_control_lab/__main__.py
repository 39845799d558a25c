# SPDX-FileCopyrightText: Copyright 2026, Contributors to wave-control-lab
# SPDX-PackageHomePage: https://github.com/wave-control-lab/wave-control-lab
# SPDX-License-Identifier: Apache-2.0

"""Command-line interface."""

from __future__ import annotations

import os
import sys
from contextlib import contextmanager
from pathlib import Path
from typing import TYPE_CHECKING, Annotated, Final, TextIO

import click
import typer
from loguru import logger
from typer import Argument, Option, Typer

from wave_control_lab._about import __about__
from wave_control_lab.control_loop import ControlError
from wave_control_lab.damped_dynamics import IntegrationError
from wave_control_lab.experiments.config import (
    ConfigError,
    ExperimentConfig,
    ExperimentKind,
    apply_overrides,
    load_config,
)
from wave_control_lab.experiments.examples import run_custom, run_example1, run_example2
from wave_control_lab.experiments.persistence import (
    SCHEMA,
    RunFormatError,
    RunWriter,
    new_run_dir,
)
from wave_control_lab.experiments.suites import (
    FAULTS,
    SUITES,
    SuiteFailedError,
    run_property_suites,
)
from wave_control_lab.global_vars import (
    STARTUP,
    GlobalConfigError,
    GlobalVars,
)
from wave_control_lab.spectral_basis import ModeSetError, ProjectionError, enumerate_modes
from wave_control_lab.wave_dynamics import StateError

if TYPE_CHECKING:
    from collections.abc import Generator

    from click import Context as ClickContext
    from click import Parameter

    from wave_control_lab.experiments.suites import SuiteReport

ENV: GlobalVars = GlobalVars.from_env(os.environ)

_HANDLED: Final = (
    ConfigError,
    ControlError,
    GlobalConfigError,
    IntegrationError,
    ModeSetError,
    ProjectionError,
    RunFormatError,
    StateError,
    SuiteFailedError,
)


# Ordered quietest-last; CRITICAL is never selected from the command line.
LOG_LEVELS: Final = ("TRACE", "DEBUG", "INFO", "SUCCESS", "WARNING", "ERROR")

_LOG_FORMATS: Final = {
    "TRACE": "{time:x} {name} ‣ {module}.{line} ‣ {message}",
    "DEBUG": "{time:HH:mm:ss} {level: <7} {message}",
    "INFO": "{time:HH:mm:ss} {level: <7} {message}",
}


def log_level(*, quiet: int, verbose: int) -> str:
    """Maps `-q`/`-v` counts to a loguru level name, starting from SUCCESS."""
    i = LOG_LEVELS.index("SUCCESS") + quiet - verbose
    return LOG_LEVELS[min(len(LOG_LEVELS) - 1, max(0, i))]


def log_sink(target: str) -> Path | TextIO:
    """Resolves `--log-to`: a standard stream name, a `file://` URI, or a path."""
    match target.lower():
        case "stdout":
            return sys.stdout
        case "stderr":
            return sys.stderr
    if target.startswith("file://"):
        return Path.from_uri(target)
    return Path(target)


def configure_logging(*, quiet: int, verbose: int, to: str, fmt: str) -> str:
    """Replaces every loguru handler with one for the CLI; returns the chosen level."""
    level = log_level(quiet=quiet, verbose=verbose)
    logger.remove()
    logger.add(sink=log_sink(to), level=level, format=fmt or _LOG_FORMATS.get(level, "{message}"))
    return level


class RunDirectory(click.Path):
    """Output directory for a run: absent, or an existing empty directory."""

    def __init__(self) -> None:
        super().__init__(file_okay=True, dir_okay=True)

    def convert(self, value: str, param: Parameter | None, ctx: ClickContext | None) -> Path:
        path = Path(super().convert(value, param, ctx)).resolve()
        if (problem := self.problem(path)) is not None:
            self.fail(problem, param, ctx)
        return path

    @staticmethod
    def problem(path: Path) -> str | None:
        """Why `path` cannot receive run files, or `None`."""
        if not path.exists() and not path.is_symlink():
            return None
        if not path.is_dir():
            return f"'{path}' exists and is not a directory; run files need their own directory."
        if any(path.iterdir()):
            return f"'{path}' already holds files; pick a new or empty directory for the run."
        return None


@contextmanager
def _exit_on_error() -> Generator[None]:
    try:
        yield
    except _HANDLED as e:
        logger.error(str(e))
        raise typer.Exit(1) from None


cli: Final = Typer(
    name="wave-control-lab", no_args_is_help=True, pretty_exceptions_show_locals=ENV.debug_mode
)

ConfigOpt = Annotated[
    Path | None,
    Option(
        "--config",
        "-c",
        exists=True,
        dir_okay=False,
        help="JSON or YAML config; keys not given fall back to the experiment's defaults.",
    ),
]
OutOpt = Annotated[
    Path | None,
    Option(
        "--out",
        "-o",
        click_type=RunDirectory(),
        help="Run directory [default: a new directory under $WAVELAB_DATA_DIR/runs].",
        show_default=False,
    ),
]
ModesOpt = Annotated[int | None, Option("--modes", "-G", min=1, help="Number of modes G.")]
IterationsOpt = Annotated[
    int | None, Option("--iterations", "-N", min=0, help="Upper summation index N (2N+2 solves).")
]
TolOpt = Annotated[float | None, Option("--tol", help="Relative tolerance of the solver.")]
HorizonOpt = Annotated[float | None, Option("--horizon", "-T", help="Control horizon T.")]
PlotDataOpt = Annotated[
    bool, Option("--plot-data", help="Also write whitespace-separated .dat files for gnuplot.")
]
SetOpt = Annotated[
    list[str] | None,
    Option("--set", "-s", help="Override a config key, e.g. 'beam.k_o=100' (repeatable)."),
]


def _config(
    experiment: ExperimentKind,
    path: Path | None,
    overrides: list[str] | None,
    **flags: object,
) -> ExperimentConfig:
    cfg = ExperimentConfig.defaults(experiment) if path is None else load_config(path, experiment)
    if cfg.experiment != experiment:
        raise ConfigError("experiment", f"{path} is a '{cfg.experiment}' config")
    return apply_overrides(cfg, overrides or (), **flags)


def _write_report(report: SuiteReport, cfg: ExperimentConfig, name: str) -> Path:
    root = cfg.out or new_run_dir(ENV.runs_dir, name, STARTUP.local)
    writer = RunWriter(root)
    writer.write_config(cfg)
    path = writer.write_json("report.json", {"schema": SCHEMA, **report.to_json()})
    for check in report.checks:
        mark = "✓" if check.passed else "✗"
        typer.echo(f"{mark} {check.name}: {check.measured:.3e} (≤ {check.tolerance:.1e})")
    logger.info(f"Wrote {path}")
    return path


@cli.callback()
def meta(
    *,
    verbose: Annotated[
        int, Option("--verbose", "-v", count=True, help="Show INFO; -vv for DEBUG.")
    ] = 0,
    quiet: Annotated[
        int, Option("--quiet", "-q", count=True, help="Show WARNING and up; -qq for ERROR.")
    ] = 0,
    log_to: Annotated[
        str, Option(help="Log destination: STDERR, STDOUT, a file path, or a file:// URI.")
    ] = "STDERR",
) -> None:
    configure_logging(quiet=quiet, verbose=verbose, to=log_to, fmt=ENV.log_format)


@cli.command()
def info() -> None:
    """Shows the version, run schema, and default run directory."""
    typer.echo(f"{__about__['name']} v{__about__['version']}")
    typer.echo(f"run schema: {SCHEMA}")
    typer.echo(f"runs dir: {ENV.runs_dir}")


@cli.command()
def modes(
    count: Annotated[int, Argument(min=1, help="Number of modes G.")],
    *,
    out: OutOpt = None,
) -> None:
    """Lists the first G Dirichlet modes of the unit square, by eigenvalue."""
    with _exit_on_error():
        ms = enumerate_modes(count)
    rows = [(j + 1, m.k, m.l, m.lam) for j, m in enumerate(ms.modes)]
    if out is None:
        typer.echo("j,k,l,lambda")
        for j, k, l, lam in rows:  # noqa: E741
            typer.echo(f"{j},{k},{l},{lam!r}")
        return
    writer = RunWriter(out)
    writer.write_table("modes", ("j", "k", "l", "lambda"), rows)
    writer.write_json("modes.json", {"schema": SCHEMA, **ms.to_json()})
    logger.success(f"Wrote {len(ms)} modes ({ms.id}) to {out}")


@cli.command()
def example1(
    *,
    config: ConfigOpt = None,
    out: OutOpt = None,
    modes: ModesOpt = None,
    iterations: IterationsOpt = None,
    tol: TolOpt = None,
    horizon: HorizonOpt = None,
    plot_data: PlotDataOpt = False,
    overrides: SetOpt = None,
) -> None:
    """Low-frequency target (e₁ + e₂, e₁) reached from rest."""
    with _exit_on_error():
        cfg = _config(
            "example1", config, overrides, out=out, G=modes, N=iterations, tol=tol, T=horizon
        )
        run_example1(cfg, plot_data=plot_data)


@cli.command()
def example2(
    *,
    config: ConfigOpt = None,
    out: OutOpt = None,
    modes: ModesOpt = None,
    iterations: IterationsOpt = None,
    tol: TolOpt = None,
    horizon: HorizonOpt = None,
    plot_data: PlotDataOpt = False,
    overrides: SetOpt = None,
) -> None:
    """High-frequency Gaussian beam driven to rest. The default G=1000, N=100 takes long."""
    with _exit_on_error():
        cfg = _config(
            "example2", config, overrides, out=out, G=modes, N=iterations, tol=tol, T=horizon
        )
        run_example2(cfg, plot_data=plot_data)


@cli.command()
def control(
    *,
    config: ConfigOpt = None,
    out: OutOpt = None,
    modes: ModesOpt = None,
    iterations: IterationsOpt = None,
    tol: TolOpt = None,
    horizon: HorizonOpt = None,
    plot_data: PlotDataOpt = False,
    overrides: SetOpt = None,
) -> None:
    """A control problem with initial data and target from the config."""
    with _exit_on_error():
        cfg = _config(
            "custom", config, overrides, out=out, G=modes, N=iterations, tol=tol, T=horizon
        )
        run_custom(cfg, plot_data=plot_data)


@cli.command()
def freq(
    *,
    out: OutOpt = None,
    seed: Annotated[int, Option(help="Seed for the random harmonic samples.")] = 0,
) -> None:
    """Frequency-function monotonicity and three-ball checks on harmonic samples."""
    with _exit_on_error():
        cfg = apply_overrides(ExperimentConfig.defaults("custom"), out=out, seed=seed)
        report = run_property_suites(cfg, only=("frequency",))
        _write_report(report, cfg, "freq")
        report.raise_if_failed()


@cli.command()
def verify(
    *,
    config: ConfigOpt = None,
    out: OutOpt = None,
    modes: ModesOpt = None,
    tol: TolOpt = None,
    horizon: HorizonOpt = None,
    overrides: SetOpt = None,
    suites: Annotated[
        list[str] | None,
        Option("--suite", help=f"Run only these suites ({', '.join(SUITES)}); repeatable."),
    ] = None,
    faults: Annotated[
        list[str] | None,
        Option("--fault", help=f"Inject a fault ({', '.join(sorted(FAULTS))}); repeatable."),
    ] = None,
) -> None:
    """Runs the invariant suites; exits non-zero if any fails."""
    with _exit_on_error():
        cfg = ExperimentConfig.defaults("custom") if config is None else load_config(config)
        cfg = apply_overrides(cfg, overrides or (), out=out, G=modes, tol=tol, T=horizon)
        try:
            report = run_property_suites(cfg, faults=faults or (), only=suites or ())
        except ValueError as e:
            raise ConfigError("--suite/--fault", str(e)) from None
        _write_report(report, cfg, "verify")
        report.raise_if_failed()


if __name__ == "__main__":
    cli()
