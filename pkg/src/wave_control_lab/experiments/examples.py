# SPDX-FileCopyrightText: Copyright 2026, Contributors to wave-control-lab
# SPDX-PackageHomePage: https://github.com/wave-control-lab/wave-control-lab
# SPDX-License-Identifier: Apache-2.0

"""Orchestrates control experiments and writes their run directories.

A run directory holds:

- `config.json`: the effective config;
- `summary.json`: headline numbers (errors, costs, fits);
- `run.json`: the full [ControlRun][] record, seeds included;
- `energy.csv`: `t, energy, control_norm` for the controlled solution;
- `cost_vs_N.csv`: cost and errors for every `N` in the sweep;
- `d.csv`: the terminal energies `d_j` and per-pass dissipation;
- `control.csv`: `t, g_1 … g_G`;
- `snapshots.csv`: initial, target, and achieved positions on a 101 × 101 grid.

Nothing time-dependent is written, so the same config gives byte-identical files.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from typing import TYPE_CHECKING, Final

import numpy as np
from loguru import logger

from wave_control_lab._core import Json
from wave_control_lab.control_loop import (
    ControlProblem,
    ControlRun,
    cost,
    fit_linear_cost,
    fit_log_decay,
    iterate,
    verify_controlled,
)
from wave_control_lab.damped_dynamics import IntegrationError
from wave_control_lab.experiments.config import GaussianBeam, band_energy_fraction
from wave_control_lab.experiments.persistence import RunWriter, new_run_dir
from wave_control_lab.global_vars import STARTUP, GlobalVars
from wave_control_lab.spectral_basis import (
    ModeSet,
    ProjectionError,
    enumerate_modes,
    project_converged,
    synthesize,
)
from wave_control_lab.wave_dynamics import (
    SobolevLevel,
    SpectralState,
    energy,
    evolve_forced,
    sobolev_norm,
)

if TYPE_CHECKING:
    from pathlib import Path

    from wave_control_lab.experiments.config import ExperimentConfig

__all__ = [
    "BAND_HALF_WIDTH",
    "SNAPSHOT_POINTS",
    "BeamData",
    "build_problem",
    "project_beam",
    "run_custom",
    "run_example1",
    "run_example2",
]

SNAPSHOT_POINTS: Final = 101
BAND_HALF_WIDTH: Final = 40


@dataclass(frozen=True, slots=True)
class BeamData:
    """Projected beam data and how well the projection converged."""

    state: SpectralState
    discrepancy: float
    quad_order: int
    band_fraction: float


def project_beam(
    cfg: ExperimentConfig, ms: ModeSet, *, band_half_width: float = BAND_HALF_WIDTH
) -> BeamData:
    """Projects `(g0, g1)` onto `ms`, requiring agreement with the doubled order to 1e-6.

    The band fraction counts modes within `band_half_width` of the carrier index in `l`;
    it is 1 whenever the band covers every `l` of `ms`.

    Raises:
        ProjectionError: If the doubled-order check fails.
    """
    beam = GaussianBeam(cfg.beam)
    e1, e2 = beam.panel_edges()
    p0 = project_converged(beam.g0, ms, cfg.quad_order, edges1=e1, edges2=e2)
    p1 = project_converged(beam.g1, ms, cfg.quad_order, edges1=e1, edges2=e2)
    state = SpectralState(p0.coeffs, p1.coeffs, ms)
    center = beam.carrier_index
    fraction = band_energy_fraction(state, ms, center - band_half_width, center + band_half_width)
    return BeamData(state, max(p0.discrepancy, p1.discrepancy), p0.quad_order, fraction)


def build_problem(cfg: ExperimentConfig, ms: ModeSet | None = None) -> ControlProblem:
    """The control problem of a config; for `example2` the initial data are the projected beam."""
    ms = enumerate_modes(cfg.G) if ms is None else ms
    initial = (
        project_beam(cfg, ms).state if cfg.experiment == "example2" else cfg.initial.to_state(ms)
    )
    return ControlProblem(
        modes=ms,
        region=cfg.region,
        T=cfg.T,
        N=cfg.N,
        initial=initial,
        target=cfg.target.to_state(ms),
        tol=cfg.tol,
        samples_per_unit_time=cfg.samples_per_unit_time,
    )


def _resolve_out(cfg: ExperimentConfig) -> Path:
    if cfg.out is not None:
        return cfg.out
    env = GlobalVars.from_env(os.environ)
    return new_run_dir(env.runs_dir, cfg.experiment, STARTUP.local)


def _write_energy(writer: RunWriter, problem: ControlProblem, run: ControlRun) -> None:
    times = run.control.times
    traj = evolve_forced(problem.initial, run.control, run.system.damping, times)
    force = np.sqrt(np.maximum(run.system.damping.quadratic(run.control.g), 0.0))
    writer.write_table(
        "energy", ("t", "energy", "control_norm"), zip(times, traj.energies, force, strict=True)
    )


def _write_sweep(writer: RunWriter, cfg: ExperimentConfig, run: ControlRun) -> Json:
    problem = run.problem
    rows = []
    for n in cfg.sweep_values:
        check = verify_controlled(problem, run, n)
        c = cost(run, n)
        norm_cost = c / ((n + 1) * problem.data_norm) if problem.data_norm > 0 else 0.0
        rows.append((n, c, norm_cost, check.predicted_error, check.achieved_error))
    writer.write_table(
        "cost_vs_N", ("N", "cost", "cost_normalized", "predicted_error", "achieved_error"), rows
    )
    n_values = [r[0] for r in rows]
    d_values = [run.d_at(2 * n) for n in n_values]
    cost_fit = fit_linear_cost(n_values, [r[1] for r in rows], problem.data_norm)
    summary: dict[str, Json] = {
        "N": n_values,
        "cost": [r[1] for r in rows],
        "achieved_error": [r[4] for r in rows],
        "cost_constant": cost_fit.constant,
        "cost_ratio": cost_fit.ratio if math.isfinite(cost_fit.ratio) else None,
    }
    if any(n > 0 for n in n_values):
        decay = fit_log_decay(n_values, d_values, beta=0.5)
        summary |= {
            "log_decay_constant": decay.constant,
            "log_decay_residual": decay.residual,
            "log_decay_beta": 0.5,
        }
    return summary


def _write_snapshots(
    writer: RunWriter, problem: ControlProblem, achieved: SpectralState
) -> None:
    ms = problem.modes
    x = np.linspace(0.0, 1.0, SNAPSHOT_POINTS)
    fields = [synthesize(s.a, ms, x, x) for s in (problem.initial, problem.target, achieved)]
    X1, X2 = np.meshgrid(x, x, indexing="ij")
    columns = [X1.ravel(), X2.ravel(), *(f.ravel() for f in fields)]
    writer.write_table(
        "snapshots", ("x1", "x2", "initial", "target", "achieved"), zip(*columns, strict=True)
    )


def _run_control(
    cfg: ExperimentConfig, problem: ControlProblem, writer: RunWriter, extra: dict[str, Json]
) -> Path:
    try:
        run = iterate(problem)
    except IntegrationError as e:
        writer.write_summary({"status": "failed", "error": str(e), **extra})
        raise
    check = verify_controlled(problem, run)
    writer.write_json("run.json", run.to_json())
    writer.write_table(
        "d",
        ("j", "d", "pass_dissipation"),
        ((j - 1, run.d[j], run.pass_dissipation[j]) for j in range(len(run.d))),
    )
    writer.write_table(
        "control",
        ("t", *(f"g{i + 1}" for i in range(len(problem.modes)))),
        (np.concatenate(([t], g)) for t, g in zip(run.control.times, run.control.g, strict=True)),
    )
    _write_energy(writer, problem, run)
    sweep = _write_sweep(writer, cfg, run)
    _write_snapshots(writer, problem, check.controlled_final)
    summary: dict[str, Json] = {
        "status": "ok",
        "experiment": cfg.experiment,
        "modeset": problem.modes.id,
        "G": len(problem.modes),
        "N": problem.N,
        "T": problem.T,
        "n_solves": problem.n_solves,
        "d": run.d.tolist(),
        "d_monotone": run.monotonicity_violation() == 0.0,
        "d_ratio": float(run.d[-1] / run.d[0]) if run.d[0] > 0 else 0.0,
        "predicted_error": check.predicted_error,
        "achieved_error": check.achieved_error,
        "mismatch": check.mismatch,
        "cost": cost(run),
        "m_bound": run.m_bound,
        "m_bound_growth": run.m_bound_growth,
        "data_norm": problem.data_norm,
        "sweep": sweep,
        **extra,
    }
    writer.write_summary(summary)
    logger.success(
        f"Finished {cfg.experiment}: error {check.achieved_error:.4e}"
        f" (predicted {check.predicted_error:.4e}) in {writer.root}"
    )
    return writer.root


def _start(cfg: ExperimentConfig, plot_data: bool) -> RunWriter:  # noqa: FBT001
    writer = RunWriter(_resolve_out(cfg), plot_data=plot_data)
    writer.write_config(cfg)
    logger.info(
        f"Running {cfg.experiment}: G={cfg.G}, N={cfg.N}, T={cfg.T:g}, ω={cfg.region}"
        f" -> {writer.root}"
    )
    logger.debug(f"Started at {STARTUP.local.isoformat()}")
    return writer


def run_example1(cfg: ExperimentConfig, *, plot_data: bool = False) -> Path:
    """Low-frequency target `(e₁ + e₂, e₁)` from rest; returns the run directory.

    Raises:
        IntegrationError: If a damped solve fails (the config and a failure summary are kept).
    """
    writer = _start(cfg, plot_data)
    return _run_control(cfg, build_problem(cfg), writer, {})


def run_example2(cfg: ExperimentConfig, *, plot_data: bool = False) -> Path:
    """High-frequency Gaussian-beam data driven to rest; returns the run directory.

    Raises:
        ProjectionError: If the beam projection does not converge under doubled quadrature.
        IntegrationError: If a damped solve fails.
    """
    writer = _start(cfg, plot_data)
    ms = enumerate_modes(cfg.G)
    try:
        beam = project_beam(cfg, ms)
    except ProjectionError as e:
        writer.write_summary(
            {"status": "failed", "error": str(e), "projection_discrepancy": e.discrepancy}
        )
        raise
    if beam.band_fraction < 0.9:
        logger.info(f"Beam band fraction {beam.band_fraction:.3f} (broad spectrum in l)")
    problem = ControlProblem(
        modes=ms,
        region=cfg.region,
        T=cfg.T,
        N=cfg.N,
        initial=beam.state,
        target=cfg.target.to_state(ms),
        tol=cfg.tol,
        samples_per_unit_time=cfg.samples_per_unit_time,
    )
    extra: dict[str, Json] = {
        "beam": {
            "projection_discrepancy": beam.discrepancy,
            "quad_order": beam.quad_order,
            "energy": energy(beam.state),
            "norm_H01_L2": sobolev_norm(beam.state, SobolevLevel.H01_L2),
            "band_center": GaussianBeam(cfg.beam).carrier_index,
            "band_half_width": BAND_HALF_WIDTH,
            "band_fraction": beam.band_fraction,
        }
    }
    return _run_control(cfg, problem, writer, extra)


def run_custom(cfg: ExperimentConfig, *, plot_data: bool = False) -> Path:
    """Any initial data and target from the config; returns the run directory."""
    writer = _start(cfg, plot_data)
    return _run_control(cfg, build_problem(cfg), writer, {})
