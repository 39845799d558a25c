# SPDX-FileCopyrightText: Copyright 2026, Contributors to wave-control-lab
# SPDX-PackageHomePage: https://github.com/wave-control-lab/wave-control-lab
# SPDX-License-Identifier: Apache-2.0

"""Property suites: every module's invariants, measured and compared to a tolerance.

Tolerances that depend on the damped solver scale with `cfg.tol`,
so a loose tolerance loosens them rather than failing them.
Faults can be injected by name (see [FAULTS][]) to check that a suite catches them.
"""

from __future__ import annotations

from collections.abc import Callable, Collection
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Final

import numpy as np
from loguru import logger

from wave_control_lab._core import Json
from wave_control_lab.control_loop import (
    ControlProblem,
    energy_accounting_residuals,
    iterate,
    verify_controlled,
)
from wave_control_lab.damped_dynamics import (
    DampedSystem,
    dissipation_residual,
    reference_solve,
    solve,
)
from wave_control_lab.frequency_function import (
    HarmonicSample,
    cauchy_schwarz_check,
    log_derivative_check,
    monotonicity_check,
    profile,
    three_ball_check,
)
from wave_control_lab.spectral_basis import (
    MassMatrix,
    ModeSet,
    Region,
    enumerate_modes,
    omega_mass_matrix,
    project,
    quadrature_mass_matrix,
)
from wave_control_lab.wave_dynamics import (
    ForcingRecord,
    SpectralState,
    energy,
    evolve_forced,
    evolve_free,
    free_trajectory,
)

if TYPE_CHECKING:
    from numpy.random import Generator

    from wave_control_lab.experiments.config import ExperimentConfig

__all__ = ["FAULTS", "CheckResult", "SuiteFailedError", "SuiteReport", "run_property_suites"]

FAULTS: Final = frozenset({"mass_matrix"})
MASS_MATRIX_MODES: Final = 50
ORACLE_MODES: Final = 20
TELESCOPING_MODES: Final = 25
TELESCOPING_N: Final = 5
N_FREE_STATES: Final = 100
N_GROUP_LAW: Final = 20
N_INTERIOR: Final = 100
N_HALF_DISK: Final = 50
N_MONOTONE: Final = 50


@dataclass(frozen=True, slots=True)
class CheckResult:
    """One named invariant: what was measured and what it had to stay under."""

    name: str
    measured: float
    tolerance: float
    detail: str = ""

    @property
    def passed(self) -> bool:
        return bool(self.measured <= self.tolerance)

    def to_json(self) -> Json:
        return {
            "name": self.name,
            "passed": self.passed,
            "measured": self.measured,
            "tolerance": self.tolerance,
            "detail": self.detail,
        }


@dataclass(frozen=True, slots=True)
class SuiteFailedError(Exception):
    """One or more named invariants failed."""

    failed: tuple[str, ...]

    def __str__(self) -> str:
        return f"{len(self.failed)} invariant(s) failed: {', '.join(self.failed)}"


@dataclass(frozen=True, slots=True)
class SuiteReport:
    checks: tuple[CheckResult, ...]
    tol: float
    seed: int
    faults: tuple[str, ...] = ()

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def failed(self) -> tuple[str, ...]:
        return tuple(c.name for c in self.checks if not c.passed)

    def __getitem__(self, name: str) -> CheckResult:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def raise_if_failed(self) -> None:
        if not self.passed:
            raise SuiteFailedError(self.failed)

    def to_json(self) -> Json:
        return {
            "passed": self.passed,
            "tol": self.tol,
            "seed": self.seed,
            "faults": list(self.faults),
            "checks": [c.to_json() for c in self.checks],
        }


@dataclass(slots=True)
class _Suites:
    region: Region
    tol: float
    T: float
    G: int
    rng: Generator
    faults: frozenset[str]
    results: list[CheckResult] = field(default_factory=list)

    def record(self, name: str, measured: float, tolerance: float, detail: str = "") -> None:
        result = CheckResult(name, float(measured), float(tolerance), detail)
        self.results.append(result)
        if result.passed:
            logger.debug(f"{name}: {measured:.3e} ≤ {tolerance:.1e}")
        else:
            logger.error(f"{name}: {measured:.3e} > {tolerance:.1e} {detail}".rstrip())

    def mass_matrix(self, ms: ModeSet) -> MassMatrix:
        m = omega_mass_matrix(ms, self.region)
        if "mass_matrix" not in self.faults:
            return m
        corrupted = np.array(m.entries)
        corrupted[0, 0] += 1e-3
        return MassMatrix(corrupted, m.region, m.modeset_id)

    def smooth_state(self, ms: ModeSet) -> SpectralState:
        lam = ms.lam
        a = self.rng.standard_normal(len(ms)) * lam[0] / lam
        b = self.rng.standard_normal(len(ms)) * np.sqrt(lam[0] / lam)
        return SpectralState(a, b, ms)

    def spectral(self) -> None:
        ms = enumerate_modes(MASS_MATRIX_MODES)
        closed = self.mass_matrix(ms)
        oracle = quadrature_mass_matrix(ms, self.region, order=64)
        self.record(
            "mass_matrix.closed_form_vs_quadrature",
            np.max(np.abs(closed.entries - oracle.entries)),
            1e-10,
            f"G={len(ms)}, ω={self.region}",
        )
        eig = np.linalg.eigvalsh(closed.entries)
        outside = max(0.0, -float(eig.min()), float(eig.max()) - 1.0)
        self.record("mass_matrix.eigenvalues_in_unit_interval", outside, 1e-12)
        big = enumerate_modes(MASS_MATRIX_MODES + 10)
        self.record(
            "modes.prefix", float(big.prefix(MASS_MATRIX_MODES) != ms), 0.0, "G vs G+10"
        )
        # ∫₀¹ x(1 − x) sin(kπx) dx is 4/(kπ)³ for odd k and 0 for even k.
        k, l = ms.k, ms.l
        exact = 2.0 * _bubble_sine(k) * _bubble_sine(l)
        got = project(lambda x1, x2: x1 * (1 - x1) * x2 * (1 - x2), ms)
        self.record(
            "projection.polynomial_coefficients",
            np.max(np.abs(got - exact)),
            1e-12,
            f"x₁(1 − x₁)x₂(1 − x₂), G={len(ms)}",
        )

    def free(self) -> None:
        ms = enumerate_modes(self.G)
        times = np.linspace(0.0, 10.0, 41)
        worst = 0.0
        for _ in range(N_FREE_STATES):
            e = free_trajectory(self.smooth_state(ms), times).energies
            worst = max(worst, float(np.max(np.abs(e - e[0])) / e[0]))
        self.record("free.energy_conservation", worst, 1e-12, f"{N_FREE_STATES} states, t ≤ 10")
        worst = 0.0
        for _ in range(N_GROUP_LAW):
            s = self.smooth_state(ms)
            t1, t2 = self.rng.uniform(-10.0, 10.0, 2)
            direct = evolve_free(s, t1 + t2).vector
            stepped = evolve_free(evolve_free(s, t1), t2).vector
            worst = max(worst, float(np.linalg.norm(stepped - direct) / np.linalg.norm(direct)))
        self.record("free.group_law", worst, 1e-12, f"{N_GROUP_LAW} states, |t| ≤ 10")
        self.duhamel(ms)

    def duhamel(self, ms: ModeSet) -> None:
        # Constant g on the full square: a'' + λa = −c, solved in closed form.
        t_end = 3.0
        times = np.linspace(0.0, t_end, 31)
        c = self.rng.uniform(1.0, 2.0, len(ms))
        full = Region.full()
        forcing = ForcingRecord(times, np.tile(c, (len(times), 1)), full, ms)
        s = self.smooth_state(ms)
        out = evolve_forced(s, forcing, omega_mass_matrix(ms, full), [t_end]).final
        w, lam = ms.omega, ms.lam
        cos, sin = np.cos(w * t_end), np.sin(w * t_end)
        a = s.a * cos + s.b * sin / w - c / lam * (1 - cos)
        b = -s.a * w * sin + s.b * cos - c / w * sin
        exact = SpectralState(a, b, ms).vector
        error = np.linalg.norm(out.vector - exact) / np.linalg.norm(exact)
        self.record("free.duhamel_closed_form", error, 1e-10, f"constant g, t = {t_end}")

    def damped(self) -> None:
        ms = enumerate_modes(self.G)
        system = DampedSystem(ms, self.mass_matrix(ms))
        s0 = self.smooth_state(ms)
        traj = solve(system, s0, self.T, tol=self.tol)
        residual = abs(dissipation_residual(traj, system, 0.0, self.T)) / energy(s0)
        self.record(
            "damped.dissipation_identity", residual, max(1e-6, 1e3 * self.tol), f"G={self.G}"
        )
        self.record("damped.energy_monotone", traj.monotonicity_violation(), 1e2 * self.tol)
        small = enumerate_modes(ORACLE_MODES)
        sys_small = DampedSystem(small, self.mass_matrix(small))
        s_small = self.smooth_state(small)
        numeric = solve(sys_small, s_small, self.T, tol=self.tol).final_state
        exact = reference_solve(sys_small, s_small, [self.T]).final
        error = np.linalg.norm(numeric.vector - exact.vector) / np.linalg.norm(exact.vector)
        band = max(1e-7, 1e2 * self.tol)
        self.record("damped.reference_oracle", error, band, f"G={ORACLE_MODES}")
        # Each solve is within `band` of the exact flow, so a restart may differ by twice that.
        t1 = 0.4 * self.T
        halfway = solve(sys_small, s_small, t1, tol=self.tol).final_state
        restarted = solve(sys_small, halfway, self.T - t1, tol=self.tol).final_state
        gap = np.linalg.norm(restarted.vector - numeric.vector) / np.linalg.norm(s_small.vector)
        self.record("damped.time_translation", gap, 2 * band, f"restart at t = {t1:g}")

    def control(self) -> None:
        ms = enumerate_modes(TELESCOPING_MODES)
        problem = ControlProblem(
            modes=ms,
            region=self.region,
            T=self.T,
            N=TELESCOPING_N,
            initial=SpectralState.zeros(ms),
            target=SpectralState.of(ms, [1.0, 1.0], [1.0]),
            tol=self.tol,
        )
        system = DampedSystem(ms, self.mass_matrix(ms))
        run = iterate(problem, system)
        check = verify_controlled(problem, run)
        self.record(
            "control.telescoping_identity",
            check.mismatch,
            max(1e-5, 1e4 * self.tol),
            f"G={TELESCOPING_MODES}, N={TELESCOPING_N}",
        )
        self.record("control.d_monotone", run.monotonicity_violation(), 0.0)
        accounting = float(np.max(np.abs(energy_accounting_residuals(run))))
        self.record("control.energy_accounting", accounting, max(1e-6, 1e3 * self.tol))
        doubled_problem = problem.scaled(2.0)
        doubled = iterate(doubled_problem, system)
        g_ref = 2.0 * run.control.g
        g_gap = np.max(np.abs(doubled.control.g - g_ref)) / max(np.max(np.abs(g_ref)), 1e-300)
        err_ratio = verify_controlled(doubled_problem, doubled).achieved_error / max(
            check.achieved_error, 1e-300
        )
        self.record(
            "control.scale_equivariance",
            max(float(g_gap), abs(err_ratio - 4.0) / 4.0),
            1e-6,
            "data × 2 ⇒ control × 2, error × 4",
        )

    def frequency(self) -> None:
        worst_phi = 0.0
        worst_log = 0.0
        worst_equal = 0.0
        radii = np.linspace(0.1, 0.9, 9)
        for m in range(1, 7):
            v = HarmonicSample.homogeneous(m)
            p = profile(v, radii)
            worst_phi = max(worst_phi, float(np.max(np.abs(p.Phi - 2 * m))))
            worst_log = max(worst_log, log_derivative_check(v, 0.75))
            tb = three_ball_check(v, 0.2, 0.5, 0.8)
            worst_equal = max(worst_equal, abs(tb.relative_gap))
            half = HarmonicSample.homogeneous(m, "im", half_disk=True)
            p_half = profile(half, radii)
            worst_phi = max(worst_phi, float(np.max(np.abs(p_half.Phi - 2 * m))))
        self.record("frequency.homogeneous_phi", worst_phi, 1e-8, "Re z^m, Im z^m, m = 1..6")
        self.record("frequency.log_derivative", worst_log, 1e-6, "dr = 1e-3, r = 0.75")
        self.record("frequency.three_ball_equality", worst_equal, 1e-8, "homogeneous")
        worst_mono = 0.0
        worst_cs = 0.0
        for _ in range(N_MONOTONE):
            v = HarmonicSample.random(self.rng)
            worst_mono = max(worst_mono, monotonicity_check(profile(v, radii)))
            d_sq, bound = cauchy_schwarz_check(v, float(self.rng.uniform(0.2, 0.9)))
            worst_cs = max(worst_cs, (d_sq - bound) / bound if bound > 0 else 0.0)
        self.record("frequency.phi_monotone", worst_mono, 1e-8, f"{N_MONOTONE} random samples")
        self.record("frequency.cauchy_schwarz", worst_cs, 1e-10)
        failures = 0
        for _ in range(N_INTERIOR):
            v = HarmonicSample.random(self.rng)
            r1, r2, r3 = np.sort(self.rng.uniform(0.05, 0.95, 3))
            failures += not three_ball_check(v, r1, r2, r3).satisfied
        self.record("frequency.three_ball_interior", failures, 0, f"{N_INTERIOR} cases")
        failures = 0
        for i in range(N_HALF_DISK):
            h = 0.0 if i % 2 == 0 else float(self.rng.uniform(0.05, 0.3))
            v = HarmonicSample.random(self.rng, half_disk=True, R_o=1.0 - h, R_D=1.0, h=h)
            r_o = v.R_o
            if h > 0:
                r1 = float(self.rng.uniform(0.2, 0.9) * h)
                r2, r3 = np.sort(self.rng.uniform(h, 0.95 * r_o, 2))
            else:
                r1, r2, r3 = np.sort(self.rng.uniform(0.05, 0.95, 3) * r_o)
            failures += not three_ball_check(v, r1, r2, r3).satisfied
        self.record("frequency.three_ball_half_disk", failures, 0, f"{N_HALF_DISK} cases")


def _bubble_sine(k: np.ndarray) -> np.ndarray:
    return np.where(k % 2 == 1, 4.0 / (k * np.pi) ** 3, 0.0)


SUITES: Final[dict[str, Callable[[_Suites], None]]] = {
    "spectral": _Suites.spectral,
    "free": _Suites.free,
    "damped": _Suites.damped,
    "control": _Suites.control,
    "frequency": _Suites.frequency,
}


def run_property_suites(
    cfg: ExperimentConfig, *, faults: Collection[str] = (), only: Collection[str] = ()
) -> SuiteReport:
    """Runs the invariant suites and returns a pass/fail report.

    Args:
        cfg: Supplies the region, horizon, mode count, solver tolerance, and seed.
        faults: Names from [FAULTS][] to inject.
        only: Suite names (keys of `SUITES`) to run; all when empty.

    Raises:
        ValueError: If a fault or suite name is unknown.
    """
    if unknown := set(faults) - FAULTS:
        msg = f"Unknown fault(s) {sorted(unknown)}; choose from {sorted(FAULTS)}."
        raise ValueError(msg)
    if unknown := set(only) - set(SUITES):
        msg = f"Unknown suite(s) {sorted(unknown)}; choose from {sorted(SUITES)}."
        raise ValueError(msg)
    suites = _Suites(
        region=cfg.region,
        tol=cfg.tol,
        T=cfg.T,
        G=cfg.G,
        rng=np.random.default_rng(cfg.seed),
        faults=frozenset(faults),
    )
    for name, suite in SUITES.items():
        if not only or name in only:
            logger.info(f"Running {name} suite")
            suite(suites)
    report = SuiteReport(tuple(suites.results), cfg.tol, cfg.seed, tuple(sorted(faults)))
    if report.passed:
        logger.success(f"All {len(report.checks)} invariants hold")
    else:
        logger.error(f"Failed: {', '.join(report.failed)}")
    return report
