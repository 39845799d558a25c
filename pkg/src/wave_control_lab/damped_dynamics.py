# SPDX-FileCopyrightText: Copyright 2026, Contributors to wave-control-lab
# SPDX-PackageHomePage: https://github.com/wave-control-lab/wave-control-lab
# SPDX-License-Identifier: Apache-2.0

"""Galerkin solution of the damped wave equation `∂²w − Δw + 1_ω ∂w = 0`.

In spectral coordinates `x = [a, b]` obeys `x' = A x` with `A = [[0, I], [−Λ, −B]]`,
where `Λ = diag(λ)` and `B` is the ω-mass matrix.
[solve][] integrates it with an adaptive 5(4) Runge–Kutta pair and keeps a cubic Hermite
interpolant through the accepted steps; [reference_solve][] is the matrix-exponential oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import TYPE_CHECKING, Final

import numpy as np
from loguru import logger
from numpy.typing import ArrayLike
from scipy.integrate import solve_ivp
from scipy.interpolate import CubicHermiteSpline
from scipy.linalg import expm

from wave_control_lab._core import FloatArray, frozen_array
from wave_control_lab.quadrature import composite_rule
from wave_control_lab.spectral_basis import MassMatrix, ModeSet, Region, omega_mass_matrix
from wave_control_lab.wave_dynamics import (
    SobolevLevel,
    SpectralState,
    Trajectory,
    energy,
    sobolev_norm,
)

if TYPE_CHECKING:
    from collections.abc import Callable

__all__ = [
    "DampedSystem",
    "DampedTrajectory",
    "DecayFit",
    "IntegrationError",
    "ObservationWindow",
    "assemble",
    "decay_constant",
    "decay_fit",
    "dissipation_residual",
    "fit_power_decay",
    "higher_energy_at_zero",
    "observation_window",
    "reference_solve",
    "solve",
]

DEFAULT_TOL: Final = 1e-9
REFERENCE_MAX_MODES: Final = 50
NON_POLYNOMIAL_RMS: Final = 0.05
PSD_SLACK: Final = 1e-12


@dataclass(frozen=True, slots=True)
class IntegrationError(Exception):
    """The adaptive integrator stopped before reaching the horizon.

    Attributes:
        t_reached: Last accepted time.
        n_steps: Accepted steps.
        nfev: Right-hand-side evaluations.
        message: The integrator's own message.
    """

    t_reached: float
    n_steps: int
    nfev: int
    message: str

    def __str__(self) -> str:
        return (
            f"Integration failed at t={self.t_reached:g}"
            f" after {self.n_steps} steps ({self.nfev} evaluations): {self.message}"
        )


@dataclass(frozen=True, eq=False)
class DampedSystem:
    """Modes plus the damping matrix `B`.

    `B` is normally the ω-mass matrix from [assemble][];
    test harnesses may pass any symmetric positive-semidefinite matrix (for example zero).
    """

    modes: ModeSet
    damping: MassMatrix

    def __post_init__(self) -> None:
        B = self.damping.entries
        if B.shape != (len(self.modes), len(self.modes)):
            msg = f"Damping matrix shape {B.shape} does not match {len(self.modes)} modes."
            raise ValueError(msg)
        if self.damping.modeset_id != self.modes.id:
            msg = f"Damping matrix is over {self.damping.modeset_id}, not {self.modes.id}."
            raise ValueError(msg)
        if not np.allclose(B, B.T, rtol=0, atol=1e-14 * max(1.0, float(np.abs(B).max()))):
            msg = "Damping matrix is not symmetric."
            raise ValueError(msg)
        # A Gram matrix has eigenvalues in [0, 1] up to rounding.
        low = float(np.linalg.eigvalsh(B).min())
        if low < -PSD_SLACK * max(1.0, float(np.abs(B).max())):
            msg = f"Damping matrix is not positive semidefinite (smallest eigenvalue {low:.3e})."
            raise ValueError(msg)

    @property
    def region(self) -> Region:
        return self.damping.region

    @cached_property
    def generator(self) -> FloatArray:
        n = len(self.modes)
        A = np.zeros((2 * n, 2 * n))
        A[:n, n:] = np.eye(n)
        A[n:, :n] = -np.diag(self.modes.lam)
        A[n:, n:] = -self.damping.entries
        return frozen_array(A)

    def rhs(self, _t: float, x: FloatArray) -> FloatArray:
        return self.generator @ x


@dataclass(frozen=True, eq=False)
class DampedTrajectory:
    """A damped solution on a uniform output grid plus its dense interpolant.

    Attributes:
        samples: States on the output grid.
        step_times: Times of the integrator's accepted steps (the interpolant's knots).
        dense: `t ↦ x(t)` for an array of times; shape `(len(t), 2G)`.
        n_steps: Accepted integrator steps.
        nfev: Right-hand-side evaluations.
        tol: The relative tolerance requested.
        system: The system that was solved.
    """

    samples: Trajectory
    step_times: FloatArray
    dense: Callable[[FloatArray], FloatArray]
    n_steps: int
    nfev: int
    tol: float
    system: DampedSystem

    @property
    def modes(self) -> ModeSet:
        return self.samples.modes

    @property
    def horizon(self) -> float:
        return float(self.samples.times[-1])

    @property
    def times(self) -> FloatArray:
        return self.samples.times

    @property
    def initial_state(self) -> SpectralState:
        return self.samples.initial

    @property
    def final_state(self) -> SpectralState:
        return self.samples.final

    @property
    def energies(self) -> FloatArray:
        return self.samples.energies

    def state_at(self, t: float) -> SpectralState:
        return SpectralState.from_vector(self.dense(np.array([t]))[0], self.modes)

    def velocity_at(self, t: ArrayLike) -> FloatArray:
        """Velocity coefficients `b(t)`, shape `(len(t), G)`."""
        t = np.atleast_1d(np.asarray(t, dtype=np.float64))
        return self.dense(t)[:, len(self.modes) :]

    def energy_at(self, t: ArrayLike) -> FloatArray:
        t = np.atleast_1d(np.asarray(t, dtype=np.float64))
        x = self.dense(t)
        n = len(self.modes)
        return 0.5 * (x[:, :n] ** 2 @ self.modes.lam + np.sum(x[:, n:] ** 2, axis=1))

    def dissipated(self, t0: float, t1: float) -> float:
        """`∫_{t0}^{t1} b(t)ᵀ B b(t) dt`, exact for the piecewise-cubic interpolant."""
        if t1 == t0:
            return 0.0
        inner = self.step_times[(self.step_times > t0) & (self.step_times < t1)]
        rule = composite_rule(np.concatenate(([t0], inner, [t1])), 4)
        b = self.velocity_at(rule.nodes)
        return float(rule.weights @ self.system.damping.quadratic(b))

    def monotonicity_violation(self) -> float:
        """Largest energy increase between consecutive samples, relative to `E(0)`."""
        e = self.energies
        if e[0] == 0:
            return 0.0
        return max(0.0, float(np.max(np.diff(e), initial=0.0))) / float(e[0])


def assemble(ms: ModeSet, region: Region) -> DampedSystem:
    return DampedSystem(ms, omega_mass_matrix(ms, region))


def _zero_trajectory(sys: DampedSystem, T: float, out_grid: int, tol: float) -> DampedTrajectory:
    n = len(sys.modes)
    times = np.linspace(0.0, T, out_grid + 1)
    zeros = np.zeros((len(times), n))
    return DampedTrajectory(
        samples=Trajectory(times, zeros, zeros, sys.modes),
        step_times=frozen_array([0.0, T]),
        dense=lambda t: np.zeros((len(t), 2 * n)),
        n_steps=0,
        nfev=0,
        tol=tol,
        system=sys,
    )


def solve(
    sys: DampedSystem,
    s0: SpectralState,
    T: float,
    out_grid: int = 160,
    tol: float = DEFAULT_TOL,
) -> DampedTrajectory:
    """Integrates the damped system from `s0` over `[0, T]`.

    Args:
        sys: The system.
        s0: Initial state.
        T: Horizon.
        out_grid: Number of uniform output intervals (the grid has `out_grid + 1` times).
        tol: Relative tolerance; the absolute tolerance is `tol·max|x₀|`.

    Raises:
        IntegrationError: If the integrator gives up before `T`.
    """
    if T <= 0 or tol <= 0 or out_grid < 1:
        msg = f"Need T > 0, tol > 0 and out_grid ≥ 1; got T={T}, tol={tol}, out_grid={out_grid}."
        raise ValueError(msg)
    s0.check_modes(sys.modes)
    x0 = s0.vector
    scale = float(np.abs(x0).max())
    if scale == 0.0:
        return _zero_trajectory(sys, T, out_grid, tol)
    atol = tol * max(scale, np.finfo(np.float64).tiny)
    sol = solve_ivp(sys.rhs, (0.0, T), x0, method="RK45", rtol=tol, atol=atol)
    if sol.status != 0:
        raise IntegrationError(
            t_reached=float(sol.t[-1]), n_steps=len(sol.t) - 1, nfev=sol.nfev, message=sol.message
        )
    slopes = sys.generator @ sol.y
    spline = CubicHermiteSpline(sol.t, sol.y, slopes, axis=1, extrapolate=False)
    n = len(sys.modes)
    times = np.linspace(0.0, T, out_grid + 1)
    x = spline(times).T
    x[0], x[-1] = x0, sol.y[:, -1]
    logger.debug(f"Damped solve: T={T:g}, {len(sol.t) - 1} steps, {sol.nfev} evaluations")
    return DampedTrajectory(
        samples=Trajectory(times, x[:, :n], x[:, n:], sys.modes),
        step_times=frozen_array(sol.t),
        dense=lambda t: spline(np.clip(t, 0.0, T)).T,
        n_steps=len(sol.t) - 1,
        nfev=sol.nfev,
        tol=tol,
        system=sys,
    )


def reference_solve(sys: DampedSystem, s0: SpectralState, times: ArrayLike) -> Trajectory:
    """`x(t) = exp(tA) x₀` by dense matrix exponentials; an oracle for small mode sets."""
    if len(sys.modes) > REFERENCE_MAX_MODES:
        logger.warning(
            f"Matrix-exponential reference on {len(sys.modes)} modes"
            f" (> {REFERENCE_MAX_MODES}) will be slow"
        )
    s0.check_modes(sys.modes)
    t = np.atleast_1d(np.asarray(times, dtype=np.float64))
    A = sys.generator
    x0 = s0.vector
    x = np.array([expm(ti * A) @ x0 for ti in t])
    n = len(sys.modes)
    return Trajectory(t, x[:, :n], x[:, n:], sys.modes)


def dissipation_residual(
    traj: DampedTrajectory, sys: DampedSystem, t0: float, t1: float
) -> float:
    """`E(t1) − E(t0) + ∫_{t0}^{t1} bᵀBb dt`, which vanishes for exact solutions."""
    if not 0.0 <= t0 <= t1 <= traj.horizon:
        msg = f"Need 0 ≤ t0 ≤ t1 ≤ {traj.horizon}; got t0={t0}, t1={t1}."
        raise ValueError(msg)
    if sys is not traj.system:
        msg = "Trajectory was solved with a different system."
        raise ValueError(msg)
    if t0 == t1:
        return 0.0
    e0, e1 = traj.energy_at([t0, t1])
    return float(e1 - e0) + traj.dissipated(t0, t1)


def higher_energy_at_zero(sys: DampedSystem, s0: SpectralState) -> float:
    """`E(∂_t w, 0) = ½(Σ λ b² + ‖−Λa − Bb‖²)`, using the initial acceleration."""
    s0.check_modes(sys.modes)
    lam = sys.modes.lam
    accel = -lam * s0.a - sys.damping.entries @ s0.b
    return 0.5 * float(lam @ s0.b**2 + accel @ accel)


@dataclass(frozen=True, slots=True)
class DecayFit:
    """Least-squares line through `(ln t, ln E)`.

    Attributes:
        delta_hat: Minus the slope.
        log_constant: The intercept.
        fit_residual: RMS residual in `ln E`.
        non_polynomial: Whether the residual suggests a non-power-law trace.
    """

    delta_hat: float
    log_constant: float
    fit_residual: float
    non_polynomial: bool


def fit_power_decay(
    times: ArrayLike,
    energies: ArrayLike,
    window: tuple[float, float] | None = None,
    *,
    rms_threshold: float = NON_POLYNOMIAL_RMS,
) -> DecayFit:
    t = np.asarray(times, dtype=np.float64)
    e = np.asarray(energies, dtype=np.float64)
    if window is not None:
        lo, hi = window
        keep = (t >= lo) & (t <= hi)
        t, e = t[keep], e[keep]
    if len(t) < 3:
        msg = f"Need at least 3 samples in the window; got {len(t)}."
        raise ValueError(msg)
    if np.any(t <= 0) or np.any(e <= 0):
        msg = "Decay fit needs positive times and energies on the whole window."
        raise ValueError(msg)
    x, y = np.log(t), np.log(e)
    slope, intercept = np.polyfit(x, y, 1)
    rms = float(np.sqrt(np.mean((y - (slope * x + intercept)) ** 2)))
    non_polynomial = rms > rms_threshold
    if non_polynomial:
        logger.warning(f"Energy trace is not a power law on the window (RMS {rms:.3g})")
    return DecayFit(float(-slope), float(intercept), rms, non_polynomial)


def decay_fit(traj: DampedTrajectory, window: tuple[float, float]) -> DecayFit:
    """Fits `E(t) ≈ C t^(−δ)` on `window`; a diagnostic, not a rate."""
    lo, hi = window
    if not 0 < lo < hi <= traj.horizon:
        msg = f"Window {window} is not inside (0, {traj.horizon}]."
        raise ValueError(msg)
    return fit_power_decay(traj.times, traj.energies, window)


def decay_constant(traj: DampedTrajectory, delta: float) -> float:
    """`sup_{t > 0} t^δ E(t) / ‖(w₀, w₁)‖²_{H²×H¹₀}` over the output grid."""
    s0 = traj.initial_state
    if s0.is_zero:
        return 0.0
    t = traj.times[1:]
    peak = float(np.max(t**delta * traj.energies[1:]))
    return peak / sobolev_norm(s0, SobolevLevel.H2_H01) ** 2


@dataclass(frozen=True, slots=True)
class ObservationWindow:
    """Both sides of `‖(w₀,w₁)‖² ≤ C ∫₀^window ∫_ω |∂_t w|²`.

    Attributes:
        window: `C (E(∂_t w, 0) / E(w, 0))^(1/δ)`.
        observed: `∫₀^window ∫_ω |∂_t w|²`.
        lhs: `‖(w₀, w₁)‖²_{H¹₀×L²} = 2 E(w, 0)`.
        C: The constant used for the window and the right-hand side.
    """

    window: float
    observed: float
    lhs: float
    C: float

    @property
    def rhs(self) -> float:
        return self.C * self.observed


def observation_window(
    sys: DampedSystem,
    s0: SpectralState,
    C: float,
    delta: float,
    *,
    samples_per_unit_time: int = 40,
    tol: float = DEFAULT_TOL,
) -> ObservationWindow:
    """Computes the observation window for `(C, δ)` and both sides of the inequality on it."""
    if C <= 0 or delta <= 0:
        msg = f"Need C > 0 and δ > 0; got C={C}, δ={delta}."
        raise ValueError(msg)
    if s0.is_zero:
        msg = "Observation window is undefined for zero initial data."
        raise ValueError(msg)
    e0 = energy(s0)
    window = C * (higher_energy_at_zero(sys, s0) / e0) ** (1.0 / delta)
    out_grid = max(1, math.ceil(samples_per_unit_time * window))
    traj = solve(sys, s0, window, out_grid, tol)
    observed = traj.dissipated(0.0, window)
    logger.info(f"Observation window {window:.4g}: observed {observed:.4g}, lhs {2 * e0:.4g}")
    return ObservationWindow(window, observed, 2.0 * e0, C)
