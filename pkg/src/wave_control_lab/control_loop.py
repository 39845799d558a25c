# SPDX-FileCopyrightText: Copyright 2026, Contributors to wave-control-lab
# SPDX-PackageHomePage: https://github.com/wave-control-lab/wave-control-lab
# SPDX-License-Identifier: Apache-2.0

"""Approximate controls by iterated time reversal of the damped wave equation.

Starting from the seed `(v0d − u(T), −v1d + ∂_t u(T))`, where `u` is the free solution
from the initial data, each pass solves the damped equation over `[0, T]` and reverses
the terminal state into the next seed: `(w, ∂_t w)(·, 0) ← (−w, ∂_t w)(·, T)`.
The control is

    f_N(t) = −1_ω Σ_{ℓ=0..N} [∂_t w^(2ℓ+1)(t) + ∂_t w^(2ℓ)(T − t)]

and the squared terminal error of the controlled solution is `2 E(w^(2N+1), T)`.
Seeds do not depend on `N`, so one run answers every smaller `N` (see [ControlRun.truncated][]).
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass, replace
from typing import TYPE_CHECKING, Final, Self

import numpy as np
from loguru import logger

from wave_control_lab._core import FloatArray, Json, frozen_array
from wave_control_lab.damped_dynamics import (
    DEFAULT_TOL,
    DampedSystem,
    DampedTrajectory,
    assemble,
    solve,
)
from wave_control_lab.wave_dynamics import (
    ForcingRecord,
    SobolevLevel,
    SpectralState,
    energy,
    evolve_forced,
    evolve_free,
    sobolev_norm,
)

if TYPE_CHECKING:
    from collections.abc import Sequence

    from wave_control_lab.spectral_basis import ModeSet, Region

__all__ = [
    "SATURATED_N",
    "ControlError",
    "ControlProblem",
    "ControlRun",
    "CostFit",
    "LogDecayFit",
    "Verification",
    "assemble_control",
    "cost",
    "energy_accounting_residuals",
    "fit_linear_cost",
    "fit_log_decay",
    "iterate",
    "seed_zero",
    "suggest_N",
    "suggested_cost_bound",
    "verify_controlled",
]

SATURATED_N: Final = sys.maxsize
SAMPLES_PER_UNIT_TIME: Final = 40
# Largest x with exp(x) finite in float64.
_MAX_EXPONENT: Final = math.log(sys.float_info.max)
_M_BOUND_GROWTH_WARNING: Final = 2.0


class ControlError(ValueError):
    """A control problem or run is inconsistent."""


@dataclass(frozen=True, eq=False)
class ControlProblem:
    """Drive `(v₀, v₁)` to `(v0d, v1d)` at time `T` with a force supported in `region`.

    Attributes:
        modes: The Galerkin modes.
        region: Where the control (and the damping of the iteration) acts.
        T: Control horizon.
        N: Upper summation index of the control; `2N + 2` damped solves are run.
        initial: `(v₀, v₁)`.
        target: `(v0d, v1d)`.
        tol: Relative tolerance of every damped solve.
        samples_per_unit_time: Density of the control's time grid.
    """

    modes: ModeSet
    region: Region
    T: float
    N: int
    initial: SpectralState
    target: SpectralState
    tol: float = DEFAULT_TOL
    samples_per_unit_time: int = SAMPLES_PER_UNIT_TIME

    def __post_init__(self) -> None:
        if not self.T > 0:
            msg = f"Horizon must be positive; got T={self.T}."
            raise ControlError(msg)
        if self.N < 0:
            msg = f"Iteration count must be nonnegative; got N={self.N}."
            raise ControlError(msg)
        if not self.tol > 0 or self.samples_per_unit_time < 1:
            msg = f"Invalid tolerance {self.tol} or sampling {self.samples_per_unit_time}."
            raise ControlError(msg)
        self.initial.check_modes(self.modes)
        self.target.check_modes(self.modes)

    @property
    def out_grid(self) -> int:
        return math.ceil(self.samples_per_unit_time * self.T)

    @property
    def n_solves(self) -> int:
        return 2 * self.N + 2

    @property
    def data_norm(self) -> float:
        """`‖(v₀, v₁, v0d, v1d)‖` in `H¹₀ × L²` for each pair."""
        return math.hypot(
            sobolev_norm(self.initial, SobolevLevel.H01_L2),
            sobolev_norm(self.target, SobolevLevel.H01_L2),
        )

    def scaled(self, alpha: float) -> Self:
        return replace(self, initial=alpha * self.initial, target=alpha * self.target)


@dataclass(frozen=True, eq=False)
class ControlRun:
    """Everything one time-reversal iteration produced.

    Attributes:
        problem: What was solved.
        system: The damped system used for every pass.
        passes: The `2N + 2` damped trajectories `w^(0) … w^(2N+1)`.
        d: `E(w^(j), T)` for `j = 0 … 2N+1`, so `d[i]` is `d_{i−1}`.
        pass_dissipation: `∫₀ᵀ ∫_ω |∂_t w^(j)|²` per pass.
        m_bound: `sup_j Σ(λ²a² + λb²)` over the seeds (surrogate `H² × H¹₀` norm).
        m_bound_growth: Largest seed norm divided by the first seed's.
        control: The spectral density `g` of `f_N` on the solver's output grid.
        predicted_error: `2 E(w^(2N+1), T)`.
    """

    problem: ControlProblem
    system: DampedSystem
    passes: tuple[DampedTrajectory, ...]
    d: FloatArray
    pass_dissipation: FloatArray
    m_bound: float
    m_bound_growth: float
    control: ForcingRecord
    predicted_error: float

    @property
    def N(self) -> int:
        return self.problem.N

    @property
    def seeds(self) -> tuple[SpectralState, ...]:
        return tuple(p.initial_state for p in self.passes)

    @property
    def terminals(self) -> tuple[SpectralState, ...]:
        return tuple(p.final_state for p in self.passes)

    def d_at(self, j: int) -> float:
        """`d_j = E(w^(j+1), T)` for `j = −1 … 2N`."""
        return float(self.d[j + 1])

    def monotonicity_violation(self) -> float:
        """Largest `d_j − d_{j−1}(1 + 10·tol)`, relative to `d_{−1}` (0 when monotone)."""
        if len(self.d) < 2 or self.d[0] == 0:
            return 0.0
        excess = self.d[1:] - self.d[:-1] * (1 + 10 * self.problem.tol)
        return max(0.0, float(excess.max())) / float(self.d[0])

    def truncated(self, n_terms: int) -> Self:
        """The run that `N = n_terms` would have produced."""
        if not 0 <= n_terms <= self.N:
            msg = f"Can only truncate to 0 ≤ N' ≤ {self.N}; got {n_terms}."
            raise ControlError(msg)
        if n_terms == self.N:
            return self
        problem = replace(self.problem, N=n_terms)
        return _build_run(problem, self.system, self.passes[: 2 * n_terms + 2])

    def to_json(self) -> Json:
        p = self.problem
        return {
            "parameters": {
                "modeset": p.modes.id,
                "G": len(p.modes),
                "region": p.region.to_json(),
                "T": p.T,
                "N": p.N,
                "tol": p.tol,
                "samples_per_unit_time": p.samples_per_unit_time,
            },
            "d": self.d.tolist(),
            "pass_dissipation": self.pass_dissipation.tolist(),
            "m_bound": self.m_bound,
            "m_bound_norm": "surrogate: sum(lambda^2 a^2 + lambda b^2)",
            "m_bound_growth": self.m_bound_growth,
            "predicted_error": self.predicted_error,
            "cost": cost(self),
            "solver": {
                "steps": [t.n_steps for t in self.passes],
                "nfev": [t.nfev for t in self.passes],
            },
            "seeds": [s.to_json() for s in self.seeds],
        }


def seed_zero(problem: ControlProblem) -> SpectralState:
    """`(v0d − u(T), −v1d + ∂_t u(T))`, with `u` the free solution from the initial data."""
    u_T = evolve_free(problem.initial, problem.T)
    tgt = problem.target
    return SpectralState(tgt.a - u_T.a, -tgt.b + u_T.b, problem.modes)


def _control_record(
    problem: ControlProblem, system: DampedSystem, passes: Sequence[DampedTrajectory]
) -> ForcingRecord:
    T = problem.T
    times = passes[0].times
    forward = passes[1::2]
    backward = passes[0::2]
    g = sum(p.samples.b for p in forward) + sum(p.samples.b[::-1] for p in backward)

    def dense(t: FloatArray) -> FloatArray:
        ahead = sum(p.velocity_at(t) for p in forward)
        return ahead + sum(p.velocity_at(T - t) for p in backward)

    return ForcingRecord(times, g, system.region, problem.modes, dense)


def _build_run(
    problem: ControlProblem, system: DampedSystem, passes: Sequence[DampedTrajectory]
) -> ControlRun:
    d = frozen_array([energy(p.final_state) for p in passes])
    seed_norms = np.array(
        [sobolev_norm(p.initial_state, SobolevLevel.H2_H01) ** 2 for p in passes]
    )
    m_bound = float(seed_norms.max())
    growth = m_bound / seed_norms[0] if seed_norms[0] > 0 else 1.0
    return ControlRun(
        problem=problem,
        system=system,
        passes=tuple(passes),
        d=d,
        pass_dissipation=frozen_array([p.dissipated(0.0, problem.T) for p in passes]),
        m_bound=m_bound,
        m_bound_growth=float(growth),
        control=_control_record(problem, system, passes),
        predicted_error=2.0 * float(d[-1]),
    )


def iterate(problem: ControlProblem, system: DampedSystem | None = None) -> ControlRun:
    """Runs the `2N + 2` damped passes of the time-reversal iteration.

    Args:
        problem: The control problem.
        system: Damped system to use; assembled from the problem's modes and region if omitted.

    Raises:
        IntegrationError: If any pass fails.
    """
    if system is None:
        system = assemble(problem.modes, problem.region)
    elif system.modes != problem.modes or system.region != problem.region:
        msg = "Damped system does not match the problem's modes and region."
        raise ControlError(msg)
    seed = seed_zero(problem)
    passes: list[DampedTrajectory] = []
    for j in range(problem.n_solves):
        traj = solve(system, seed, problem.T, problem.out_grid, problem.tol)
        passes.append(traj)
        end = traj.final_state
        logger.debug(f"Pass {j}: E(T) = {energy(end):.6e} ({traj.n_steps} steps)")
        seed = SpectralState(-end.a, end.b, problem.modes)
    run = _build_run(problem, system, passes)
    if (v := run.monotonicity_violation()) > 0:
        logger.warning(f"Terminal energies d_j are not monotone (violation {v:.3e})")
    if run.m_bound_growth > _M_BOUND_GROWTH_WARNING:
        logger.warning(f"Seed norm grew by a factor {run.m_bound_growth:.3g}; M may be unbounded")
    logger.info(
        f"Iterated {problem.n_solves} passes: d_-1 = {run.d[0]:.4e}, d_2N = {run.d[-1]:.4e}"
    )
    return run


def assemble_control(run: ControlRun, n_terms: int | None = None) -> ForcingRecord:
    """`g(t) = Σ_{ℓ ≤ n_terms} [b^(2ℓ+1)(t) + b^(2ℓ)(T − t)]`.

    The physical force is `−1_ω Σ g_i e_i`.
    """
    if n_terms is None:
        return run.control
    return run.truncated(n_terms).control


@dataclass(frozen=True, slots=True)
class Verification:
    """Terminal error of the simulated controlled solution against the prediction.

    Attributes:
        achieved_error: `‖(v(T) − v0d, ∂_t v(T) − v1d)‖²` in `H¹₀ × L²`.
        predicted_error: `2 E(w^(2N+1), T)`.
        mismatch: `|achieved − predicted| / predicted` (0 when both vanish).
        controlled_final: The simulated `(v, ∂_t v)(·, T)`.
    """

    achieved_error: float
    predicted_error: float
    mismatch: float
    controlled_final: SpectralState


def _same_data(p: ControlProblem, q: ControlProblem) -> bool:
    # N, tol and sampling may differ: runs are truncated and re-verified at smaller N.
    if p is q:
        return True
    if p.modes != q.modes or p.region != q.region or p.T != q.T:
        return False
    return p.initial.allclose(q.initial) and p.target.allclose(q.target)


def verify_controlled(
    problem: ControlProblem, run: ControlRun, n_terms: int | None = None
) -> Verification:
    """Simulates the controlled free wave with the assembled control and measures the error."""
    if not _same_data(problem, run.problem):
        msg = "Run was computed for a different problem."
        raise ControlError(msg)
    sub = run if n_terms is None else run.truncated(n_terms)
    traj = evolve_forced(problem.initial, sub.control, sub.system.damping, [problem.T])
    final = traj.final
    achieved = sobolev_norm(final - problem.target, SobolevLevel.H01_L2) ** 2
    predicted = sub.predicted_error
    scale = max(abs(predicted), abs(achieved))
    mismatch = abs(achieved - predicted) / abs(predicted) if predicted > 0 else float(scale > 0)
    logger.info(f"Controlled error {achieved:.6e} vs predicted {predicted:.6e}")
    return Verification(achieved, predicted, mismatch, final)


def cost(run: ControlRun, n_terms: int | None = None) -> float:
    """`max_t ‖1_ω Σ g_i(t) e_i‖_{L²}` over the control grid, i.e. `max_t √(gᵀ M g)`."""
    g = assemble_control(run, n_terms).g
    q = np.maximum(run.system.damping.quadratic(g), 0.0)
    return float(np.sqrt(q.max()))


def energy_accounting_residuals(run: ControlRun) -> FloatArray:
    """`E(w^(j), 0) − E(w^(j), T) − ∫₀ᵀ ∫_ω |∂_t w^(j)|²` per pass.

    Relative to `E(w^(0), 0)` when that is nonzero.
    """
    e0 = np.array([energy(s) for s in run.seeds])
    ref = float(e0[0])
    residuals = e0 - run.d - run.pass_dissipation
    return frozen_array(residuals / ref if ref > 0 else residuals)


def suggest_N(epsilon: float, M_bound: float, beta: float, C: float) -> int:
    """Smallest `N` with `2N + 1 ≥ exp((√(C·M)/ε)^(1/β))`.

    The result is at least 1 for every finite ε; `N = 0` is returned only when the
    exponent underflows to 0 (ε vastly larger than `√(C·M)`).
    Returns [SATURATED_N][] (and logs a warning) when the exponential overflows.
    """
    if not (epsilon > 0 and M_bound > 0 and C > 0):
        msg = f"Need ε, M, C > 0; got ε={epsilon}, M={M_bound}, C={C}."
        raise ValueError(msg)
    if not 0 < beta < 1:
        msg = f"Need β in (0, 1); got {beta}."
        raise ValueError(msg)
    x = (math.sqrt(C * M_bound) / epsilon) ** (1.0 / beta)
    if x >= _MAX_EXPONENT:
        logger.warning(f"Suggested N overflows (exponent {x:.4g}); returning saturated value")
        return SATURATED_N
    n = math.ceil(math.expm1(x) / 2.0)
    return min(n, SATURATED_N)


def suggested_cost_bound(
    epsilon: float, M_bound: float, beta: float, C: float, data_norm: float
) -> float:
    """`exp((C√M/ε)^(1/β)) · ‖data‖`; `inf` (with a warning) on overflow."""
    if not (epsilon > 0 and M_bound > 0 and C > 0 and 0 < beta < 1 and data_norm >= 0):
        msg = f"Invalid inputs ε={epsilon}, M={M_bound}, β={beta}, C={C}, norm={data_norm}."
        raise ValueError(msg)
    x = (C * math.sqrt(M_bound) / epsilon) ** (1.0 / beta)
    if x >= _MAX_EXPONENT:
        logger.warning(f"Cost bound overflows (exponent {x:.4g})")
        return math.inf
    return math.exp(x) * data_norm


@dataclass(frozen=True, slots=True)
class LogDecayFit:
    """`d_{2N} ≈ K [ln(1 + 2N)]^(−2β)`, fit through the origin.

    Attributes:
        constant: `K`.
        residual: RMS relative residual.
        n_used: Points used (`N = 0` is dropped, where the model is infinite).
    """

    constant: float
    residual: float
    n_used: int


def fit_log_decay(
    N_values: Sequence[int], d_values: Sequence[float], beta: float = 0.5
) -> LogDecayFit:
    n = np.asarray(N_values, dtype=np.float64)
    d = np.asarray(d_values, dtype=np.float64)
    if n.shape != d.shape:
        msg = f"Got {len(n)} N values and {len(d)} d values."
        raise ValueError(msg)
    keep = n > 0
    n, d = n[keep], d[keep]
    if len(n) == 0:
        msg = "Need at least one N > 0."
        raise ValueError(msg)
    x = np.log1p(2 * n) ** (-2 * beta)
    K = float(x @ d / (x @ x))
    scale = np.where(d > 0, d, 1.0)
    residual = float(np.sqrt(np.mean(((d - K * x) / scale) ** 2)))
    return LogDecayFit(K, residual, len(n))


@dataclass(frozen=True, slots=True)
class CostFit:
    """Normalized costs `cost(N) / ((N+1)·‖data‖)`.

    Attributes:
        constant: Largest normalized cost (the smallest `C` consistent with the bound).
        ratio: Largest over smallest normalized cost.
        normalized: One value per `N`.
    """

    constant: float
    ratio: float
    normalized: tuple[float, ...]


def fit_linear_cost(
    N_values: Sequence[int], costs: Sequence[float], data_norm: float = 1.0
) -> CostFit:
    n = np.asarray(N_values, dtype=np.float64)
    c = np.asarray(costs, dtype=np.float64)
    if n.shape != c.shape or len(n) == 0:
        msg = f"Got {len(n)} N values and {len(c)} costs."
        raise ValueError(msg)
    if data_norm <= 0:
        return CostFit(0.0, 1.0, tuple(0.0 for _ in n))
    normalized = c / ((n + 1) * data_norm)
    lo, hi = float(normalized.min()), float(normalized.max())
    ratio = hi / lo if lo > 0 else (1.0 if hi == 0 else math.inf)
    return CostFit(hi, ratio, tuple(float(v) for v in normalized))
