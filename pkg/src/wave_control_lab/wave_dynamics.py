# SPDX-FileCopyrightText: Copyright 2026, Contributors to wave-control-lab
# SPDX-PackageHomePage: https://github.com/wave-control-lab/wave-control-lab
# SPDX-License-Identifier: Apache-2.0

"""Exact spectral evolution of the free wave equation, forced (Duhamel) evolution, and norms.

A state is the coefficient pair `(a, b)` of `(u, ∂_t u)` in the eigenbasis.
Each mode is a harmonic oscillator `a'' + λa = R(t)`, so the free flow is a rotation
and the forced flow adds a convolution with `sin(ω(t−s))/ω`.
"""

from __future__ import annotations

import math
from collections.abc import Callable
from dataclasses import dataclass, field
from enum import StrEnum
from functools import cached_property
from typing import Self

import numpy as np
from loguru import logger
from numpy.typing import ArrayLike
from scipy.interpolate import CubicSpline

from wave_control_lab._core import FloatArray, Json, frozen_array
from wave_control_lab.quadrature import composite_rule, gauss_legendre, uniform_edges
from wave_control_lab.spectral_basis import MassMatrix, ModeSet, Region

__all__ = [
    "ForcingError",
    "ForcingRecord",
    "SobolevLevel",
    "SpectralState",
    "StateError",
    "Trajectory",
    "energy",
    "evolve_forced",
    "evolve_free",
    "free_trajectory",
    "lambda_ratio",
    "observation_functional",
    "sobolev_norm",
]

type DenseForcing = Callable[[FloatArray], FloatArray]


class StateError(ValueError):
    """A state has the wrong length, non-finite entries, or mismatched modes."""


class ForcingError(ValueError):
    """A forcing record is malformed or incompatible with the evolution asked of it."""


@dataclass(frozen=True, slots=True, eq=False)
class SpectralState:
    """Position and velocity coefficients over a mode set.

    Attributes:
        a: Coefficients of `u(·, t)`.
        b: Coefficients of `∂_t u(·, t)`.
        modes: The mode set both vectors are expressed in.
    """

    a: FloatArray
    b: FloatArray
    modes: ModeSet

    def __post_init__(self) -> None:
        a = frozen_array(self.a, ndim=1)
        b = frozen_array(self.b, ndim=1)
        if a.shape != (len(self.modes),) or b.shape != a.shape:
            msg = f"Expected {len(self.modes)} coefficients; got a{a.shape}, b{b.shape}."
            raise StateError(msg)
        if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
            msg = "State has non-finite coefficients."
            raise StateError(msg)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @classmethod
    def zeros(cls, modes: ModeSet) -> Self:
        return cls(np.zeros(len(modes)), np.zeros(len(modes)), modes)

    @classmethod
    def of(cls, modes: ModeSet, a: ArrayLike = (), b: ArrayLike = ()) -> Self:
        """Builds a state from leading coefficients, padding with zeros to the mode count."""
        n = len(modes)
        full_a, full_b = np.zeros(n), np.zeros(n)
        a, b = np.asarray(a, dtype=np.float64), np.asarray(b, dtype=np.float64)
        full_a[: len(a)] = a
        full_b[: len(b)] = b
        return cls(full_a, full_b, modes)

    @classmethod
    def from_vector(cls, x: ArrayLike, modes: ModeSet) -> Self:
        x = np.asarray(x, dtype=np.float64)
        n = len(modes)
        return cls(x[:n], x[n:], modes)

    @property
    def vector(self) -> FloatArray:
        """`[a, b]` as one vector of length `2G`."""
        return np.concatenate((self.a, self.b))

    @property
    def is_zero(self) -> bool:
        return not (np.any(self.a) or np.any(self.b))

    def check_modes(self, modes: ModeSet) -> None:
        if self.modes != modes:
            msg = f"State is over modes {self.modes.id}, not {modes.id}."
            raise StateError(msg)

    def __add__(self, other: SpectralState) -> Self:
        other.check_modes(self.modes)
        return self.__class__(self.a + other.a, self.b + other.b, self.modes)

    def __sub__(self, other: SpectralState) -> Self:
        other.check_modes(self.modes)
        return self.__class__(self.a - other.a, self.b - other.b, self.modes)

    def __neg__(self) -> Self:
        return self.__class__(-self.a, -self.b, self.modes)

    def __mul__(self, alpha: float) -> Self:
        return self.__class__(alpha * self.a, alpha * self.b, self.modes)

    __rmul__ = __mul__

    def allclose(self, other: SpectralState, *, rtol: float = 1e-12, atol: float = 0.0) -> bool:
        return self.modes == other.modes and bool(
            np.allclose(self.vector, other.vector, rtol=rtol, atol=atol)
        )

    def to_json(self) -> Json:
        return {"modeset": self.modes.id, "a": self.a.tolist(), "b": self.b.tolist()}

    def __repr__(self) -> str:
        peak_a, peak_b = np.abs(self.a).max(), np.abs(self.b).max()
        return f"SpectralState(G={len(self.modes)}, |a|={peak_a:.3g}, |b|={peak_b:.3g})"


@dataclass(frozen=True, eq=False)
class Trajectory:
    """States sampled on an increasing time grid; row `i` of `a` and `b` is time `times[i]`."""

    times: FloatArray
    a: FloatArray
    b: FloatArray
    modes: ModeSet

    def __post_init__(self) -> None:
        times = frozen_array(self.times, ndim=1)
        a, b = frozen_array(self.a, ndim=2), frozen_array(self.b, ndim=2)
        if a.shape != (len(times), len(self.modes)) or b.shape != a.shape:
            msg = f"Trajectory shapes disagree: t{times.shape}, a{a.shape}, b{b.shape}."
            raise StateError(msg)
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    def __len__(self) -> int:
        return len(self.times)

    def __getitem__(self, i: int) -> SpectralState:
        return SpectralState(self.a[i], self.b[i], self.modes)

    @property
    def initial(self) -> SpectralState:
        return self[0]

    @property
    def final(self) -> SpectralState:
        return self[-1]

    @cached_property
    def energies(self) -> FloatArray:
        lam = self.modes.lam
        return frozen_array(0.5 * (self.a**2 @ lam + np.sum(self.b**2, axis=1)))


@dataclass(frozen=True, slots=True, eq=False)
class ForcingRecord:
    """Spectral density `g(t)` of the force `−1_ω Σ g_i(t) e_i`, sampled on a time grid.

    Attributes:
        times: Strictly increasing sample times, starting at 0.
        g: Shape `(len(times), G)`.
        region: Where the force acts.
        modes: The mode set of `g`.
        dense: Optional exact evaluator `t ↦ g(t)` (vectorized, shape `(len(t), G)`)
            used instead of spline interpolation when present.
    """

    times: FloatArray
    g: FloatArray
    region: Region
    modes: ModeSet
    dense: DenseForcing | None = field(default=None, repr=False)
    _spline: list[CubicSpline] = field(default_factory=list, init=False, repr=False)

    def __post_init__(self) -> None:
        times = frozen_array(self.times, ndim=1)
        g = frozen_array(self.g, ndim=2)
        if len(times) < 2 or np.any(np.diff(times) <= 0):
            msg = "Forcing grid must have at least 2 strictly increasing times."
            raise ForcingError(msg)
        if times[0] != 0.0:
            msg = f"Forcing grid must start at t=0; starts at {times[0]}."
            raise ForcingError(msg)
        if g.shape != (len(times), len(self.modes)):
            msg = f"Expected g of shape {(len(times), len(self.modes))}; got {g.shape}."
            raise ForcingError(msg)
        if not np.all(np.isfinite(g)):
            msg = "Forcing has non-finite samples."
            raise ForcingError(msg)
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "g", g)

    @classmethod
    def zeros(cls, modes: ModeSet, region: Region, times: ArrayLike) -> Self:
        times = np.asarray(times, dtype=np.float64)
        return cls(times, np.zeros((len(times), len(modes))), region, modes)

    @property
    def horizon(self) -> float:
        return float(self.times[-1])

    @property
    def is_zero(self) -> bool:
        return not np.any(self.g)

    def evaluate(self, t: ArrayLike) -> FloatArray:
        """`g` at times `t`, shape `(len(t), G)`."""
        t = np.atleast_1d(np.asarray(t, dtype=np.float64))
        if self.dense is not None:
            return np.asarray(self.dense(t))
        if not self._spline:
            self._spline.append(CubicSpline(self.times, self.g, axis=0))
        return self._spline[0](t)

    def scaled(self, alpha: float) -> Self:
        dense = self.dense
        scaled_dense = None if dense is None else (lambda t: alpha * dense(t))
        return self.__class__(self.times, alpha * self.g, self.region, self.modes, scaled_dense)


class SobolevLevel(StrEnum):
    """Spectral norm levels of a `(position, velocity)` pair."""

    L2_HM1 = "L2xH-1"
    H01_L2 = "H01xL2"
    H2_H01 = "H2xH01"


def evolve_free(s0: SpectralState, t: float) -> SpectralState:
    """Rotates every mode by `t` (any sign)."""
    w = s0.modes.omega
    c, s = np.cos(w * t), np.sin(w * t)
    return SpectralState(s0.a * c + s0.b * s / w, -s0.a * w * s + s0.b * c, s0.modes)


def free_trajectory(s0: SpectralState, times: ArrayLike) -> Trajectory:
    """[evolve_free][] at every time in `times`, vectorized."""
    t = np.atleast_1d(np.asarray(times, dtype=np.float64))
    w = s0.modes.omega[None, :]
    c, s = np.cos(t[:, None] * w), np.sin(t[:, None] * w)
    a = s0.a * c + s0.b * s / w
    b = -s0.a * w * s + s0.b * c
    return Trajectory(t, a, b, s0.modes)


def _check_forcing(s0: SpectralState, F: ForcingRecord, M: MassMatrix) -> None:
    n = len(s0.modes)
    if F.g.shape[1] != n or M.size != n:
        msg = f"Sizes differ: state {n}, forcing {F.g.shape[1]}, mass matrix {M.size}."
        raise ForcingError(msg)
    if F.modes != s0.modes or M.modeset_id != s0.modes.id:
        msg = "Forcing, mass matrix and state are over different mode sets."
        raise ForcingError(msg)
    if M.region != F.region:
        msg = f"Mass matrix region {M.region} differs from forcing region {F.region}."
        raise ForcingError(msg)


def _duhamel_step(
    x: tuple[FloatArray, FloatArray], t0: float, t1: float, F: ForcingRecord, M: MassMatrix
) -> tuple[FloatArray, FloatArray]:
    a, b = x
    w = F.modes.omega
    dt = t1 - t0
    c, s = np.cos(w * dt), np.sin(w * dt)
    a_new = a * c + b * s / w
    b_new = -a * w * s + b * c
    if F.is_zero and F.dense is None:
        return a_new, b_new
    n = max(8, math.ceil(float(w[-1]) * dt) + 8)
    rule = gauss_legendre(n, t0, t1)
    R = -F.evaluate(rule.nodes) @ M.entries  # (n, G); M is symmetric
    tau = (t1 - rule.nodes)[:, None] * w[None, :]
    wR = rule.weights[:, None] * R
    a_new = a_new + np.sum(wR * np.sin(tau), axis=0) / w
    b_new = b_new + np.sum(wR * np.cos(tau), axis=0)
    return a_new, b_new


def evolve_forced(
    s0: SpectralState, F: ForcingRecord, M: MassMatrix, t_out: ArrayLike
) -> Trajectory:
    """Evolves `s0` from `t=0` under the force `−1_ω Σ g_i e_i` and samples at `t_out`.

    Each mode obeys `a_j'' + λ_j a_j = R_j` with `R_j = −Σ_i M[j,i] g_i`.
    The interval `[0, max(t_out)]` is cut at every forcing knot and output time;
    each piece is advanced exactly for the free part and by Gauss–Legendre for the
    convolution, with at least one node per radian of the fastest mode.

    Raises:
        ForcingError: If sizes, mode sets or regions disagree,
            or if `t_out` leaves the forcing grid.
    """
    _check_forcing(s0, F, M)
    t_out = np.atleast_1d(np.asarray(t_out, dtype=np.float64))
    if np.any(np.diff(t_out) < 0):
        msg = "Output times must be nondecreasing."
        raise ForcingError(msg)
    if t_out[0] < 0.0 or t_out[-1] > F.horizon:
        msg = f"Output times [{t_out[0]}, {t_out[-1]}] leave the forcing grid [0, {F.horizon}]."
        raise ForcingError(msg)
    t_max = float(t_out[-1])
    knots = F.times[F.times <= t_max]
    cuts = np.unique(np.concatenate(([0.0], knots, t_out)))
    a_out = np.empty((len(cuts), len(s0.modes)))
    b_out = np.empty_like(a_out)
    x = (s0.a.copy(), s0.b.copy())
    a_out[0], b_out[0] = x
    for i in range(1, len(cuts)):
        x = _duhamel_step(x, float(cuts[i - 1]), float(cuts[i]), F, M)
        a_out[i], b_out[i] = x
    idx = np.searchsorted(cuts, t_out)
    logger.debug(f"Forced evolution over {len(cuts) - 1} intervals to t={t_max:g}")
    return Trajectory(t_out, a_out[idx], b_out[idx], s0.modes)


def energy(s: SpectralState) -> float:
    """`E = ½ Σ (λ a² + b²)`."""
    return 0.5 * float(s.modes.lam @ s.a**2 + s.b @ s.b)


def sobolev_norm(s: SpectralState, level: SobolevLevel | str) -> float:
    lam = s.modes.lam
    match SobolevLevel(level):
        case SobolevLevel.L2_HM1:
            sq = s.a @ s.a + (s.b**2) @ (1.0 / lam)
        case SobolevLevel.H01_L2:
            sq = lam @ s.a**2 + s.b @ s.b
        case SobolevLevel.H2_H01:
            sq = (lam**2) @ s.a**2 + lam @ s.b**2
    return math.sqrt(float(sq))


def lambda_ratio(s: SpectralState) -> float:
    """`Λ = ‖·‖_{H²∩H¹₀ × H¹₀} / ‖·‖_{H¹₀ × L²}`; large at high frequency.

    Raises:
        StateError: If `s` is zero.
    """
    if s.is_zero:
        msg = "Λ is undefined for the zero state."
        raise StateError(msg)
    return sobolev_norm(s, SobolevLevel.H2_H01) / sobolev_norm(s, SobolevLevel.H01_L2)


def observation_functional(
    s0: SpectralState, region: Region, T: float, M: MassMatrix, quad: int = 64
) -> float:
    """`∫₀ᵀ ∫_ω |∂_t u|² = ∫₀ᵀ b(t)ᵀ M b(t) dt` for the free solution from `s0`.

    Uses unit-length Gauss–Legendre panels with `quad` nodes each,
    raised when needed so the fastest mode gets at least one node per radian.
    """
    if T <= 0:
        msg = f"Horizon must be positive; got {T}."
        raise ValueError(msg)
    if M.region != region or M.modeset_id != s0.modes.id:
        msg = f"Mass matrix is over {M.region}/{M.modeset_id}, not {region}/{s0.modes.id}."
        raise ValueError(msg)
    n_panels = max(1, math.ceil(T))
    h = T / n_panels
    order = max(quad, math.ceil(2 * float(s0.modes.omega[-1]) * h) + 8)
    if order > quad:
        logger.debug(f"Raised time quadrature from {quad} to {order} nodes per panel")
    rule = composite_rule(uniform_edges(0.0, T, n_panels), order)
    b = free_trajectory(s0, rule.nodes).b
    return float(rule.weights @ M.quadratic(b))
