# SPDX-FileCopyrightText: Copyright 2026, Contributors to wave-control-lab
# SPDX-PackageHomePage: https://github.com/wave-control-lab/wave-control-lab
# SPDX-License-Identifier: Apache-2.0

"""Frequency function of planar harmonic functions, and three-ball inequalities.

For a harmonic `v` and balls `B_r` centred at `y_o`,

    H(r) = ∫_{B_r ∩ D} v²
    D(r) = ∫_{B_r ∩ D} |∇v|² (r² − |y − y_o|²)
    Φ(r) = D(r) / H(r)

`Φ` is nondecreasing, `d/dr ln H = (2 + Φ)/r`, and `ln H` is convex in `ln r`,
which gives `H(r₂) ≤ H(r₁)^α H(r₃)^(1−α)`.
Two geometries are supported: an interior ball (`D` is the plane), and the upper
half-disk `D = {|y| < R_D, y₂ > 0}` with `v = 0` on its diameter and `y_o = (0, h)`.
"""

from __future__ import annotations

import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field
from enum import StrEnum
from typing import TYPE_CHECKING, Final, Self

import numpy as np
from loguru import logger
from numpy.typing import ArrayLike

from wave_control_lab._core import FloatArray, Json, frozen_array
from wave_control_lab.quadrature import gauss_legendre

if TYPE_CHECKING:
    from numpy.random import Generator

__all__ = [
    "GeometryError",
    "HarmonicSample",
    "HarmonicScreenError",
    "RadialProfile",
    "SampleKind",
    "ThreeBallResult",
    "cauchy_schwarz_check",
    "log_derivative_check",
    "monotonicity_check",
    "profile",
    "three_ball_check",
]

type ValueFn = Callable[[FloatArray, FloatArray], FloatArray]
type GradientFn = Callable[[FloatArray, FloatArray], tuple[FloatArray, FloatArray]]

SCREEN_POINTS: Final = 50
SCREEN_TOL: Final = 1e-8
SCREEN_STEP: Final = 1e-3
DIAMETER_TOL: Final = 1e-12
DEFAULT_RADIAL: Final = 64
DEFAULT_ANGULAR: Final = 256
THREE_BALL_TOL: Final = 1e-8


class SampleKind(StrEnum):
    BALL = "interior-ball"
    HALF_DISK = "half-disk"


@dataclass(frozen=True, slots=True)
class HarmonicScreenError(ValueError):
    """The function failed the Laplacian screen or does not vanish on the diameter."""

    label: str
    issue: str
    residual: float

    def __str__(self) -> str:
        return f"{self.label}: {self.issue} (residual {self.residual:.3e})"


class GeometryError(ValueError):
    """Radii or centre violate the geometric preconditions."""


@dataclass(frozen=True, eq=False)
class HarmonicSample:
    """A harmonic function with its gradient, a centre `y_o`, and an outer radius `R_o`.

    Construction runs a 5-point Laplacian screen (Richardson-extrapolated) at 50 interior
    points and, for the half-disk, checks that `v` vanishes on the diameter.

    Attributes:
        value: Vectorized `v(x, y)`.
        gradient: Vectorized `(∂ₓv, ∂ᵧv)`.
        kind: Interior ball or half-disk.
        center: `y_o`; `(0, h)` for the half-disk.
        R_o: Outer radius; balls of every radius below it are used.
        R_D: Radius of the half-disk (ignored for balls).
        label: A human-readable name.
    """

    value: ValueFn
    gradient: GradientFn
    kind: SampleKind
    center: tuple[float, float]
    R_o: float
    R_D: float = math.inf
    label: str = "v"
    screen_residual: float = field(init=False, default=0.0)

    def __post_init__(self) -> None:
        self._check_geometry()
        object.__setattr__(self, "screen_residual", self._screen())

    @property
    def h(self) -> float:
        """Distance from `y_o` to the diameter (half-disk only)."""
        return self.center[1]

    def _check_geometry(self) -> None:
        if not self.R_o > 0:
            msg = f"Outer radius must be positive; got {self.R_o}."
            raise GeometryError(msg)
        if self.kind is SampleKind.HALF_DISK:
            cx, h = self.center
            if not math.isfinite(self.R_D):
                msg = "The half-disk needs a finite radius R_D."
                raise GeometryError(msg)
            if cx != 0.0 or not 0.0 <= h < self.R_D:
                msg = f"Half-disk centre must be (0, h), 0 ≤ h < {self.R_D}; got {self.center}."
                raise GeometryError(msg)
            if self.R_o > self.R_D - h:
                msg = f"Balls must stay off the arc: need R_o ≤ R_D − h = {self.R_D - h}."
                raise GeometryError(msg)

    def _screen_points(self) -> tuple[FloatArray, FloatArray]:
        rng = np.random.default_rng(0)
        cx, cy = self.center
        if self.kind is SampleKind.BALL:
            rho = self.R_o * rng.uniform(0.25, 0.95, SCREEN_POINTS)
            theta = rng.uniform(0.0, 2 * np.pi, SCREEN_POINTS)
            return cx + rho * np.cos(theta), cy + rho * np.sin(theta)
        rho = self.R_D * rng.uniform(0.25, 0.95, SCREEN_POINTS)
        theta = rng.uniform(0.05 * np.pi, 0.95 * np.pi, SCREEN_POINTS)
        return rho * np.cos(theta), rho * np.sin(theta)

    def _laplacian(
        self, x: FloatArray, y: FloatArray, step: float
    ) -> tuple[FloatArray, FloatArray]:
        v = self.value
        d_xx = (v(x + step, y) - 2 * v(x, y) + v(x - step, y)) / step**2
        d_yy = (v(x, y + step) - 2 * v(x, y) + v(x, y - step)) / step**2
        return d_xx + d_yy, np.abs(d_xx) + np.abs(d_yy)

    def _screen(self) -> float:
        x, y = self._screen_points()
        coarse, _ = self._laplacian(x, y, SCREEN_STEP)
        fine, size = self._laplacian(x, y, SCREEN_STEP / 2)
        lap = (4 * fine - coarse) / 3
        scale = max(float(np.max(size)), float(np.max(np.abs(self.value(x, y))))) or 1.0
        residual = float(np.max(np.abs(lap))) / scale
        if residual > SCREEN_TOL:
            raise HarmonicScreenError(self.label, "not harmonic", residual)
        if self.kind is SampleKind.HALF_DISK:
            xs = np.linspace(-self.R_D, self.R_D, SCREEN_POINTS + 2)[1:-1]
            on_gamma = np.abs(self.value(xs, np.zeros_like(xs)))
            ref = max(1.0, float(np.max(np.abs(self.value(x, y)))))
            if (worst := float(on_gamma.max()) / ref) > DIAMETER_TOL:
                raise HarmonicScreenError(self.label, "does not vanish on the diameter", worst)
        logger.trace(f"Screened {self.label}: Laplacian residual {residual:.2e}")
        return residual

    @classmethod
    def from_complex(
        cls,
        coeffs: Sequence[complex],
        *,
        origin: tuple[float, float] = (0.0, 0.0),
        kind: SampleKind = SampleKind.BALL,
        center: tuple[float, float] | None = None,
        R_o: float = 1.0,
        R_D: float = math.inf,
        label: str | None = None,
    ) -> Self:
        """`v = Re Σ c_m w^m` with `w = (x − o₁) + i(y − o₂)`; harmonic for any `c_m`."""
        c = np.asarray(coeffs, dtype=np.complex128)
        dc = c[1:] * np.arange(1, len(c))
        ox, oy = origin

        def value(x: FloatArray, y: FloatArray) -> FloatArray:
            w = (np.asarray(x) - ox) + 1j * (np.asarray(y) - oy)
            return np.polynomial.polynomial.polyval(w, c).real

        def gradient(x: FloatArray, y: FloatArray) -> tuple[FloatArray, FloatArray]:
            w = (np.asarray(x) - ox) + 1j * (np.asarray(y) - oy)
            f1 = np.polynomial.polynomial.polyval(w, dc) if len(dc) else np.zeros_like(w)
            return f1.real, -f1.imag

        return cls(
            value,
            gradient,
            kind,
            center if center is not None else origin,
            R_o,
            R_D,
            label if label is not None else f"Re Σ c_m w^m (degree {len(c) - 1})",
        )

    @classmethod
    def homogeneous(
        cls,
        m: int,
        part: str = "re",
        *,
        center: tuple[float, float] = (0.0, 0.0),
        R_o: float = 1.0,
        half_disk: bool = False,
    ) -> Self:
        """`Re (y − y_o)^m` or `Im (y − y_o)^m` as complex powers; `Φ ≡ 2m`.

        With `half_disk`, the domain is the upper half-disk of radius `R_o`,
        the centre is the origin (on the diameter), and `part` must be `"im"`.
        """
        if m < 0:
            msg = f"Degree must be nonnegative; got {m}."
            raise ValueError(msg)
        coeffs = np.zeros(m + 1, dtype=np.complex128)
        match part:
            case "re":
                coeffs[m] = 1.0
            case "im":
                coeffs[m] = -1j
            case _:
                msg = f"Part must be 're' or 'im'; got {part!r}."
                raise ValueError(msg)
        label = f"{part.capitalize()} z^{m}"
        if half_disk:
            return cls.from_complex(
                coeffs, kind=SampleKind.HALF_DISK, R_o=R_o, R_D=R_o, label=label
            )
        return cls.from_complex(coeffs, origin=center, R_o=R_o, label=label)

    @classmethod
    def polynomial(
        cls,
        re: Sequence[float] = (),
        im: Sequence[float] = (),
        *,
        center: tuple[float, float] = (0.0, 0.0),
        R_o: float = 1.0,
    ) -> Self:
        """`Σ re[m] Re z^m + im[m] Im z^m` with `z` measured from `center`."""
        n = max(len(re), len(im))
        c = np.zeros(n, dtype=np.complex128)
        c[: len(re)] += np.asarray(re, dtype=np.float64)
        c[: len(im)] -= 1j * np.asarray(im, dtype=np.float64)
        return cls.from_complex(c, origin=center, R_o=R_o, label=f"polynomial (degree {n - 1})")

    @classmethod
    def constant(cls, *, center: tuple[float, float] = (0.0, 0.0), R_o: float = 1.0) -> Self:
        return cls.from_complex([1.0], origin=center, R_o=R_o, label="1")

    @classmethod
    def random(
        cls,
        rng: Generator,
        *,
        max_degree: int = 6,
        half_disk: bool = False,
        R_o: float = 1.0,
        R_D: float = 1.0,
        h: float = 0.0,
    ) -> Self:
        """A random combination of `Re z^m`, `Im z^m` for `m ≤ max_degree`.

        For a ball the centre is the origin and `R_o` is its outer radius.
        For the half-disk only `Im z^m` (`m ≥ 1`) is used, so `v = 0` on the diameter;
        the centre is `(0, h)`.
        """
        if half_disk:
            beta = rng.standard_normal(max_degree)
            coeffs = np.concatenate(([0.0], -1j * beta))
            return cls.from_complex(
                coeffs,
                kind=SampleKind.HALF_DISK,
                center=(0.0, h),
                R_o=R_o,
                R_D=R_D,
                label=f"random half-disk (degree {max_degree})",
            )
        coeffs = rng.standard_normal(max_degree + 1) + 1j * rng.standard_normal(max_degree + 1)
        return cls.from_complex(coeffs, R_o=R_o, label=f"random (degree {max_degree})")


@dataclass(frozen=True, slots=True)
class _PolarRule:
    x: FloatArray
    y: FloatArray
    weights: FloatArray
    rho: FloatArray
    cos: FloatArray
    sin: FloatArray


def _angular_pieces(
    sample: HarmonicSample, r: float, n_angle: int
) -> list[tuple[FloatArray, FloatArray, FloatArray]]:
    # Each piece: (angles, angular weights, radial upper limit per angle).
    if sample.kind is SampleKind.BALL or r <= sample.h:
        theta = np.arange(n_angle) * (2 * np.pi / n_angle)
        return [(theta, np.full(n_angle, 2 * np.pi / n_angle), np.full(n_angle, r))]
    h = sample.h
    if h == 0.0:
        rule = gauss_legendre(n_angle // 2, 0.0, np.pi)
        return [(rule.nodes, rule.weights, np.full(len(rule), r))]
    alpha = math.asin(h / r)
    full = gauss_legendre(n_angle // 2, -alpha, np.pi + alpha)
    cut = gauss_legendre(n_angle // 2, np.pi + alpha, 2 * np.pi - alpha)
    return [
        (full.nodes, full.weights, np.full(len(full), r)),
        (cut.nodes, cut.weights, np.minimum(r, h / -np.sin(cut.nodes))),
    ]


def _polar_rule(sample: HarmonicSample, r: float, quad: int, n_angle: int) -> _PolarRule:
    ref = gauss_legendre(quad, 0.0, 1.0)
    xs, ys, ws, rhos, coss, sins = [], [], [], [], [], []
    cx, cy = sample.center
    for theta, w_theta, rho_max in _angular_pieces(sample, r, n_angle):
        rho = ref.nodes[:, None] * rho_max[None, :]
        w = ref.weights[:, None] * rho_max[None, :] * w_theta[None, :] * rho
        c = np.broadcast_to(np.cos(theta)[None, :], rho.shape)
        s = np.broadcast_to(np.sin(theta)[None, :], rho.shape)
        xs.append((cx + rho * c).ravel())
        ys.append((cy + rho * s).ravel())
        ws.append(w.ravel())
        rhos.append(rho.ravel())
        coss.append(c.ravel())
        sins.append(s.ravel())
    return _PolarRule(*(np.concatenate(a) for a in (xs, ys, ws, rhos, coss, sins)))


@dataclass(frozen=True, slots=True)
class _Moments:
    H: float
    D: float
    radial: float  # ∫ ((y − y_o)·∇v)²


def _moments(sample: HarmonicSample, r: float, quad: int, n_angle: int) -> _Moments:
    rule = _polar_rule(sample, r, quad, n_angle)
    v = sample.value(rule.x, rule.y)
    gx, gy = sample.gradient(rule.x, rule.y)
    grad_sq = gx**2 + gy**2
    radial = rule.rho * (rule.cos * gx + rule.sin * gy)
    return _Moments(
        H=float(rule.weights @ v**2),
        D=float(rule.weights @ (grad_sq * (r**2 - rule.rho**2))),
        radial=float(rule.weights @ radial**2),
    )


def _check_radius(sample: HarmonicSample, r: float) -> None:
    if not 0 < r < sample.R_o:
        msg = f"Radius {r} is outside (0, {sample.R_o})."
        raise GeometryError(msg)


@dataclass(frozen=True, slots=True)
class RadialProfile:
    """`H`, `D` and `Φ = D/H` on a grid of radii."""

    radii: FloatArray
    H: FloatArray
    D: FloatArray
    Phi: FloatArray
    label: str = "v"

    def rows(self) -> list[tuple[float, float, float, float]]:
        return [
            (float(r), float(h), float(d), float(p))
            for r, h, d, p in zip(self.radii, self.H, self.D, self.Phi, strict=True)
        ]

    def to_json(self) -> Json:
        return {
            "label": self.label,
            "r": self.radii.tolist(),
            "H": self.H.tolist(),
            "D": self.D.tolist(),
            "Phi": self.Phi.tolist(),
        }


def profile(
    h: HarmonicSample, radii: ArrayLike, quad: int = DEFAULT_RADIAL, n_angle: int = DEFAULT_ANGULAR
) -> RadialProfile:
    """Computes `H`, `D` and `Φ` at every radius by polar quadrature.

    Interior balls use Gauss–Legendre in `ρ` and the trapezoid rule in `θ`;
    half-disk sections split `θ` where the circle meets the diameter and use
    Gauss–Legendre on each piece.

    Raises:
        GeometryError: If a radius is outside `(0, R_o)`.
        ValueError: If `H` vanishes somewhere (the function is zero on a ball).
    """
    if quad < 8:
        msg = f"Radial quadrature needs at least 8 nodes; got {quad}."
        raise ValueError(msg)
    rs = np.atleast_1d(np.asarray(radii, dtype=np.float64))
    for r in rs:
        _check_radius(h, float(r))
    moments = [_moments(h, float(r), quad, n_angle) for r in rs]
    H = np.array([m.H for m in moments])
    D = np.array([m.D for m in moments])
    if np.any(H <= 0):
        msg = f"H vanishes on some ball for {h.label}."
        raise ValueError(msg)
    return RadialProfile(
        frozen_array(rs), frozen_array(H), frozen_array(D), frozen_array(D / H), h.label
    )


def monotonicity_check(p: RadialProfile) -> float:
    """`max_i (Φ(r_i) − Φ(r_{i+1}))₊`; zero for a nondecreasing profile."""
    if len(p.radii) < 2:
        msg = "Need at least 2 radii."
        raise ValueError(msg)
    order = np.argsort(p.radii)
    drops = -np.diff(p.Phi[order])
    return max(0.0, float(drops.max()))


def log_derivative_check(
    h: HarmonicSample,
    r: float,
    quad: int = DEFAULT_RADIAL,
    dr: float = 1e-3,
    n_angle: int = DEFAULT_ANGULAR,
) -> float:
    """Relative gap between the central difference of `ln H` and `(2 + Φ(r))/r`."""
    _check_radius(h, r - dr)
    _check_radius(h, r + dr)
    p = profile(h, [r - dr, r, r + dr], quad, n_angle)
    fd = (math.log(p.H[2]) - math.log(p.H[0])) / (2 * dr)
    exact = (2.0 + float(p.Phi[1])) / r
    return abs(fd - exact) / exact


@dataclass(frozen=True, slots=True)
class ThreeBallResult:
    """`lhs = H(r₂)`, `rhs = H(r₁)^α H(r₃)^(1−α)`, and whether `lhs ≤ rhs (1 + tol)`."""

    lhs: float
    rhs: float
    alpha: float
    satisfied: bool

    @property
    def relative_gap(self) -> float:
        return (self.rhs - self.lhs) / self.rhs


def three_ball_check(
    h: HarmonicSample,
    r1: float,
    r2: float,
    r3: float,
    quad: int = DEFAULT_RADIAL,
    *,
    n_angle: int = DEFAULT_ANGULAR,
    tol: float = THREE_BALL_TOL,
) -> ThreeBallResult:
    """Evaluates both sides of the three-ball inequality.

    For the half-disk, the middle and outer integrals are over `B ∩ D`;
    when `h > 0` the inner ball must lie inside `D` (`r₁ < h`).

    Raises:
        GeometryError: On bad radius order, or an inner ball leaving the half-disk.
    """
    if not 0 < r1 < r2 < r3 < h.R_o:
        msg = f"Need 0 < r1 < r2 < r3 < {h.R_o}; got {r1}, {r2}, {r3}."
        raise GeometryError(msg)
    if h.kind is SampleKind.HALF_DISK and h.h > 0 and not r1 < h.h:
        msg = f"Inner radius {r1} must be below the distance {h.h} to the diameter."
        raise GeometryError(msg)
    a, b = 1 / math.log(r2 / r1), 1 / math.log(r3 / r2)
    alpha = a / (a + b)
    H1, H2, H3 = profile(h, [r1, r2, r3], quad, n_angle).H
    rhs = float(H1**alpha * H3 ** (1 - alpha))
    return ThreeBallResult(float(H2), rhs, alpha, bool(H2 <= rhs * (1 + tol)))


def cauchy_schwarz_check(
    h: HarmonicSample, r: float, quad: int = DEFAULT_RADIAL, n_angle: int = DEFAULT_ANGULAR
) -> tuple[float, float]:
    """`(D(r)², 4 ∫((y − y_o)·∇v)² · H(r))`; the first never exceeds the second."""
    _check_radius(h, r)
    m = _moments(h, r, quad, n_angle)
    return m.D**2, 4.0 * m.radial * m.H
