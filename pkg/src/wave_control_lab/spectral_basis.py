# SPDX-FileCopyrightText: Copyright 2026, Contributors to wave-control-lab
# SPDX-PackageHomePage: https://github.com/wave-control-lab/wave-control-lab
# SPDX-License-Identifier: Apache-2.0

"""Dirichlet eigenpairs of the unit square, projections, and ω-mass matrices.

The eigenfunctions are `e(x1, x2) = 2 sin(πk x1) sin(πl x2)` with eigenvalue `π²(k² + l²)`.
They are orthonormal in `L²((0,1)²)`.
Everything is separable in `x1` and `x2`, so grids and quadratures are built per axis
and combined with matrix products.
"""

import hashlib
import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Literal, Self

import numpy as np
from loguru import logger
from numpy.typing import ArrayLike

from wave_control_lab._core import FloatArray, Json, frozen_array
from wave_control_lab.quadrature import GaussRule, composite_rule, uniform_edges

__all__ = [
    "MassMatrix",
    "ModeIndex",
    "ModeSet",
    "ModeSetError",
    "ProjectionError",
    "ProjectionResult",
    "Region",
    "RegionError",
    "enumerate_modes",
    "eval_mode",
    "omega_mass_matrix",
    "project",
    "project_converged",
    "quadrature_mass_matrix",
    "synthesize",
    "synthesize_gradient",
]

type PointFunction = Callable[[FloatArray, FloatArray], ArrayLike]


class ModeSetError(ValueError):
    """A mode list is empty, unsorted, or otherwise not a valid mode set."""


@dataclass(frozen=True, slots=True)
class RegionError(ValueError):
    """A strip region with invalid bounds."""

    lo: float
    hi: float

    def __str__(self) -> str:
        return f"Invalid strip (x1 ∈ ({self.lo}, {self.hi})); need 0 ≤ lo < hi ≤ 1."


@dataclass(frozen=True, slots=True)
class ProjectionError(ValueError):
    """Quadrature samples were non-finite, or the doubled-order check failed.

    Attributes:
        issue: What went wrong.
        discrepancy: Relative difference between the order-`n` and order-`2n` coefficients,
            when known.
    """

    issue: str
    discrepancy: float | None = None

    def __str__(self) -> str:
        if self.discrepancy is None:
            return self.issue
        return f"{self.issue} (doubled-order discrepancy {self.discrepancy:.3e})"


@dataclass(frozen=True, slots=True, order=True)
class ModeIndex:
    """One eigenpair; `lam` is `π²(k² + l²)`.

    Ordering compares `(lam, k, l)`, which is the mode-set order.
    """

    lam: float = field(init=False, repr=False)
    k: int
    l: int  # noqa: E741

    def __post_init__(self) -> None:
        if self.k < 1 or self.l < 1:
            msg = f"Wavenumbers must be positive; got (k={self.k}, l={self.l})."
            raise ModeSetError(msg)
        object.__setattr__(self, "lam", math.pi**2 * (self.k**2 + self.l**2))

    @property
    def omega(self) -> float:
        return math.sqrt(self.lam)

    def __str__(self) -> str:
        return f"({self.k},{self.l})"


@dataclass(frozen=True)
class ModeSet:
    """An ordered list of eigenpairs on the unit square.

    Modes must be strictly increasing under `(lam, k, l)`.
    The comparison uses the integer `k² + l²`, so ties like `5π²` are exact.
    """

    modes: tuple[ModeIndex, ...]

    def __post_init__(self) -> None:
        if not self.modes:
            msg = "A mode set needs at least one mode."
            raise ModeSetError(msg)
        keys = [(m.k**2 + m.l**2, m.k, m.l) for m in self.modes]
        if any(a >= b for a, b in zip(keys, keys[1:], strict=False)):
            msg = "Modes must be strictly increasing under (lambda, k, l)."
            raise ModeSetError(msg)

    def __len__(self) -> int:
        return len(self.modes)

    def __getitem__(self, i: int) -> ModeIndex:
        return self.modes[i]

    @cached_property
    def k(self) -> np.ndarray:
        arr = np.array([m.k for m in self.modes], dtype=np.int64)
        arr.setflags(write=False)
        return arr

    @cached_property
    def l(self) -> np.ndarray:  # noqa: E743
        arr = np.array([m.l for m in self.modes], dtype=np.int64)
        arr.setflags(write=False)
        return arr

    @cached_property
    def lam(self) -> FloatArray:
        return frozen_array(np.pi**2 * (self.k**2 + self.l**2))

    @cached_property
    def omega(self) -> FloatArray:
        return frozen_array(np.sqrt(self.lam))

    @cached_property
    def id(self) -> str:
        """Identifier derived from the `(k, l)` list."""
        digest = hashlib.blake2b(
            self.k.tobytes() + self.l.tobytes(), digest_size=4, usedforsecurity=False
        )
        return f"G{len(self)}-{digest.hexdigest()}"

    @property
    def k_max(self) -> int:
        return int(self.k.max())

    @property
    def l_max(self) -> int:
        return int(self.l.max())

    def prefix(self, n: int) -> Self:
        return self.__class__(self.modes[:n])

    def to_json(self) -> Json:
        return {
            "id": self.id,
            "domain": [[0.0, 1.0], [0.0, 1.0]],
            "k": self.k.tolist(),
            "l": self.l.tolist(),
            "lambda": self.lam.tolist(),
        }

    @classmethod
    def from_json(cls, data: dict[str, Any]) -> Self:
        pairs = zip(data["k"], data["l"], strict=True)
        return cls(tuple(ModeIndex(int(k), int(l)) for k, l in pairs))


@dataclass(frozen=True, slots=True)
class Region:
    """Either the whole square or a full-height strip `(lo, hi) × (0, 1)`."""

    kind: Literal["full", "strip"]
    lo: float = 0.0
    hi: float = 1.0

    def __post_init__(self) -> None:
        if self.kind == "full":
            if (self.lo, self.hi) != (0.0, 1.0):
                raise RegionError(self.lo, self.hi)
        elif not 0.0 <= self.lo < self.hi <= 1.0:
            raise RegionError(self.lo, self.hi)

    @classmethod
    def full(cls) -> Self:
        return cls("full")

    @classmethod
    def strip(cls, lo: float, hi: float) -> Self:
        return cls("strip", float(lo), float(hi))

    @property
    def measure(self) -> float:
        return self.hi - self.lo

    def indicator(self, x1: ArrayLike, x2: ArrayLike) -> FloatArray:
        x1, x2 = np.broadcast_arrays(np.asarray(x1, dtype=np.float64), np.asarray(x2))
        inside = (x1 >= self.lo) & (x1 <= self.hi)
        return inside.astype(np.float64)

    def to_json(self) -> Json:
        return {"kind": self.kind, "x1": [self.lo, self.hi]}

    @classmethod
    def from_json(cls, data: dict[str, Any]) -> Self:
        if data["kind"] == "full":
            return cls.full()
        lo, hi = data["x1"]
        return cls.strip(lo, hi)

    def __str__(self) -> str:
        return "Ω" if self.kind == "full" else f"({self.lo:g},{self.hi:g})×(0,1)"


@dataclass(frozen=True, slots=True)
class MassMatrix:
    """The Gram matrix `∫_ω e_i e_j` of a mode set over a region."""

    entries: FloatArray
    region: Region
    modeset_id: str

    def __post_init__(self) -> None:
        m = self.entries
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            msg = f"Mass matrix must be square; got shape {m.shape}."
            raise ValueError(msg)
        if m.flags.writeable:
            object.__setattr__(self, "entries", frozen_array(m))

    @property
    def size(self) -> int:
        return self.entries.shape[0]

    def quadratic(self, v: FloatArray) -> FloatArray | float:
        """`vᵀ M v` for a vector, or row-wise for a stack of vectors (shape `(n, G)`)."""
        mv = v @ self.entries
        return np.sum(mv * v, axis=-1)

    def to_json(self) -> Json:
        return {
            "modeset": self.modeset_id,
            "region": self.region.to_json(),
            "entries": self.entries.tolist(),
        }


def enumerate_modes(G: int) -> ModeSet:
    """Returns the `G` modes of smallest eigenvalue, ordered by `(lambda, k, l)`."""
    if G < 1:
        msg = f"Need at least one mode; got G={G}."
        raise ModeSetError(msg)
    box = math.ceil(math.sqrt(G) * 4) + 8
    kk, ll = np.meshgrid(np.arange(1, box + 1), np.arange(1, box + 1), indexing="ij")
    kk, ll = kk.ravel(), ll.ravel()
    n = kk**2 + ll**2
    order = np.lexsort((ll, kk, n))[:G]
    # Any pair outside the box has k² + l² ≥ (box+1)² + 1.
    if int(n[order[-1]]) >= (box + 1) ** 2 + 1:
        msg = f"Search box k,l ≤ {box} is too small for G={G}."
        raise ModeSetError(msg)
    logger.debug(f"Enumerated {G} modes in box {box}×{box}; λ_G/π² = {int(n[order[-1]])}")
    return ModeSet(tuple(ModeIndex(int(kk[i]), int(ll[i])) for i in order))


def eval_mode(m: ModeIndex, x1: ArrayLike, x2: ArrayLike) -> FloatArray | float:
    """Evaluates `2 sin(πk x1) sin(πl x2)`; broadcasts over arrays."""
    return 2.0 * np.sin(np.pi * m.k * np.asarray(x1)) * np.sin(np.pi * m.l * np.asarray(x2))


def _sines(n: int, x: FloatArray) -> FloatArray:
    # Row j is sin(π (j+1) x).
    return np.sin(np.pi * np.arange(1, n + 1)[:, None] * x[None, :])


def _cosines(n: int, x: FloatArray) -> FloatArray:
    return np.cos(np.pi * np.arange(1, n + 1)[:, None] * x[None, :])


def _mode_grid(coeffs: FloatArray, ms: ModeSet) -> FloatArray:
    grid = np.zeros((ms.k_max, ms.l_max))
    np.add.at(grid, (ms.k - 1, ms.l - 1), coeffs)
    return grid


def synthesize(coeffs: ArrayLike, ms: ModeSet, x1: ArrayLike, x2: ArrayLike) -> FloatArray:
    """Evaluates `Σ c_j e_j` on the tensor grid `x1 × x2` (result shape `(len(x1), len(x2))`)."""
    c = np.asarray(coeffs, dtype=np.float64)
    x1, x2 = np.atleast_1d(np.asarray(x1, dtype=np.float64)), np.atleast_1d(np.asarray(x2))
    grid = _mode_grid(c, ms)
    return 2.0 * _sines(ms.k_max, x1).T @ grid @ _sines(ms.l_max, x2)


def synthesize_gradient(
    coeffs: ArrayLike, ms: ModeSet, x1: ArrayLike, x2: ArrayLike
) -> tuple[FloatArray, FloatArray]:
    """Evaluates `(∂₁, ∂₂) Σ c_j e_j` on the tensor grid `x1 × x2`."""
    c = np.asarray(coeffs, dtype=np.float64)
    x1, x2 = np.atleast_1d(np.asarray(x1, dtype=np.float64)), np.atleast_1d(np.asarray(x2))
    kw = np.pi * np.arange(1, ms.k_max + 1)[:, None]
    lw = np.pi * np.arange(1, ms.l_max + 1)[:, None]
    grid = _mode_grid(c, ms)
    d1 = 2.0 * (kw * _cosines(ms.k_max, x1)).T @ grid @ _sines(ms.l_max, x2)
    d2 = 2.0 * _sines(ms.k_max, x1).T @ grid @ (lw * _cosines(ms.l_max, x2))
    return d1, d2


def _tensor_project(
    f: PointFunction, ms: ModeSet, rule1: GaussRule, rule2: GaussRule
) -> FloatArray:
    X1, X2 = np.meshgrid(rule1.nodes, rule2.nodes, indexing="ij")
    values = np.asarray(f(X1, X2), dtype=np.float64)
    if values.shape != X1.shape:
        values = np.broadcast_to(values, X1.shape)
    if not np.all(np.isfinite(values)):
        msg = "Function returned non-finite samples"
        raise ProjectionError(msg)
    weighted = rule1.weights[:, None] * values * rule2.weights[None, :]
    c = _sines(ms.k_max, rule1.nodes) @ weighted @ _sines(ms.l_max, rule2.nodes).T
    return 2.0 * c[ms.k - 1, ms.l - 1]


def project(
    f: PointFunction,
    ms: ModeSet,
    quad_order: int = 32,
    *,
    edges1: Sequence[float] | FloatArray | None = None,
    edges2: Sequence[float] | FloatArray | None = None,
    n_panels: int = 8,
) -> FloatArray:
    """Computes `c_j = ∬ f e_j` by tensor-product composite Gauss–Legendre quadrature.

    Args:
        f: Vectorized function of `(x1, x2)` arrays.
        ms: The modes to project onto.
        quad_order: Nodes per panel per axis.
        edges1: Panel edges along `x1`; `n_panels` uniform panels if omitted.
        edges2: Panel edges along `x2`; `n_panels` uniform panels if omitted.
        n_panels: Panels per axis when edges are not given.

    Raises:
        ProjectionError: If `f` has non-finite samples.
    """
    if quad_order < 1:
        msg = f"Quadrature order must be at least 1; got {quad_order}."
        raise ValueError(msg)
    e1 = uniform_edges(0.0, 1.0, n_panels) if edges1 is None else np.asarray(edges1)
    e2 = uniform_edges(0.0, 1.0, n_panels) if edges2 is None else np.asarray(edges2)
    coeffs = _tensor_project(f, ms, composite_rule(e1, quad_order), composite_rule(e2, quad_order))
    return frozen_array(coeffs)


@dataclass(frozen=True, slots=True)
class ProjectionResult:
    """Coefficients at the doubled order, with the relative change from the base order."""

    coeffs: FloatArray
    discrepancy: float
    quad_order: int


def project_converged(
    f: PointFunction,
    ms: ModeSet,
    quad_order: int = 32,
    *,
    rtol: float = 1e-6,
    edges1: Sequence[float] | FloatArray | None = None,
    edges2: Sequence[float] | FloatArray | None = None,
    n_panels: int = 8,
) -> ProjectionResult:
    """Projects at `quad_order` and `2·quad_order` and requires agreement to `rtol`.

    Raises:
        ProjectionError: If the two orders differ by more than `rtol` (relative 2-norm).
    """
    kwargs = {"edges1": edges1, "edges2": edges2, "n_panels": n_panels}
    base = project(f, ms, quad_order, **kwargs)
    fine = project(f, ms, 2 * quad_order, **kwargs)
    scale = float(np.linalg.norm(fine))
    discrepancy = float(np.linalg.norm(fine - base)) / scale if scale > 0 else 0.0
    logger.debug(f"Projection at order {quad_order}/{2 * quad_order}: Δ = {discrepancy:.3e}")
    if discrepancy > rtol:
        msg = f"Projection did not converge at order {quad_order} (rtol {rtol:g})"
        raise ProjectionError(msg, discrepancy)
    return ProjectionResult(fine, discrepancy, 2 * quad_order)


def _cos_integrals(m: np.ndarray, lo: float, hi: float) -> FloatArray:
    # ∫_lo^hi cos(π m x) dx, elementwise over integer m.
    safe = np.where(m == 0, 1, m)
    out = (np.sin(np.pi * safe * hi) - np.sin(np.pi * safe * lo)) / (np.pi * safe)
    return np.where(m == 0, hi - lo, out)


def omega_mass_matrix(ms: ModeSet, region: Region) -> MassMatrix:
    """Closed-form `∫_ω e_i e_j` for a full-height strip (or the identity for the full square).

    The `x2` factor is `δ(l_i, l_j) / 2`; the `x1` factor integrates
    `2 sin(πk_i x) sin(πk_j x) = cos(π(k_i−k_j)x) − cos(π(k_i+k_j)x)`.
    """
    if region.kind == "full":
        return MassMatrix(frozen_array(np.eye(len(ms))), region, ms.id)
    ki, kj = ms.k[:, None], ms.k[None, :]
    x1_part = _cos_integrals(ki - kj, region.lo, region.hi) - _cos_integrals(
        ki + kj, region.lo, region.hi
    )
    same_l = ms.l[:, None] == ms.l[None, :]
    entries = np.where(same_l, x1_part, 0.0)
    entries = 0.5 * (entries + entries.T)
    return MassMatrix(frozen_array(entries), region, ms.id)


def quadrature_mass_matrix(
    ms: ModeSet, region: Region, order: int = 64, n_panels: int = 4
) -> MassMatrix:
    """`∫_ω e_i e_j` by 2-d tensor Gauss–Legendre; an oracle for the closed form."""
    rule1 = composite_rule(uniform_edges(region.lo, region.hi, n_panels), order)
    rule2 = composite_rule(uniform_edges(0.0, 1.0, n_panels), order)
    s1 = _sines(ms.k_max, rule1.nodes)[ms.k - 1]
    s2 = _sines(ms.l_max, rule2.nodes)[ms.l - 1]
    g1 = (s1 * rule1.weights) @ s1.T
    g2 = (s2 * rule2.weights) @ s2.T
    return MassMatrix(frozen_array(4.0 * g1 * g2), region, ms.id)
