# SPDX-FileCopyrightText: Copyright 2026, Contributors to wave-control-lab
# SPDX-PackageHomePage: https://github.com/wave-control-lab/wave-control-lab
# SPDX-License-Identifier: Apache-2.0

"""Gauss–Legendre rules, panel grids, and composite rules.

Everything here is a 1-d rule; 2-d integrals are taken as tensor products by callers,
which keeps separable integrands (`f(x1, x2) e_k(x1) e_l(x2)`) cheap.
"""

from dataclasses import dataclass
from functools import cache
from typing import Self

import numpy as np
from numpy.polynomial.legendre import leggauss

from wave_control_lab._core import FloatArray, frozen_array

__all__ = ["GaussRule", "clustered_edges", "composite_rule", "gauss_legendre", "uniform_edges"]


@dataclass(frozen=True, slots=True)
class GaussRule:
    """Nodes and weights of a 1-d quadrature rule.

    Attributes:
        nodes: Increasing abscissas.
        weights: Positive weights, one per node.
    """

    nodes: FloatArray
    weights: FloatArray

    def __post_init__(self) -> None:
        if self.nodes.shape != self.weights.shape or self.nodes.ndim != 1:
            msg = f"Nodes {self.nodes.shape} and weights {self.weights.shape} do not match."
            raise ValueError(msg)

    def __len__(self) -> int:
        return len(self.nodes)

    def integrate(self, values: FloatArray, axis: int = -1) -> FloatArray | float:
        """Contracts sampled `values` against the weights along `axis`."""
        return np.tensordot(values, self.weights, axes=([axis], [0]))

    def mapped(self, lo: float, hi: float) -> Self:
        """Maps a rule on `[-1, 1]` onto `[lo, hi]`."""
        half = 0.5 * (hi - lo)
        return self.__class__(
            frozen_array(0.5 * (hi + lo) + half * self.nodes), frozen_array(half * self.weights)
        )


@cache
def _reference(order: int) -> GaussRule:
    x, w = leggauss(order)
    return GaussRule(frozen_array(x), frozen_array(w))


def gauss_legendre(order: int, lo: float = -1.0, hi: float = 1.0) -> GaussRule:
    """Returns the `order`-point Gauss–Legendre rule on `[lo, hi]`."""
    if order < 1:
        msg = f"Quadrature order must be at least 1; got {order}."
        raise ValueError(msg)
    if not hi > lo:
        msg = f"Empty interval [{lo}, {hi}]."
        raise ValueError(msg)
    ref = _reference(order)
    if lo == -1.0 and hi == 1.0:
        return ref
    return ref.mapped(lo, hi)


def uniform_edges(lo: float, hi: float, n_panels: int) -> FloatArray:
    if n_panels < 1:
        msg = f"Need at least one panel; got {n_panels}."
        raise ValueError(msg)
    return frozen_array(np.linspace(lo, hi, n_panels + 1))


def clustered_edges(
    lo: float,
    hi: float,
    *,
    center: float,
    width: float,
    n_inner: int,
    n_outer: int,
    spread: float = 8.0,
) -> FloatArray:
    """Panel edges on `[lo, hi]` with `n_inner` panels packed into `center ± spread·width`.

    The rest of the interval gets `n_outer` uniform panels on each side of the packed band.
    Used for integrands with a narrow peak (a Gaussian of standard deviation `width`).
    """
    band_lo = max(lo, center - spread * width)
    band_hi = min(hi, center + spread * width)
    pieces = []
    if band_lo > lo:
        pieces.append(np.linspace(lo, band_lo, n_outer + 1)[:-1])
    pieces.append(np.linspace(band_lo, band_hi, n_inner + 1))
    if band_hi < hi:
        pieces.append(np.linspace(band_hi, hi, n_outer + 1)[1:])
    edges = np.unique(np.concatenate(pieces))
    return frozen_array(edges)


def composite_rule(edges: FloatArray, order: int) -> GaussRule:
    """Concatenates an `order`-point Gauss–Legendre rule on every panel between `edges`."""
    if order < 1:
        msg = f"Quadrature order must be at least 1; got {order}."
        raise ValueError(msg)
    edges = np.asarray(edges, dtype=np.float64)
    if edges.ndim != 1 or len(edges) < 2 or np.any(np.diff(edges) <= 0):
        msg = "Panel edges must be a strictly increasing sequence of at least 2 points."
        raise ValueError(msg)
    ref = _reference(order)
    mid = 0.5 * (edges[1:] + edges[:-1])[:, None]
    half = 0.5 * np.diff(edges)[:, None]
    nodes = (mid + half * ref.nodes[None, :]).ravel()
    weights = (half * ref.weights[None, :]).ravel()
    return GaussRule(frozen_array(nodes), frozen_array(weights))
