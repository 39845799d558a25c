# SPDX-FileCopyrightText: Copyright 2026, Contributors to wave-control-lab
# SPDX-PackageHomePage: https://github.com/wave-control-lab/wave-control-lab
# SPDX-License-Identifier: Apache-2.0

"""Experiment configuration: defaults, JSON/YAML files, and dotted overrides.

A config file is a JSON (or YAML) object; every key is optional and falls back to the
defaults of its `experiment`:

```json
{
  "experiment": "example1",
  "G": 100,
  "N": 30,
  "T": 4.0,
  "region": {"kind": "strip", "x1": [0.0, 0.2]},
  "tol": 1e-9,
  "initial": {"a": [], "b": []},
  "target": {"a": [1.0, 1.0], "b": [1.0]},
  "beam": {"k_o": 200.0, "a_o": 0.5, "b_o": 10000.0, "x_o1": 0.5, "x_o2": 0.5, "amplitude": 1.0},
  "sweep": [0, 5, 10, 20, 30],
  "seed": 0,
  "out": null
}
```

`initial` and `target` list leading coefficients of `(position, velocity)`; the rest are zero.
Overrides such as `beam.k_o=100` are nested and merged over the file.
"""

from __future__ import annotations

import math
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Final, Literal, Self, get_args

import numpy as np
import yaml

from wave_control_lab._core import JSON, FloatArray, Json
from wave_control_lab.quadrature import clustered_edges
from wave_control_lab.spectral_basis import ModeSet, Region
from wave_control_lab.wave_dynamics import SpectralState

__all__ = [
    "BeamParams",
    "ConfigError",
    "ExperimentConfig",
    "ExperimentKind",
    "GaussianBeam",
    "StateSpec",
    "apply_overrides",
    "band_energy_fraction",
    "load_config",
]

type ExperimentKind = Literal["example1", "example2", "custom"]

EXPERIMENTS: Final[tuple[str, ...]] = get_args(ExperimentKind.__value__)
DEFAULT_SWEEP: Final = (0, 5, 10, 20, 30)


@dataclass(frozen=True, slots=True)
class ConfigError(Exception):
    """A configuration value is missing, malformed, or out of range."""

    key: str
    issue: str

    def __str__(self) -> str:
        return f"Invalid config value for '{self.key}': {self.issue}"


@dataclass(frozen=True, slots=True)
class StateSpec:
    """Leading position and velocity coefficients; the rest are zero."""

    a: tuple[float, ...] = ()
    b: tuple[float, ...] = ()

    def to_state(self, modes: ModeSet) -> SpectralState:
        return SpectralState.of(modes, self.a, self.b)

    def to_json(self) -> Json:
        return {"a": list(self.a), "b": list(self.b)}

    @classmethod
    def from_json(cls, data: Mapping[str, Any], key: str) -> Self:
        try:
            a = tuple(float(x) for x in data.get("a", ()))
            b = tuple(float(x) for x in data.get("b", ()))
        except (TypeError, ValueError, AttributeError) as e:
            raise ConfigError(key, f"expected {{'a': [...], 'b': [...]}}; {e}") from None
        return cls(a, b)


@dataclass(frozen=True, slots=True)
class BeamParams:
    """Gaussian-beam parameters.

    The beam centre `(x_o1, x_o2)` has no canonical value; `(0.5, 0.5)` is our default.
    """

    k_o: float = 200.0
    a_o: float = 0.5
    b_o: float = 10000.0
    x_o1: float = 0.5
    x_o2: float = 0.5
    amplitude: float = 1.0

    def to_json(self) -> Json:
        return {
            "k_o": self.k_o,
            "a_o": self.a_o,
            "b_o": self.b_o,
            "x_o1": self.x_o1,
            "x_o2": self.x_o2,
            "amplitude": self.amplitude,
        }

    @classmethod
    def from_json(cls, data: Mapping[str, Any]) -> Self:
        if unknown := set(data) - set(cls.__dataclass_fields__):
            raise ConfigError("beam", f"unknown keys {sorted(unknown)}")
        try:
            return cls(**{k: float(v) for k, v in data.items()})
        except (TypeError, ValueError) as e:
            raise ConfigError("beam", str(e)) from None


@dataclass(frozen=True, slots=True)
class GaussianBeam:
    """A Gaussian beam travelling in the direction `(0, 1)`.

    With `s = x1 − x_o1`, `y = x2 − x_o2` and `φ = k_o·y/2`:

        g0(x1, x2) = exp(−k_o a_o s²/2) · exp(−k_o b_o y²/2) · cos(φ)
        g1(x1, x2) = exp(−k_o a_o s²/2) · exp(−k_o b_o y²/2)
                     · [k_o b_o y cos(φ) + (k_o/2 + a_o) sin(φ) − k_o a_o² s² sin(φ)]

    Both are multiplied by `amplitude`. The initial data of the experiment are the
    projections of `(g0, g1)` onto the mode set.
    """

    params: BeamParams

    @property
    def width_x1(self) -> float:
        """Standard deviation of the `x1` envelope."""
        p = self.params
        return 1.0 / math.sqrt(p.k_o * p.a_o)

    @property
    def width_x2(self) -> float:
        """Standard deviation of the `x2` envelope."""
        p = self.params
        return 1.0 / math.sqrt(p.k_o * p.b_o)

    def _envelope(
        self, x1: FloatArray, x2: FloatArray
    ) -> tuple[FloatArray, FloatArray, FloatArray]:
        p = self.params
        s = np.asarray(x1) - p.x_o1
        y = np.asarray(x2) - p.x_o2
        env = np.exp(-0.5 * p.k_o * p.a_o * s**2) * np.exp(-0.5 * p.k_o * p.b_o * y**2)
        env *= p.amplitude
        return s, y, env

    def g0(self, x1: FloatArray, x2: FloatArray) -> FloatArray:
        p = self.params
        _, y, env = self._envelope(x1, x2)
        return env * np.cos(0.5 * p.k_o * y)

    def g1(self, x1: FloatArray, x2: FloatArray) -> FloatArray:
        p = self.params
        s, y, env = self._envelope(x1, x2)
        phase = 0.5 * p.k_o * y
        bracket = (
            p.k_o * p.b_o * y * np.cos(phase)
            + (0.5 * p.k_o + p.a_o) * np.sin(phase)
            - p.k_o * p.a_o**2 * s**2 * np.sin(phase)
        )
        return env * bracket

    def panel_edges(self, *, n_inner: int = 8, n_outer: int = 4) -> tuple[FloatArray, FloatArray]:
        """Quadrature panel edges along `x1` and `x2`, packed around the beam centre."""
        p = self.params
        e1 = clustered_edges(
            0.0, 1.0, center=p.x_o1, width=self.width_x1, n_inner=n_inner, n_outer=n_outer
        )
        e2 = clustered_edges(
            0.0, 1.0, center=p.x_o2, width=self.width_x2, n_inner=n_inner, n_outer=n_outer
        )
        return e1, e2

    @property
    def carrier_index(self) -> float:
        """The `x2` mode index `l` matching the carrier `cos(k_o y/2)`."""
        return self.params.k_o / (2 * math.pi)


def band_energy_fraction(state: SpectralState, ms: ModeSet, l_lo: float, l_hi: float) -> float:
    """Share of `‖state‖²_{H¹₀×L²}` carried by modes with `l_lo ≤ l ≤ l_hi`."""
    state.check_modes(ms)
    per_mode = ms.lam * state.a**2 + state.b**2
    total = float(per_mode.sum())
    if total == 0:
        return 0.0
    band = (ms.l >= l_lo) & (ms.l <= l_hi)
    return float(per_mode[band].sum()) / total


def _region_from_json(data: Any) -> Region:
    try:
        return Region.from_json(data)
    except (KeyError, TypeError, ValueError) as e:
        raise ConfigError("region", str(e)) from None


@dataclass(frozen=True, slots=True, kw_only=True)
class ExperimentConfig:
    """One experiment: problem size, data, solver tolerance, and where to write.

    Attributes:
        experiment: `example1`, `example2`, or `custom`.
        G: Number of modes.
        N: Upper summation index of the control; `2N + 2` damped solves.
        T: Control horizon.
        region: The damping and control region `ω`.
        tol: Relative tolerance of the damped solver.
        initial: Initial data (ignored by `example2`, which uses the beam).
        target: Target state at `T`.
        beam: Beam parameters (used by `example2`).
        sweep: Values of `N` for the cost and error curves (those above `N` are dropped).
        samples_per_unit_time: Density of the control time grid.
        quad_order: Gauss–Legendre nodes per panel for projections.
        seed: Seed for randomized suites.
        out: Run directory; a fresh directory under the data dir when `None`.
    """

    experiment: ExperimentKind = "custom"
    G: int = 25
    N: int = 5
    T: float = 4.0
    region: Region = field(default_factory=lambda: Region.strip(0.0, 0.2))
    tol: float = 1e-9
    initial: StateSpec = StateSpec()
    target: StateSpec = StateSpec(a=(1.0, 1.0), b=(1.0,))
    beam: BeamParams = BeamParams()
    sweep: tuple[int, ...] = DEFAULT_SWEEP
    samples_per_unit_time: int = 40
    quad_order: int = 32
    seed: int = 0
    out: Path | None = None

    def __post_init__(self) -> None:
        if self.experiment not in EXPERIMENTS:
            raise ConfigError("experiment", f"must be one of {EXPERIMENTS}")
        if self.G < 1:
            raise ConfigError("G", f"must be ≥ 1; got {self.G}")
        if self.N < 0:
            raise ConfigError("N", f"must be ≥ 0; got {self.N}")
        if not (math.isfinite(self.T) and self.T > 0):
            raise ConfigError("T", f"must be positive; got {self.T}")
        if not 0 < self.tol < 1:
            raise ConfigError("tol", f"must be in (0, 1); got {self.tol}")
        if self.samples_per_unit_time < 1:
            raise ConfigError("samples_per_unit_time", "must be ≥ 1")
        if self.quad_order < 1:
            raise ConfigError("quad_order", "must be ≥ 1")
        if any(n < 0 for n in self.sweep):
            raise ConfigError("sweep", f"values must be ≥ 0; got {self.sweep}")
        for key, coeffs in (("initial", self.initial), ("target", self.target)):
            if len(coeffs.a) > self.G or len(coeffs.b) > self.G:
                raise ConfigError(key, f"has more coefficients than G={self.G}")

    @classmethod
    def defaults(cls, experiment: ExperimentKind) -> Self:
        """Defaults for an experiment. Example 2's full scale (G=1000, N=100) is long-running."""
        match experiment:
            case "example1":
                return cls(experiment="example1", G=100, N=30)
            case "example2":
                return cls(experiment="example2", G=1000, N=100, target=StateSpec())
            case "custom":
                return cls()
        raise ConfigError("experiment", f"must be one of {EXPERIMENTS}; got {experiment!r}")

    @property
    def sweep_values(self) -> tuple[int, ...]:
        """Sorted unique values of `sweep` up to `N`, always including `N`."""
        return tuple(sorted({n for n in self.sweep if n <= self.N} | {self.N}))

    def to_json(self) -> Json:
        return {
            "experiment": self.experiment,
            "G": self.G,
            "N": self.N,
            "T": self.T,
            "region": self.region.to_json(),
            "tol": self.tol,
            "initial": self.initial.to_json(),
            "target": self.target.to_json(),
            "beam": self.beam.to_json(),
            "sweep": list(self.sweep),
            "samples_per_unit_time": self.samples_per_unit_time,
            "quad_order": self.quad_order,
            "seed": self.seed,
            "out": None if self.out is None else str(self.out),
        }

    def dumps(self) -> str:
        return JSON.encode(self.to_json())

    @classmethod
    def from_json(cls, data: Mapping[str, Any]) -> Self:
        """Builds a config from a (possibly partial) mapping over the experiment's defaults.

        Raises:
            ConfigError: On unknown keys or invalid values.
        """
        if not isinstance(data, Mapping):
            raise ConfigError("<root>", f"expected an object; got {type(data).__name__}")
        experiment = data.get("experiment", "custom")
        base = cls.defaults(experiment)
        if unknown := set(data) - set(cls.__dataclass_fields__):
            raise ConfigError("<root>", f"unknown keys {sorted(unknown)}")
        changes: dict[str, Any] = {}
        for key, value in data.items():
            changes[key] = cls._parse_field(key, value)
        try:
            return replace(base, **changes)
        except TypeError as e:
            raise ConfigError("<root>", str(e)) from None

    @staticmethod
    def _parse_field(key: str, value: Any) -> Any:
        try:
            match key:
                case "experiment":
                    return str(value)
                case "G" | "N" | "samples_per_unit_time" | "quad_order" | "seed":
                    if isinstance(value, bool) or int(value) != value:
                        raise ConfigError(key, f"expected an integer; got {value!r}")
                    return int(value)
                case "T" | "tol":
                    return float(value)
                case "region":
                    return _region_from_json(value)
                case "initial" | "target":
                    return StateSpec.from_json(value, key)
                case "beam":
                    return BeamParams.from_json(value)
                case "sweep":
                    return tuple(int(n) for n in value)
                case "out":
                    return None if value is None else Path(value)
        except (TypeError, ValueError) as e:
            raise ConfigError(key, str(e)) from None
        raise ConfigError(key, "unknown key")

    @classmethod
    def loads(cls, text: str) -> Self:
        try:
            data = JSON.decode(text)
        except ValueError as e:
            raise ConfigError("<root>", f"invalid JSON: {e}") from None
        return cls.from_json(data)


def _parse_scalar(text: str) -> Any:
    # YAML scalars: `1e-9`, `30`, `null`, `[0, 5]`, `{kind: full}`.
    try:
        return yaml.safe_load(text)
    except yaml.YAMLError:
        return text


def _nest(dotted: Mapping[str, Any]) -> dict[str, Any]:
    out: dict[str, Any] = {}
    for key, value in dotted.items():
        *parents, leaf = key.split(".")
        node = out
        for part in parents:
            child = node.setdefault(part, {})
            if not isinstance(child, dict):
                raise ConfigError(key, f"'{part}' is both a value and a section")
            node = child
        if leaf in node:
            raise ConfigError(key, "given more than once")
        node[leaf] = value
    return out


def _merge(base: dict[str, Any], overrides: Mapping[str, Any]) -> dict[str, Any]:
    merged = dict(base)
    for key, value in overrides.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = _merge(merged[key], value)
        else:
            merged[key] = value
    return merged


def apply_overrides(
    cfg: ExperimentConfig, overrides: Sequence[str] = (), **flags: Any
) -> ExperimentConfig:
    """Applies `dotted.key=value` strings, then flags that are not `None`.

    Raises:
        ConfigError: If an override is malformed or produces an invalid config.
    """
    dotted: dict[str, Any] = {}
    for item in overrides:
        key, sep, value = item.partition("=")
        if not sep or not key.strip():
            raise ConfigError(item, "overrides must look like 'key.subkey=value'")
        dotted[key.strip()] = _parse_scalar(value.strip())
    dotted |= {k: v for k, v in flags.items() if v is not None}
    if not dotted:
        return cfg
    data = _merge(cfg.to_json(), _nest(dotted))
    if "experiment" in dotted and dotted["experiment"] != cfg.experiment:
        # Switching experiments restarts from the new defaults.
        data = _merge(ExperimentConfig.defaults(dotted["experiment"]).to_json(), _nest(dotted))
    return ExperimentConfig.from_json(data)


def load_config(path: Path, experiment: ExperimentKind | None = None) -> ExperimentConfig:
    """Reads a JSON or YAML (by suffix) config file.

    Args:
        path: The file.
        experiment: Used when the file does not name one.

    Raises:
        ConfigError: If the file cannot be read or parsed, or holds invalid values.
    """
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigError(str(path), f"cannot read: {e.strerror}") from None
    if path.suffix.lower() in {".yaml", ".yml"}:
        try:
            data = yaml.safe_load(text) or {}
        except yaml.YAMLError as e:
            raise ConfigError(str(path), f"invalid YAML: {e}") from None
    else:
        try:
            data = JSON.decode(text)
        except ValueError as e:
            raise ConfigError(str(path), f"invalid JSON: {e}") from None
    if isinstance(data, dict) and experiment is not None:
        data.setdefault("experiment", experiment)
    return ExperimentConfig.from_json(data)
