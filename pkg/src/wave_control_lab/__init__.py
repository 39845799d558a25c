# SPDX-FileCopyrightText: Copyright 2026, Contributors to wave-control-lab
# SPDX-PackageHomePage: https://github.com/wave-control-lab/wave-control-lab
# SPDX-License-Identifier: Apache-2.0

"""wave-control-lab.

Users should import from this module.

Example:
    ```python
    from wave_control_lab import ControlProblem, Region, SpectralState, enumerate_modes, iterate

    ms = enumerate_modes(25)
    problem = ControlProblem(
        modes=ms,
        region=Region.strip(0.0, 0.2),
        T=4.0,
        N=5,
        initial=SpectralState.zeros(ms),
        target=SpectralState.of(ms, a=[1.0, 1.0], b=[1.0]),
    )
    run = iterate(problem)
    ```
"""

from wave_control_lab._about import __about__
from wave_control_lab._core import JSON, FloatArray, Json, JsonArray, JsonBranch, JsonPrimitive
from wave_control_lab.control_loop import (
    ControlError,
    ControlProblem,
    ControlRun,
    Verification,
    assemble_control,
    cost,
    iterate,
    suggest_N,
    verify_controlled,
)
from wave_control_lab.damped_dynamics import (
    DampedSystem,
    DampedTrajectory,
    IntegrationError,
    assemble,
    reference_solve,
    solve,
)
from wave_control_lab.frequency_function import (
    GeometryError,
    HarmonicSample,
    HarmonicScreenError,
    RadialProfile,
    profile,
    three_ball_check,
)
from wave_control_lab.global_vars import STARTUP, GlobalConfigError, GlobalVars
from wave_control_lab.spectral_basis import (
    MassMatrix,
    ModeIndex,
    ModeSet,
    ProjectionError,
    Region,
    enumerate_modes,
    omega_mass_matrix,
    project,
    synthesize,
)
from wave_control_lab.wave_dynamics import (
    ForcingRecord,
    SobolevLevel,
    SpectralState,
    Trajectory,
    energy,
    evolve_forced,
    evolve_free,
    sobolev_norm,
)

__all__ = [
    "JSON",
    "STARTUP",
    "ControlError",
    "ControlProblem",
    "ControlRun",
    "DampedSystem",
    "DampedTrajectory",
    "FloatArray",
    "ForcingRecord",
    "GeometryError",
    "GlobalConfigError",
    "GlobalVars",
    "HarmonicSample",
    "HarmonicScreenError",
    "IntegrationError",
    "Json",
    "JsonArray",
    "JsonBranch",
    "JsonPrimitive",
    "MassMatrix",
    "ModeIndex",
    "ModeSet",
    "ProjectionError",
    "RadialProfile",
    "Region",
    "SobolevLevel",
    "SpectralState",
    "Trajectory",
    "Verification",
    "assemble",
    "assemble_control",
    "cost",
    "energy",
    "enumerate_modes",
    "evolve_forced",
    "evolve_free",
    "iterate",
    "omega_mass_matrix",
    "profile",
    "project",
    "reference_solve",
    "sobolev_norm",
    "solve",
    "suggest_N",
    "synthesize",
    "three_ball_check",
    "verify_controlled",
]

__uri__ = __about__["urls"]["homepage"]
__title__ = __about__["name"]
__summary__ = __about__["summary"]
__version__ = __about__["version"]
__license__ = __about__["license"]
