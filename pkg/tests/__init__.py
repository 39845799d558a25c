# SPDX-FileCopyrightText: Copyright 2026, Contributors to wave-control-lab
# SPDX-PackageHomePage: https://github.com/wave-control-lab/wave-control-lab
# SPDX-License-Identifier: Apache-2.0

"""Utilities for tests."""

from dataclasses import dataclass
from pathlib import Path
from typing import TYPE_CHECKING, Final

import numpy as np
from hypothesis import settings as hyp

from wave_control_lab.spectral_basis import ModeSet
from wave_control_lab.wave_dynamics import SpectralState

if TYPE_CHECKING:
    from os import PathLike

__all__ = ["Helper", "smooth_state"]

TESTS_ROOT: Final = Path(__file__).parent.resolve()

# Select with `--hypothesis-profile=<name>`. Solver-backed properties are too slow for a deadline.
hyp.register_profile("ci", parent=hyp.get_profile("ci"), deadline=None, print_blob=True)
hyp.register_profile("thorough", max_examples=1_000, deadline=None)


def smooth_state(rng: np.random.Generator, ms: ModeSet) -> SpectralState:
    """Random data with `a_j ~ 1/λ_j` and `b_j ~ 1/√λ_j` (a moderate `H²×H¹₀` norm)."""
    lam = ms.lam
    a = rng.standard_normal(len(ms)) * lam[0] / lam
    b = rng.standard_normal(len(ms)) * np.sqrt(lam[0] / lam)
    return SpectralState(a, b, ms)


@dataclass(frozen=True, slots=True, kw_only=True)
class Helper:
    """Shared by test classes; mostly for locating files under `tests/resources/`."""

    def resource(self, *nodes: PathLike | str) -> Path:
        """Path under `tests/resources/`; need not exist."""
        return Path(TESTS_ROOT, "resources", *nodes)
