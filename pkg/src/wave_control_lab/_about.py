# SPDX-FileCopyrightText: Copyright 2026, Contributors to wave-control-lab
# SPDX-PackageHomePage: https://github.com/wave-control-lab/wave-control-lab
# SPDX-License-Identifier: Apache-2.0

"""Package metadata, kept free of internal imports.

`experiments.persistence` and `global_vars` read it at import time,
before `wave_control_lab/__init__.py` has finished.
"""

from typing import Final, TypedDict

from semver import Version

__all__ = ["About", "Urls", "__about__"]


class Urls(TypedDict):
    homepage: str
    documentation: str
    issues: str


class About(TypedDict):
    """Metadata mirrored from `pyproject.toml`.

    Attributes:
        run_schema: Version of the run-directory layout (`config.json`, `summary.json`, tables).
          A new major version means older readers cannot load the run.
    """

    name: str
    namespace: str
    version: str
    version_parts: Version
    summary: str
    license: str
    run_schema: str
    urls: Urls


_VERSION: Final = "0.1.0"

__about__: Final = About(
    name="wave-control-lab",
    namespace="wave_control_lab",
    version=_VERSION,
    version_parts=Version.parse(_VERSION),
    summary=(
        "Spectral wave solvers, time-reversal approximate controls,"
        " and frequency-function checks on the unit square"
    ),
    license="Apache-2.0",
    run_schema="1.0.0",
    urls=Urls(
        homepage="https://github.com/wave-control-lab/wave-control-lab",
        documentation="https://wave-control-lab.github.io/wave-control-lab",
        issues="https://github.com/wave-control-lab/wave-control-lab/issues",
    ),
)
