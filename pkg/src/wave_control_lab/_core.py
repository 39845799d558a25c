# SPDX-FileCopyrightText: Copyright 2026, Contributors to wave-control-lab
# SPDX-PackageHomePage: https://github.com/wave-control-lab/wave-control-lab
# SPDX-License-Identifier: Apache-2.0

"""Shared types: JSON values, the JSON codec, and read-only float arrays."""

from collections.abc import MutableMapping, MutableSequence
from typing import Any, Final, NoReturn, final

import numpy as np
from numpy.typing import ArrayLike, NDArray

try:
    import orjson
except ImportError:  # pragma: no cover
    orjson = None

__all__ = [
    "JSON",
    "FloatArray",
    "Json",
    "JsonArray",
    "JsonBranch",
    "JsonLeaf",
    "JsonPrimitive",
    "frozen_array",
]

type JsonPrimitive = str | int | float | bool | None
type JsonArray = MutableSequence[Json]
type JsonLeaf = JsonPrimitive | JsonArray
type JsonBranch = MutableMapping[str, Json]  # aka object
type Json = JsonLeaf | JsonBranch

type FloatArray = NDArray[np.float64]


def frozen_array(values: ArrayLike, *, ndim: int | None = None) -> FloatArray:
    """Copies `values` into a read-only float64 array, optionally checking its rank."""
    arr = np.array(values, dtype=np.float64, copy=True)
    if ndim is not None and arr.ndim != ndim:
        msg = f"Expected a {ndim}-d array; got shape {arr.shape}."
        raise ValueError(msg)
    arr.setflags(write=False)
    return arr


def _to_builtin(obj: Any) -> Json:
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, np.floating | np.integer | np.bool_):
        return obj.item()
    msg = f"Type {type(obj).__name__} is not JSON-serializable."
    raise TypeError(msg)


@final
class _JsonUtil:
    """Indented JSON for run files; orjson when installed.

    Encoding accepts numpy arrays and scalars. NaN and infinities are refused both ways,
    since a run file holding them cannot be read by strict parsers.
    """

    def __str__(self) -> str:
        return "JSON"

    def __repr__(self) -> str:
        return "JSON"

    def encode(self, data: Any) -> str:
        self._check_finite(data)
        if orjson is not None:
            option = orjson.OPT_INDENT_2 | orjson.OPT_SERIALIZE_NUMPY
            return orjson.dumps(data, option=option, default=_to_builtin).decode("utf-8")
        import json  # noqa: PLC0415

        return json.dumps(data, ensure_ascii=False, allow_nan=False, indent=2, default=_to_builtin)

    def decode(self, data: str) -> Json:
        import json  # noqa: PLC0415

        return json.loads(data, parse_constant=self._parse_const)

    def _check_finite(self, data: Any) -> None:
        match data:
            case float() | np.floating() if not np.isfinite(data):
                msg = f"Invalid JSON value: {data!r}"
                raise ValueError(msg)
            case np.ndarray() if data.dtype.kind == "f" and not np.all(np.isfinite(data)):
                msg = "Invalid JSON value: array contains NaN or infinity"
                raise ValueError(msg)
            case dict():
                for v in data.values():
                    self._check_finite(v)
            case list() | tuple():
                for v in data:
                    self._check_finite(v)

    @staticmethod
    def _parse_const(s: str) -> NoReturn:
        msg = f"Invalid JSON value: '{s}'"
        raise ValueError(msg)


JSON: Final = _JsonUtil()
