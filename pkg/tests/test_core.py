# SPDX-FileCopyrightText: Copyright 2026, Contributors to wave-control-lab
# SPDX-PackageHomePage: https://github.com/wave-control-lab/wave-control-lab
# SPDX-License-Identifier: Apache-2.0

"""Tests for the `_core` module."""

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from wave_control_lab._core import JSON, Json, frozen_array

json_primitives = st.one_of(
    st.text(),
    st.integers(min_value=-(2**63), max_value=2**63 - 1),
    st.floats(allow_nan=False, allow_infinity=False),
    st.booleans(),
    st.none(),
)
json_data: st.SearchStrategy[Json] = st.recursive(
    json_primitives,
    lambda children: st.lists(children) | st.dictionaries(st.text(), children),
    max_leaves=50,
)


class TestJson:
    @given(data=json_data)
    def test_finite_data_survives(self, data: Json) -> None:
        assert JSON.decode(JSON.encode(data)) == data

    def test_indented(self) -> None:
        assert JSON.encode({"a": [1]}).splitlines()[0] == "{"

    def test_numpy(self) -> None:
        data = {"a": np.array([1.0, 2.5]), "n": np.int64(3), "x": np.float64(0.1)}
        assert JSON.decode(JSON.encode(data)) == {"a": [1.0, 2.5], "n": 3, "x": 0.1}

    @pytest.mark.parametrize("bad", [math.nan, math.inf, -math.inf])
    def test_rejects_non_finite(self, bad: float) -> None:
        with pytest.raises(ValueError, match="Invalid JSON value"):
            JSON.encode({"x": [1.0, bad]})

    def test_rejects_non_finite_array(self) -> None:
        with pytest.raises(ValueError, match="Invalid JSON value"):
            JSON.encode({"x": np.array([1.0, np.nan])})

    @pytest.mark.parametrize("text", ["NaN", "Infinity", "-Infinity"])
    def test_decode_rejects_constants(self, text: str) -> None:
        with pytest.raises(ValueError, match="Invalid JSON value"):
            JSON.decode(f'{{"x": {text}}}')


class TestFrozenArray:
    def test_read_only_copy(self) -> None:
        source = np.array([1.0, 2.0])
        frozen = frozen_array(source)
        source[0] = 9.0
        assert frozen[0] == 1.0
        with pytest.raises(ValueError, match="read-only"):
            frozen[0] = 3.0

    def test_rank(self) -> None:
        assert frozen_array([[1, 2]], ndim=2).dtype == np.float64
        with pytest.raises(ValueError, match="2-d"):
            frozen_array([1.0, 2.0], ndim=2)


if __name__ == "__main__":
    pytest.main()
