# SPDX-FileCopyrightText: Copyright 2026, Contributors to wave-control-lab
# SPDX-PackageHomePage: https://github.com/wave-control-lab/wave-control-lab
# SPDX-License-Identifier: Apache-2.0

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wave_control_lab.spectral_basis import (
    ModeIndex,
    ModeSet,
    ModeSetError,
    ProjectionError,
    Region,
    RegionError,
    enumerate_modes,
    eval_mode,
    omega_mass_matrix,
    project,
    project_converged,
    quadrature_mass_matrix,
    synthesize,
    synthesize_gradient,
)

STRIP = Region.strip(0.0, 0.2)


class TestEnumerateModes:
    def test_first_modes(self) -> None:
        ms = enumerate_modes(6)
        assert [(m.k, m.l) for m in ms.modes] == [(1, 1), (1, 2), (2, 1), (2, 2), (1, 3), (3, 1)]
        assert ms[0].lam == pytest.approx(2 * math.pi**2)
        assert ms[1].lam == ms[2].lam

    @settings(deadline=None)
    @given(g=st.integers(1, 400), extra=st.integers(1, 100))
    def test_prefix(self, g: int, extra: int) -> None:
        assert enumerate_modes(g + extra).prefix(g) == enumerate_modes(g)

    def test_nondecreasing(self) -> None:
        ms = enumerate_modes(1000)
        assert len(ms) == 1000
        assert np.all(np.diff(ms.lam) >= 0)
        assert len({(m.k, m.l) for m in ms.modes}) == 1000

    def test_id_depends_on_modes(self) -> None:
        assert enumerate_modes(10).id == enumerate_modes(10).id
        assert enumerate_modes(10).id != enumerate_modes(11).id

    def test_invalid(self) -> None:
        with pytest.raises(ModeSetError):
            enumerate_modes(0)
        with pytest.raises(ModeSetError):
            ModeIndex(0, 1)
        with pytest.raises(ModeSetError, match="increasing"):
            ModeSet((ModeIndex(2, 1), ModeIndex(1, 1)))

    def test_json(self) -> None:
        ms = enumerate_modes(12)
        assert ModeSet.from_json(ms.to_json()) == ms


class TestRegion:
    def test_strip(self) -> None:
        assert STRIP.measure == pytest.approx(0.2)
        np.testing.assert_array_equal(STRIP.indicator([0.1, 0.3], [0.5, 0.5]), [1.0, 0.0])
        assert Region.from_json(STRIP.to_json()) == STRIP

    @pytest.mark.parametrize(("lo", "hi"), [(0.3, 0.2), (-0.1, 0.2), (0.0, 1.5), (0.4, 0.4)])
    def test_invalid_strip(self, lo: float, hi: float) -> None:
        with pytest.raises(RegionError):
            Region.strip(lo, hi)


class TestMassMatrix:
    def test_known_entry(self) -> None:
        m = omega_mass_matrix(enumerate_modes(4), STRIP)
        # 0.2 − sin(0.4π)/(2π)
        assert m.entries[0, 0] == pytest.approx(0.2 - math.sin(0.4 * math.pi) / (2 * math.pi))
        assert m.entries[0, 0] == pytest.approx(0.0486347, abs=1e-7)

    def test_matches_quadrature(self) -> None:
        ms = enumerate_modes(50)
        closed = omega_mass_matrix(ms, STRIP)
        oracle = quadrature_mass_matrix(ms, STRIP)
        assert np.max(np.abs(closed.entries - oracle.entries)) <= 1e-10

    def test_structure(self) -> None:
        ms = enumerate_modes(60)
        m = omega_mass_matrix(ms, STRIP).entries
        np.testing.assert_array_equal(m, m.T)
        eig = np.linalg.eigvalsh(m)
        assert eig.min() >= -1e-12
        assert eig.max() <= 1 + 1e-12
        different_l = ms.l[:, None] != ms.l[None, :]
        assert np.all(m[different_l] == 0.0)

    def test_full_region_is_identity(self) -> None:
        m = omega_mass_matrix(enumerate_modes(8), Region.full())
        np.testing.assert_array_equal(m.entries, np.eye(8))

    def test_quadratic_rows(self) -> None:
        ms = enumerate_modes(5)
        m = omega_mass_matrix(ms, STRIP)
        v = np.arange(10.0).reshape(2, 5)
        expected = [v[0] @ m.entries @ v[0], v[1] @ m.entries @ v[1]]
        np.testing.assert_allclose(m.quadratic(v), expected)


class TestSynthesis:
    def test_single_mode(self) -> None:
        ms = enumerate_modes(10)
        x = np.linspace(0.0, 1.0, 7)
        coeffs = np.zeros(10)
        coeffs[4] = 1.0
        expected = eval_mode(ms[4], x[:, None], x[None, :])
        np.testing.assert_allclose(synthesize(coeffs, ms, x, x), expected, atol=1e-14)

    def test_gradient_matches_finite_difference(self) -> None:
        ms = enumerate_modes(15)
        c = np.random.default_rng(1).standard_normal(15)
        x, step = np.array([0.3]), 1e-6
        d1, d2 = synthesize_gradient(c, ms, x, x)
        fd1 = (synthesize(c, ms, x + step, x) - synthesize(c, ms, x - step, x)) / (2 * step)
        fd2 = (synthesize(c, ms, x, x + step) - synthesize(c, ms, x, x - step)) / (2 * step)
        np.testing.assert_allclose(d1, fd1, rtol=1e-6, atol=1e-6)
        np.testing.assert_allclose(d2, fd2, rtol=1e-6, atol=1e-6)


class TestProjection:
    def test_recovers_mode(self) -> None:
        ms = enumerate_modes(30)
        coeffs = project(lambda x1, x2: eval_mode(ms[7], x1, x2), ms)
        expected = np.zeros(30)
        expected[7] = 1.0
        np.testing.assert_allclose(coeffs, expected, atol=1e-12)

    def test_synthesis_inverts_projection(self) -> None:
        ms = enumerate_modes(40)
        c = np.random.default_rng(2).standard_normal(40)
        back = project(lambda x1, x2: synthesize(c, ms, x1[:, 0], x2[0, :]), ms)
        np.testing.assert_allclose(back, c, atol=1e-11)

    def test_converged(self) -> None:
        ms = enumerate_modes(20)
        result = project_converged(lambda x1, x2: x1 * (1 - x1) * x2 * (1 - x2), ms, 16)
        assert result.quad_order == 32
        assert result.discrepancy <= 1e-6
        # ∬ x(1−x) y(1−y) e_(1,1) = 2 (4/π³)²
        assert result.coeffs[0] == pytest.approx(2 * (4 / math.pi**3) ** 2, rel=1e-12)

    def test_not_converged(self) -> None:
        ms = enumerate_modes(5)
        with pytest.raises(ProjectionError) as info:
            project_converged(lambda x1, x2: np.exp(x1 + x2), ms, 2, rtol=1e-14, n_panels=1)
        assert info.value.discrepancy is not None
        assert info.value.discrepancy > 1e-14
        assert "doubled-order" in str(info.value)

    def test_non_finite(self) -> None:
        ms = enumerate_modes(3)
        with pytest.raises(ProjectionError, match="non-finite"):
            project(lambda x1, x2: np.full_like(x1, np.nan), ms, 4)


if __name__ == "__main__":
    pytest.main()
