# SPDX-FileCopyrightText: Copyright 2026, Contributors to wave-control-lab
# SPDX-PackageHomePage: https://github.com/wave-control-lab/wave-control-lab
# SPDX-License-Identifier: Apache-2.0

import math
from pathlib import Path

import numpy as np
import pytest

from wave_control_lab.experiments.config import (
    BeamParams,
    ConfigError,
    ExperimentConfig,
    GaussianBeam,
    StateSpec,
    apply_overrides,
    band_energy_fraction,
    load_config,
)
from wave_control_lab.spectral_basis import Region, enumerate_modes
from wave_control_lab.wave_dynamics import SpectralState

from .. import Helper

H = Helper()


class TestDefaults:
    def test_example1(self) -> None:
        cfg = ExperimentConfig.defaults("example1")
        assert (cfg.G, cfg.N, cfg.T) == (100, 30, 4.0)
        assert cfg.region == Region.strip(0.0, 0.2)
        assert cfg.target == StateSpec(a=(1.0, 1.0), b=(1.0,))
        assert cfg.initial == StateSpec()

    def test_example2(self) -> None:
        cfg = ExperimentConfig.defaults("example2")
        assert (cfg.G, cfg.N) == (1000, 100)
        assert cfg.target == StateSpec()
        assert cfg.beam == BeamParams(k_o=200.0, a_o=0.5, b_o=10000.0)

    def test_unknown(self) -> None:
        with pytest.raises(ConfigError, match="experiment"):
            ExperimentConfig.defaults("example3")  # type: ignore[arg-type]

    def test_sweep_values(self) -> None:
        cfg = ExperimentConfig(N=10, sweep=(20, 0, 5, 5))
        assert cfg.sweep_values == (0, 5, 10)

    @pytest.mark.parametrize(
        ("key", "changes"),
        [
            ("G", {"G": 0}),
            ("N", {"N": -1}),
            ("T", {"T": math.inf}),
            ("tol", {"tol": 1.0}),
            ("sweep", {"sweep": (0, -5)}),
            ("initial", {"G": 2, "initial": StateSpec(a=(1.0, 2.0, 3.0))}),
        ],
    )
    def test_invalid(self, key: str, changes: dict[str, object]) -> None:
        with pytest.raises(ConfigError) as info:
            ExperimentConfig(**changes)  # type: ignore[arg-type]
        assert info.value.key == key
        assert key in str(info.value)


class TestJson:
    def test_round_trip(self) -> None:
        cfg = ExperimentConfig(
            experiment="example1",
            G=12,
            N=3,
            region=Region.full(),
            initial=StateSpec(a=(0.5,), b=(0.0, 2.0)),
            out=Path("runs", "a"),
        )
        assert ExperimentConfig.loads(cfg.dumps()) == cfg

    def test_partial(self) -> None:
        cfg = ExperimentConfig.from_json({"experiment": "example1", "N": 3})
        assert (cfg.G, cfg.N) == (100, 3)

    def test_unknown_key(self) -> None:
        with pytest.raises(ConfigError, match="unknown keys"):
            ExperimentConfig.from_json({"G": 5, "horizon": 4.0})

    @pytest.mark.parametrize(
        ("key", "value"),
        [
            ("G", 1.5),
            ("G", True),
            ("T", "long"),
            ("beam", {"k_o": 1.0, "width": 2.0}),
            ("region", {"kind": "strip"}),
            ("target", {"a": 5}),
        ],
    )
    def test_bad_value(self, key: str, value: object) -> None:
        with pytest.raises(ConfigError) as info:
            ExperimentConfig.from_json({key: value})
        assert info.value.key == key

    def test_not_an_object(self) -> None:
        with pytest.raises(ConfigError, match="expected an object"):
            ExperimentConfig.from_json([1, 2])  # type: ignore[arg-type]

    def test_invalid_json(self) -> None:
        with pytest.raises(ConfigError, match="invalid JSON"):
            ExperimentConfig.loads("{G: 5")


class TestOverrides:
    def test_dotted(self) -> None:
        cfg = apply_overrides(
            ExperimentConfig(), ["beam.k_o=100", "tol=1e-8", "region={kind: full}", "G=30"]
        )
        assert cfg.beam.k_o == 100.0
        assert cfg.beam.b_o == 10000.0
        assert cfg.tol == 1e-8
        assert cfg.region == Region.full()
        assert cfg.G == 30

    def test_flags(self) -> None:
        cfg = apply_overrides(ExperimentConfig(), G=10, N=None, T=2.0)
        assert (cfg.G, cfg.N, cfg.T) == (10, 5, 2.0)

    def test_nothing(self) -> None:
        cfg = ExperimentConfig()
        assert apply_overrides(cfg, (), G=None) is cfg

    def test_switch_experiment(self) -> None:
        cfg = apply_overrides(ExperimentConfig(), ["experiment=example1", "N=4"])
        assert (cfg.experiment, cfg.G, cfg.N) == ("example1", 100, 4)

    def test_sweep_list(self) -> None:
        assert apply_overrides(ExperimentConfig(), ["sweep=[0, 2]"]).sweep == (0, 2)

    @pytest.mark.parametrize(
        ("items", "match"),
        [
            (["G"], "key.subkey=value"),
            (["=5"], "key.subkey=value"),
            (["beam=1", "beam.k_o=2"], "both a value and a section"),
            (["G=abc"], "G"),
            (["N=-2"], "N"),
        ],
    )
    def test_malformed(self, items: list[str], match: str) -> None:
        with pytest.raises(ConfigError, match=match):
            apply_overrides(ExperimentConfig(), items)


class TestLoad:
    def test_yaml(self) -> None:
        cfg = load_config(H.resource("example1-small.yaml"))
        assert (cfg.experiment, cfg.G, cfg.N) == ("example1", 8, 2)
        assert cfg.sweep == (0, 1, 2)
        assert cfg.target == StateSpec(a=(1.0, 1.0), b=(1.0,))

    def test_json(self) -> None:
        cfg = load_config(H.resource("custom-small.json"))
        assert cfg.region == Region.full()
        assert cfg.target.b == (0.0, 0.0, 1.0)

    def test_default_experiment(self, tmp_path: Path) -> None:
        path = tmp_path / "c.yml"
        path.write_text("N: 7\n", encoding="utf-8")
        cfg = load_config(path, "example1")
        assert (cfg.experiment, cfg.G, cfg.N) == ("example1", 100, 7)

    def test_empty_yaml(self, tmp_path: Path) -> None:
        path = tmp_path / "empty.yaml"
        path.write_text("", encoding="utf-8")
        assert load_config(path) == ExperimentConfig()

    def test_errors(self, tmp_path: Path) -> None:
        with pytest.raises(ConfigError, match="cannot read"):
            load_config(tmp_path / "missing.json")
        with pytest.raises(ConfigError, match="invalid YAML"):
            load_config(H.resource("broken.yaml"))
        with pytest.raises(ConfigError, match="unknown keys"):
            load_config(H.resource("bad-key.json"))


class TestBeam:
    def test_profile(self) -> None:
        beam = GaussianBeam(BeamParams(amplitude=2.0))
        assert float(beam.g0(np.array(0.5), np.array(0.5))) == pytest.approx(2.0)
        # At the centre only the `(k_o/2 + a_o) sin(0)` term could contribute.
        assert float(beam.g1(np.array(0.5), np.array(0.5))) == pytest.approx(0.0, abs=1e-12)
        assert beam.width_x1 == pytest.approx(0.1)
        assert beam.width_x2 == pytest.approx(1 / math.sqrt(2e6))
        assert beam.carrier_index == pytest.approx(100 / math.pi)

    def test_panels(self) -> None:
        e1, e2 = GaussianBeam(BeamParams()).panel_edges()
        for e in (e1, e2):
            assert e[0] == 0.0
            assert e[-1] == 1.0
            assert np.all(np.diff(e) > 0)
        assert np.min(np.diff(e2)) < np.min(np.diff(e1))

    def test_band_fraction(self) -> None:
        ms = enumerate_modes(30)
        j = int(np.argmax(ms.l == 3))
        a = np.zeros(30)
        a[j] = 1.0
        state = SpectralState(a, np.zeros(30), ms)
        assert band_energy_fraction(state, ms, 2, 4) == 1.0
        assert band_energy_fraction(state, ms, 4, 9) == 0.0
        assert band_energy_fraction(SpectralState.zeros(ms), ms, 0, 9) == 0.0


if __name__ == "__main__":
    pytest.main()
