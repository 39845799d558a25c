# SPDX-FileCopyrightText: Copyright 2026, Contributors to wave-control-lab
# SPDX-PackageHomePage: https://github.com/wave-control-lab/wave-control-lab
# SPDX-License-Identifier: Apache-2.0

import pytest

from wave_control_lab.experiments.config import ExperimentConfig
from wave_control_lab.experiments.suites import (
    SUITES,
    CheckResult,
    SuiteFailedError,
    SuiteReport,
    run_property_suites,
)


@pytest.fixture(scope="module")
def report() -> SuiteReport:
    return run_property_suites(ExperimentConfig())


class TestDefaults:
    def test_all_pass(self, report: SuiteReport) -> None:
        assert report.failed == ()
        assert report.passed
        report.raise_if_failed()

    def test_every_suite_reports(self, report: SuiteReport) -> None:
        prefixes = {c.name.split(".")[0] for c in report.checks}
        assert prefixes == {
            "mass_matrix",
            "modes",
            "projection",
            "free",
            "damped",
            "control",
            "frequency",
        }
        assert report["control.telescoping_identity"].measured <= 1e-5
        assert report["free.energy_conservation"].tolerance == 1e-12

    @pytest.mark.parametrize(
        "name",
        [
            "projection.polynomial_coefficients",
            "free.group_law",
            "free.duhamel_closed_form",
            "damped.time_translation",
        ],
    )
    def test_exact_solution_checks(self, report: SuiteReport, name: str) -> None:
        assert report[name].passed
        assert report[name].measured < report[name].tolerance

    def test_json(self, report: SuiteReport) -> None:
        data = report.to_json()
        assert data["passed"] is True
        assert data["tol"] == 1e-9
        assert data["faults"] == []
        assert len(data["checks"]) == len(report.checks)

    def test_unknown_check(self, report: SuiteReport) -> None:
        with pytest.raises(KeyError):
            report["nonexistent"]


class TestSelection:
    def test_only(self) -> None:
        only = run_property_suites(ExperimentConfig(), only=("spectral",))
        assert {c.name.split(".")[0] for c in only.checks} == {"mass_matrix", "modes", "projection"}
        assert only.passed

    def test_injected_fault(self) -> None:
        faulty = run_property_suites(
            ExperimentConfig(), faults=("mass_matrix",), only=("spectral",)
        )
        assert "mass_matrix.closed_form_vs_quadrature" in faulty.failed
        assert faulty.faults == ("mass_matrix",)
        with pytest.raises(SuiteFailedError, match="closed_form_vs_quadrature"):
            faulty.raise_if_failed()

    def test_loose_tolerance(self) -> None:
        loose = run_property_suites(ExperimentConfig(tol=1e-6), only=("damped",))
        assert loose.passed
        assert loose["damped.dissipation_identity"].tolerance == pytest.approx(1e-3)
        assert loose["damped.time_translation"].tolerance == pytest.approx(2e-4)

    @pytest.mark.parametrize(
        ("faults", "only", "match"),
        [(("drift",), (), "Unknown fault"), ((), ("spectrum",), "Unknown suite")],
    )
    def test_unknown_names(
        self, faults: tuple[str, ...], only: tuple[str, ...], match: str
    ) -> None:
        with pytest.raises(ValueError, match=match):
            run_property_suites(ExperimentConfig(), faults=faults, only=only)

    def test_suite_names(self) -> None:
        assert set(SUITES) == {"spectral", "free", "damped", "control", "frequency"}


class TestCheckResult:
    def test_passed(self) -> None:
        assert CheckResult("x", 1e-9, 1e-8).passed
        assert not CheckResult("x", 1e-7, 1e-8).passed
        assert CheckResult("d_monotone", 0.0, 0.0).passed

    def test_json(self) -> None:
        data = CheckResult("x", 2.0, 1.0, "G=4").to_json()
        assert data == {
            "name": "x",
            "passed": False,
            "measured": 2.0,
            "tolerance": 1.0,
            "detail": "G=4",
        }


if __name__ == "__main__":
    pytest.main()
