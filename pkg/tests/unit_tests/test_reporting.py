"""Unit tests for output formatting."""

import json
import math

import numpy as np
import pytest

from lelong.analysis import ConditionCReport, ConditionVerdict, LimitEstimate, LimitModel, NuProfile, Quantity
from lelong.error_handling import InvalidInputError
from lelong.identity_suite import IdentityReport, Relation, Verdict
from lelong.reporting import (
    PROFILE_HEADER,
    REPORT_HEADER,
    classical_factor,
    dumps,
    format_condition,
    format_limit,
    format_profile,
    format_reports,
)


@pytest.fixture
def profile():
    return NuProfile(
        grid=(0.01, 0.1),
        values=(-1.5, -1.25),
        engines=("closed_form", "quadrature"),
        err_bounds=(0.0, 1e-12),
        quantity=Quantity.NU,
        bidim=1,
    )


def _report(identity_id, verdict=Verdict.PASS, residual=0.0):
    return IdentityReport(
        identity_id=identity_id,
        inputs={"r": 0.3},
        lhs=-1.0,
        rhs=-1.0,
        residual=residual,
        tolerance=1e-9,
        relation=Relation.EQUALITY,
        verdict=verdict,
    )


class TestDumps:
    """Test deterministic JSON."""

    def test_sorted_and_indented(self):
        assert dumps({"b": 1, "a": 2}) == '{\n  "a": 2,\n  "b": 1\n}'

    def test_non_finite_values(self):
        assert json.loads(dumps([math.inf, -math.inf, math.nan])) == ["Infinity", "-Infinity", "NaN"]

    def test_numpy_scalars_and_enums(self):
        assert json.loads(dumps({"x": np.float64(0.5), "v": Verdict.NOT_APPLICABLE})) == {"x": 0.5, "v": "n/a"}

    def test_unknown_type(self):
        with pytest.raises(TypeError):
            dumps(object())


class TestFormatProfile:
    """Test profile rendering."""

    def test_csv(self, profile):
        lines = format_profile(profile, "csv").splitlines()
        assert lines[0] == ",".join(PROFILE_HEADER)
        assert lines[1] == "0.01,-1.5,closed_form,0.0"
        assert len(lines) == 3

    def test_json(self, profile):
        payload = json.loads(format_profile(profile, "json"))
        assert payload["values"] == [-1.5, -1.25]
        assert payload["quantity"] == "nu" and payload["classical"] is False

    def test_classical_divides_by_two_to_the_p(self, profile):
        payload = json.loads(format_profile(profile, "json", classical=True))
        assert payload["values"] == [-0.75, -0.625]
        assert classical_factor(2, True) == 4.0 and classical_factor(2, False) == 1.0

    def test_svg_data(self, profile):
        lines = format_profile(profile, "svg-data").splitlines()
        assert lines[:2] == ["# x: r (log scale)", "# y: nu (linear scale)"]
        assert lines[2] == "0.01 -1.5"

    def test_unknown_format(self, profile):
        with pytest.raises(InvalidInputError, match="unknown profile format"):
            format_profile(profile, "xlsx")


class TestFormatResults:
    """Test limit, condition and report rendering."""

    def test_diverged_limit(self):
        estimate = LimitEstimate(value=-math.inf, model=LimitModel.LOG, params={"A": 2.0, "B": -2.0}, fit_residual=0.0, diverged=True)
        payload = json.loads(format_limit(estimate))
        assert payload["value"] == "-Infinity" and payload["model"] == "log"

    def test_classical_limit(self):
        estimate = LimitEstimate(value=-4.0, model=LimitModel.POWER, fit_residual=1e-12)
        assert json.loads(format_limit(estimate, bidim=1, classical=True))["value"] == -2.0

    def test_condition(self):
        report = ConditionCReport(verdict=ConditionVerdict.FAILS, exponent_estimate=0.0, method="closed_form")
        assert json.loads(format_condition(report))["verdict"] == "fails"

    def test_reports_json(self):
        payload = json.loads(format_reports([_report("lelong_jensen")]))
        assert payload[0]["verdict"] == "pass" and len(payload[0]["input_hash"]) == 32

    def test_reports_csv(self):
        failed = _report("power_scaling", Verdict.FAIL, residual=1.0)
        lines = format_reports([_report("lelong_jensen"), failed], "csv").splitlines()
        assert lines[0] == ",".join(REPORT_HEADER)
        assert lines[2].startswith("power_scaling,fail,1.0,1e-09,")

    def test_unknown_report_format(self):
        with pytest.raises(InvalidInputError):
            format_reports([], "yaml")
