"""Tests for pairwise comparisons and claim checks."""

import math

import pytest
from pydantic import ValidationError
from rich.console import Console

from src.accel.profiles import load_profile
from src.cost.compare import (
    ClaimSpec,
    check_claims,
    claim_tally,
    claims_table,
    compare,
    evaluate_claim,
    load_claims,
    print_tables,
    related_work_table,
)
from src.lib.errors import ConfigError


def _claim(**overrides):
    data = {
        "id": "c", "description": "test claim", "profile": "react", "metric": "area",
        "numerator": ["per_neuron_lut"], "denominator": "nova", "expected": 3.34, "tolerance": 0.02,
    }
    data.update(overrides)
    return ClaimSpec(**data)


class TestCompare:
    """Test compare()."""

    def test_all_ordered_pairs(self):
        """Test three kinds give six ordered pairs."""
        report = compare(load_profile("react"))
        assert len(report.pairs) == 6
        assert report.get("per_neuron_lut", "nova").area_ratio == pytest.approx(6.058 / 1.817)
        assert report.get("nova", "per_neuron_lut").area_ratio == pytest.approx(1.817 / 6.058)

    @pytest.mark.parametrize("profile", ["react", "tpu_v3_like", "tpu_v4_like", "jetson_xavier_nx"])
    def test_ratios_are_reciprocal(self, profile):
        """Test each ratio times its reverse pair's ratio is one."""
        report = compare(load_profile(profile))
        for pair in report.pairs:
            reverse = report.get(pair.kind_b, pair.kind_a)
            assert pair.area_ratio * reverse.area_ratio == pytest.approx(1.0, abs=1e-9)
            assert pair.power_ratio * reverse.power_ratio == pytest.approx(1.0, abs=1e-9)

    def test_sdp_ratios(self):
        """Test SDP power and area ratios on the Jetson host."""
        pair = compare(load_profile("jetson_xavier_nx")).get("nvdla_sdp", "nova")
        assert pair.power_ratio == pytest.approx(37.764, abs=1e-3)
        assert pair.area_ratio == pytest.approx(5.00725, abs=1e-4)
        assert pair.energy_ratio is None

    def test_single_entry_skipped(self):
        """Test fewer than two entries yields a note and no pairs."""
        react = load_profile("react")
        single = react.model_copy(update={"approximator_entries": [react.entry("nova")]})
        report = compare(single)
        assert report.pairs == []
        assert "skipped" in report.note

    def test_missing_pair(self):
        """Test asking for an absent pair names both kinds."""
        with pytest.raises(ConfigError, match="nvdla_sdp"):
            compare(load_profile("react")).get("nvdla_sdp", "nova")

    def test_rows(self):
        """Test rows carry the profile and both kinds."""
        rows = compare(load_profile("react")).to_rows()
        assert rows[0]["profile"] == "react"
        assert set(rows[0]) == {"profile", "kind_a", "kind_b", "power_ratio", "area_ratio", "energy_ratio"}


class TestClaims:
    """Test the published-claim checks."""

    def test_all_shipped_claims_pass(self):
        """Test every shipped claim reproduces from the shipped data."""
        results = check_claims()
        assert len(results) == 8
        assert [r.id for r in results if not r.passed] == []
        assert claim_tally(results) == (8, 8)

    @pytest.mark.parametrize("claim_id,value", [
        ("react_avg_power", 2.4749),
        ("react_per_neuron_area", 3.3341),
        ("react_per_core_area", 1.7755),
        ("tpu_v3_area", 3.0604),
        ("tpu_v4_per_neuron_energy", 4.1386),
        ("tpu_v4_per_core_energy", 9.3326),
        ("nvdla_power", 37.764),
        ("nvdla_area", 5.0072),
    ])
    def test_computed_values(self, claim_id, value):
        """Test the computed ratio of each claim."""
        results = {r.id: r for r in check_claims()}
        assert results[claim_id].computed == pytest.approx(value, abs=1e-3)

    def test_profile_filter(self):
        """Test filtering to one profile."""
        results = check_claims(profiles=["jetson_xavier_nx"])
        assert {r.id for r in results} == {"nvdla_power", "nvdla_area"}

    def test_failing_claim(self):
        """Test a claim outside tolerance fails."""
        result = evaluate_claim(_claim(expected=4.0))
        assert not result.passed
        assert result.to_dict()["passed"] is False

    def test_at_least(self):
        """Test at_least passes at or above the bound."""
        assert evaluate_claim(_claim(check="at_least", expected=3.0, tolerance=0.0)).passed
        assert not evaluate_claim(_claim(check="at_least", expected=3.5, tolerance=0.0)).passed

    def test_energy_claim_needs_workload(self):
        """Test energy claims must name a workload."""
        with pytest.raises(ConfigError, match="workload"):
            evaluate_claim(_claim(metric="energy", profile="tpu_v4_like"))

    def test_power_missing(self):
        """Test a power claim on an entry without power is a config error."""
        react = load_profile("react")
        entries = [e.model_copy(update={"power_mw": None}) if e.kind == "nova" else e
                   for e in react.approximator_entries]
        with pytest.raises(ConfigError, match="no power"):
            evaluate_claim(_claim(metric="power"), react.model_copy(update={"approximator_entries": entries}))

    def test_claim_spec_rejects_unknown_keys(self):
        """Test claim typos fail validation."""
        with pytest.raises(ValidationError):
            _claim(tolerence=0.1)

    def test_load_claims(self):
        """Test the shipped claim file parses."""
        assert len(load_claims()) == 8


class TestTables:
    """Test rich rendering."""

    def test_claims_table(self):
        """Test the claims table shows verdicts."""
        console = Console(record=True, width=160)
        print_tables(claims_table(check_claims()), console=console)
        text = console.export_text()
        assert "PASS" in text
        assert "FAIL" not in text

    def test_related_work_table(self):
        """Test the reference data prints unchanged."""
        console = Console(record=True, width=160)
        print_tables(related_work_table(), console=console)
        text = console.export_text()
        assert "I-BERT" in text
        assert "898.75" in text

    def test_nan_power_ratio_without_power(self):
        """Test a missing power figure gives a NaN ratio, not an error."""
        react = load_profile("react")
        entries = [e.model_copy(update={"power_mw": None}) if e.kind == "nova" else e
                   for e in react.approximator_entries]
        pair = compare(react.model_copy(update={"approximator_entries": entries})).get("per_core_lut", "nova")
        assert math.isnan(pair.power_ratio)
