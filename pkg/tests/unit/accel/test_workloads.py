"""Tests for workload query counts."""

import pytest

from src.accel.workloads import known_workloads, load_workload, nonlinear_query_count
from src.lib.errors import ConfigError, UnknownNameError


class TestNonlinearQueryCount:
    """Test analytic query counts."""

    def test_bert_tiny_seq_128(self):
        """Test bert_tiny counts at its catalog sequence length."""
        counts = nonlinear_query_count(load_workload("bert_tiny"))
        assert counts.softmax_elements == 65536
        assert counts.softmax_rows == 512
        assert counts.gelu_elements == 131072
        assert counts.layernorm_elements == 0
        assert counts.total == 197120

    def test_seq_len_override(self):
        """Test softmax grows with the square of the sequence length."""
        assert load_workload("bert_tiny", seq_len=1024).nonlinear_ops.softmax_elements == 4194304

    @pytest.mark.parametrize("name", ["bert_tiny", "mobilebert_base", "roberta"])
    def test_seq_len_sweep_scaling(self, name):
        """Test doubling seq_len quadruples softmax and doubles GELU and row counts."""
        for seq_len in (16, 32, 64, 128, 256, 512):
            single = nonlinear_query_count(load_workload(name, seq_len=seq_len, layernorm=True))
            double = nonlinear_query_count(load_workload(name, seq_len=2 * seq_len, layernorm=True))
            assert double.softmax_elements == 4 * single.softmax_elements
            assert double.softmax_rows == 2 * single.softmax_rows
            assert double.gelu_elements == 2 * single.gelu_elements
            assert double.layernorm_elements == 2 * single.layernorm_elements

    def test_layernorm(self):
        """Test LayerNorm adds two evaluations per token per layer."""
        counts = nonlinear_query_count(load_workload("bert_tiny", layernorm=True))
        assert counts.layernorm_elements == 512
        assert counts.by_function()["reciprocal"] == 1024

    def test_to_dict(self):
        """Test the dict form includes the total."""
        counts = nonlinear_query_count(load_workload("bert_mini"))
        assert counts.to_dict()["total"] == counts.total

    def test_with_seq_len(self):
        """Test with_seq_len returns a modified copy."""
        spec = load_workload("roberta")
        assert spec.with_seq_len(64).seq_len == 64
        assert spec.seq_len == 128

    def test_non_positive_seq_len_rejected(self):
        """Test a seq_len override goes through the same validation as the catalog."""
        with pytest.raises(ConfigError, match="seq_len"):
            load_workload("bert_tiny", seq_len=0)


class TestCatalog:
    """Test workload catalog access."""

    def test_known(self):
        """Test the five benchmarks ship."""
        assert known_workloads() == ["bert_mini", "bert_tiny", "mobilebert_base", "mobilebert_tiny", "roberta"]

    def test_unknown(self):
        """Test unknown names list the known ones."""
        with pytest.raises(UnknownNameError, match="bert_tiny"):
            load_workload("gpt2")
