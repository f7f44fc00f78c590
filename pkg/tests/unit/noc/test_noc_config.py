"""Tests for NovaNocConfig."""

import pytest
from pydantic import ValidationError

from src.noc.config import NovaNocConfig


class TestNovaNocConfig:
    """Test NoC config validation and derived values."""

    def test_segments(self):
        """Test routers beyond the single-cycle reach add segments."""
        assert NovaNocConfig(num_routers=10, neurons_per_router=8, base_freq_mhz=1000.0).segments == 1
        assert NovaNocConfig(num_routers=11, neurons_per_router=8, base_freq_mhz=1000.0).segments == 2
        assert not NovaNocConfig(num_routers=11, neurons_per_router=8, base_freq_mhz=1000.0).single_cycle

    def test_noc_frequency(self):
        """Test the NoC clock is the base clock times the multiplier."""
        cfg = NovaNocConfig(num_routers=4, neurons_per_router=8, base_freq_mhz=700.0, noc_freq_multiplier=2)
        assert cfg.noc_freq_mhz == 1400.0
        assert cfg.line_length_mm == 4.0

    @pytest.mark.parametrize("field,value", [("num_routers", 0), ("neurons_per_router", 0),
                                             ("link_pairs_per_cycle", 4), ("noc_freq_multiplier", 0)])
    def test_rejects_invalid(self, field, value):
        """Test out-of-range fields are rejected."""
        data = {"num_routers": 4, "neurons_per_router": 8, "base_freq_mhz": 1000.0, field: value}
        with pytest.raises(ValidationError):
            NovaNocConfig(**data)

    def test_rejects_unknown_keys(self):
        """Test unknown keys are rejected."""
        with pytest.raises(ValidationError):
            NovaNocConfig(num_routers=4, neurons_per_router=8, base_freq_mhz=1000.0, routers=4)
