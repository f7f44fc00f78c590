"""Tests for fixed-point words and the shared MAC."""

import numpy as np
import pytest
from pydantic import ValidationError

from src.lib.fixed_point import (
    FixedPointFormat,
    dequantize,
    fixed_mac,
    quantize,
    round_shift,
    saturate,
)


class TestFixedPointFormat:
    """Test FixedPointFormat validation and derived ranges."""

    def test_default_is_q5_10(self, q5_10):
        """Test the default format is signed 16-bit with 10 fractional bits."""
        assert q5_10.total_bits == 16
        assert q5_10.frac_bits == 10
        assert q5_10.label() == "Q5.10"
        assert (q5_10.min_int, q5_10.max_int) == (-32768, 32767)

    def test_unsigned_label(self):
        """Test unsigned formats get a UQ label."""
        assert FixedPointFormat(total_bits=16, frac_bits=10, signed=False).label() == "UQ6.10"

    @pytest.mark.parametrize("total_bits,frac_bits", [(16, 16), (8, 9), (40, 10), (16, -1)])
    def test_rejects_impossible_widths(self, total_bits, frac_bits):
        """Test widths with no integer bits or beyond 32 bits are rejected."""
        with pytest.raises(ValidationError):
            FixedPointFormat(total_bits=total_bits, frac_bits=frac_bits)

    def test_rejects_unknown_keys(self):
        """Test typos in a format record fail instead of being ignored."""
        with pytest.raises(ValidationError):
            FixedPointFormat.model_validate({"total_bits": 16, "frac_bit": 10})


class TestQuantize:
    """Test quantize/dequantize rounding and saturation."""

    def test_exact_values(self, q5_10):
        """Test representable values quantize exactly."""
        assert quantize(0.5, q5_10) == 512
        assert quantize(-1.0, q5_10) == -1024
        assert dequantize(512, q5_10) == 0.5

    def test_ties_round_to_even(self, q5_10):
        """Test half-LSB ties go to the even word."""
        assert quantize(1.5 / 1024, q5_10) == 2
        assert quantize(2.5 / 1024, q5_10) == 2
        assert quantize(-1.5 / 1024, q5_10) == -2

    @pytest.mark.parametrize("total_bits,frac_bits", [(16, 10), (16, 8), (12, 6), (24, 16)])
    def test_in_range_error_is_half_lsb(self, total_bits, frac_bits):
        """Test in-range reals come back within half an LSB."""
        fmt = FixedPointFormat(total_bits=total_bits, frac_bits=frac_bits)
        lo, hi = fmt.min_int / fmt.scale, fmt.max_int / fmt.scale
        x = np.random.default_rng(5).uniform(lo, hi, size=10_000)
        error = np.abs(dequantize(quantize(x, fmt), fmt) - x)
        assert error.max() <= 2.0 ** -(frac_bits + 1)

    def test_saturates(self, q5_10):
        """Test out-of-range reals clamp to the extreme words."""
        assert quantize(100.0, q5_10) == 32767
        assert quantize(-100.0, q5_10) == -32768

    def test_array_input_returns_int64(self, q5_10):
        """Test arrays come back as int64 words of the same shape."""
        words = quantize(np.array([[0.0, 0.25], [1.0, -0.5]]), q5_10)
        assert words.dtype == np.int64
        assert words.tolist() == [[0, 256], [1024, -512]]

    def test_scalar_input_returns_int(self, q5_10):
        """Test scalars stay Python ints."""
        assert isinstance(quantize(0.3, q5_10), int)

    def test_saturate_array(self, q5_10):
        """Test saturate clamps arrays element-wise."""
        assert saturate(np.array([40000, -40000, 7]), q5_10).tolist() == [32767, -32768, 7]


class TestRoundShift:
    """Test the rounding right shift used by the MAC."""

    @pytest.mark.parametrize("value,expected", [(3, 2), (5, 2), (-3, -2), (7, 4), (4, 2), (-5, -2)])
    def test_half_to_even(self, value, expected):
        """Test dropped halves round to the even quotient."""
        assert round_shift(value, 1) == expected

    def test_zero_shift_is_identity(self):
        """Test a zero shift returns the value unchanged."""
        assert round_shift(1234, 0) == 1234

    def test_array_matches_scalar(self):
        """Test vectorised shifting agrees with the scalar path."""
        values = np.arange(-40, 41, dtype=np.int64)
        assert round_shift(values, 3).tolist() == [round_shift(int(v), 3) for v in values]


class TestFixedMac:
    """Test sat(round(a*x / 2^f) + b)."""

    def test_simple_product(self, q5_10):
        """Test 0.5 * 1.0 + 0.25 = 0.75."""
        assert fixed_mac(512, 1024, 256, q5_10) == 768

    def test_saturates_result(self, q5_10):
        """Test an overflowing product saturates."""
        assert fixed_mac(30000, 30000, 0, q5_10) == 32767

    def test_array_operands(self, q5_10):
        """Test mixed array operands broadcast."""
        out = fixed_mac(np.array([512, 1024]), np.array([1024, -1024]), np.array([0, 0]), q5_10)
        assert out.tolist() == [512, -1024]
