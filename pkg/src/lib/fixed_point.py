"""
Fixed-point words for the 257-bit broadcast link.

Slopes, biases, breakpoints and PE outputs travel as two's-complement words.
The default is signed Q5.10 in 16 bits, so 8 slope/bias pairs plus the tag
bit fill the 257-bit link. Every hardware model (NoC routers, LUT banks) and
the direct oracle share the arithmetic below, which is what makes their
outputs bit-comparable.
"""
from typing import Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

IntLike = Union[int, np.ndarray]
RealLike = Union[float, np.ndarray]


class FixedPointFormat(BaseModel):
    """Two's-complement fixed-point word format."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    total_bits: int = Field(default=16, description="Word width in bits")
    frac_bits: int = Field(default=10, description="Fractional bits (binary point position)")
    signed: bool = Field(default=True, description="Two's-complement signed words")

    @model_validator(mode="after")
    def _check_widths(self) -> "FixedPointFormat":
        if not (0 <= self.frac_bits < self.total_bits <= 32):
            raise ValueError(
                f"Invalid fixed-point format: need 0 <= frac_bits < total_bits <= 32, "
                f"got frac_bits={self.frac_bits}, total_bits={self.total_bits}"
            )
        return self

    @property
    def scale(self) -> int:
        return 1 << self.frac_bits

    @property
    def min_int(self) -> int:
        return -(1 << (self.total_bits - 1)) if self.signed else 0

    @property
    def max_int(self) -> int:
        if self.signed:
            return (1 << (self.total_bits - 1)) - 1
        return (1 << self.total_bits) - 1

    def label(self) -> str:
        """Short Q-notation label, e.g. 'Q5.10' or 'UQ6.10'."""
        int_bits = self.total_bits - self.frac_bits - (1 if self.signed else 0)
        prefix = "Q" if self.signed else "UQ"
        return f"{prefix}{int_bits}.{self.frac_bits}"


DEFAULT_FORMAT = FixedPointFormat()


def saturate(value: IntLike, fmt: FixedPointFormat) -> IntLike:
    """Clamp integer word(s) to the representable range of `fmt`."""
    if isinstance(value, np.ndarray):
        return np.clip(value, fmt.min_int, fmt.max_int).astype(np.int64)
    return max(fmt.min_int, min(fmt.max_int, int(value)))


def quantize(x: RealLike, fmt: FixedPointFormat = DEFAULT_FORMAT) -> IntLike:
    """
    Convert real value(s) to fixed-point word(s).

    Rounds x·2^frac_bits to nearest, ties to even, then saturates.

    Args:
        x: Scalar or numpy array of finite reals
        fmt: Target word format

    Returns:
        Python int for scalar input, int64 array for array input
    """
    scaled = np.rint(np.asarray(x, dtype=np.float64) * fmt.scale)
    clipped = np.clip(scaled, fmt.min_int, fmt.max_int).astype(np.int64)
    if np.ndim(x) == 0:
        return int(clipped)
    return clipped


def dequantize(q: IntLike, fmt: FixedPointFormat = DEFAULT_FORMAT) -> RealLike:
    """Convert fixed-point word(s) back to real value(s)."""
    if isinstance(q, np.ndarray):
        return q.astype(np.float64) / fmt.scale
    return q / fmt.scale


def round_shift(value: IntLike, shift: int) -> IntLike:
    """Arithmetic right shift with round-half-to-even on the dropped bits."""
    if shift == 0:
        return value
    quotient = value >> shift
    remainder = value - (quotient << shift)
    half = 1 << (shift - 1)
    round_up = (remainder > half) | ((remainder == half) & ((quotient & 1) == 1))
    if isinstance(value, np.ndarray):
        return quotient + round_up.astype(np.int64)
    return int(quotient) + int(round_up)


def fixed_mac(slope_q: IntLike, x_q: IntLike, bias_q: IntLike, fmt: FixedPointFormat) -> IntLike:
    """
    The approximator MAC: sat(round(slope·x / 2^frac) + bias).

    All operands are words in `fmt`; the product is kept at double width
    before rescaling, as in the PE's MAC unit.
    """
    if isinstance(x_q, np.ndarray) or isinstance(slope_q, np.ndarray):
        product = np.asarray(slope_q, dtype=np.int64) * np.asarray(x_q, dtype=np.int64)
        return saturate(round_shift(product, fmt.frac_bits) + np.asarray(bias_q, dtype=np.int64), fmt)
    product = int(slope_q) * int(x_q)
    return saturate(round_shift(product, fmt.frac_bits) + int(bias_q), fmt)
