"""
Piecewise-linear approximator payload and its evaluation.

B breakpoints d_1 < ... < d_B define B segments: segment i covers
[d_i, d_{i+1}) with d_{B+1} = +inf, and inputs below d_1 clamp to segment 1.
Lookup addresses are the 1-based segment indices the comparators produce.
"""
import bisect
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, Optional, Tuple, Union

import numpy as np

from src.lib.artifact_store import ArtifactStore
from src.lib.errors import InvalidArgumentError
from src.lib.fixed_point import FixedPointFormat, fixed_mac, quantize

RealLike = Union[float, np.ndarray]
AddressLike = Union[int, np.ndarray]

MAX_HARDWARE_BREAKPOINTS = 16


@dataclass(frozen=True)
class PiecewiseLinearFn:
    """Breakpoints plus per-segment slope and bias."""

    function_id: str
    breakpoints: Tuple[float, ...]
    slopes: Tuple[float, ...]
    biases: Tuple[float, ...]
    domain: Tuple[float, float]

    def __post_init__(self):
        object.__setattr__(self, "breakpoints", tuple(float(d) for d in self.breakpoints))
        object.__setattr__(self, "slopes", tuple(float(a) for a in self.slopes))
        object.__setattr__(self, "biases", tuple(float(b) for b in self.biases))
        object.__setattr__(self, "domain", (float(self.domain[0]), float(self.domain[1])))

        count = len(self.breakpoints)
        if count < 1:
            raise InvalidArgumentError("A piecewise-linear function needs at least one breakpoint")
        if len(self.slopes) != count or len(self.biases) != count:
            raise InvalidArgumentError(
                f"Length mismatch: {count} breakpoints, {len(self.slopes)} slopes, {len(self.biases)} biases"
            )
        values = self.breakpoints + self.slopes + self.biases + self.domain
        if not all(math.isfinite(v) for v in values):
            raise InvalidArgumentError("Breakpoints, slopes, biases and domain must be finite")
        if any(b <= a for a, b in zip(self.breakpoints, self.breakpoints[1:])):
            raise InvalidArgumentError(f"Breakpoints must be strictly increasing: {self.breakpoints}")
        if not self.domain[0] < self.domain[1]:
            raise InvalidArgumentError(f"Degenerate domain {self.domain}")

    @property
    def segment_count(self) -> int:
        return len(self.breakpoints)

    @property
    def is_hardware_mappable(self) -> bool:
        return self.segment_count <= MAX_HARDWARE_BREAKPOINTS

    def to_record(self, fmt: Optional[FixedPointFormat] = None) -> Dict[str, Any]:
        """
        Exchange record with a stable field order.

        When `fmt` is given the record also carries the quantized words the
        mapper would load into the broadcast registers or LUT banks.
        """
        record: Dict[str, Any] = {
            "function_id": self.function_id,
            "domain": list(self.domain),
            "breakpoints": list(self.breakpoints),
            "slopes": list(self.slopes),
            "biases": list(self.biases),
            "fixed_point": fmt.model_dump() if fmt is not None else None,
        }
        if fmt is not None:
            words = quantize_pwl(self, fmt)
            record["words"] = {
                "breakpoints": list(words.breakpoints_q),
                "slopes": list(words.slopes_q),
                "biases": list(words.biases_q),
            }
        return record

    @classmethod
    def from_record(cls, record: Dict[str, Any]) -> Tuple["PiecewiseLinearFn", Optional[FixedPointFormat]]:
        """Parse an exchange record; returns the function and its attached format (if any)."""
        try:
            pwl = cls(
                function_id=record["function_id"],
                breakpoints=record["breakpoints"],
                slopes=record["slopes"],
                biases=record["biases"],
                domain=tuple(record["domain"]),
            )
        except KeyError as e:
            raise InvalidArgumentError(f"PWL record is missing field {e}") from e
        fmt_data = record.get("fixed_point")
        fmt = FixedPointFormat(**fmt_data) if fmt_data else None
        if fmt is not None and "words" in record:
            words = quantize_pwl(pwl, fmt)
            stored = record["words"]
            if (list(words.breakpoints_q) != stored["breakpoints"]
                    or list(words.slopes_q) != stored["slopes"]
                    or list(words.biases_q) != stored["biases"]):
                raise InvalidArgumentError("PWL record words do not match its real-valued coefficients")
        return pwl, fmt


@dataclass(frozen=True)
class QuantizedPwl:
    """A PWL as the hardware sees it: every coefficient is a fixed-point word."""

    fmt: FixedPointFormat
    breakpoints_q: Tuple[int, ...]
    slopes_q: Tuple[int, ...]
    biases_q: Tuple[int, ...]

    @property
    def segment_count(self) -> int:
        return len(self.breakpoints_q)

    def lookup_address(self, x_q: AddressLike) -> AddressLike:
        """Comparator bank on words; quantization may merge breakpoints, later segment wins."""
        if isinstance(x_q, np.ndarray):
            addresses = np.searchsorted(np.asarray(self.breakpoints_q, dtype=np.int64), x_q, side="right")
            return np.maximum(addresses, 1)
        return max(1, bisect.bisect_right(self.breakpoints_q, int(x_q)))

    def pair(self, address: int) -> Tuple[int, int]:
        """(slope word, bias word) for a 1-based address."""
        return self.slopes_q[address - 1], self.biases_q[address - 1]


def quantize_pwl(pwl: PiecewiseLinearFn, fmt: FixedPointFormat) -> QuantizedPwl:
    """Quantize every coefficient of `pwl` into `fmt` words."""
    return QuantizedPwl(
        fmt=fmt,
        breakpoints_q=tuple(int(q) for q in quantize(np.asarray(pwl.breakpoints), fmt)),
        slopes_q=tuple(int(q) for q in quantize(np.asarray(pwl.slopes), fmt)),
        biases_q=tuple(int(q) for q in quantize(np.asarray(pwl.biases), fmt)),
    )


def lookup_address(pwl: PiecewiseLinearFn, x: RealLike) -> AddressLike:
    """
    Segment index i (1-based) with d_i <= x < d_{i+1}; x < d_1 clamps to 1.

    Args:
        pwl: The piecewise-linear function
        x: Scalar or numpy array

    Returns:
        int for scalar input, int64 array for array input
    """
    if np.ndim(x) == 0:
        return max(1, bisect.bisect_right(pwl.breakpoints, float(x)))
    addresses = np.searchsorted(np.asarray(pwl.breakpoints), np.asarray(x, dtype=np.float64), side="right")
    return np.maximum(addresses, 1)


def eval_pwl(pwl: PiecewiseLinearFn, x: RealLike) -> RealLike:
    """Evaluate a_i·x + b_i on the segment chosen by `lookup_address`."""
    address = lookup_address(pwl, x)
    if np.ndim(x) == 0:
        return pwl.slopes[address - 1] * float(x) + pwl.biases[address - 1]
    slopes = np.asarray(pwl.slopes)[address - 1]
    biases = np.asarray(pwl.biases)[address - 1]
    return slopes * np.asarray(x, dtype=np.float64) + biases


def eval_pwl_fixed(pwl: Union[PiecewiseLinearFn, QuantizedPwl], x: RealLike,
                   fmt: Optional[FixedPointFormat] = None) -> AddressLike:
    """
    Bit-exact fixed-point evaluation: the oracle the NoC and LUT models must match.

    The input is quantized, compared against quantized breakpoints, and the
    selected slope/bias words go through `fixed_mac`.
    """
    if isinstance(pwl, QuantizedPwl):
        words = pwl
    else:
        if fmt is None:
            raise InvalidArgumentError("eval_pwl_fixed needs a FixedPointFormat for a real-valued PWL")
        words = quantize_pwl(pwl, fmt)
    x_q = quantize(x, words.fmt)
    address = words.lookup_address(x_q)
    if isinstance(x_q, np.ndarray):
        slopes = np.asarray(words.slopes_q, dtype=np.int64)[address - 1]
        biases = np.asarray(words.biases_q, dtype=np.int64)[address - 1]
        return fixed_mac(slopes, x_q, biases, words.fmt)
    slope_q, bias_q = words.pair(address)
    return fixed_mac(slope_q, x_q, bias_q, words.fmt)


def single_segment(function_id: str, slope: float, bias: float,
                   domain: Tuple[float, float], breakpoint: Optional[float] = None) -> PiecewiseLinearFn:
    """One-segment PWL; the breakpoint defaults to the domain's lower bound."""
    return PiecewiseLinearFn(
        function_id=function_id,
        breakpoints=(domain[0] if breakpoint is None else breakpoint,),
        slopes=(slope,),
        biases=(bias,),
        domain=domain,
    )


def pwl_to_record(pwl: PiecewiseLinearFn, fmt: Optional[FixedPointFormat] = None) -> Dict[str, Any]:
    return pwl.to_record(fmt)


def pwl_from_record(record: Dict[str, Any]) -> Tuple[PiecewiseLinearFn, Optional[FixedPointFormat]]:
    return PiecewiseLinearFn.from_record(record)


def save_pwl(store: ArtifactStore, relative: str, pwl: PiecewiseLinearFn,
             fmt: Optional[FixedPointFormat] = None) -> Path:
    """Write a PWL exchange file through the artifact store."""
    return store.write_json(relative, pwl_to_record(pwl, fmt))


def load_pwl(path: Union[str, Path]) -> Tuple[PiecewiseLinearFn, Optional[FixedPointFormat]]:
    """Read a PWL exchange file written by `save_pwl`."""
    with open(path, encoding="utf-8") as handle:
        return pwl_from_record(json.load(handle))
