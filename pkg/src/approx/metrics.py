"""Approximation error metrics and their CSV rows."""
from dataclasses import dataclass
from typing import Callable, Dict, Iterable, Optional, Tuple, Union

import numpy as np
import pandas as pd

from src.approx.functions import resolve_function
from src.approx.pwl import PiecewiseLinearFn, eval_pwl
from src.lib.errors import InvalidArgumentError

ERROR_CSV_COLUMNS = ["function_id", "method", "B", "domain_lo", "domain_hi", "max_abs", "mean_abs", "rmse", "samples"]


@dataclass(frozen=True)
class ApproxErrorReport:
    """Error of a PWL against the exact function on a uniform grid."""

    function_id: str
    breakpoint_count: int
    max_abs_error: float
    mean_abs_error: float
    rmse: float
    samples: int
    domain: Tuple[float, float]
    method: str = ""

    def to_row(self) -> Dict[str, Union[str, int, float]]:
        return {
            "function_id": self.function_id,
            "method": self.method,
            "B": self.breakpoint_count,
            "domain_lo": self.domain[0],
            "domain_hi": self.domain[1],
            "max_abs": self.max_abs_error,
            "mean_abs": self.mean_abs_error,
            "rmse": self.rmse,
            "samples": self.samples,
        }


def error_metrics(pwl: PiecewiseLinearFn, function: Union[str, Callable],
                  domain: Optional[Tuple[float, float]] = None, samples: int = 4096,
                  method: str = "") -> ApproxErrorReport:
    """
    Max, mean and RMS absolute error of `pwl` against the exact function.

    Args:
        pwl: Approximation to score
        function: Function id or vectorised callable
        domain: Grid interval; defaults to the PWL's own domain
        samples: Grid size, at least 2
        method: Label carried into the CSV row (e.g. "mlp", "direct")
    """
    if samples < 2:
        raise InvalidArgumentError(f"error_metrics needs at least 2 samples, got {samples}")
    name, fn = resolve_function(function)
    lo, hi = domain if domain is not None else pwl.domain
    xs = np.linspace(lo, hi, samples)
    errors = np.abs(eval_pwl(pwl, xs) - np.asarray(fn(xs), dtype=np.float64))
    return ApproxErrorReport(
        function_id=pwl.function_id if name == "custom" else name,
        breakpoint_count=pwl.segment_count,
        max_abs_error=float(errors.max()),
        mean_abs_error=float(errors.mean()),
        rmse=float(np.sqrt(np.mean(errors ** 2))),
        samples=samples,
        domain=(float(lo), float(hi)),
        method=method,
    )


def error_frame(reports: Iterable[ApproxErrorReport]) -> pd.DataFrame:
    """Reports as a DataFrame with the error CSV columns, in the order given."""
    return pd.DataFrame([r.to_row() for r in reports], columns=ERROR_CSV_COLUMNS)
