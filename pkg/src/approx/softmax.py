"""
Softmax built from two PWL approximators: exp and reciprocal.

y_i = pwl_exp(x_i - max(x)), s = sum(y), out_i = y_i * pwl_recip(s).
"""
import logging
from typing import Union

import numpy as np

from src.approx.pwl import PiecewiseLinearFn, eval_pwl
from src.lib.errors import InvalidArgumentError

logger = logging.getLogger(__name__)

RealLike = Union[float, np.ndarray]


def eval_reciprocal(pwl_recip: PiecewiseLinearFn, s: RealLike) -> RealLike:
    """
    1/s through a reciprocal PWL fitted on [lo, hi].

    Values outside the fit domain are range-reduced by a power of two into
    [lo, 2·lo), evaluated, and rescaled; the domain must span an octave for
    that to stay inside it.
    """
    lo, hi = pwl_recip.domain
    values = np.asarray(s, dtype=np.float64)
    if np.any(values <= 0.0):
        raise InvalidArgumentError("Reciprocal PWL needs positive inputs")
    if lo <= 0.0:
        raise InvalidArgumentError(f"Reciprocal fit domain must be positive, got {pwl_recip.domain}")

    inside = (values >= lo) & (values <= hi)
    exponent = np.where(inside, 0.0, np.floor(np.log2(values / lo)))
    if not np.all(inside) and hi < 2.0 * lo:
        raise InvalidArgumentError(f"Reciprocal fit domain {pwl_recip.domain} is narrower than one octave")
    mantissa = values / np.exp2(exponent)
    result = eval_pwl(pwl_recip, mantissa) / np.exp2(exponent)
    if np.ndim(s) == 0:
        return float(result)
    return result


def approx_softmax(logits: np.ndarray, pwl_exp: PiecewiseLinearFn, pwl_recip: PiecewiseLinearFn) -> np.ndarray:
    """
    Approximate softmax over the last axis.

    Shifted logits are saturated at the exp fit's lower bound and exp
    outputs are clamped at zero, so far-negative entries contribute nothing
    instead of extrapolating the first segment.

    Args:
        logits: Vector, or a 2-D batch of row vectors
        pwl_exp: exp approximator fitted on [-R, 0]
        pwl_recip: reciprocal approximator

    Returns:
        Array with the same shape as `logits`

    Raises:
        InvalidArgumentError: Empty input
    """
    x = np.asarray(logits, dtype=np.float64)
    if x.size == 0 or x.ndim == 0 or x.shape[-1] == 0:
        raise InvalidArgumentError("approx_softmax needs a non-empty logit vector")

    shifted = x - x.max(axis=-1, keepdims=True)
    shifted = np.maximum(shifted, pwl_exp.domain[0])
    y = np.maximum(eval_pwl(pwl_exp, shifted.ravel()).reshape(shifted.shape), 0.0)
    total = y.sum(axis=-1, keepdims=True)
    return y * eval_reciprocal(pwl_recip, total)


def exact_softmax(logits: np.ndarray) -> np.ndarray:
    """Double-precision softmax over the last axis."""
    x = np.asarray(logits, dtype=np.float64)
    e = np.exp(x - x.max(axis=-1, keepdims=True))
    return e / e.sum(axis=-1, keepdims=True)
