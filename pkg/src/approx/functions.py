"""
Reference (double-precision) implementations of the activation functions
the approximators target, plus their default fitting domains.
"""
import math
from typing import Callable, Dict, Tuple, Union

import numpy as np

from src.lib.errors import DomainError, UnknownNameError

RealLike = Union[float, np.ndarray]
Interval = Tuple[float, float]

_erf = np.vectorize(math.erf, otypes=[np.float64])


def _exp(x: np.ndarray) -> np.ndarray:
    return np.exp(x)


def _gelu(x: np.ndarray) -> np.ndarray:
    return 0.5 * x * (1.0 + _erf(x / math.sqrt(2.0)))


def _tanh(x: np.ndarray) -> np.ndarray:
    return np.tanh(x)


def _sigmoid(x: np.ndarray) -> np.ndarray:
    # tanh form does not overflow for large |x|
    return 0.5 * (1.0 + np.tanh(0.5 * x))


def _reciprocal(x: np.ndarray) -> np.ndarray:
    if np.any(x == 0.0):
        raise DomainError("reciprocal is undefined at x == 0")
    return 1.0 / x


def _identity(x: np.ndarray) -> np.ndarray:
    return x.copy()


EXACT_FUNCTIONS: Dict[str, Callable[[np.ndarray], np.ndarray]] = {
    "exp": _exp,
    "gelu": _gelu,
    "tanh": _tanh,
    "sigmoid": _sigmoid,
    "reciprocal": _reciprocal,
    "identity": _identity,
}

# Ranges where attention workloads evaluate each function. exp is applied
# after max-subtraction; reciprocal is range-reduced into [1, 2).
DEFAULT_DOMAINS: Dict[str, Interval] = {
    "exp": (-8.0, 0.0),
    "gelu": (-4.0, 4.0),
    "tanh": (-6.0, 6.0),
    "sigmoid": (-6.0, 6.0),
    "reciprocal": (1.0, 2.0),
    "identity": (-1.0, 1.0),
}


def resolve_function(function: Union[str, Callable]) -> Tuple[str, Callable[[np.ndarray], np.ndarray]]:
    """
    Resolve a function id (or an arbitrary callable) to (name, vectorised fn).

    Raises:
        UnknownNameError: If a string id is not a supported function
    """
    if callable(function):
        name = getattr(function, "__name__", "custom")
        return ("custom" if name == "<lambda>" else name), function
    if function not in EXACT_FUNCTIONS:
        raise UnknownNameError("function", function, EXACT_FUNCTIONS.keys())
    return function, EXACT_FUNCTIONS[function]


def default_domain(function_id: str) -> Interval:
    """Default fitting domain for a supported function id."""
    if function_id not in DEFAULT_DOMAINS:
        raise UnknownNameError("function", function_id, DEFAULT_DOMAINS.keys())
    return DEFAULT_DOMAINS[function_id]


def eval_exact(function_id: str, x: RealLike) -> RealLike:
    """
    Evaluate the exact reference function.

    Args:
        function_id: One of exp, gelu, tanh, sigmoid, reciprocal, identity
        x: Finite scalar or numpy array

    Returns:
        float for scalar input, ndarray for array input

    Raises:
        DomainError: reciprocal evaluated at 0
        UnknownNameError: unsupported function id
    """
    _, fn = resolve_function(function_id)
    values = fn(np.asarray(x, dtype=np.float64))
    if np.ndim(x) == 0:
        return float(values)
    return values
