"""
Brute-force PWL fitter used as the accuracy oracle for the MLP mapper.

Dense sampling plus per-segment least squares. The default strategy searches
breakpoints over a candidate grid with a minimax dynamic program; the
`uniform` strategy places them evenly. Output may be discontinuous.
"""
import logging
from typing import Callable, Literal, Optional, Tuple, Union

import numpy as np

from src.approx.functions import default_domain, resolve_function
from src.approx.pwl import PiecewiseLinearFn
from src.lib.errors import InvalidArgumentError

logger = logging.getLogger(__name__)

Interval = Tuple[float, float]
Strategy = Literal["dp", "uniform"]

DEFAULT_CANDIDATES = 256


def _line_fit(x: np.ndarray, y: np.ndarray) -> Tuple[float, float]:
    """Least-squares slope and bias of y over x."""
    if x.size == 1:
        return 0.0, float(y[0])
    design = np.column_stack([x, np.ones_like(x)])
    (slope, bias), *_ = np.linalg.lstsq(design, y, rcond=None)
    return float(slope), float(bias)


def _segment_costs(xs: np.ndarray, ys: np.ndarray, candidates: np.ndarray) -> np.ndarray:
    """
    cost[i, j] = max |residual| of the LSQ line over samples
    candidates[i]..candidates[j] inclusive; inf where j <= i.
    """
    count = candidates.size
    cost = np.full((count, count), np.inf)
    for i in range(count - 1):
        start = candidates[i]
        x_seg = xs[start:] - xs[start]
        y_seg = ys[start:]
        sx = np.cumsum(x_seg)
        sy = np.cumsum(y_seg)
        sxx = np.cumsum(x_seg * x_seg)
        sxy = np.cumsum(x_seg * y_seg)

        ends = candidates[i + 1:] - start
        n = ends + 1.0
        denom = n * sxx[ends] - sx[ends] ** 2
        slope = (n * sxy[ends] - sx[ends] * sy[ends]) / denom
        intercept = (sy[ends] - slope * sx[ends]) / n

        residual = np.abs(slope[:, None] * x_seg[None, :] + intercept[:, None] - y_seg[None, :])
        residual[np.arange(x_seg.size)[None, :] > ends[:, None]] = 0.0
        cost[i, i + 1:] = residual.max(axis=1)
    return cost


def _minimax_partition(cost: np.ndarray, segments: int) -> list:
    """Candidate indices where each of `segments` pieces starts, minimising the worst piece."""
    count = cost.shape[0]
    best = cost[0].copy()
    choice = np.zeros((segments, count), dtype=np.int64)
    for k in range(1, segments):
        # best[i] = worst error covering 0..i with k pieces; extend with piece i..j
        candidates = np.maximum(best[:, None], cost)
        choice[k] = np.argmin(candidates, axis=0)
        best = candidates[choice[k], np.arange(count)]

    starts = []
    end = count - 1
    for k in range(segments - 1, 0, -1):
        end = int(choice[k, end])
        starts.append(end)
    starts.append(0)
    return starts[::-1]


def fit_direct(function: Union[str, Callable], breakpoint_count: int,
               domain: Optional[Interval] = None, samples: int = 4096,
               strategy: Strategy = "dp", candidates: int = DEFAULT_CANDIDATES) -> PiecewiseLinearFn:
    """
    Fit a PWL by dense sampling and per-segment least squares.

    Args:
        function: Function id or vectorised callable
        breakpoint_count: Number of segments B
        domain: Fitting interval; defaults to the function's default domain
        samples: Uniform sample count, at least 10 x B
        strategy: "dp" for minimax breakpoint search, "uniform" for even spacing
        candidates: Candidate grid intervals for the "dp" search

    Returns:
        PiecewiseLinearFn whose first breakpoint is the domain's lower bound

    Raises:
        InvalidArgumentError: Too few samples, B < 1, or unknown strategy
    """
    if breakpoint_count < 1:
        raise InvalidArgumentError(f"breakpoint_count must be >= 1, got {breakpoint_count}")
    if samples < 10 * breakpoint_count:
        raise InvalidArgumentError(
            f"fit_direct needs at least {10 * breakpoint_count} samples for B={breakpoint_count}, got {samples}"
        )
    name, fn = resolve_function(function)
    if domain is None:
        domain = default_domain(name)
    lo, hi = float(domain[0]), float(domain[1])
    if not lo < hi:
        raise InvalidArgumentError(f"Degenerate domain {domain}")

    xs = np.linspace(lo, hi, samples)
    ys = np.asarray(fn(xs), dtype=np.float64)

    if strategy == "uniform":
        edges = np.linspace(lo, hi, breakpoint_count + 1)
        starts = [int(np.searchsorted(xs, edge, side="left")) for edge in edges[:-1]]
    elif strategy == "dp":
        grid = np.unique(np.rint(np.linspace(0, samples - 1, min(samples, candidates + 1))).astype(np.int64))
        if grid.size - 1 < breakpoint_count:
            raise InvalidArgumentError(
                f"Candidate grid of {grid.size} points cannot hold {breakpoint_count} segments"
            )
        cost = _segment_costs(xs, ys, grid)
        starts = [int(grid[i]) for i in _minimax_partition(cost, breakpoint_count)]
    else:
        raise InvalidArgumentError(f"Unknown fit strategy '{strategy}'")

    bounds = starts + [samples]
    slopes, biases = [], []
    for start, stop in zip(bounds[:-1], bounds[1:]):
        # segments share their closing sample so every piece has at least two points
        stop = min(stop + 1, samples)
        slope, bias = _line_fit(xs[start:stop], ys[start:stop])
        slopes.append(slope)
        biases.append(bias)

    pwl = PiecewiseLinearFn(
        function_id=name,
        breakpoints=tuple(float(xs[s]) for s in starts),
        slopes=tuple(slopes),
        biases=tuple(biases),
        domain=(lo, hi),
    )
    logger.info(f"fit_direct({name}, B={breakpoint_count}, strategy={strategy}) on [{lo}, {hi}] done")
    return pwl
