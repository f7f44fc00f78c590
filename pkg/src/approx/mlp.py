"""
Two-layer MLP approximator and its piecewise-linear extraction.

The MLP is x -> v_0 + sum_i v_i * ReLU(w_i * x + c_i). Every hidden unit
contributes one kink at x = -c_i / w_i, so H hidden units give a continuous
PWL with at most H breakpoints. The mapper trains it at compile time and
loads the extracted slopes/biases into the NoC broadcast registers.
"""
import logging
import math
from dataclasses import dataclass
from typing import Callable, Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from src.approx.functions import default_domain, resolve_function
from src.approx.pwl import PiecewiseLinearFn
from src.lib.errors import InvalidArgumentError, TrainingDivergenceError

logger = logging.getLogger(__name__)

Interval = Tuple[float, float]

CURVATURE_EPS = 1e-9


class TrainConfig(BaseModel):
    """Hyperparameters for compile-time MLP training."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    samples: int = Field(default=4096, ge=2, description="Uniform training points over the domain")
    iterations: int = Field(default=2000, ge=0, description="Full-batch optimisation steps")
    learning_rate: float = Field(default=1e-3, gt=0.0, description="Fixed Adam step size")
    seed: int = Field(default=0, description="Seed for kink-placement jitter")
    curvature_floor: float = Field(
        default=0.05, ge=0.0, le=1.0,
        description="Minimum kink density as a fraction of the peak curvature density",
    )


@dataclass(frozen=True)
class MlpApproximator:
    """Weights of the 1-input, H-hidden, 1-output ReLU network."""

    hidden_weights: Tuple[float, ...]
    hidden_biases: Tuple[float, ...]
    output_weights: Tuple[float, ...]
    output_bias: float

    def __post_init__(self):
        h = len(self.hidden_weights)
        if h < 1:
            raise InvalidArgumentError("MLP needs at least one hidden unit")
        if len(self.hidden_biases) != h or len(self.output_weights) != h:
            raise InvalidArgumentError("MLP weight vectors must all have length H")
        values = self.hidden_weights + self.hidden_biases + self.output_weights + (self.output_bias,)
        if not all(math.isfinite(v) for v in values):
            raise InvalidArgumentError("MLP weights must be finite")

    @property
    def hidden_size(self) -> int:
        return len(self.hidden_weights)

    def kinks(self) -> np.ndarray:
        """Kink positions of units with non-zero input weight (unsorted)."""
        w = np.asarray(self.hidden_weights)
        c = np.asarray(self.hidden_biases)
        active = w != 0.0
        return -c[active] / w[active]


def mlp_eval(mlp: MlpApproximator, x: Union[float, np.ndarray]) -> Union[float, np.ndarray]:
    """Forward pass, scalar or vectorised."""
    xs = np.atleast_1d(np.asarray(x, dtype=np.float64))
    hidden = np.maximum(np.outer(xs, mlp.hidden_weights) + np.asarray(mlp.hidden_biases), 0.0)
    out = hidden @ np.asarray(mlp.output_weights) + mlp.output_bias
    if np.ndim(x) == 0:
        return float(out[0])
    return out


def _check_domain(domain: Interval) -> Interval:
    lo, hi = float(domain[0]), float(domain[1])
    if not (math.isfinite(lo) and math.isfinite(hi) and lo < hi):
        raise InvalidArgumentError(f"Degenerate or non-finite domain {domain}")
    return lo, hi


def place_kinks(xs: np.ndarray, ys: np.ndarray, count: int, floor: float,
                rng: Optional[np.random.Generator] = None) -> np.ndarray:
    """
    Curvature-equalised kink placement.

    Kink density follows sqrt(|f''|), floored at `floor` x its peak, which
    equalises the max error per segment. The first kink sits on xs[0].
    """
    curvature = np.abs(np.gradient(np.gradient(ys, xs), xs))
    # nested gradients leave roundoff on linear targets
    if curvature.max() <= CURVATURE_EPS * max(1.0, float(np.abs(ys).max())):
        density = np.ones_like(xs)
    else:
        density = np.sqrt(curvature)
        density = np.maximum(density, floor * float(density.max()))

    cumulative = np.concatenate([[0.0], np.cumsum(0.5 * (density[1:] + density[:-1]) * np.diff(xs))])
    cumulative /= cumulative[-1]
    kinks = np.interp(np.arange(count) / count, cumulative, xs)

    if rng is not None and count > 1:
        spacing = np.diff(np.append(kinks, xs[-1]))
        jitter = rng.uniform(-0.05, 0.05, size=count) * spacing
        jitter[0] = 0.0
        kinks = np.sort(kinks + jitter)
    return kinks


def _solve_output_layer(xs: np.ndarray, ys: np.ndarray, w: np.ndarray, c: np.ndarray) -> Tuple[np.ndarray, float]:
    hidden = np.maximum(np.outer(xs, w) + c, 0.0)
    design = np.hstack([hidden, np.ones((xs.size, 1))])
    solution, *_ = np.linalg.lstsq(design, ys, rcond=None)
    return solution[:-1], float(solution[-1])


def fit_mlp(function: Union[str, Callable], breakpoint_count: int,
            domain: Optional[Interval] = None,
            train_config: Optional[TrainConfig] = None) -> MlpApproximator:
    """
    Train the MLP whose hidden units become the PWL breakpoints.

    Kinks start from curvature-equalised placement (seeded jitter), the
    output layer starts from its least-squares solution, then full-batch
    Adam refines every parameter on the squared error. The first unit is
    pinned at the domain's lower bound so the extracted PWL covers the whole
    domain; the other kinks are projected back into the domain after every
    step. The lowest-loss snapshot is returned.

    Args:
        function: Function id (exp, gelu, ...) or a vectorised callable
        breakpoint_count: Hidden units H, i.e. the breakpoint budget
        domain: Fitting interval; defaults to the function's default domain
        train_config: Training hyperparameters

    Returns:
        Trained MlpApproximator with hidden_size == breakpoint_count

    Raises:
        InvalidArgumentError: breakpoint_count < 1 or degenerate domain
        TrainingDivergenceError: Loss became non-finite
    """
    if breakpoint_count < 1:
        raise InvalidArgumentError(f"breakpoint_count must be >= 1, got {breakpoint_count}")
    name, fn = resolve_function(function)
    if domain is None:
        domain = default_domain(name)
    lo, hi = _check_domain(domain)
    cfg = train_config or TrainConfig()

    xs = np.linspace(lo, hi, cfg.samples)
    ys = np.asarray(fn(xs), dtype=np.float64)
    rng = np.random.default_rng(cfg.seed)

    kinks = place_kinks(xs, ys, breakpoint_count, cfg.curvature_floor, rng)
    w = np.ones(breakpoint_count)
    c = -kinks
    v, v0 = _solve_output_layer(xs, ys, w, c)

    params = [w, c, v, np.array([v0])]
    first_moment = [np.zeros_like(p) for p in params]
    second_moment = [np.zeros_like(p) for p in params]
    beta1, beta2, eps = 0.9, 0.999, 1e-12
    upper = np.nextafter(hi, lo)

    best_loss = math.inf
    best = [p.copy() for p in params]
    n = xs.size

    for step in range(cfg.iterations + 1):
        pre_activation = np.outer(xs, w) + c
        hidden = np.maximum(pre_activation, 0.0)
        residual = hidden @ v + v0 - ys
        loss = float(np.mean(residual ** 2))
        if not math.isfinite(loss):
            raise TrainingDivergenceError(
                f"Non-finite loss at step {step} fitting {name} with B={breakpoint_count}", seed=cfg.seed
            )
        if loss < best_loss:
            best_loss = loss
            best = [w.copy(), c.copy(), v.copy(), np.array([v0])]
        if step == cfg.iterations:
            break

        grad_out = 2.0 * residual / n
        grad_hidden = np.outer(grad_out, v) * (pre_activation > 0.0)
        grads = [
            grad_hidden.T @ xs,
            grad_hidden.sum(axis=0),
            hidden.T @ grad_out,
            np.array([grad_out.sum()]),
        ]
        # unit 0 carries the pinned kink at the domain's lower bound
        grads[0][0] = 0.0
        grads[1][0] = 0.0

        t = step + 1
        for p, g, m, s in zip(params, grads, first_moment, second_moment):
            m *= beta1
            m += (1.0 - beta1) * g
            s *= beta2
            s += (1.0 - beta2) * g * g
            p -= cfg.learning_rate * (m / (1.0 - beta1 ** t)) / (np.sqrt(s / (1.0 - beta2 ** t)) + eps)
        v0 = float(params[3][0])

        moving = w != 0.0
        positions = np.clip(-c[moving] / w[moving], lo, upper)
        c[moving] = -w[moving] * positions

        if logger.isEnabledFor(logging.DEBUG) and step % 500 == 0:
            logger.debug(f"fit_mlp {name} B={breakpoint_count} step {step}: loss={loss:.3e}")

    w_best, c_best, v_best, v0_best = best
    logger.info(f"Trained MLP for {name} with B={breakpoint_count} on [{lo}, {hi}]: mse={best_loss:.3e}")
    return MlpApproximator(
        hidden_weights=tuple(float(x) for x in w_best),
        hidden_biases=tuple(float(x) for x in c_best),
        output_weights=tuple(float(x) for x in v_best),
        output_bias=float(v0_best[0]),
    )


def _segment_line(mlp: MlpApproximator, sample_x: float) -> Tuple[float, float]:
    """Slope and bias of the MLP's linear piece containing `sample_x`."""
    w = np.asarray(mlp.hidden_weights)
    c = np.asarray(mlp.hidden_biases)
    v = np.asarray(mlp.output_weights)
    active = (w * sample_x + c) > 0.0
    slope = float(np.sum(v[active] * w[active]))
    bias = mlp.output_bias + float(np.sum(v[active] * c[active]))
    return slope, bias


def extract_pwl(mlp: MlpApproximator, domain: Interval, function_id: str = "custom") -> PiecewiseLinearFn:
    """
    Convert MLP kinks inside `domain` into a PiecewiseLinearFn.

    Kinks in [lo, hi) are sorted and de-duplicated; each segment's slope and
    bias are summed over the hidden units active on it. With no in-domain
    kink the result is a single segment anchored at the domain's lower bound.
    The PWL equals the MLP for every x >= d_1.
    """
    lo, hi = _check_domain(domain)
    kinks = np.sort(mlp.kinks())
    kinks = kinks[(kinks >= lo) & (kinks < hi)]

    breakpoints = []
    for k in kinks:
        if breakpoints and abs(k - breakpoints[-1]) <= 1e-9 * max(1.0, abs(k)):
            continue
        breakpoints.append(float(k))
    dropped = mlp.hidden_size - len(breakpoints)
    if dropped:
        logger.debug(f"extract_pwl dropped {dropped} coincident or out-of-domain kinks")

    if not breakpoints:
        slope, bias = _segment_line(mlp, 0.5 * (lo + hi))
        return PiecewiseLinearFn(function_id, (lo,), (slope,), (bias,), (lo, hi))

    slopes, biases = [], []
    for i, start in enumerate(breakpoints):
        end = breakpoints[i + 1] if i + 1 < len(breakpoints) else (hi if hi > start else start + 1.0)
        slope, bias = _segment_line(mlp, 0.5 * (start + end))
        slopes.append(slope)
        biases.append(bias)
    return PiecewiseLinearFn(function_id, tuple(breakpoints), tuple(slopes), tuple(biases), (lo, hi))


def fit_mlp_pwl(function: Union[str, Callable], breakpoint_count: int,
                domain: Optional[Interval] = None,
                train_config: Optional[TrainConfig] = None) -> PiecewiseLinearFn:
    """Convenience: train then extract, tagging the PWL with the function id."""
    name, _ = resolve_function(function)
    if domain is None:
        domain = default_domain(name)
    mlp = fit_mlp(function, breakpoint_count, domain, train_config)
    return extract_pwl(mlp, domain, function_id=name)
