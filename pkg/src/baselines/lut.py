"""
LUT-based vector-unit baselines.

per_neuron: every neuron owns a single-ported bank holding all slope/bias
pairs. per_core: one multi-ported bank shared by the core's neurons; when
more lanes look up than there are ports, reads serialise one per port per
cycle. Both take a fetch cycle and a MAC cycle per transaction.
"""
import logging
import math
from dataclasses import dataclass
from typing import Any, Literal, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from src.approx.pwl import PiecewiseLinearFn, quantize_pwl
from src.lib.errors import CapacityError, ConfigError, InvalidArgumentError
from src.lib.fixed_point import DEFAULT_FORMAT, FixedPointFormat, fixed_mac, quantize

logger = logging.getLogger(__name__)

LutKind = Literal["per_neuron", "per_core"]


class LutConfig(BaseModel):
    """One LUT baseline attached to a core."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    kind: LutKind = Field(description="per_neuron or per_core")
    neurons: int = Field(ge=1, description="Neurons served by the core")
    bank_bytes: int = Field(default=64, ge=1, description="Bytes per LUT bank")
    ports: Optional[int] = Field(
        default=None, ge=1, description="Read ports per bank; 1 for per_neuron, defaults to neurons for per_core"
    )
    base_freq_mhz: float = Field(default=1000.0, gt=0.0, description="Core clock")

    @model_validator(mode="before")
    @classmethod
    def _default_ports(cls, data: Any) -> Any:
        if isinstance(data, dict) and data.get("ports") is None:
            data = {**data, "ports": 1 if data.get("kind") == "per_neuron" else data.get("neurons")}
        return data

    @model_validator(mode="after")
    def _check_ports(self) -> "LutConfig":
        if self.kind == "per_neuron" and self.ports != 1:
            raise ValueError("per_neuron banks are single-ported")
        return self

    @property
    def bank_count(self) -> int:
        return self.neurons if self.kind == "per_neuron" else 1

    def concurrent_reads(self) -> int:
        """Lookups the core can serve in one cycle."""
        return self.neurons if self.kind == "per_neuron" else min(self.ports, self.neurons)


@dataclass
class LutStats:
    total_bytes: int
    total_reads: int = 0
    outputs: Optional[np.ndarray] = None
    base_cycles: int = 0


@dataclass(frozen=True)
class LutThroughput:
    total_base_cycles: int
    total_reads: int
    lane_batches: int


def pair_bytes(fmt: FixedPointFormat) -> int:
    """Bytes one slope/bias pair occupies in a bank."""
    return 2 * math.ceil(fmt.total_bits / 8)


def lut_storage_stats(cfg: LutConfig) -> LutStats:
    """Storage footprint only: neurons x bank for per_neuron, one bank for per_core."""
    return LutStats(total_bytes=cfg.bank_count * cfg.bank_bytes)


def _check_capacity(cfg: LutConfig, breakpoint_count: int, fmt: FixedPointFormat) -> None:
    needed = breakpoint_count * pair_bytes(fmt)
    if needed > cfg.bank_bytes:
        raise CapacityError(
            f"B={breakpoint_count} needs {needed} bytes per bank but {cfg.kind} banks hold {cfg.bank_bytes}"
        )


def simulate_lut(cfg: LutConfig, pwl: PiecewiseLinearFn, inputs: np.ndarray,
                 fmt: FixedPointFormat = DEFAULT_FORMAT) -> LutStats:
    """
    Functional and latency model of one LUT transaction per core.

    Args:
        cfg: Baseline configuration
        pwl: Approximator stored in every bank
        inputs: (cores, lanes) PE outputs in real units
        fmt: Word format

    Returns:
        LutStats with outputs bit-identical to eval_pwl_fixed

    Raises:
        CapacityError: The PWL does not fit in one bank
        ConfigError: More lanes than the core has neurons
    """
    _check_capacity(cfg, pwl.segment_count, fmt)
    x = np.asarray(inputs, dtype=np.float64)
    if x.ndim != 2:
        raise InvalidArgumentError(f"inputs must be 2-D (cores, lanes), got shape {x.shape}")
    stats = lut_storage_stats(cfg)
    if x.size == 0:
        stats.outputs = np.zeros(x.shape, dtype=np.int64)
        return stats
    if x.shape[1] > cfg.neurons:
        raise ConfigError(f"{x.shape[1]} lanes exceed {cfg.neurons} neurons per core")

    words = quantize_pwl(pwl, fmt)
    x_q = quantize(x, fmt)
    addresses = words.lookup_address(x_q)
    bank_slopes = np.asarray(words.slopes_q, dtype=np.int64)
    bank_biases = np.asarray(words.biases_q, dtype=np.int64)

    stats.outputs = fixed_mac(bank_slopes[addresses - 1], x_q, bank_biases[addresses - 1], fmt)
    stats.total_reads = int(x.size)
    fetch_cycles = math.ceil(x.shape[1] / cfg.concurrent_reads())
    stats.base_cycles = fetch_cycles + 1
    logger.debug(f"{cfg.kind} LUT: {stats.total_reads} reads, {stats.base_cycles} cycles")
    return stats


def lut_throughput_model(cfg: LutConfig, num_queries: int, routers: int,
                         lanes_per_cycle: int = 1) -> LutThroughput:
    """
    Pipelined cycles for `num_queries` lookups spread over `routers` cores.

    Mirrors the NoC model: each core issues `lanes_per_cycle` lookups per
    cycle, capped by the bank's read ports.
    """
    if num_queries < 0:
        raise InvalidArgumentError(f"num_queries must be >= 0, got {num_queries}")
    if num_queries == 0:
        return LutThroughput(total_base_cycles=0, total_reads=0, lane_batches=0)
    per_cycle = routers * min(lanes_per_cycle, cfg.concurrent_reads())
    batches = math.ceil(num_queries / per_cycle)
    return LutThroughput(total_base_cycles=batches + 1, total_reads=num_queries, lane_batches=batches)
