"""
Cycle model of the NOVA broadcast NoC.

Timing: wave w of lane batch k leaves the injector at router 0 on NoC cycle
k*M + w (M = clock multiplier, one base cycle per batch) and reaches router
r on NoC cycle k*M + w + floor(r / max_single_cycle_hops). Each segment
boundary buffers the flit for one NoC cycle. A transaction takes one base
cycle for comparators plus broadcast and one for the MAC, stretched when
the broadcast needs more NoC cycles than one base cycle holds.
"""
import logging
import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from src.approx.pwl import PiecewiseLinearFn, quantize_pwl
from src.lib.errors import ConfigError, InvalidArgumentError
from src.lib.fixed_point import DEFAULT_FORMAT, FixedPointFormat, quantize
from src.noc.config import NovaNocConfig
from src.noc.flit import BroadcastFlit, schedule_waves, wave_count
from src.noc.router import RouterState, buffer_delays, line_routers

logger = logging.getLogger(__name__)

TRACE_COLUMNS = ["wave", "router", "noc_cycle"]


@dataclass(frozen=True)
class FlitEvent:
    wave_index: int
    router: int
    noc_cycle: int
    batch: int = 0


@dataclass
class SimResult:
    """Outcome of one approximation transaction over every lane batch."""

    outputs: np.ndarray
    base_cycles: int
    noc_cycles: int
    flit_events: List[FlitEvent] = field(default_factory=list)
    broadcast_count: int = 0
    total_base_cycles: int = 0
    lane_batches: int = 0
    segments: int = 1
    noc_freq_multiplier: int = 1

    def summary(self) -> dict:
        return {
            "base_cycles": self.base_cycles,
            "noc_cycles": self.noc_cycles,
            "total_base_cycles": self.total_base_cycles,
            "lane_batches": self.lane_batches,
            "broadcast_count": self.broadcast_count,
            "segments": self.segments,
            "noc_freq_multiplier": self.noc_freq_multiplier,
        }


@dataclass(frozen=True)
class ThroughputEstimate:
    total_base_cycles: int
    broadcast_count: int
    lane_batches: int


def transaction_cycles(cfg: NovaNocConfig, waves: int) -> Tuple[int, int]:
    """(base_cycles, noc_cycles) for one lane batch."""
    noc_cycles = (waves - 1) + cfg.segments
    return 1 + math.ceil(noc_cycles / cfg.noc_freq_multiplier), noc_cycles


def mapper_configure(cfg: NovaNocConfig, pwl: PiecewiseLinearFn) -> NovaNocConfig:
    """Set the NoC clock multiplier the mapper derives from the PWL's breakpoint count."""
    return cfg.model_copy(update={"noc_freq_multiplier": wave_count(pwl.segment_count)})


def route_broadcast(cfg: NovaNocConfig, flits: Sequence[BroadcastFlit], batch: int = 0,
                    routers: Optional[Sequence[RouterState]] = None) -> List[FlitEvent]:
    """
    Delivery trace of one wave set to every router.

    Each router in BUFFER mode holds the flit for one NoC cycle before it
    moves on, so a router's delay is the number of buffering routers up to it.

    Args:
        cfg: NoC config
        flits: Waves of one transaction
        batch: Lane batch index
        routers: Line of routers; defaults to the line `cfg` describes

    Returns:
        Events ordered by (noc_cycle, wave, router)
    """
    routers = routers if routers is not None else line_routers(cfg.num_routers, cfg.max_single_cycle_hops)
    if len(routers) != cfg.num_routers:
        raise ConfigError(f"Expected {cfg.num_routers} routers on the line, got {len(routers)}")
    delays = buffer_delays(routers)
    origin = batch * cfg.noc_freq_multiplier
    events = [
        FlitEvent(
            wave_index=flit.wave_index,
            router=r,
            noc_cycle=origin + flit.wave_index + delays[r],
            batch=batch,
        )
        for flit in flits
        for r in range(cfg.num_routers)
    ]
    events.sort(key=lambda e: (e.noc_cycle, e.wave_index, e.router))
    return events


def _check_schedule(cfg: NovaNocConfig, multiplier: int) -> None:
    if cfg.noc_freq_multiplier != multiplier:
        raise ConfigError(
            f"NoC frequency multiplier {cfg.noc_freq_multiplier} does not match the "
            f"{multiplier} wave(s) the PWL needs"
        )


def simulate_approximation(cfg: NovaNocConfig, pwl: PiecewiseLinearFn, inputs: np.ndarray,
                           fmt: FixedPointFormat = DEFAULT_FORMAT) -> SimResult:
    """
    Run one approximation transaction through the NoC.

    Args:
        cfg: NoC config; its multiplier must equal ceil(B/8)
        pwl: Approximator to broadcast
        inputs: (num_routers, lanes) PE outputs in real units
        fmt: Word format for inputs, coefficients and outputs

    Returns:
        SimResult whose outputs are fixed-point words, shape (num_routers, lanes)

    Raises:
        ConfigError: Multiplier mismatch or more lanes than neurons per router
        UnsupportedBreakpointCountError: B > 16
        InvalidArgumentError: inputs shape does not match the router count
    """
    flits, multiplier = schedule_waves(pwl, fmt)
    _check_schedule(cfg, multiplier)

    x = np.asarray(inputs, dtype=np.float64)
    if x.ndim != 2 or x.shape[0] != cfg.num_routers:
        raise InvalidArgumentError(f"inputs must have shape ({cfg.num_routers}, lanes), got {x.shape}")
    lanes = x.shape[1]
    if lanes > cfg.neurons_per_router:
        raise ConfigError(f"{lanes} lanes exceed {cfg.neurons_per_router} neurons per router")
    if not np.all(np.isfinite(x)):
        raise InvalidArgumentError("inputs must be finite")

    words = quantize_pwl(pwl, fmt)
    x_q = quantize(x, fmt)
    addresses = words.lookup_address(x_q)
    routers = line_routers(cfg.num_routers, cfg.max_single_cycle_hops)
    outputs = np.zeros_like(x_q)

    base_cycles, noc_cycles = transaction_cycles(cfg, len(flits))
    batches = math.ceil(lanes / cfg.lanes_per_cycle)
    trace: List[FlitEvent] = []

    for k in range(batches):
        batch_lanes = range(k * cfg.lanes_per_cycle, min(lanes, (k + 1) * cfg.lanes_per_cycle))
        for router in routers:
            router.load((lane, int(addresses[router.position, lane])) for lane in batch_lanes)

        events = route_broadcast(cfg, flits, batch=k, routers=routers)
        for event in events:
            routers[event.router].receive(flits[event.wave_index])
        trace.extend(events)

        for router in routers:
            lane_inputs = {lane: int(x_q[router.position, lane]) for lane in batch_lanes}
            for lane, value in router.mac(lane_inputs, fmt).items():
                outputs[router.position, lane] = value

    total = (batches - 1) + base_cycles if batches else 0
    logger.debug(
        f"Simulated {cfg.num_routers} routers x {lanes} lanes, B={pwl.segment_count}: "
        f"{batches} batches, {total} base cycles"
    )
    return SimResult(
        outputs=outputs,
        base_cycles=base_cycles,
        noc_cycles=noc_cycles,
        flit_events=trace,
        broadcast_count=len(flits) * batches,
        total_base_cycles=total,
        lane_batches=batches,
        segments=cfg.segments,
        noc_freq_multiplier=multiplier,
    )


def throughput_model(cfg: NovaNocConfig, pwl: PiecewiseLinearFn, num_queries: int,
                     lanes_per_cycle: Optional[int] = None) -> ThroughputEstimate:
    """
    Steady-state cycles for `num_queries` lookups with initiation interval 1.

    total = ceil(q / (routers * lanes_per_cycle)) + (base_cycles - 1), which
    is the familiar ceil(...) + 1 whenever the broadcast fits one base cycle.
    """
    return throughput_for_breakpoints(cfg, pwl.segment_count, num_queries, lanes_per_cycle)


def throughput_for_breakpoints(cfg: NovaNocConfig, breakpoint_count: int, num_queries: int,
                               lanes_per_cycle: Optional[int] = None) -> ThroughputEstimate:
    """`throughput_model` when only the breakpoint count is known (cost reports)."""
    if num_queries < 0:
        raise InvalidArgumentError(f"num_queries must be >= 0, got {num_queries}")
    waves = wave_count(breakpoint_count)
    if num_queries == 0:
        return ThroughputEstimate(total_base_cycles=0, broadcast_count=0, lane_batches=0)
    per_cycle = cfg.num_routers * (lanes_per_cycle or cfg.lanes_per_cycle)
    batches = math.ceil(num_queries / per_cycle)
    base_cycles, _ = transaction_cycles(cfg.model_copy(update={"noc_freq_multiplier": waves}), waves)
    return ThroughputEstimate(
        total_base_cycles=batches + base_cycles - 1,
        broadcast_count=waves * batches,
        lane_batches=batches,
    )


def trace_frame(events: Sequence[FlitEvent]) -> pd.DataFrame:
    """Delivery trace with one row per (wave, router) delivery."""
    return pd.DataFrame(
        [(e.wave_index, e.router, e.noc_cycle) for e in events],
        columns=TRACE_COLUMNS,
    )
