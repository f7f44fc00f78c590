"""
Energy, area-share and energy-share accounting.

Power is constant while an approximator is active and idle power is
excluded: energy_mj = power_mw * active_time_s with
active_time_s = active_base_cycles / (base_freq_mhz * 1e6).
"""
import logging
import numbers
from dataclasses import asdict, dataclass
from typing import Iterable, List, Optional, Union

import pandas as pd

from src.accel.profiles import AcceleratorProfile
from src.accel.workloads import WorkloadSpec, nonlinear_query_count
from src.baselines.lut import LutConfig, LutThroughput, lut_throughput_model
from src.lib.errors import ConfigError, InvalidArgumentError
from src.noc.simulator import ThroughputEstimate, throughput_for_breakpoints

logger = logging.getLogger(__name__)

NOVA_KIND = "nova"
LUT_KINDS = {"per_neuron_lut": "per_neuron", "per_core_lut": "per_core"}

CycleSource = Union[int, ThroughputEstimate, LutThroughput]


@dataclass(frozen=True)
class EnergyReport:
    """Energy of one approximator serving one workload sample."""

    profile: str
    kind: str
    workload: str
    queries: int
    active_base_cycles: int
    active_time_s: float
    power_mw: float
    energy_mj: float
    area_mm2: float

    def to_dict(self) -> dict:
        return asdict(self)


def workload_cycles(profile: AcceleratorProfile, kind: str, num_queries: int,
                    breakpoint_count: int = 16, lanes_per_cycle: int = 1) -> CycleSource:
    """Throughput estimate of `kind` serving `num_queries` lookups on `profile`."""
    if kind == NOVA_KIND:
        return throughput_for_breakpoints(profile.noc_config(lanes_per_cycle), breakpoint_count,
                                          num_queries, lanes_per_cycle)
    if kind in LUT_KINDS:
        cfg = LutConfig(kind=LUT_KINDS[kind], neurons=profile.neurons_per_router, base_freq_mhz=profile.base_freq_mhz)
        return lut_throughput_model(cfg, num_queries, profile.num_nova_routers, lanes_per_cycle)
    raise ConfigError(f"No cycle model for approximator kind '{kind}' on profile '{profile.name}'")


def energy_per_inference(profile: AcceleratorProfile, kind: str, workload: WorkloadSpec,
                         throughput: Optional[CycleSource] = None, breakpoint_count: int = 16,
                         lanes_per_cycle: int = 1) -> EnergyReport:
    """
    Energy one inference sample spends in the `kind` approximator.

    Args:
        profile: Host profile carrying the area/power entry for `kind`
        kind: Approximator kind
        workload: Benchmark whose non-linear queries are served
        throughput: Active cycles (int) or a throughput estimate; computed from the
            workload's query count when omitted
        breakpoint_count: PWL breakpoints, used when computing cycles
        lanes_per_cycle: Lookups per router per base cycle

    Raises:
        ConfigError: No entry, no power figure, or energy not modeled for `kind`
    """
    entry = profile.entry(kind)
    if entry.power_mw is None or not entry.energy_modeled:
        raise ConfigError(f"Energy is not modeled for '{kind}' on profile '{profile.name}'")

    queries = nonlinear_query_count(workload).total
    if throughput is None:
        throughput = workload_cycles(profile, kind, queries, breakpoint_count, lanes_per_cycle)
    if isinstance(throughput, numbers.Integral):
        cycles = int(throughput)
    else:
        cycles = throughput.total_base_cycles
    if cycles < 0:
        raise InvalidArgumentError(f"Active cycles must be >= 0, got {cycles}")

    active_time_s = cycles / (profile.base_freq_mhz * 1e6)
    return EnergyReport(
        profile=profile.name,
        kind=kind,
        workload=workload.model_name,
        queries=queries,
        active_base_cycles=cycles,
        active_time_s=active_time_s,
        power_mw=entry.power_mw,
        energy_mj=entry.power_mw * active_time_s,
        area_mm2=entry.area_mm2,
    )


def energy_share(report: EnergyReport, total_power_mw: float) -> float:
    """Approximator energy as a percentage of the accelerator's energy over the same active window."""
    if total_power_mw <= 0.0:
        raise InvalidArgumentError(f"total_power_mw must be positive, got {total_power_mw}")
    if report.active_time_s == 0.0:
        return 0.0
    return 100.0 * report.energy_mj / (total_power_mw * report.active_time_s)


def area_overhead(profile: AcceleratorProfile, kind: str, host_area_mm2: float) -> float:
    """Approximator area as a percentage of the host die area."""
    if host_area_mm2 <= 0.0:
        raise InvalidArgumentError(f"host_area_mm2 must be positive, got {host_area_mm2}")
    return 100.0 * profile.entry(kind).area_mm2 / host_area_mm2


def workload_energy_table(profile: AcceleratorProfile, workloads: Iterable[WorkloadSpec],
                          kinds: Optional[Iterable[str]] = None, breakpoint_count: int = 16,
                          lanes_per_cycle: int = 1) -> List[EnergyReport]:
    """
    One EnergyReport per (workload, kind), skipping kinds whose energy is not modeled.
    """
    kinds = list(kinds) if kinds is not None else profile.kinds()
    reports = []
    for workload in workloads:
        for kind in kinds:
            entry = profile.entry(kind)
            if entry.power_mw is None or not entry.energy_modeled:
                logger.info(f"Skipping energy for {kind} on {profile.name}: not modeled")
                continue
            reports.append(
                energy_per_inference(profile, kind, workload, breakpoint_count=breakpoint_count,
                                     lanes_per_cycle=lanes_per_cycle)
            )
    return reports


def energy_frame(reports: Iterable[EnergyReport]) -> pd.DataFrame:
    rows = [r.to_dict() for r in reports]
    return pd.DataFrame(rows, columns=list(EnergyReport.__dataclass_fields__))
