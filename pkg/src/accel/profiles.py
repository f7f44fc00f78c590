"""
Accelerator integration profiles and the single-cycle scalability rule.
"""
import logging
import math
from dataclasses import dataclass
from typing import Dict, List, Optional

from pydantic import BaseModel, ConfigDict, Field, ValidationError

from src.lib.data_catalog import DataCatalog, get_data_catalog, parse_model
from src.lib.errors import ConfigError, UnknownNameError
from src.noc.config import DEFAULT_MAX_HOPS, NovaNocConfig

logger = logging.getLogger(__name__)

# Clockless repeaters 1 mm apart carry a flit across this many routers per cycle at MAX_NOC_FREQ_GHZ.
MAX_SINGLE_CYCLE_ROUTERS = DEFAULT_MAX_HOPS
MAX_NOC_FREQ_GHZ = 1.5


class ApproximatorEntry(BaseModel):
    """Synthesized area and power of one approximator block on a host."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    kind: str = Field(description="nova, per_neuron_lut, per_core_lut or nvdla_sdp")
    area_mm2: float = Field(gt=0.0, description="Block area in mm^2")
    power_mw: Optional[float] = Field(default=None, gt=0.0, description="Active power in mW")
    energy_modeled: bool = Field(default=True, description="False where energy is deliberately not reported")


class AcceleratorProfile(BaseModel):
    """Host accelerator parameters plus its approximator entries."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    name: str = Field(description="Profile identifier")
    display_name: str = Field(default="", description="Human-readable name")
    num_nova_routers: int = Field(gt=0, description="NOVA routers on the line")
    neurons_per_router: int = Field(gt=0, description="Output neurons sharing one router")
    onchip_memory_bytes: int = Field(gt=0, description="Host on-chip memory")
    base_freq_mhz: float = Field(gt=0.0, description="Host clock at 0.8 V")
    default_seq_len: int = Field(default=1024, gt=0, description="Sequence length used for energy reports")
    approximator_entries: List[ApproximatorEntry] = Field(default_factory=list, description="Area/power per kind")

    def entry(self, kind: str) -> ApproximatorEntry:
        for entry in self.approximator_entries:
            if entry.kind == kind:
                return entry
        raise ConfigError(
            f"Profile '{self.name}' has no approximator entry for '{kind}' "
            f"(has: {', '.join(self.kinds()) or 'none'})"
        )

    def kinds(self) -> List[str]:
        return [entry.kind for entry in self.approximator_entries]

    def noc_config(self, lanes_per_cycle: int = 1, noc_freq_multiplier: int = 1) -> NovaNocConfig:
        """NoC config for this host before the mapper picks the multiplier."""
        return NovaNocConfig(
            num_routers=self.num_nova_routers,
            neurons_per_router=self.neurons_per_router,
            base_freq_mhz=self.base_freq_mhz,
            noc_freq_multiplier=noc_freq_multiplier,
            lanes_per_cycle=lanes_per_cycle,
        )


@dataclass
class ScalabilityReport:
    """Whether a profile's NoC keeps single-cycle broadcast, and why."""

    profile: str
    num_routers: int
    noc_freq_ghz: float
    ok: bool
    hops_per_cycle: int
    segments: int
    extra_noc_cycles: int
    decision_reason: str


def _profile_rows(catalog: DataCatalog) -> Dict[str, dict]:
    entries = catalog.document("approximators")["entries"]
    return {
        row["name"]: {**row, "approximator_entries": entries.get(row["name"], [])}
        for row in catalog.document("profiles")["profiles"]
    }


def known_profiles(catalog: Optional[DataCatalog] = None) -> List[str]:
    return sorted(_profile_rows(catalog or get_data_catalog()))


def load_profile(name: str, catalog: Optional[DataCatalog] = None) -> AcceleratorProfile:
    """
    Load a profile with its approximator entries.

    Raises:
        UnknownNameError: Name not in the profile table (message lists the known ones)
        ConfigError: Profile data fails validation
    """
    catalog = catalog or get_data_catalog()
    rows = _profile_rows(catalog)
    if name not in rows:
        raise UnknownNameError("profile", name, rows.keys())
    return parse_model(AcceleratorProfile, rows[name], str(catalog.path("profiles")))


def serialize_profile(profile: AcceleratorProfile) -> str:
    return profile.model_dump_json(indent=2)


def parse_profile(text: str) -> AcceleratorProfile:
    try:
        return AcceleratorProfile.model_validate_json(text)
    except ValidationError as e:
        raise ConfigError(f"Invalid accelerator profile: {e}") from e


def check_scalability(profile: AcceleratorProfile, noc_freq_ghz: float) -> ScalabilityReport:
    """
    Check the single-cycle multi-hop rule: at most 10 routers at 1.5 GHz.

    Above 1.5 GHz the reach per cycle shrinks in proportion, so a violation
    reports how many buffered segments the broadcast needs and the extra
    NoC cycles that adds to every transaction.
    """
    routers = profile.num_nova_routers
    if noc_freq_ghz <= MAX_NOC_FREQ_GHZ:
        hops = MAX_SINGLE_CYCLE_ROUTERS
    else:
        hops = max(1, math.floor(MAX_SINGLE_CYCLE_ROUTERS * MAX_NOC_FREQ_GHZ / noc_freq_ghz))
    segments = math.ceil(routers / hops)
    ok = routers <= MAX_SINGLE_CYCLE_ROUTERS and noc_freq_ghz <= MAX_NOC_FREQ_GHZ

    if ok:
        reason = f"{routers} routers within {MAX_SINGLE_CYCLE_ROUTERS}-hop reach at {noc_freq_ghz} GHz"
    elif noc_freq_ghz > MAX_NOC_FREQ_GHZ:
        reason = (
            f"{noc_freq_ghz} GHz exceeds {MAX_NOC_FREQ_GHZ} GHz; reach drops to {hops} routers per cycle, "
            f"broadcast needs {segments} segment(s)"
        )
    else:
        reason = (
            f"{routers} routers exceed {MAX_SINGLE_CYCLE_ROUTERS}-hop reach; broadcast needs {segments} "
            f"buffered segments and adds {segments - 1} NoC cycle(s) of latency"
        )
    if not ok:
        logger.warning(f"Scalability check failed for {profile.name}: {reason}")

    return ScalabilityReport(
        profile=profile.name,
        num_routers=routers,
        noc_freq_ghz=noc_freq_ghz,
        ok=ok,
        hops_per_cycle=hops,
        segments=segments,
        extra_noc_cycles=segments - 1,
        decision_reason=reason,
    )
