"""NoC configuration as loaded by the mapper."""
import math
from typing import Literal

from pydantic import BaseModel, ConfigDict, Field

LINK_PAIRS_PER_CYCLE = 8
DEFAULT_MAX_HOPS = 10


class NovaNocConfig(BaseModel):
    """Line-topology broadcast NoC parameters."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    num_routers: int = Field(ge=1, description="Routers along the snaking line")
    neurons_per_router: int = Field(ge=1, description="PE lanes attached to each router")
    link_pairs_per_cycle: Literal[8] = Field(
        default=LINK_PAIRS_PER_CYCLE, description="Slope/bias pairs carried by one flit"
    )
    base_freq_mhz: float = Field(gt=0.0, description="Accelerator (comparator/MAC) clock")
    noc_freq_multiplier: int = Field(default=1, ge=1, description="NoC clock / base clock, set by the mapper")
    max_single_cycle_hops: int = Field(
        default=DEFAULT_MAX_HOPS, ge=1, description="Routers a flit crosses in one NoC cycle"
    )
    repeater_spacing_mm: float = Field(default=1.0, gt=0.0, description="Clockless repeater spacing")
    lanes_per_cycle: int = Field(default=1, ge=1, description="Lookups each router issues per base cycle")

    @property
    def segments(self) -> int:
        """Buffered traversal segments a flit needs to reach every router."""
        return math.ceil(self.num_routers / self.max_single_cycle_hops)

    @property
    def single_cycle(self) -> bool:
        return self.num_routers <= self.max_single_cycle_hops

    @property
    def noc_freq_mhz(self) -> float:
        return self.base_freq_mhz * self.noc_freq_multiplier

    @property
    def line_length_mm(self) -> float:
        return self.num_routers * self.repeater_spacing_mm
