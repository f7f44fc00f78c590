"""Per-router state: pending lookups, matched pairs, input-port mode."""
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from src.lib.errors import ProtocolError
from src.lib.fixed_point import FixedPointFormat, fixed_mac
from src.noc.flit import BroadcastFlit, Pair, router_match


class RouterMode(str, Enum):
    BUFFER = "buffer"
    FORWARD = "forward"


@dataclass
class RouterState:
    """One router on the line and the lanes of its current lookup batch."""

    position: int
    mode: RouterMode = RouterMode.FORWARD
    pending_addresses: Dict[int, int] = field(default_factory=dict)
    matched: Dict[int, Optional[Pair]] = field(default_factory=dict)

    @classmethod
    def on_line(cls, position: int, max_hops: int) -> "RouterState":
        """Routers that start a new traversal segment latch the flit for one NoC cycle."""
        boundary = position > 0 and position % max_hops == 0
        return cls(position=position, mode=RouterMode.BUFFER if boundary else RouterMode.FORWARD)

    def load(self, lanes: Iterable[Tuple[int, int]]) -> None:
        """Start a transaction with (lane, address) pairs from the comparators."""
        self.pending_addresses = dict(lanes)
        self.matched = {lane: None for lane in self.pending_addresses}

    def receive(self, flit: BroadcastFlit) -> int:
        """Match every waiting lane against `flit`; returns how many matched."""
        hits = 0
        for lane, address in self.pending_addresses.items():
            pair = router_match(flit, address)
            if pair is None:
                continue
            if self.matched[lane] is not None:
                raise ProtocolError(f"Router {self.position} lane {lane} matched twice in one transaction")
            self.matched[lane] = pair
            hits += 1
        return hits

    def unmatched_lanes(self) -> Tuple[int, ...]:
        return tuple(lane for lane, pair in self.matched.items() if pair is None)

    def mac(self, inputs_q: Dict[int, int], fmt: FixedPointFormat) -> Dict[int, int]:
        """Apply each lane's matched slope/bias to its PE output word."""
        missing = self.unmatched_lanes()
        if missing:
            raise ProtocolError(f"Router {self.position} lanes {missing} never matched a wave")
        return {
            lane: fixed_mac(pair[0], inputs_q[lane], pair[1], fmt)
            for lane, pair in self.matched.items()
        }


def line_routers(num_routers: int, max_hops: int) -> List[RouterState]:
    return [RouterState.on_line(position, max_hops) for position in range(num_routers)]


def buffer_delays(routers: Sequence[RouterState]) -> List[int]:
    """NoC cycles a flit spends latched before reaching each router, counting the router itself."""
    delays, latched = [], 0
    for router in routers:
        if router.mode is RouterMode.BUFFER:
            latched += 1
        delays.append(latched)
    return delays
