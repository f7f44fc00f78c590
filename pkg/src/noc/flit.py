"""
Wave scheduling and tag matching.

The comparator bank emits a 0-based code (address - 1). With two waves the
code's LSB selects the wave (matched against the flit's tag bit) and the
remaining bits select the slot. With a single wave the mapper disables tag
matching and the whole code is the slot.
"""
import logging
import math
from dataclasses import dataclass
from typing import List, Optional, Tuple

from src.approx.pwl import MAX_HARDWARE_BREAKPOINTS, PiecewiseLinearFn, quantize_pwl
from src.lib.errors import ProtocolError, UnsupportedBreakpointCountError
from src.lib.fixed_point import DEFAULT_FORMAT, FixedPointFormat
from src.noc.config import LINK_PAIRS_PER_CYCLE

logger = logging.getLogger(__name__)

Pair = Tuple[int, int]


@dataclass(frozen=True)
class BroadcastFlit:
    """One wave: 8 (slope, bias) word pairs plus the tag bit."""

    pairs: Tuple[Pair, ...]
    tag: int
    wave_index: int
    waves: int = 1
    word_bits: int = 16

    def __post_init__(self):
        if len(self.pairs) != LINK_PAIRS_PER_CYCLE:
            raise ProtocolError(f"A flit carries exactly {LINK_PAIRS_PER_CYCLE} pairs, got {len(self.pairs)}")
        if self.tag not in (0, 1):
            raise ProtocolError(f"Tag must be a single bit, got {self.tag}")

    @property
    def wire_bits(self) -> int:
        return len(self.pairs) * 2 * self.word_bits + 1


def wave_count(breakpoint_count: int) -> int:
    """ceil(B / 8), which is both the flit count and the NoC clock multiplier."""
    if breakpoint_count > MAX_HARDWARE_BREAKPOINTS:
        raise UnsupportedBreakpointCountError(
            f"B={breakpoint_count} exceeds {MAX_HARDWARE_BREAKPOINTS}: one tag bit cannot index more than two waves"
        )
    if breakpoint_count < 1:
        raise UnsupportedBreakpointCountError(f"B must be >= 1, got {breakpoint_count}")
    return math.ceil(breakpoint_count / LINK_PAIRS_PER_CYCLE)


def wave_slot(address: int, waves: int) -> Tuple[int, int]:
    """(tag, slot) carrying the pair for a 1-based address."""
    code = address - 1
    if waves == 1:
        return 0, code
    return code & 1, code >> 1


def schedule_waves(pwl: PiecewiseLinearFn,
                   fmt: FixedPointFormat = DEFAULT_FORMAT) -> Tuple[List[BroadcastFlit], int]:
    """
    Pack the PWL's quantized pairs into broadcast flits.

    Returns:
        (flits ordered by wave index, NoC frequency multiplier)

    Raises:
        UnsupportedBreakpointCountError: B > 16
    """
    waves = wave_count(pwl.segment_count)
    words = quantize_pwl(pwl, fmt)
    slots: List[List[Pair]] = [[(0, 0)] * LINK_PAIRS_PER_CYCLE for _ in range(waves)]
    for address in range(1, pwl.segment_count + 1):
        tag, slot = wave_slot(address, waves)
        slots[tag][slot] = words.pair(address)

    flits = [
        BroadcastFlit(pairs=tuple(pairs), tag=w, wave_index=w, waves=waves, word_bits=fmt.total_bits)
        for w, pairs in enumerate(slots)
    ]
    logger.debug(f"Scheduled B={pwl.segment_count} into {waves} wave(s)")
    return flits, waves


def router_match(flit: BroadcastFlit, address: int) -> Optional[Pair]:
    """
    Tag-match a lookup address against a flit.

    Returns:
        The (slope, bias) words for the address, or None when the address
        travels in the other wave

    Raises:
        ProtocolError: The address maps outside the flit's slots
    """
    if address < 1:
        raise ProtocolError(f"Lookup addresses start at 1, got {address}")
    tag, slot = wave_slot(address, flit.waves)
    if slot >= LINK_PAIRS_PER_CYCLE:
        raise ProtocolError(f"Address {address} maps to slot {slot} in a {flit.waves}-wave schedule")
    if tag != flit.tag:
        return None
    return flit.pairs[slot]
