"""
Pairwise approximator ratios and the published-claim checks.
"""
import itertools
import logging
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field
from rich.console import Console
from rich.table import Table

from src.accel.profiles import AcceleratorProfile, load_profile
from src.accel.workloads import load_workload
from src.cost.energy import EnergyReport, energy_per_inference
from src.lib.data_catalog import DataCatalog, get_data_catalog, parse_model
from src.lib.errors import ConfigError

logger = logging.getLogger(__name__)

Metric = Literal["power", "area", "energy"]


@dataclass(frozen=True)
class RatioPair:
    kind_a: str
    kind_b: str
    power_ratio: float
    area_ratio: float
    energy_ratio: Optional[float] = None


@dataclass
class ComparisonReport:
    """All ordered pairs of a profile's approximators; ratio = a / b."""

    profile: str
    pairs: List[RatioPair] = field(default_factory=list)
    note: str = ""

    def get(self, kind_a: str, kind_b: str) -> RatioPair:
        for pair in self.pairs:
            if pair.kind_a == kind_a and pair.kind_b == kind_b:
                return pair
        raise ConfigError(f"No comparison between '{kind_a}' and '{kind_b}' on profile '{self.profile}'")

    def to_rows(self) -> List[dict]:
        return [
            {"profile": self.profile, "kind_a": p.kind_a, "kind_b": p.kind_b,
             "power_ratio": p.power_ratio, "area_ratio": p.area_ratio, "energy_ratio": p.energy_ratio}
            for p in self.pairs
        ]


def compare(profile: AcceleratorProfile, energy_reports: Optional[Iterable[EnergyReport]] = None) -> ComparisonReport:
    """
    Power, area and (when reports are given) energy ratios for every ordered pair.

    A profile with fewer than two entries yields an empty report with a note.
    """
    entries = profile.approximator_entries
    if len(entries) < 2:
        note = f"Profile '{profile.name}' has {len(entries)} approximator entry; comparison skipped"
        logger.info(note)
        return ComparisonReport(profile=profile.name, note=note)

    energy: Dict[str, float] = {r.kind: r.energy_mj for r in energy_reports or []}
    pairs = []
    for a, b in itertools.permutations(entries, 2):
        power_ratio = a.power_mw / b.power_mw if a.power_mw and b.power_mw else float("nan")
        energy_ratio = None
        if energy.get(a.kind) and energy.get(b.kind):
            energy_ratio = energy[a.kind] / energy[b.kind]
        pairs.append(RatioPair(a.kind, b.kind, power_ratio, a.area_mm2 / b.area_mm2, energy_ratio))
    return ComparisonReport(profile=profile.name, pairs=pairs)


class ClaimSpec(BaseModel):
    """One published ratio and how to check it."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    id: str = Field(description="Stable claim identifier")
    description: str = Field(description="What the ratio compares")
    profile: str = Field(description="Host profile")
    metric: Metric = Field(description="power, area or energy")
    numerator: List[str] = Field(min_length=1, description="Kinds averaged for the numerator")
    denominator: str = Field(description="Kind in the denominator")
    expected: float = Field(description="Claimed ratio")
    tolerance: float = Field(ge=0.0, description="Allowed absolute deviation for approx checks")
    check: Literal["approx", "at_least"] = Field(default="approx", description="Comparison rule")
    workload: Optional[str] = Field(default=None, description="Workload for energy claims")
    seq_len: Optional[int] = Field(default=None, gt=0, description="Sequence length for energy claims")


@dataclass(frozen=True)
class ClaimResult:
    id: str
    description: str
    computed: float
    expected: float
    tolerance: float
    check: str
    passed: bool

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "description": self.description,
            "computed": self.computed,
            "expected": self.expected,
            "tolerance": self.tolerance,
            "check": self.check,
            "passed": self.passed,
        }


def load_claims(catalog: Optional[DataCatalog] = None) -> List[ClaimSpec]:
    catalog = catalog or get_data_catalog()
    source = str(catalog.path("claims"))
    return [parse_model(ClaimSpec, row, source) for row in catalog.document("claims")["claims"]]


def _metric_value(profile: AcceleratorProfile, kind: str, claim: ClaimSpec) -> float:
    entry = profile.entry(kind)
    if claim.metric == "area":
        return entry.area_mm2
    if claim.metric == "power":
        if entry.power_mw is None:
            raise ConfigError(f"Profile '{profile.name}' has no power figure for '{kind}'")
        return entry.power_mw
    if claim.workload is None:
        raise ConfigError(f"Energy claim '{claim.id}' names no workload")
    workload = load_workload(claim.workload, seq_len=claim.seq_len or profile.default_seq_len)
    return energy_per_inference(profile, kind, workload).energy_mj


def evaluate_claim(claim: ClaimSpec, profile: Optional[AcceleratorProfile] = None) -> ClaimResult:
    profile = profile or load_profile(claim.profile)
    numerator = sum(_metric_value(profile, k, claim) for k in claim.numerator) / len(claim.numerator)
    computed = numerator / _metric_value(profile, claim.denominator, claim)
    if claim.check == "at_least":
        passed = computed >= claim.expected
    else:
        passed = abs(computed - claim.expected) <= claim.tolerance
    if not passed:
        logger.warning(f"Claim {claim.id} failed: computed {computed:.4f}, expected {claim.expected}")
    return ClaimResult(claim.id, claim.description, computed, claim.expected, claim.tolerance, claim.check, passed)


def check_claims(claims: Optional[Iterable[ClaimSpec]] = None,
                 profiles: Optional[Iterable[str]] = None) -> List[ClaimResult]:
    """Evaluate every claim, optionally only those on the given profiles."""
    claims = list(claims) if claims is not None else load_claims()
    wanted = set(profiles) if profiles is not None else None
    cache: Dict[str, AcceleratorProfile] = {}
    results = []
    for claim in claims:
        if wanted is not None and claim.profile not in wanted:
            continue
        if claim.profile not in cache:
            cache[claim.profile] = load_profile(claim.profile)
        results.append(evaluate_claim(claim, cache[claim.profile]))
    return results


def claims_table(results: Iterable[ClaimResult]) -> Table:
    table = Table(title="Computed vs claimed ratios")
    table.add_column("claim")
    table.add_column("computed", justify="right")
    table.add_column("claimed", justify="right")
    table.add_column("rule")
    table.add_column("result")
    for r in results:
        rule = f">= {r.expected}" if r.check == "at_least" else f"±{r.tolerance}"
        verdict = "[green]PASS[/green]" if r.passed else "[red]FAIL[/red]"
        table.add_row(r.description, f"{r.computed:.3f}x", f"{r.expected}x", rule, verdict)
    return table


def related_work_table(catalog: Optional[DataCatalog] = None) -> Table:
    """Static reference data for other approximators, printed as-is."""
    catalog = catalog or get_data_catalog()
    table = Table(title="Related non-linear approximators (reference data)")
    for column in ("approximator", "tech node", "area (um^2)", "power (mW)"):
        table.add_column(column)
    for row in catalog.document("related_work")["entries"]:
        table.add_row(row["approximator"], row["tech_node"], f"{row['area_um2']:g}", row["power_mw"])
    return table


def print_tables(*tables: Table, console: Optional[Console] = None) -> None:
    console = console or Console()
    for table in tables:
        console.print(table)


def claim_tally(results: Iterable[ClaimResult]) -> Tuple[int, int]:
    """(passed, total)"""
    results = list(results)
    return sum(r.passed for r in results), len(results)
