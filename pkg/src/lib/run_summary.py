"""
Per-experiment status tracking for sweeps.

Usage:
    aggregator = SweepAggregator()
    aggregator.start("react", 16, 0)
    ...
    aggregator.complete("react", 16, 0, metrics={"base_cycles": 2})
    aggregator.print_summary()
"""
import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional, Tuple

import pandas as pd
from rich.console import Console
from rich.table import Table

logger = logging.getLogger(__name__)

SUMMARY_COLUMNS = [
    "profile", "B", "seed", "status", "base_cycles", "total_base_cycles", "noc_freq_multiplier",
    "broadcast_count", "equivalent", "max_abs_error", "config_digest", "error",
]


class RunStatus(str, Enum):
    PENDING = "pending"
    RUNNING = "running"
    COMPLETED = "completed"
    FAILED = "failed"


@dataclass
class ExperimentRun:
    """One sweep point and what it produced."""
    profile: str
    breakpoint_count: int
    seed: int
    status: RunStatus = RunStatus.PENDING
    metrics: Dict[str, Any] = field(default_factory=dict)
    error: Optional[str] = None

    @property
    def key(self) -> Tuple[str, int, int]:
        return self.profile, self.breakpoint_count, self.seed


class SweepAggregator:
    """Collects experiment runs; rows come out sorted regardless of finish order."""

    def __init__(self):
        self._runs: Dict[Tuple[str, int, int], ExperimentRun] = {}

    def _run(self, profile: str, breakpoint_count: int, seed: int) -> ExperimentRun:
        key = (profile, breakpoint_count, seed)
        if key not in self._runs:
            self._runs[key] = ExperimentRun(profile, breakpoint_count, seed)
        return self._runs[key]

    def add(self, profile: str, breakpoint_count: int, seed: int) -> ExperimentRun:
        return self._run(profile, breakpoint_count, seed)

    def start(self, profile: str, breakpoint_count: int, seed: int) -> None:
        self._run(profile, breakpoint_count, seed).status = RunStatus.RUNNING
        logger.debug(f"Experiment {profile}/B{breakpoint_count}/seed{seed} running")

    def complete(self, profile: str, breakpoint_count: int, seed: int,
                 metrics: Optional[Dict[str, Any]] = None) -> None:
        run = self._run(profile, breakpoint_count, seed)
        run.status = RunStatus.COMPLETED
        run.metrics = dict(metrics or {})

    def fail(self, profile: str, breakpoint_count: int, seed: int, error: str) -> None:
        run = self._run(profile, breakpoint_count, seed)
        run.status = RunStatus.FAILED
        run.error = error
        logger.error(f"Experiment {profile}/B{breakpoint_count}/seed{seed} failed: {error}")

    @property
    def runs(self) -> List[ExperimentRun]:
        return [self._runs[key] for key in sorted(self._runs)]

    def get_totals(self) -> Dict[str, int]:
        totals = {status.value: 0 for status in RunStatus}
        for run in self._runs.values():
            totals[run.status.value] += 1
        totals["experiments"] = len(self._runs)
        return totals

    def to_frame(self) -> pd.DataFrame:
        rows = []
        for run in self.runs:
            row = {column: None for column in SUMMARY_COLUMNS}
            row.update({k: v for k, v in run.metrics.items() if k in row})
            row.update({
                "profile": run.profile,
                "B": run.breakpoint_count,
                "seed": run.seed,
                "status": run.status.value,
                "error": run.error or "",
            })
            rows.append(row)
        return pd.DataFrame(rows, columns=SUMMARY_COLUMNS)

    def summary_table(self) -> Table:
        table = Table(title="Sweep summary")
        for column in ("profile", "B", "seed", "status", "base cycles", "total cycles", "equivalent"):
            table.add_column(column)
        for run in self.runs:
            style = {RunStatus.COMPLETED: "green", RunStatus.FAILED: "red"}.get(run.status, "yellow")
            table.add_row(
                run.profile,
                str(run.breakpoint_count),
                str(run.seed),
                f"[{style}]{run.status.value}[/{style}]",
                str(run.metrics.get("base_cycles", "-")),
                str(run.metrics.get("total_base_cycles", "-")),
                str(run.metrics.get("equivalent", "-")),
            )
        return table

    def print_summary(self, console: Optional[Console] = None) -> None:
        console = console or Console()
        if not self._runs:
            console.print("No experiments recorded.")
            return
        console.print(self.summary_table())
        totals = self.get_totals()
        console.print(
            f"{totals['completed']}/{totals['experiments']} completed, {totals['failed']} failed"
        )
