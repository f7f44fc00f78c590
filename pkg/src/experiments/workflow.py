"""
Experiment workflow behind the command line.

- fit: train MLP approximators and the direct-fit oracle per function, write
  both PWLs and an error CSV
- sim: push one approximation transaction through the NoC and the LUT
  baselines and check all three agree with the fixed-point oracle
- report: energy per inference, pairwise ratios, optional claim checks
- sweep: fan sim out over (profile, breakpoints, seed)
"""

import asyncio
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Tuple

import numpy as np
import pandas as pd
from rich.console import Console
from rich.table import Table

from src.accel.profiles import AcceleratorProfile, load_profile
from src.accel.workloads import known_workloads, load_workload
from src.approx.direct_fit import fit_direct
from src.approx.functions import EXACT_FUNCTIONS, eval_exact
from src.approx.metrics import ApproxErrorReport, error_frame, error_metrics
from src.approx.mlp import fit_mlp_pwl
from src.approx.pwl import MAX_HARDWARE_BREAKPOINTS, PiecewiseLinearFn, eval_pwl_fixed, load_pwl, save_pwl
from src.baselines.lut import LutConfig, LutStats, simulate_lut
from src.cost.compare import (
    ClaimResult,
    ComparisonReport,
    check_claims,
    claim_tally,
    claims_table,
    compare,
    related_work_table,
)
from src.cost.energy import LUT_KINDS, EnergyReport, area_overhead, energy_frame, energy_share, workload_energy_table
from src.experiments.config import ExperimentConfig
from src.lib.artifact_store import ArtifactStore, config_digest, experiment_dir
from src.lib.data_catalog import parse_model
from src.lib.errors import ClaimCheckError, NovaError, UnsupportedBreakpointCountError
from src.lib.fixed_point import dequantize
from src.lib.run_summary import RunStatus, SweepAggregator
from src.noc.config import NovaNocConfig
from src.noc.simulator import SimResult, mapper_configure, simulate_approximation, trace_frame

logger = logging.getLogger(__name__)


@dataclass
class FitOutcome:
    """Result of `cmd_fit`."""
    pwl_files: List[Path] = field(default_factory=list)
    errors_csv: Optional[Path] = None
    reports: List[ApproxErrorReport] = field(default_factory=list)


@dataclass
class SimOutcome:
    """One simulated transaction plus the baselines run on the same inputs."""
    profile: str
    seed: int
    pwl: PiecewiseLinearFn
    noc_config: NovaNocConfig
    inputs: np.ndarray
    oracle: np.ndarray
    result: SimResult
    luts: Dict[str, LutStats] = field(default_factory=dict)
    max_abs_error: Optional[float] = None
    digest: str = ""
    artifacts: List[Path] = field(default_factory=list)

    @property
    def equivalent(self) -> bool:
        if not np.array_equal(self.result.outputs, self.oracle):
            return False
        return all(np.array_equal(stats.outputs, self.oracle) for stats in self.luts.values())

    def metrics(self) -> dict:
        return {
            **self.result.summary(),
            "equivalent": self.equivalent,
            "max_abs_error": self.max_abs_error,
            "config_digest": self.digest,
        }


@dataclass
class ReportOutcome:
    """Result of `cmd_report`."""
    profile: str
    energy: List[EnergyReport] = field(default_factory=list)
    comparison: Optional[ComparisonReport] = None
    claims: List[ClaimResult] = field(default_factory=list)
    artifacts: List[Path] = field(default_factory=list)

    @property
    def claims_passed(self) -> bool:
        passed, total = claim_tally(self.claims)
        return passed == total


@dataclass
class SweepOutcome:
    """Result of `cmd_sweep`."""
    aggregator: SweepAggregator
    summary_csv: Optional[Path] = None

    @property
    def failed(self) -> int:
        return self.aggregator.get_totals()[RunStatus.FAILED.value]

    @property
    def diverged(self) -> int:
        return sum(1 for run in self.aggregator.runs if run.metrics.get("equivalent") is False)


def cmd_fit(config: ExperimentConfig) -> FitOutcome:
    """
    Fit every configured function at every configured breakpoint count.

    Writes pwl/<fn>_B<b>.json (MLP), pwl/oracle/<fn>_B<b>.json (direct fit)
    and fit_errors.csv with both methods side by side. An empty function
    list is a no-op.

    Raises:
        TrainingDivergenceError: Carries the seed that diverged
    """
    outcome = FitOutcome()
    if not config.functions:
        logger.info("No functions configured; nothing to fit")
        return outcome

    store = ArtifactStore(config.out_dir)
    train = config.train_config()
    for spec in config.functions:
        domain = spec.fit_domain()
        for b in spec.breakpoints:
            logger.info(f"Fitting {spec.function_id} with B={b} on [{domain[0]}, {domain[1]}]")
            mlp_pwl = fit_mlp_pwl(spec.function_id, b, domain, train)
            oracle_pwl = fit_direct(spec.function_id, b, domain, samples=train.samples)

            name = f"{spec.function_id}_B{b}.json"
            outcome.pwl_files.append(save_pwl(store, f"pwl/{name}", mlp_pwl, config.fixed_point))
            outcome.pwl_files.append(save_pwl(store, f"pwl/oracle/{name}", oracle_pwl, config.fixed_point))

            mlp_report = error_metrics(mlp_pwl, spec.function_id, domain, train.samples, method="mlp")
            oracle_report = error_metrics(oracle_pwl, spec.function_id, domain, train.samples, method="direct")
            outcome.reports.extend([mlp_report, oracle_report])
            logger.info(
                f"{spec.function_id} B={b}: mlp max error {mlp_report.max_abs_error:.3e}, "
                f"direct {oracle_report.max_abs_error:.3e}"
            )

    outcome.errors_csv = store.write_csv("fit_errors.csv", error_frame(outcome.reports))
    return outcome


def _noc_config(config: ExperimentConfig, profile: AcceleratorProfile) -> NovaNocConfig:
    data = profile.noc_config(config.sim.lanes_per_cycle).model_dump()
    if config.sim.num_routers is not None:
        data["num_routers"] = config.sim.num_routers
    return parse_model(NovaNocConfig, data, f"profile '{profile.name}'")


def _lut_kinds(config: ExperimentConfig, profile: AcceleratorProfile) -> List[str]:
    requested = config.kinds or profile.kinds()
    return [kind for kind in LUT_KINDS if kind in requested]


def _sim_pwl(config: ExperimentConfig) -> PiecewiseLinearFn:
    if config.sim.pwl_path:
        pwl, _ = load_pwl(config.sim.pwl_path)
        if not pwl.is_hardware_mappable:
            raise UnsupportedBreakpointCountError(
                f"{config.sim.pwl_path} has {pwl.segment_count} segments; the NoC maps at most "
                f"{MAX_HARDWARE_BREAKPOINTS}"
            )
        logger.info(f"Loaded {pwl.function_id} PWL with B={pwl.segment_count} from {config.sim.pwl_path}")
        return pwl
    return fit_mlp_pwl(config.sim.function_id, config.sim.breakpoints, train_config=config.train_config())


def run_simulation(config: ExperimentConfig) -> SimOutcome:
    """
    Simulate one transaction on the configured profile without writing anything.

    Every config check (router count, multiplier, LUT capacity, lane count)
    runs here, so a bad config fails before any artifact exists.
    """
    profile = load_profile(config.profile)
    fmt = config.fixed_point
    cfg = _noc_config(config, profile)
    pwl = _sim_pwl(config)
    cfg = mapper_configure(cfg, pwl)

    lanes = min(config.sim.lanes_per_router, cfg.neurons_per_router)
    lo, hi = pwl.domain
    margin = (hi - lo) * config.sim.input_margin
    rng = np.random.default_rng(config.seed)
    inputs = rng.uniform(lo - margin, hi + margin, size=(cfg.num_routers, lanes))

    result = simulate_approximation(cfg, pwl, inputs, fmt)
    luts = {}
    for kind in _lut_kinds(config, profile):
        lut_cfg = LutConfig(kind=LUT_KINDS[kind], neurons=cfg.neurons_per_router, base_freq_mhz=profile.base_freq_mhz)
        luts[kind] = simulate_lut(lut_cfg, pwl, inputs, fmt)
    oracle = np.asarray(eval_pwl_fixed(pwl, inputs, fmt), dtype=np.int64)

    max_abs_error = None
    if pwl.function_id in EXACT_FUNCTIONS and inputs.size:
        exact = eval_exact(pwl.function_id, inputs)
        max_abs_error = float(np.max(np.abs(dequantize(result.outputs, fmt) - exact)))

    digest = config_digest({**config.model_dump(mode="json"), "out_dir": None})
    outcome = SimOutcome(
        profile=profile.name,
        seed=config.seed,
        pwl=pwl,
        noc_config=cfg,
        inputs=inputs,
        oracle=oracle,
        result=result,
        luts=luts,
        max_abs_error=max_abs_error,
        digest=digest,
    )
    logger.info(
        f"Simulated {profile.name} B={pwl.segment_count}: base_cycles={result.base_cycles}, "
        f"multiplier={result.noc_freq_multiplier}, equivalent={outcome.equivalent}"
    )
    return outcome


def _outputs_frame(outcome: SimOutcome) -> pd.DataFrame:
    inputs = outcome.inputs
    routers, lanes = np.indices(inputs.shape)
    frame = pd.DataFrame({
        "router": routers.ravel(),
        "lane": lanes.ravel(),
        "input": inputs.ravel(),
        "nova": np.asarray(outcome.result.outputs).ravel(),
        "oracle": outcome.oracle.ravel(),
    })
    for kind, stats in outcome.luts.items():
        frame[kind] = np.asarray(stats.outputs).ravel()
    return frame


def write_sim_artifacts(store: ArtifactStore, outcome: SimOutcome, config: ExperimentConfig,
                        trace: bool = False) -> List[Path]:
    """pwl.json, sim_result.json, outputs.csv and optionally trace.csv under sim/."""
    payload = {
        "profile": outcome.profile,
        "function_id": outcome.pwl.function_id,
        "B": outcome.pwl.segment_count,
        "seed": outcome.seed,
        "config_digest": outcome.digest,
        "noc": outcome.noc_config.model_dump(mode="json"),
        "nova": outcome.result.summary(),
        "luts": {
            kind: {"base_cycles": s.base_cycles, "total_reads": s.total_reads, "total_bytes": s.total_bytes}
            for kind, s in outcome.luts.items()
        },
        "equivalent": outcome.equivalent,
        "max_abs_error": outcome.max_abs_error,
    }
    paths = [
        save_pwl(store, "sim/pwl.json", outcome.pwl, config.fixed_point),
        store.write_json("sim/sim_result.json", payload),
        store.write_csv("sim/outputs.csv", _outputs_frame(outcome)),
    ]
    if trace:
        paths.append(store.write_csv("sim/trace.csv", trace_frame(outcome.result.flit_events)))
    outcome.artifacts.extend(paths)
    return paths


def cmd_sim(config: ExperimentConfig, trace: bool = False) -> SimOutcome:
    """
    Simulate, write artifacts, then enforce three-way equality.

    Raises:
        ConfigError: Before any artifact is written
        ClaimCheckError: NoC, LUT and oracle outputs differ
    """
    outcome = run_simulation(config)
    write_sim_artifacts(ArtifactStore(config.out_dir), outcome, config, trace=trace)
    if not outcome.equivalent:
        raise ClaimCheckError(
            f"NoC, LUT and oracle outputs differ on profile '{outcome.profile}' (seed {outcome.seed})"
        )
    return outcome


def cmd_report(config: ExperimentConfig, against_paper: bool = False) -> ReportOutcome:
    """
    Energy per inference and approximator ratios for the configured profile.

    Writes report/energy.csv, report/comparison.csv and report/summary.json;
    with `against_paper` also report/claims.csv. The caller decides the exit
    code from `claims_passed`.

    Raises:
        ConfigError: A requested kind has no area/power entry on the profile
    """
    profile = load_profile(config.profile)
    kinds = config.kinds or profile.kinds()
    entries = [profile.entry(kind) for kind in kinds]
    scoped = profile.model_copy(update={"approximator_entries": entries})

    names = config.workloads or known_workloads()
    workloads = [load_workload(n, seq_len=profile.default_seq_len, layernorm=config.layernorm) for n in names]
    energy = workload_energy_table(
        scoped, workloads, kinds,
        breakpoint_count=config.sim.breakpoints,
        lanes_per_cycle=config.sim.lanes_per_cycle,
    )
    first = workloads[0].model_name if workloads else None
    comparison = compare(scoped, [r for r in energy if r.workload == first])

    outcome = ReportOutcome(profile=profile.name, energy=energy, comparison=comparison)
    store = ArtifactStore(config.out_dir)

    summary = {
        "profile": profile.name,
        "workloads": names,
        "kinds": kinds,
        "breakpoints": config.sim.breakpoints,
        "queries_by_function": {w.model_name: w.nonlinear_ops.by_function() for w in workloads},
        "comparison_note": comparison.note,
        "ratios": comparison.to_rows(),
    }
    if config.host_area_mm2 is not None:
        summary["area_overhead_pct"] = {k: area_overhead(scoped, k, config.host_area_mm2) for k in kinds}
    if config.total_power_mw is not None:
        summary["energy_share_pct"] = [
            {"workload": r.workload, "kind": r.kind, "share": energy_share(r, config.total_power_mw)}
            for r in energy
        ]

    outcome.artifacts.append(store.write_csv("report/energy.csv", energy_frame(energy)))
    outcome.artifacts.append(store.write_csv(
        "report/comparison.csv",
        pd.DataFrame(comparison.to_rows(),
                     columns=["profile", "kind_a", "kind_b", "power_ratio", "area_ratio", "energy_ratio"]),
    ))
    outcome.artifacts.append(store.write_json("report/summary.json", summary))

    if against_paper:
        outcome.claims = check_claims()
        outcome.artifacts.append(
            store.write_csv("report/claims.csv", pd.DataFrame([c.to_dict() for c in outcome.claims]))
        )
        passed, total = claim_tally(outcome.claims)
        logger.info(f"{passed}/{total} claims reproduced")
    return outcome


def _run_sweep_point(config: ExperimentConfig, profile: str, breakpoint_count: int, seed: int) -> dict:
    point = config.model_copy(update={
        "seed": seed,
        "profile": profile,
        "sim": config.sim.model_copy(update={"breakpoints": breakpoint_count}),
    })
    outcome = run_simulation(point)
    store = ArtifactStore(experiment_dir(config.out_dir, profile, breakpoint_count, seed))
    store.write_json("config.json", {**point.model_dump(mode="json"), "out_dir": None})
    write_sim_artifacts(store, outcome, point)
    return outcome.metrics()


async def cmd_sweep(config: ExperimentConfig) -> SweepOutcome:
    """
    Run sim for every (profile, breakpoints, seed) point concurrently.

    Each point writes under <out_dir>/<profile>/B<b>/seed<s>/; the summary
    rows are sorted, so the output tree does not depend on finish order.
    """
    profiles = config.sweep.profiles or [config.profile]
    for name in profiles:
        # warm the catalog before threads share it
        load_profile(name)

    aggregator = SweepAggregator()
    points: List[Tuple[str, int, int]] = [
        (p, b, s) for p in profiles for b in config.sweep.breakpoints for s in config.sweep.seeds
    ]
    for point in points:
        aggregator.add(*point)

    async def run_with_tracking(profile: str, breakpoint_count: int, seed: int) -> None:
        aggregator.start(profile, breakpoint_count, seed)
        try:
            metrics = await asyncio.to_thread(_run_sweep_point, config, profile, breakpoint_count, seed)
            aggregator.complete(profile, breakpoint_count, seed, metrics)
        except NovaError as e:
            aggregator.fail(profile, breakpoint_count, seed, str(e))

    logger.info(f"Sweeping {len(points)} experiments")
    await asyncio.gather(*(run_with_tracking(*point) for point in points))

    summary_csv = ArtifactStore(config.out_dir).write_csv("sweep_summary.csv", aggregator.to_frame())
    return SweepOutcome(aggregator=aggregator, summary_csv=summary_csv)


def fit_table(outcome: FitOutcome) -> Table:
    table = Table(title="Approximation error")
    for column in ("function", "B", "method", "max abs", "mean abs", "rmse"):
        table.add_column(column)
    for r in outcome.reports:
        table.add_row(r.function_id, str(r.breakpoint_count), r.method,
                      f"{r.max_abs_error:.3e}", f"{r.mean_abs_error:.3e}", f"{r.rmse:.3e}")
    return table


def format_sim_outcome(outcome: SimOutcome) -> str:
    """Format a simulation outcome for display."""
    result = outcome.result
    lines = [
        f"{'=' * 60}",
        f"NOVA SIMULATION: {outcome.profile} / {outcome.pwl.function_id} B={outcome.pwl.segment_count}",
        f"{'=' * 60}",
        f"routers: {outcome.noc_config.num_routers} ({result.segments} segment(s), "
        f"{outcome.noc_config.line_length_mm:.1f} mm line)",
        f"noc frequency multiplier: {result.noc_freq_multiplier}",
        f"base cycles (one transaction): {result.base_cycles}",
        f"base cycles (all lanes): {result.total_base_cycles} over {result.lane_batches} batch(es)",
        f"broadcasts: {result.broadcast_count}",
    ]
    for kind, stats in outcome.luts.items():
        lines.append(f"{kind}: {stats.base_cycles} base cycles, {stats.total_reads} reads")
    if outcome.max_abs_error is not None:
        lines.append(f"max abs error vs exact: {outcome.max_abs_error:.3e}")
    lines.append(f"outputs equivalent: {'yes' if outcome.equivalent else 'NO'}")
    lines.append("=" * 60)
    return "\n".join(lines)


def print_report(outcome: ReportOutcome, console: Optional[Console] = None) -> None:
    console = console or Console()
    table = Table(title=f"Energy per inference on {outcome.profile}")
    for column in ("workload", "kind", "queries", "cycles", "energy (mJ)"):
        table.add_column(column)
    for r in outcome.energy:
        table.add_row(r.workload, r.kind, str(r.queries), str(r.active_base_cycles), f"{r.energy_mj:.4g}")
    console.print(table)

    if outcome.comparison is not None:
        if outcome.comparison.note:
            console.print(outcome.comparison.note)
        else:
            ratios = Table(title="Pairwise ratios (a / b)")
            for column in ("a", "b", "power", "area", "energy"):
                ratios.add_column(column)
            for p in outcome.comparison.pairs:
                energy = f"{p.energy_ratio:.3f}" if p.energy_ratio is not None else "-"
                ratios.add_row(p.kind_a, p.kind_b, f"{p.power_ratio:.3f}", f"{p.area_ratio:.3f}", energy)
            console.print(ratios)

    console.print(related_work_table())
    if outcome.claims:
        console.print(claims_table(outcome.claims))
        passed, total = claim_tally(outcome.claims)
        console.print(f"{passed}/{total} claims reproduced")
