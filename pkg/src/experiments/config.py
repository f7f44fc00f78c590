"""
Experiment configuration: strict JSON validated by pydantic.

Unknown keys are rejected at every level so typos in experiment files fail
loudly instead of silently falling back to defaults.
"""
import json
import logging
from pathlib import Path
from typing import List, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field

from src.accel.profiles import known_profiles
from src.accel.workloads import known_workloads
from src.approx.functions import EXACT_FUNCTIONS, default_domain
from src.approx.mlp import TrainConfig
from src.lib.data_catalog import DataCatalog, get_data_catalog, parse_model
from src.lib.errors import ConfigError, UnknownNameError
from src.lib.fixed_point import FixedPointFormat

logger = logging.getLogger(__name__)


class FunctionSpec(BaseModel):
    """A function to fit and the breakpoint counts to fit it at."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    function_id: str = Field(description="exp, gelu, tanh, sigmoid, reciprocal or identity")
    breakpoints: List[int] = Field(default_factory=lambda: [16], description="Breakpoint counts to fit")
    domain: Optional[Tuple[float, float]] = Field(default=None, description="Fitting domain override")

    def fit_domain(self) -> Tuple[float, float]:
        return self.domain if self.domain is not None else default_domain(self.function_id)


class SimSettings(BaseModel):
    """What `sim` and each sweep point push through the NoC."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    function_id: str = Field(default="gelu", description="Function whose PWL is broadcast")
    breakpoints: int = Field(default=16, ge=1, description="Breakpoint count of the broadcast PWL")
    pwl_path: Optional[str] = Field(default=None, description="Load this PWL file instead of fitting")
    lanes_per_router: int = Field(default=8, ge=0, description="Active lanes per router (capped at neurons)")
    lanes_per_cycle: int = Field(default=1, ge=1, description="Lookups each router issues per base cycle")
    num_routers: Optional[int] = Field(default=None, description="Override the profile's router count")
    input_margin: float = Field(
        default=0.1, ge=0.0, description="Inputs are drawn from the fit domain widened by this fraction"
    )


class SweepSettings(BaseModel):
    """Grid fanned out by `sweep`."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    profiles: List[str] = Field(default_factory=list, description="Profiles; empty means the config's profile")
    breakpoints: List[int] = Field(default_factory=lambda: [8, 16], description="Breakpoint counts")
    seeds: List[int] = Field(default_factory=lambda: [0], description="Seeds")


class ExperimentConfig(BaseModel):
    """Top-level experiment file."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    seed: int = Field(description="Seed for training and input generation")
    functions: List[FunctionSpec] = Field(default_factory=list, description="Functions for `fit`")
    fixed_point: FixedPointFormat = Field(default_factory=FixedPointFormat, description="Word format")
    profile: str = Field(default="react", description="Accelerator profile")
    workloads: List[str] = Field(default_factory=list, description="Workloads for `report`; empty means all")
    kinds: List[str] = Field(default_factory=list, description="Approximator kinds; empty means all on the profile")
    out_dir: str = Field(default="out", description="Artifact root directory")
    train: TrainConfig = Field(default_factory=TrainConfig, description="MLP training hyperparameters")
    sim: SimSettings = Field(default_factory=SimSettings, description="Simulation settings")
    sweep: SweepSettings = Field(default_factory=SweepSettings, description="Sweep grid")
    total_power_mw: Optional[float] = Field(default=None, gt=0.0, description="Accelerator power for energy share")
    host_area_mm2: Optional[float] = Field(default=None, gt=0.0, description="Host die area for area overhead")
    layernorm: bool = Field(default=False, description="Count LayerNorm evaluations in workloads")

    def train_config(self, seed: Optional[int] = None) -> TrainConfig:
        """Training hyperparameters with the experiment seed applied."""
        return self.train.model_copy(update={"seed": self.seed if seed is None else seed})

    def with_overrides(self, seed: Optional[int] = None, out_dir: Optional[str] = None) -> "ExperimentConfig":
        update = {}
        if seed is not None:
            update["seed"] = seed
        if out_dir is not None:
            update["out_dir"] = out_dir
        return self.model_copy(update=update) if update else self


def validate_references(config: ExperimentConfig, catalog: Optional[DataCatalog] = None) -> ExperimentConfig:
    """
    Check that every profile, workload and function the config names resolves.

    Raises:
        UnknownNameError: First unresolved name
    """
    catalog = catalog or get_data_catalog()
    profiles = known_profiles(catalog)
    for name in [config.profile, *config.sweep.profiles]:
        if name not in profiles:
            raise UnknownNameError("profile", name, profiles)
    workloads = known_workloads(catalog)
    for name in config.workloads:
        if name not in workloads:
            raise UnknownNameError("workload", name, workloads)
    for name in [spec.function_id for spec in config.functions] + [config.sim.function_id]:
        if name not in EXACT_FUNCTIONS:
            raise UnknownNameError("function", name, EXACT_FUNCTIONS.keys())
    return config


def parse_experiment_config(data: dict, source: str = "<config>") -> ExperimentConfig:
    return validate_references(parse_model(ExperimentConfig, data, source))


def load_experiment_config(path: Union[str, Path]) -> ExperimentConfig:
    """
    Read and validate an experiment file.

    Raises:
        ConfigError: Missing file, invalid JSON, unknown keys or unresolved names
    """
    path = Path(path)
    try:
        with open(path, encoding="utf-8") as handle:
            data = json.load(handle)
    except FileNotFoundError as e:
        raise ConfigError(f"Config file not found: {path}") from e
    except json.JSONDecodeError as e:
        raise ConfigError(f"Config file {path} is not valid JSON: {e}") from e
    config = parse_experiment_config(data, str(path))
    logger.info(f"Loaded experiment config {path} (seed={config.seed}, profile={config.profile})")
    return config
