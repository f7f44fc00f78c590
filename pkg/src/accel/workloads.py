"""
Analytic non-linear query counts for transformer encoders.

Per inference sample:
    softmax_elements   = layers * heads * seq_len^2   (one exp each)
    softmax_rows       = layers * heads * seq_len     (one reciprocal each)
    gelu_elements      = layers * seq_len * ffn_dim
    layernorm_elements = 2 * layers * seq_len         (reciprocal sqrt, when enabled)
"""
import logging
from dataclasses import asdict, dataclass
from typing import Dict, List, Optional

from pydantic import BaseModel, ConfigDict, Field

from src.lib.data_catalog import DataCatalog, get_data_catalog, parse_model
from src.lib.errors import UnknownNameError

logger = logging.getLogger(__name__)


class WorkloadSpec(BaseModel):
    """Encoder hyperparameters of one benchmark model."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    model_name: str = Field(description="Benchmark identifier")
    num_layers: int = Field(gt=0, description="Encoder layers")
    num_heads: int = Field(gt=0, description="Attention heads per layer")
    hidden_dim: int = Field(gt=0, description="Model width")
    ffn_dim: int = Field(gt=0, description="Feed-forward inner width")
    seq_len: int = Field(gt=0, description="Tokens per inference sample")
    layernorm: bool = Field(default=False, description="Count LayerNorm reciprocal-sqrt evaluations")

    def with_seq_len(self, seq_len: int) -> "WorkloadSpec":
        data = {**self.model_dump(), "seq_len": seq_len}
        return parse_model(WorkloadSpec, data, f"seq_len override of {self.model_name}")

    @property
    def nonlinear_ops(self) -> "NonlinearCounts":
        return nonlinear_query_count(self)


@dataclass(frozen=True)
class NonlinearCounts:
    softmax_elements: int
    softmax_rows: int
    gelu_elements: int
    layernorm_elements: int

    @property
    def total(self) -> int:
        return self.softmax_elements + self.softmax_rows + self.gelu_elements + self.layernorm_elements

    def by_function(self) -> Dict[str, int]:
        """Queries grouped by the PWL that serves them."""
        return {
            "exp": self.softmax_elements,
            "reciprocal": self.softmax_rows + self.layernorm_elements,
            "gelu": self.gelu_elements,
        }

    def to_dict(self) -> Dict[str, int]:
        return {**asdict(self), "total": self.total}


def nonlinear_query_count(workload: WorkloadSpec) -> NonlinearCounts:
    """Non-linear evaluations one inference sample issues."""
    layers, heads, seq = workload.num_layers, workload.num_heads, workload.seq_len
    return NonlinearCounts(
        softmax_elements=layers * heads * seq * seq,
        softmax_rows=layers * heads * seq,
        gelu_elements=layers * seq * workload.ffn_dim,
        layernorm_elements=2 * layers * seq if workload.layernorm else 0,
    )


def known_workloads(catalog: Optional[DataCatalog] = None) -> List[str]:
    catalog = catalog or get_data_catalog()
    return sorted(row["model_name"] for row in catalog.document("workloads")["workloads"])


def load_workload(name: str, seq_len: Optional[int] = None, layernorm: bool = False,
                  catalog: Optional[DataCatalog] = None) -> WorkloadSpec:
    """
    Load a benchmark from the workload catalog.

    Args:
        name: Model name, e.g. bert_tiny
        seq_len: Overrides the catalog sequence length
        layernorm: Count LayerNorm evaluations

    Raises:
        UnknownNameError: Name not in the catalog
    """
    catalog = catalog or get_data_catalog()
    rows = {row["model_name"]: row for row in catalog.document("workloads")["workloads"]}
    if name not in rows:
        raise UnknownNameError("workload", name, rows.keys())
    spec = parse_model(WorkloadSpec, {**rows[name], "layernorm": layernorm}, str(catalog.path("workloads")))
    return spec.with_seq_len(seq_len) if seq_len is not None else spec
