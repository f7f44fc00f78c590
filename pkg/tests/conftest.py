import json

import pytest

from src.approx.mlp import TrainConfig
from src.approx.pwl import PiecewiseLinearFn
from src.lib.data_catalog import reset_data_catalog
from src.lib.fixed_point import FixedPointFormat


@pytest.fixture(autouse=True)
def fresh_data_catalog(monkeypatch):
    """Every test starts from the repo data directory with no cached documents."""
    monkeypatch.delenv("NOVA_DATA_DIR", raising=False)
    reset_data_catalog()
    yield
    reset_data_catalog()


@pytest.fixture
def q5_10():
    """Default signed Q5.10 word format."""
    return FixedPointFormat()


@pytest.fixture
def quick_train():
    """Short training run for tests that only need a plausible fit."""
    return TrainConfig(samples=1024, iterations=200, seed=0)


@pytest.fixture
def make_pwl():
    """Build a PWL with evenly spaced breakpoints over a domain."""
    def _make(count, domain=(-4.0, 4.0), slope=0.5, function_id="custom"):
        lo, hi = domain
        step = (hi - lo) / count
        return PiecewiseLinearFn(
            function_id=function_id,
            breakpoints=tuple(lo + i * step for i in range(count)),
            slopes=tuple(slope * (i + 1) / count for i in range(count)),
            biases=tuple(0.25 * i - 1.0 for i in range(count)),
            domain=domain,
        )
    return _make


@pytest.fixture
def write_config(tmp_path):
    """Write an experiment config JSON into tmp_path and return its path."""
    def _write(payload, name="experiment.json"):
        payload = {"out_dir": str(tmp_path / "out"), **payload}
        path = tmp_path / name
        path.write_text(json.dumps(payload), encoding="utf-8")
        return path
    return _write
