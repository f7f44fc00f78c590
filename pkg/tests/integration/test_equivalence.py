"""NoC, LUT baselines and the fixed-point oracle must agree bit for bit."""

import numpy as np
import pytest

from src.approx.pwl import PiecewiseLinearFn, eval_pwl_fixed, quantize_pwl
from src.baselines.lut import LutConfig, simulate_lut
from src.lib.fixed_point import FixedPointFormat, quantize
from src.noc.config import NovaNocConfig
from src.noc.flit import wave_count
from src.noc.simulator import mapper_configure, simulate_approximation

pytestmark = pytest.mark.integration


def _random_pwl(rng, count):
    lo, hi = sorted(rng.uniform(-8.0, 8.0, size=2))
    hi = max(hi, lo + 1.0)
    grid = np.linspace(lo, hi, 64 * count, endpoint=False)
    breakpoints = np.sort(rng.choice(grid, size=count, replace=False))
    return PiecewiseLinearFn(
        function_id="random",
        breakpoints=tuple(breakpoints),
        slopes=tuple(rng.uniform(-3.0, 3.0, size=count)),
        biases=tuple(rng.uniform(-4.0, 4.0, size=count)),
        domain=(float(lo), float(hi)),
    )


def _random_case(rng):
    count = int(rng.integers(1, 17))
    pwl = _random_pwl(rng, count)
    fmt = FixedPointFormat(total_bits=16, frac_bits=int(rng.integers(6, 13)))
    routers = int(rng.integers(1, 11))
    neurons = int(rng.integers(1, 65))
    lanes = int(rng.integers(1, neurons + 1))
    cfg = NovaNocConfig(
        num_routers=routers,
        neurons_per_router=neurons,
        base_freq_mhz=1000.0,
        lanes_per_cycle=int(rng.integers(1, 9)),
    )
    lo, hi = pwl.domain
    inputs = rng.uniform(lo - 2.0, hi + 2.0, size=(routers, lanes))
    return mapper_configure(cfg, pwl), pwl, fmt, inputs


class TestRandomizedEquivalence:
    """Randomized (PWL, format, topology, inputs) cases."""

    @pytest.mark.slow
    def test_three_way_bit_equality(self):
        """Test at least 10^4 lanes agree across NoC, both LUTs and the oracle."""
        rng = np.random.default_rng(2024)
        checked = 0
        while checked < 10_000:
            cfg, pwl, fmt, inputs = _random_case(rng)
            oracle = eval_pwl_fixed(pwl, inputs, fmt)

            nova = simulate_approximation(cfg, pwl, inputs, fmt)
            np.testing.assert_array_equal(nova.outputs, oracle)
            for kind in ("per_neuron", "per_core"):
                lut = simulate_lut(LutConfig(kind=kind, neurons=cfg.neurons_per_router), pwl, inputs, fmt)
                np.testing.assert_array_equal(lut.outputs, oracle)
            checked += inputs.size

    def test_saturating_inputs(self, make_pwl, q5_10):
        """Test inputs beyond the word range saturate identically everywhere."""
        pwl = make_pwl(16)
        inputs = np.array([[-1e6, -40.0, 31.99, 1e6]])
        cfg = mapper_configure(NovaNocConfig(num_routers=1, neurons_per_router=4, base_freq_mhz=1000.0), pwl)
        oracle = eval_pwl_fixed(pwl, inputs, q5_10)
        np.testing.assert_array_equal(simulate_approximation(cfg, pwl, inputs, q5_10).outputs, oracle)
        lut = simulate_lut(LutConfig(kind="per_core", neurons=4), pwl, inputs, q5_10)
        np.testing.assert_array_equal(lut.outputs, oracle)


class TestWaveCoverage:
    """Every address of every breakpoint count reaches its router."""

    @pytest.mark.parametrize("count", range(1, 17))
    def test_every_address(self, make_pwl, q5_10, count):
        """Test one input per segment, plus the exact breakpoints, match the oracle."""
        pwl = make_pwl(count)
        lo, hi = pwl.domain
        step = (hi - lo) / count
        midpoints = [lo + (i + 0.5) * step for i in range(count)]
        values = np.array(midpoints + list(pwl.breakpoints) + [lo - 1.0])
        inputs = np.vstack([values, values[::-1]])
        cfg = mapper_configure(
            NovaNocConfig(num_routers=2, neurons_per_router=values.size, base_freq_mhz=1000.0), pwl
        )

        result = simulate_approximation(cfg, pwl, inputs, q5_10)

        words = quantize_pwl(pwl, q5_10)
        assert set(words.lookup_address(quantize(inputs, q5_10)).ravel()) == set(range(1, count + 1))
        np.testing.assert_array_equal(result.outputs, eval_pwl_fixed(pwl, inputs, q5_10))
        assert result.noc_freq_multiplier == wave_count(count)
        assert result.broadcast_count == wave_count(count) * values.size
