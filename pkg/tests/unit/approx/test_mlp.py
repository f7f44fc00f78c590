"""Tests for MLP training and PWL extraction."""

import numpy as np
import pytest

from src.approx.functions import eval_exact
from src.approx.mlp import (
    MlpApproximator,
    TrainConfig,
    extract_pwl,
    fit_mlp,
    fit_mlp_pwl,
    mlp_eval,
    place_kinks,
)
from src.approx.pwl import eval_pwl
from src.lib.errors import InvalidArgumentError, TrainingDivergenceError


class TestPlaceKinks:
    """Test curvature-equalised kink placement."""

    def test_first_kink_on_lower_bound(self):
        """Test the first kink is pinned at the first sample."""
        xs = np.linspace(-8.0, 0.0, 512)
        kinks = place_kinks(xs, np.exp(xs), 16, 0.05, np.random.default_rng(0))
        assert kinks[0] == -8.0
        assert kinks.size == 16
        assert np.all(np.diff(kinks) > 0)

    def test_denser_where_curved(self):
        """Test exp gets more kinks near 0 than near -8."""
        xs = np.linspace(-8.0, 0.0, 512)
        kinks = place_kinks(xs, np.exp(xs), 16, 0.05)
        assert np.sum(kinks > -4.0) > np.sum(kinks <= -4.0)

    def test_flat_function_spreads_evenly(self):
        """Test zero curvature falls back to uniform spacing."""
        xs = np.linspace(0.0, 1.0, 101)
        kinks = place_kinks(xs, np.full_like(xs, 2.0), 4, 0.05)
        assert kinks.tolist() == pytest.approx([0.0, 0.25, 0.5, 0.75])

    def test_linear_function_spreads_evenly(self):
        """Test roundoff curvature on a straight line still gives uniform spacing."""
        xs = np.linspace(-1.0, 1.0, 257)
        kinks = place_kinks(xs, 2.0 * xs + 1.0, 4, 0.05)
        assert kinks.tolist() == pytest.approx([-1.0, -0.5, 0.0, 0.5])


class TestFitMlp:
    """Test fit_mlp and extraction."""

    def test_hidden_size_matches_breakpoints(self, quick_train):
        """Test the network has B hidden units."""
        mlp = fit_mlp("gelu", 8, train_config=quick_train)
        assert mlp.hidden_size == 8

    def test_deterministic_for_seed(self, quick_train):
        """Test equal seeds give equal weights."""
        assert fit_mlp("sigmoid", 8, train_config=quick_train) == fit_mlp("sigmoid", 8, train_config=quick_train)

    def test_extracted_pwl_matches_network(self, quick_train):
        """Test the extracted PWL reproduces the MLP inside the domain."""
        mlp = fit_mlp("gelu", 16, train_config=quick_train)
        pwl = extract_pwl(mlp, (-4.0, 4.0), function_id="gelu")
        xs = np.linspace(-4.0, 4.0, 10_000)

        assert pwl.breakpoints[0] == -4.0
        assert pwl.segment_count <= 16
        assert np.all(np.abs(eval_pwl(pwl, xs) - mlp_eval(mlp, xs)) <= 1e-9 * (1.0 + np.abs(mlp_eval(mlp, xs))))

    @pytest.mark.parametrize("name", ["exp", "gelu", "sigmoid", "tanh"])
    def test_extracted_pwl_is_continuous(self, quick_train, name):
        """Test neighbouring segments meet at every interior breakpoint."""
        pwl = fit_mlp_pwl(name, 16, train_config=quick_train)
        for i in range(1, pwl.segment_count):
            d = pwl.breakpoints[i]
            left = pwl.slopes[i - 1] * d + pwl.biases[i - 1]
            right = pwl.slopes[i] * d + pwl.biases[i]
            assert abs(left - right) <= 1e-6

    def test_linear_target_is_exact(self, quick_train):
        """Test 2x+1 is represented exactly by a four-breakpoint fit."""
        pwl = fit_mlp_pwl(lambda x: 2.0 * x + 1.0, 4, domain=(-1.0, 1.0), train_config=quick_train)
        xs = np.linspace(-1.0, 1.0, 1001)
        assert pwl.slopes == pytest.approx([2.0] * pwl.segment_count, abs=1e-6)
        assert pwl.biases == pytest.approx([1.0] * pwl.segment_count, abs=1e-6)
        assert np.max(np.abs(eval_pwl(pwl, xs) - (2.0 * xs + 1.0))) < 1e-6

    def test_fit_is_reasonable(self, quick_train):
        """Test even a short run approximates exp closely."""
        pwl = fit_mlp_pwl("exp", 16, train_config=quick_train)
        xs = np.linspace(-8.0, 0.0, 1001)
        assert np.max(np.abs(eval_pwl(pwl, xs) - eval_exact("exp", xs))) < 0.02
        assert pwl.function_id == "exp"

    def test_rejects_zero_breakpoints(self):
        """Test B must be positive."""
        with pytest.raises(InvalidArgumentError):
            fit_mlp("gelu", 0)

    def test_rejects_degenerate_domain(self):
        """Test an empty domain is rejected."""
        with pytest.raises(InvalidArgumentError):
            fit_mlp("gelu", 4, domain=(1.0, 1.0))

    def test_divergence_carries_seed(self):
        """Test a runaway step size surfaces the failing seed."""
        config = TrainConfig(samples=256, iterations=5, learning_rate=1e300, seed=7)
        with pytest.raises(TrainingDivergenceError) as excinfo:
            fit_mlp("gelu", 4, train_config=config)
        assert excinfo.value.seed == 7


class TestExtractPwl:
    """Test extract_pwl edge cases."""

    def test_no_kinks_in_domain(self):
        """Test an out-of-domain kink gives one segment at the lower bound."""
        mlp = MlpApproximator((1.0,), (-10.0,), (2.0,), 0.5)
        pwl = extract_pwl(mlp, (0.0, 1.0))
        assert pwl.breakpoints == (0.0,)
        assert pwl.slopes == (0.0,)
        assert pwl.biases == (0.5,)

    def test_coincident_kinks_merge(self):
        """Test duplicate kinks collapse into one breakpoint."""
        mlp = MlpApproximator((1.0, 1.0), (-0.5, -0.5), (1.0, 1.0), 0.0)
        pwl = extract_pwl(mlp, (0.0, 1.0))
        assert pwl.breakpoints == (0.5,)
        assert pwl.slopes == (2.0,)
        assert pwl.biases == (-1.0,)

    def test_invalid_weights(self):
        """Test mismatched weight vectors are rejected."""
        with pytest.raises(InvalidArgumentError):
            MlpApproximator((1.0, 1.0), (0.0,), (1.0, 1.0), 0.0)
