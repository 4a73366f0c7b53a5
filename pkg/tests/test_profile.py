"""Tests for rank probability profiles."""

from __future__ import annotations

import math

import numpy as np
import pytest

from rankgraph.errors import ConfigurationError, InfeasibleDensityError, NumericError, ValidationError
from rankgraph.profile import (
    B_MAX,
    _curve,
    cumulative_curve,
    cumulative_edges,
    epsilon_to_weight,
    expected_edges,
    probability_matrix,
    probability_vector,
)
from rankgraph.rank import pair_count
from rankgraph.zoo import nested


class TestEpsilonToWeight:
    def test_fixed_point(self) -> None:
        assert epsilon_to_weight(0.5) == 1.0

    def test_limits(self) -> None:
        assert epsilon_to_weight(0.0) == B_MAX
        assert epsilon_to_weight(1.0) == 0.0

    def test_strictly_decreasing(self) -> None:
        grid = np.linspace(0.0, 1.0, 1002)[1:-1]
        weights = np.array([epsilon_to_weight(e) for e in grid])
        assert np.all(np.diff(weights) < 0)

    @pytest.mark.parametrize("epsilon", [-0.1, 1.5, math.nan])
    def test_out_of_range(self, epsilon: float) -> None:
        with pytest.raises(ValidationError, match="epsilon"):
            epsilon_to_weight(epsilon)


class TestCurve:
    @pytest.mark.parametrize("b", [1e-3, 0.1, 1.0, 10.0, 1e4])
    def test_x_strictly_increasing(self, b: float) -> None:
        t = np.linspace(0.0, 1.0, 1001)
        x, _ = _curve(t, b, (10.0, 10.0), (100.0, 10.0))
        assert np.all(np.diff(x) > 0)


class TestCumulativeEdges:
    def test_chord_at_zero_weight(self) -> None:
        x = np.array([0.0, 10.0, 25.0, 100.0])
        np.testing.assert_allclose(cumulative_edges(100, 20.0, 0.0, x), 20.0 * x / 100)

    @pytest.mark.parametrize("b", [0.05, 1.0, 50.0, 1e6])
    def test_endpoints(self, b: float) -> None:
        values = cumulative_edges(1000, 37.0, b, [0.0, 1000.0])
        assert values[0] == 0.0
        assert values[1] == 37.0

    def test_parabola_at_unit_weight(self) -> None:
        # with b = 1, L = 6, m = 3 the curve is Y(x) = x - x^2 / 12
        x = np.arange(7, dtype=float)
        np.testing.assert_allclose(cumulative_edges(6, 3.0, 1.0, x), x - x**2 / 12, atol=1e-12)

    def test_value_at_m_between_chord_and_polygon(self) -> None:
        length, m = 130816, 128.0
        y = float(cumulative_edges(length, m, 1.0, [m])[0])
        assert m * m / length < y < m

    def test_rejects_outside_range(self) -> None:
        with pytest.raises(ValidationError, match="abscissa"):
            cumulative_edges(10, 3.0, 1.0, [11.0])
        with pytest.raises(ValidationError):
            cumulative_edges(10, 3.0, 1.0, [-0.5])

    def test_inversion_without_convergence(self, monkeypatch: pytest.MonkeyPatch) -> None:
        monkeypatch.setattr("rankgraph.profile.MAX_BISECTIONS", 1)
        with pytest.raises(NumericError, match="did not converge"):
            cumulative_edges(100, 10.0, 2.0, [5.0])


class TestProbabilityVector:
    def test_uniform_at_one(self) -> None:
        profile = probability_vector(130816, 128, 1.0)
        assert np.all(profile.probabilities == 128 / 130816)

    def test_step_at_zero(self) -> None:
        assert probability_vector(6, 3, 0.0).probabilities.tolist() == [1, 1, 1, 0, 0, 0]

    def test_fractional_step(self) -> None:
        assert probability_vector(5, 2.5, 0.0).probabilities.tolist() == [1, 1, 0.5, 0, 0]

    def test_half(self) -> None:
        profile = probability_vector(6, 3, 0.5)
        p = profile.probabilities
        assert np.all(np.diff(p) <= 1e-12)
        assert 0.5 < p[0] < 1.0
        assert math.isclose(p.sum(), 3.0, rel_tol=1e-9)

    def test_infeasible_density(self) -> None:
        with pytest.raises(InfeasibleDensityError, match="m=7"):
            probability_vector(6, 7, 0.5)

    def test_empty_and_full(self) -> None:
        assert np.all(probability_vector(10, 0, 0.3).probabilities == 0)
        assert np.all(probability_vector(10, 10, 0.3).probabilities == 1)

    def test_at(self) -> None:
        profile = probability_vector(6, 3, 0.0)
        assert profile.at(3) == 1.0
        assert profile.at(4) == 0.0
        with pytest.raises(ValidationError):
            profile.at(7)

    def test_randomized_mass_and_monotonicity(self) -> None:
        rng = np.random.default_rng(20240601)
        extremes = [1e-9, 1e-6, 1 - 1e-9, 0.999999]
        for i in range(100):
            n = int(rng.integers(2, 201))
            length = pair_count(n)
            m = float(rng.uniform(0, length))
            epsilon = extremes[i % 5] if i % 5 < 4 else float(rng.uniform(0, 1))
            p = probability_vector(length, m, epsilon).probabilities
            assert np.all(p >= 0) and np.all(p <= 1)
            assert np.all(p[1:] <= p[:-1] + 1e-12)
            assert math.isclose(math.fsum(p.tolist()), m, rel_tol=1e-9, abs_tol=1e-12)

    def test_saturated_head_is_monotone(self) -> None:
        length = pair_count(164)
        profile = probability_vector(length, 10547.8, 1e-6)
        p = profile.probabilities
        assert np.all(p[1:] <= p[:-1] + 1e-12)
        assert math.isclose(profile.expected_edges, 10547.8, rel_tol=1e-9)

    def test_near_one_approaches_uniform(self) -> None:
        length, m = 1000, 40.0
        deviations = [
            float(np.max(np.abs(probability_vector(length, m, e).probabilities - m / length)))
            for e in (0.5, 0.9, 0.99, 0.999, 0.999999)
        ]
        assert all(b < a for a, b in zip(deviations, deviations[1:], strict=False))

    @pytest.mark.parametrize(("length", "m"), [(4950, 10.0), (4950, 50.0), (4950, 200.0), (9870, 100.0)])
    def test_near_zero_approaches_step(self, length: int, m: float) -> None:
        p = probability_vector(length, m, 0.001).probabilities
        head = math.floor(0.9 * m)
        assert np.all(p[:head] > 0.9)
        assert np.all(p[int(2 * m) :] < 0.1)


class TestExpectedEdges:
    def test_limits_exact(self) -> None:
        assert expected_edges(probability_vector(100, 7, 0.0)) == 7
        assert math.isclose(expected_edges(probability_vector(100, 7, 1.0)), 7, rel_tol=1e-12)

    def test_mid_epsilon(self) -> None:
        profile = probability_vector(pair_count(100), 500, 0.3)
        assert math.isclose(profile.expected_edges, 500, rel_tol=1e-9)


class TestCumulativeCurve:
    def test_endpoints_and_length(self) -> None:
        xs, ys = cumulative_curve(probability_vector(130816, 128, 0.5), samples=33)
        assert xs.size == ys.size == 33
        assert ys[0] == 0.0
        assert ys[-1] == 128.0

    def test_step(self) -> None:
        _, ys = cumulative_curve(probability_vector(100, 10, 0.0), samples=11)
        assert ys.tolist() == [0, 10, 10, 10, 10, 10, 10, 10, 10, 10, 10]


class TestProbabilityMatrix:
    def test_symmetric_with_expected_total(self) -> None:
        model = nested(12)
        profile = probability_vector(model.pair_count, 20, 0.2)
        matrix = probability_matrix(model, profile)
        np.testing.assert_array_equal(matrix, matrix.T)
        assert np.all(np.diag(matrix) == 0)
        assert math.isclose(matrix.sum() / 2, 20, rel_tol=1e-9)

    def test_mismatch(self) -> None:
        with pytest.raises(ConfigurationError):
            probability_matrix(nested(5), probability_vector(11, 3, 0.5))
