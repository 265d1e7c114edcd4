import math

import numpy as np
import pytest
from scipy.stats import norm

from jamming_game.analysis import PureStrategyProfile, error_probability
from jamming_game.errors import InvalidCovariance
from jamming_game.mixed import (
    GaussianJammerCovariance,
    compare_mixed_vs_pure,
    effective_variance,
    gamma_functional,
    jammer_variance,
    max_utility_covariance,
    mixed_best_threshold,
    mixed_utility,
)
from jamming_game.model import Priors, aggregate


def test_zero_covariance_matches_pure(agg, priors, budget):
    cov = GaussianJammerCovariance.of(np.zeros((2, 2)), budget.power)
    comparison = compare_mixed_vs_pure(cov, agg, priors)
    assert comparison.advantage == 0.0
    assert comparison.threshold == agg.c


def test_silent_gaussian_jammer_matches_pure_error(scenarios):
    for _, priors, agg, budget in scenarios:
        cov = GaussianJammerCovariance.of(np.zeros((agg.dim, agg.dim)), budget.power)
        grid = np.linspace(agg.c - 10 * agg.sigma, agg.c + 10 * agg.sigma, 201)
        pure = [error_probability(PureStrategyProfile.of(x, np.zeros(agg.dim)), agg, priors) for x in grid]
        assert np.allclose(gamma_functional(grid, cov, agg, priors), pure, rtol=0, atol=1e-15)


@pytest.mark.parametrize("scale", [0.0, 2.5])
def test_gamma_functional_tails(agg, budget, scale):
    skewed = Priors(pi0=0.75)
    cov = GaussianJammerCovariance.of(scale * np.eye(2), budget.power)
    deviation = math.sqrt(effective_variance(cov, agg))
    assert gamma_functional(20 * deviation, cov, agg, skewed) == pytest.approx(skewed.pi1, abs=1e-9)
    assert gamma_functional(-20 * deviation, cov, agg, skewed) == pytest.approx(skewed.pi0, abs=1e-9)


def test_isotropic_covariance_s1(agg, priors, budget):
    cov = GaussianJammerCovariance.of(2.5 * np.eye(2), budget.power)
    assert jammer_variance(cov, agg) == pytest.approx(12.5)
    assert effective_variance(cov, agg) == pytest.approx(15.5)
    assert gamma_functional(1.0, cov, agg, priors) == pytest.approx(norm.sf(1 / math.sqrt(15.5)), abs=1e-12)

    comparison = compare_mixed_vs_pure(cov, agg, priors)
    assert comparison.utility == pytest.approx(0.3997, abs=1e-3)
    assert comparison.advantage == pytest.approx(0.1179, abs=1e-3)
    assert comparison.pure == pytest.approx(norm.sf(1 / math.sqrt(3)), abs=1e-12)


def test_mixed_best_threshold_unequal_priors(network, budget):
    skewed = Priors(pi0=0.75)
    agg = aggregate(network, skewed)
    cov = GaussianJammerCovariance.of(2.5 * np.eye(2), budget.power)
    threshold = mixed_best_threshold(cov, agg, skewed)
    assert threshold == pytest.approx(1 + 7.75 * math.log(3), abs=1e-12)

    grid = np.linspace(threshold - 5, threshold + 5, 100001)
    values = gamma_functional(grid, cov, agg, skewed)
    assert grid[int(np.argmin(values))] == pytest.approx(threshold, abs=1e-4)
    assert mixed_utility(cov, agg, skewed) <= values.min() + 1e-15


def test_max_utility_covariance(agg, priors, budget):
    cov = max_utility_covariance(agg, budget)
    matrix = cov.check(agg.dim)
    assert np.trace(matrix) == pytest.approx(budget.power, abs=1e-12)
    assert jammer_variance(cov, agg) == pytest.approx(budget.power * agg.btb, abs=1e-9)
    assert np.allclose(matrix, [[4.0, 2.0], [2.0, 1.0]])
    isotropic = GaussianJammerCovariance.of(2.5 * np.eye(2), budget.power)
    assert mixed_utility(cov, agg, priors) > mixed_utility(isotropic, agg, priors)


def test_utility_depends_on_jammer_variance_only(agg, priors, budget):
    first = GaussianJammerCovariance.of(np.diag([1.0, 0.0]), budget.power)
    second = GaussianJammerCovariance.of(np.diag([0.0, 4.0]), budget.power)
    assert jammer_variance(first, agg) == jammer_variance(second, agg) == 4.0
    assert mixed_utility(first, agg, priors) == mixed_utility(second, agg, priors)
    larger = GaussianJammerCovariance.of(np.diag([2.0, 0.0]), budget.power)
    assert mixed_utility(larger, agg, priors) > mixed_utility(first, agg, priors)


def test_advantage_is_nonnegative(scenarios):
    rng = np.random.default_rng(23)
    for idx in range(500):
        _, priors, agg, budget = scenarios[idx % len(scenarios)]
        factor = rng.standard_normal((agg.dim, agg.dim))
        matrix = factor @ factor.T
        matrix *= rng.uniform(0, 1) * budget.power / max(np.trace(matrix), 1e-300)
        cov = GaussianJammerCovariance.of(0.5 * (matrix + matrix.T), budget.power)
        comparison = compare_mixed_vs_pure(cov, agg, priors)
        assert comparison.advantage >= 0
        if comparison.advantage == 0:
            assert comparison.jammer_variance <= 1e-12


@pytest.mark.parametrize(
    "matrix, power",
    [
        ([[1.0, 0.0], [0.0, -1.0]], 5.0),
        ([[1.0, 0.5], [0.0, 1.0]], 5.0),
        ([[3.0, 0.0], [0.0, 3.0]], 5.0),
        ([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]], 5.0),
    ],
)
def test_invalid_covariance(agg, matrix, power):
    with pytest.raises(InvalidCovariance):
        GaussianJammerCovariance.of(matrix, power).check(agg.dim)
