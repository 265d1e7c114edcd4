import math

import numpy as np
import pytest
from pydantic import ValidationError

from jamming_game.errors import (
    DegenerateModel,
    DimensionMismatch,
    InvalidGameConfig,
    NegativeGain,
)
from jamming_game.model import (
    GameConfig,
    JammerBudget,
    NetworkParams,
    Priors,
    Tolerances,
    aggregate,
    required_threshold_bound,
    split_strategy,
    validate_strategy,
)


def test_aggregate_s1(agg):
    assert agg.a == 2.0
    assert agg.b == (2.0, 1.0)
    assert agg.sigma2 == 3.0
    assert agg.c == 1.0
    assert agg.btb == 5.0
    assert agg.dim == 2


def test_aggregate_unequal_priors(network):
    agg = aggregate(network, Priors(pi0=0.75))
    assert agg.c == pytest.approx(1 + 1.5 * math.log(3), abs=1e-12)
    assert agg.c == pytest.approx(2.6479, abs=1e-4)


def test_swapping_priors_mirrors_offset(network, priors):
    skewed = Priors(pi0=0.2)
    c = aggregate(network, skewed).c
    c_swapped = aggregate(network, skewed.swapped()).c
    # c(π0) + c(π1) = a
    assert c + c_swapped == pytest.approx(2.0, abs=1e-12)


def test_priors_derive_pi1():
    assert Priors(pi0=0.25).pi1 == pytest.approx(0.75)


@pytest.mark.parametrize("pi0", [0.0, 1.0, -0.1, 1.5])
def test_priors_out_of_range(pi0):
    with pytest.raises(ValidationError):
        Priors(pi0=pi0)


def test_priors_must_sum_to_one():
    with pytest.raises(ValidationError):
        Priors(pi0=0.5, pi1=0.6)


def test_aggregate_without_jammer():
    network = NetworkParams(alpha=(1.0,), phi=(2.0,), sigma_s=1.0, sigma_fc=1.0)
    agg = aggregate(network, Priors(pi0=0.5))
    assert agg.b == ()
    assert agg.a == 2.0
    assert agg.sigma2 == 5.0


def test_aggregate_degenerate():
    network = NetworkParams(alpha=(1.0, -1.0), phi=(1.0, 1.0), psi=(1.0,), sigma_s=1.0, sigma_fc=1.0)
    with pytest.raises(DegenerateModel):
        aggregate(network, Priors(pi0=0.5))


def test_aggregate_negative_gain():
    network = NetworkParams(alpha=(1.0,), phi=(1.0,), psi=(-0.5,), sigma_s=1.0, sigma_fc=1.0)
    with pytest.raises(NegativeGain):
        aggregate(network, Priors(pi0=0.5))


def test_ragged_beta(priors):
    network = NetworkParams(
        alpha=(1.0, 1.0), phi=(1.0, 1.0), beta=((1.0,), (1.0, 2.0)), psi=(), sigma_s=1.0, sigma_fc=1.0
    )
    with pytest.raises(DimensionMismatch):
        aggregate(network, priors)


def test_phi_length_mismatch(priors):
    network = NetworkParams(alpha=(1.0, 1.0), phi=(1.0,), sigma_s=1.0, sigma_fc=1.0)
    with pytest.raises(DimensionMismatch):
        aggregate(network, priors)


def test_dimension_errors_are_value_errors():
    assert issubclass(DimensionMismatch, ValueError)


def test_network_rejects_unknown_fields():
    with pytest.raises(ValidationError):
        NetworkParams(alpha=(1.0,), phi=(1.0,), sigma_s=1.0, sigma_fc=1.0, gamma=(1.0,))


def test_network_rejects_nonpositive_noise():
    with pytest.raises(ValidationError):
        NetworkParams(alpha=(1.0,), phi=(1.0,), sigma_s=0.0, sigma_fc=1.0)


def test_validate_strategy(agg, budget):
    assert validate_strategy([2.0, 1.0], budget, agg)
    assert not validate_strategy([2.0, 1.1], budget, agg)
    assert validate_strategy([0.0, 0.0], JammerBudget(power=0.0), agg)


def test_validate_strategy_wrong_length(agg, budget):
    with pytest.raises(DimensionMismatch):
        validate_strategy([1.0], budget, agg)


def test_split_strategy(network):
    w_s, w_fc = split_strategy([0.5, -0.25], network.dims[1])
    assert w_s.tolist() == [0.5]
    assert w_fc.tolist() == [-0.25]


def test_dims(network):
    assert network.dims == (2, 1, 1)
    assert network.beta_matrix.shape == (2, 1)


def test_default_threshold_bound(agg, budget):
    expected = 1.0 + 5.0 + 6.0 * math.sqrt(3.0)
    assert required_threshold_bound(agg, budget) == pytest.approx(expected)
    assert GameConfig().resolve(agg, budget) == pytest.approx(expected)


def test_threshold_bound_too_small(agg, budget):
    with pytest.raises(InvalidGameConfig):
        GameConfig(threshold_bound=5.0).resolve(agg, budget)
    assert GameConfig(threshold_bound=100.0).resolve(agg, budget) == 100.0


def test_tolerance_floors():
    with pytest.raises(ValidationError):
        Tolerances(lambda_grid_points=100)
    with pytest.raises(ValidationError):
        Tolerances(w_samples=10)
    assert Tolerances().seed == 0


def test_aggregate_matches_direct_sums(scenarios):
    for network, priors, agg, _ in scenarios:
        phi = np.asarray(network.phi)
        assert agg.a == pytest.approx(float(phi @ np.asarray(network.alpha)))
        assert agg.sigma2 == pytest.approx(network.sigma_fc**2 + network.sigma_s**2 * float(phi @ phi))
        expected_c = (agg.a**2 + 2 * agg.sigma2 * math.log(priors.pi0 / priors.pi1)) / (2 * agg.a)
        assert agg.c == pytest.approx(expected_c, abs=1e-12)
        assert all(value >= 0 for value in agg.b)


def test_aggregate_permutation_equivariant(scenarios):
    rng = np.random.default_rng(3)
    for network, priors, agg, _ in scenarios:
        order = rng.permutation(len(network.alpha))
        shuffled = network.model_copy(
            update={
                "alpha": tuple(network.alpha[i] for i in order),
                "phi": tuple(network.phi[i] for i in order),
                "beta": tuple(network.beta[i] for i in order) if network.beta else (),
            }
        )
        permuted = aggregate(shuffled, priors)
        assert permuted.a == pytest.approx(agg.a, rel=1e-12)
        assert permuted.sigma2 == pytest.approx(agg.sigma2, rel=1e-12)
        assert permuted.b == pytest.approx(agg.b, rel=1e-12)
        assert permuted.c == pytest.approx(agg.c, rel=1e-12, abs=1e-12)


@pytest.mark.parametrize("scale", [0.5, 2.0])
def test_aggregate_forwarding_scaling(scenarios, scale):
    for network, priors, agg, _ in scenarios:
        n_sensing = network.dims[1]
        scaled = aggregate(network.model_copy(update={"phi": tuple(scale * x for x in network.phi)}), priors)
        phi = np.asarray(network.phi)
        assert scaled.a == pytest.approx(scale * agg.a, rel=1e-12)
        assert scaled.b[:n_sensing] == pytest.approx(tuple(scale * x for x in agg.b[:n_sensing]), rel=1e-12)
        assert scaled.b[n_sensing:] == agg.b[n_sensing:]
        expected_sigma2 = network.sigma_fc**2 + scale**2 * network.sigma_s**2 * float(phi @ phi)
        assert scaled.sigma2 == pytest.approx(expected_sigma2, rel=1e-12)


def test_split_strategy_rows():
    w = np.arange(6.0).reshape(2, 3)
    w_s, w_fc = split_strategy(w, 2)
    assert w_s.tolist() == [[0.0, 1.0], [3.0, 4.0]]
    assert w_fc.tolist() == [[2.0], [5.0]]
