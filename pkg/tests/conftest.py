import json

import numpy as np
import pytest

from jamming_game.model import JammerBudget, NetworkParams, Priors, aggregate

S1 = {
    "network": {
        "alpha": [1.0, 1.0],
        "phi": [1.0, 1.0],
        "beta": [[1.0], [1.0]],
        "psi": [1.0],
        "sigma_s": 1.0,
        "sigma_fc": 1.0,
    },
    "priors": {"pi0": 0.5, "pi1": 0.5},
    "jammer": {"power": 5.0},
}


@pytest.fixture
def s1_data():
    return json.loads(json.dumps(S1))


@pytest.fixture
def network():
    return NetworkParams.model_validate(S1["network"])


@pytest.fixture
def priors():
    return Priors(pi0=0.5, pi1=0.5)


@pytest.fixture
def budget():
    return JammerBudget(power=5.0)


@pytest.fixture
def agg(network, priors):
    return aggregate(network, priors)


@pytest.fixture
def s1_file(tmp_path, s1_data):
    path = tmp_path / "s1.json"
    path.write_text(json.dumps(s1_data))
    return str(path)


def random_scenario(rng: np.random.Generator):
    """A random admissible scenario with at least one jammer antenna that reaches the fusion center."""
    n_sensors = int(rng.integers(1, 5))
    n_sensing = int(rng.integers(0, 3))
    n_fc = int(rng.integers(0, 3)) if n_sensing else int(rng.integers(1, 3))
    network = NetworkParams(
        alpha=tuple(rng.uniform(0.5, 2.0, n_sensors)),
        phi=tuple(rng.uniform(0.5, 2.0, n_sensors)),
        beta=tuple(tuple(row) for row in rng.uniform(0.1, 2.0, (n_sensors, n_sensing))) if n_sensing else (),
        psi=tuple(rng.uniform(0.1, 2.0, n_fc)),
        sigma_s=float(rng.uniform(0.5, 1.5)),
        sigma_fc=float(rng.uniform(0.5, 1.5)),
    )
    priors = Priors(pi0=float(rng.uniform(0.2, 0.8)))
    budget = JammerBudget(power=float(rng.uniform(0.5, 10.0)))
    return network, priors, aggregate(network, priors), budget


def random_feasible_w(rng: np.random.Generator, dim: int, power: float) -> np.ndarray:
    w = rng.standard_normal(dim)
    return w / np.linalg.norm(w) * np.sqrt(power) * rng.random() ** (1.0 / dim)


@pytest.fixture
def scenarios():
    rng = np.random.default_rng(2024)
    return [random_scenario(rng) for _ in range(20)]
