"""Monte Carlo oracle that simulates every sensor and the MAC instead of the collapsed model.

Only NetworkParams are consumed here, so agreement with the closed forms is an
independent check of aggregate() as well as of the error probability itself.
"""
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Optional

import numpy as np
from pydantic import BaseModel, Field
from tqdm import tqdm

from jamming_game.analysis import PureStrategyProfile
from jamming_game.errors import InvalidTrials
from jamming_game.mixed import GaussianJammerCovariance
from jamming_game.model import NetworkParams, Priors, split_strategy, strategy_vector
from jamming_game.utils import default_block_size, default_workers, progress_enabled

logger = logging.getLogger("jamming-game")

JammerSampler = Callable[[np.random.Generator, int], np.ndarray]


class MonteCarloEstimate(BaseModel):
    """Error fraction over simulated trials with its binomial standard error."""

    estimate: float = Field(..., ge=0, le=1)
    trials: int = Field(..., ge=1)
    stderr: float = Field(..., ge=0)
    seed: int
    errors: int = Field(..., ge=0)

    def agrees_with(self, value: float, k: float = 4.0) -> bool:
        return abs(self.estimate - value) <= k * self.stderr


def _block_rng(seed: int, block: int) -> np.random.Generator:
    # derived from (seed, block index) only, so the split across workers is irrelevant
    return np.random.default_rng([seed, block])


def _count_errors(
    rng: np.random.Generator,
    size: int,
    threshold: float,
    network: NetworkParams,
    priors: Priors,
    jammer: JammerSampler,
) -> int:
    n_sensors, n_sensing, _ = network.dims
    alpha = np.asarray(network.alpha, dtype=float)
    phi = np.asarray(network.phi, dtype=float)
    psi = np.asarray(network.psi, dtype=float)

    theta = rng.random(size) < priors.pi1
    sensor_noise = network.sigma_s * rng.standard_normal((size, n_sensors))
    fc_noise = network.sigma_fc * rng.standard_normal(size)
    # jammer draws come last so a silent jammer leaves every other draw unchanged
    w = jammer(rng, size)
    w_s, w_fc = split_strategy(w, n_sensing)

    observations = np.outer(theta, alpha) + w_s @ network.beta_matrix.T + sensor_noise
    received = observations @ phi + w_fc @ psi + fc_noise
    # ties go to H0
    decide_h1 = received > threshold
    return int(np.count_nonzero(decide_h1 != theta))


def _run(
    threshold: float,
    network: NetworkParams,
    priors: Priors,
    jammer: JammerSampler,
    trials: int,
    seed: int,
    workers: Optional[int],
    block_size: Optional[int],
) -> MonteCarloEstimate:
    if trials < 1:
        raise InvalidTrials(f"trials must be at least 1, got {trials}.")
    block_size = block_size or default_block_size()
    workers = workers or default_workers()
    n_blocks = math.ceil(trials / block_size)
    sizes = [min(block_size, trials - idx * block_size) for idx in range(n_blocks)]

    def run_block(idx: int) -> int:
        return _count_errors(_block_rng(seed, idx), sizes[idx], threshold, network, priors, jammer)

    progress = tqdm(total=n_blocks, desc="Monte Carlo blocks", disable=not progress_enabled())
    errors = 0
    if workers == 1:
        for idx in range(n_blocks):
            errors += run_block(idx)
            progress.update(1)
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            for count in pool.map(run_block, range(n_blocks)):
                errors += count
                progress.update(1)
    progress.close()

    estimate = errors / trials
    logger.debug("simulated %d trials in %d blocks on %d workers: %d errors", trials, n_blocks, workers, errors)
    return MonteCarloEstimate(
        estimate=estimate,
        trials=trials,
        stderr=math.sqrt(estimate * (1.0 - estimate) / trials),
        seed=seed,
        errors=errors,
    )


def simulate_error(
    profile: PureStrategyProfile,
    network: NetworkParams,
    priors: Priors,
    trials: int,
    seed: int = 0,
    workers: Optional[int] = None,
    block_size: Optional[int] = None,
) -> MonteCarloEstimate:
    """Estimate P_E(λ, w) for a fixed jamming vector w = (w_s, w_fc)."""
    network.check()
    _, n_sensing, n_fc = network.dims
    w = strategy_vector(profile.w, n_sensing + n_fc)

    def fixed(rng: np.random.Generator, size: int) -> np.ndarray:
        return np.broadcast_to(w, (size, w.shape[0]))

    return _run(profile.threshold, network, priors, fixed, trials, seed, workers, block_size)


def covariance_factor(matrix: np.ndarray) -> np.ndarray:
    """A with A Aᵀ = W from the symmetric eigendecomposition, negative eigenvalues clamped to 0."""
    if matrix.size == 0:
        return matrix
    eigenvalues, eigenvectors = np.linalg.eigh(matrix)
    return eigenvectors * np.sqrt(np.clip(eigenvalues, 0.0, None))


def simulate_mixed_error(
    threshold: float,
    cov: GaussianJammerCovariance,
    network: NetworkParams,
    priors: Priors,
    trials: int,
    seed: int = 0,
    workers: Optional[int] = None,
    block_size: Optional[int] = None,
) -> MonteCarloEstimate:
    """Estimate the average error at threshold λ when the jammer transmits w ~ N(0, W)."""
    network.check()
    _, n_sensing, n_fc = network.dims
    dim = n_sensing + n_fc
    factor = covariance_factor(cov.check(dim))

    def gaussian(rng: np.random.Generator, size: int) -> np.ndarray:
        return rng.standard_normal((size, dim)) @ factor.T

    return _run(threshold, network, priors, gaussian, trials, seed, workers, block_size)
