"""Zero-mean Gaussian jammer w ~ N(0, W) under an average power constraint tr(W) ≤ P."""
import logging
import math
from typing import Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from jamming_game.analysis import error_probability_at
from jamming_game.equilibrium import best_response_value
from jamming_game.errors import InvalidCovariance
from jamming_game.model import ChannelAggregate, JammerBudget, Priors

logger = logging.getLogger("jamming-game")

SYMMETRY_TOLERANCE = 1e-12
EIGENVALUE_FLOOR = -1e-10
TRACE_SLACK = 1e-12


class GaussianJammerCovariance(BaseModel):
    """Covariance W of the jamming signal together with its trace budget P."""

    model_config = ConfigDict(frozen=True, allow_inf_nan=False)

    W: Tuple[Tuple[float, ...], ...] = Field(..., description="(L+M) x (L+M) covariance, row-major.")
    budget: float = Field(..., ge=0, description="Average power budget P bounding tr(W).")

    @property
    def matrix(self) -> np.ndarray:
        return np.asarray(self.W, dtype=float).reshape(len(self.W), -1) if self.W else np.zeros((0, 0))

    @classmethod
    def of(cls, matrix, budget: float) -> "GaussianJammerCovariance":
        matrix = np.asarray(matrix, dtype=float)
        return cls(W=tuple(tuple(row) for row in matrix.tolist()), budget=budget)

    def check(self, dim: int) -> np.ndarray:
        """Return W as an array after checking it is a dim x dim PSD matrix within the trace budget."""
        rows = {len(row) for row in self.W}
        if len(self.W) != dim or (self.W and rows != {dim}):
            raise InvalidCovariance(f"covariance must be {dim} x {dim} to match the jammer gains.")
        matrix = self.matrix
        if dim == 0:
            return matrix
        if np.max(np.abs(matrix - matrix.T)) > SYMMETRY_TOLERANCE:
            raise InvalidCovariance("covariance is not symmetric.")
        smallest = float(np.linalg.eigvalsh(matrix).min())
        if smallest < EIGENVALUE_FLOOR:
            raise InvalidCovariance(f"covariance is not positive semidefinite (smallest eigenvalue {smallest}).")
        trace = float(np.trace(matrix))
        if trace > self.budget + TRACE_SLACK:
            raise InvalidCovariance(f"tr(W) = {trace} exceeds the average power budget {self.budget}.")
        return matrix


class MixedComparison(BaseModel):
    utility: float = Field(..., description="U(W), the error probability at the network's best threshold.")
    pure: float = Field(..., description="Error probability at any pure-strategy equilibrium.")
    advantage: float = Field(..., description="U(W) minus the pure equilibrium error.")
    threshold: float
    jammer_variance: float = Field(..., description="bᵀWb.")


def jammer_variance(cov: GaussianJammerCovariance, agg: ChannelAggregate) -> float:
    """bᵀWb, the jamming power seen at the fusion center."""
    matrix = cov.check(agg.dim)
    b = agg.b_vec
    return float(b @ matrix @ b) if agg.dim else 0.0


def effective_variance(cov: GaussianJammerCovariance, agg: ChannelAggregate) -> float:
    return agg.sigma2 + jammer_variance(cov, agg)


def gamma_functional(x, cov: GaussianJammerCovariance, agg: ChannelAggregate, priors: Priors):
    """Γ(x) = π0 Q(x/σ') + π1 [1 - Q((x - a)/σ')] with σ'² = σ² + bᵀWb."""
    return error_probability_at(x, agg, priors, sigma=math.sqrt(effective_variance(cov, agg)))


def mixed_best_threshold(cov: GaussianJammerCovariance, agg: ChannelAggregate, priors: Priors) -> float:
    """λ* = c + (1/a) bᵀWb log(π0/π1), the minimizer of Γ."""
    return agg.c + jammer_variance(cov, agg) * priors.log_ratio / agg.a


def mixed_utility(cov: GaussianJammerCovariance, agg: ChannelAggregate, priors: Priors) -> float:
    """U(W) = Γ(λ*)."""
    return gamma_functional(mixed_best_threshold(cov, agg, priors), cov, agg, priors)


def compare_mixed_vs_pure(cov: GaussianJammerCovariance, agg: ChannelAggregate, priors: Priors) -> MixedComparison:
    utility = mixed_utility(cov, agg, priors)
    pure = best_response_value(None, agg, priors)
    comparison = MixedComparison(
        utility=utility,
        pure=pure,
        advantage=utility - pure,
        threshold=mixed_best_threshold(cov, agg, priors),
        jammer_variance=jammer_variance(cov, agg),
    )
    logger.debug("mixed jammer: U(W)=%.12g pure=%.12g advantage=%.3g", utility, pure, comparison.advantage)
    return comparison


def max_utility_covariance(agg: ChannelAggregate, budget: JammerBudget) -> GaussianJammerCovariance:
    """W* = P b̂ b̂ᵀ, which maximizes bᵀWb (and so U) subject to tr(W) ≤ P."""
    if agg.btb > 0:
        direction = agg.b_vec / math.sqrt(agg.btb)
        matrix = budget.power * np.outer(direction, direction)
    else:
        matrix = np.zeros((agg.dim, agg.dim))
    # symmetrize exactly so check() never trips on round-off
    return GaussianJammerCovariance.of(0.5 * (matrix + matrix.T), budget.power)
