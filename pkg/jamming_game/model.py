import logging
import math
from typing import Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from jamming_game.errors import (
    DegenerateModel,
    DimensionMismatch,
    InvalidGameConfig,
    NegativeGain,
)

logger = logging.getLogger("jamming-game")

# absolute slack on ‖w‖² ≤ P for round-off
POWER_SLACK = 1e-12
PRIOR_TOLERANCE = 1e-12
NOISE_DEVIATIONS = 6.0


class NetworkParams(BaseModel):
    """Raw scenario description: PoI, jammer and forwarding gains plus noise levels."""

    model_config = ConfigDict(frozen=True, extra="forbid", allow_inf_nan=False)

    alpha: Tuple[float, ...] = Field(
        ..., min_length=1, description="Sensing gain of the PoI signal at each of the N sensors."
    )
    phi: Tuple[float, ...] = Field(
        ..., min_length=1, description="Forwarding gain of each sensor over the MAC to the fusion center."
    )
    beta: Tuple[Tuple[float, ...], ...] = Field(
        (), description="N x L jammer-to-sensor gains; empty when the jammer has no sensing antennas."
    )
    psi: Tuple[float, ...] = Field(
        (), description="Gains of the M jammer antennas aimed at the fusion center."
    )
    sigma_s: float = Field(..., gt=0, description="Sensing noise standard deviation.")
    sigma_fc: float = Field(..., gt=0, description="Fusion center noise standard deviation.")

    @property
    def dims(self) -> Tuple[int, int, int]:
        """(N, L, M)."""
        n_jam = len(self.beta[0]) if self.beta else 0
        return len(self.alpha), n_jam, len(self.psi)

    @property
    def beta_matrix(self) -> np.ndarray:
        n_sensors, n_jam, _ = self.dims
        if not self.beta:
            return np.zeros((n_sensors, 0))
        return np.asarray(self.beta, dtype=float).reshape(n_sensors, n_jam)

    def check(self):
        """Raise DimensionMismatch unless alpha, phi and beta describe the same N sensors."""
        n_sensors = len(self.alpha)
        if len(self.phi) != n_sensors:
            raise DimensionMismatch(
                f"phi has {len(self.phi)} entries but alpha describes {n_sensors} sensors."
            )
        if self.beta:
            if len(self.beta) != n_sensors:
                raise DimensionMismatch(
                    f"beta has {len(self.beta)} rows but alpha describes {n_sensors} sensors."
                )
            widths = {len(row) for row in self.beta}
            if len(widths) != 1:
                raise DimensionMismatch(f"beta is ragged, row lengths {sorted(widths)}.")


class Priors(BaseModel):
    """Prior probabilities of H0 (PoI absent) and H1 (PoI present)."""

    model_config = ConfigDict(frozen=True, extra="forbid", allow_inf_nan=False)

    pi0: float = Field(..., gt=0, lt=1, description="Prior probability of H0.")
    pi1: float = Field(..., gt=0, lt=1, description="Prior probability of H1, derived as 1 - pi0 when omitted.")

    @model_validator(mode="before")
    @classmethod
    def _derive_pi1(cls, data):
        if isinstance(data, dict) and data.get("pi1") is None and isinstance(data.get("pi0"), (int, float)):
            data = {**data, "pi1": 1.0 - float(data["pi0"])}
        return data

    @model_validator(mode="after")
    def _check_sum(self):
        if abs(self.pi0 + self.pi1 - 1.0) > PRIOR_TOLERANCE:
            raise ValueError(f"pi0 + pi1 must equal 1, got {self.pi0} + {self.pi1}.")
        return self

    @property
    def log_ratio(self) -> float:
        """log(pi0 / pi1)."""
        return math.log(self.pi0 / self.pi1)

    def swapped(self) -> "Priors":
        return Priors(pi0=self.pi1, pi1=self.pi0)


class ChannelAggregate(BaseModel):
    """Collapsed signal model r_fc = a θ + bᵀw + z with z ~ N(0, sigma2), plus the Bayes offset c."""

    model_config = ConfigDict(frozen=True)

    a: float = Field(..., gt=0, description="Effective PoI gain.")
    b: Tuple[float, ...] = Field(..., description="Effective jammer gain vector of length L + M.")
    sigma2: float = Field(..., gt=0, description="Effective noise variance.")
    c: float = Field(..., description="Bayes offset: optimal threshold in the absence of jamming.")

    @property
    def sigma(self) -> float:
        return math.sqrt(self.sigma2)

    @property
    def b_vec(self) -> np.ndarray:
        return np.asarray(self.b, dtype=float)

    @property
    def btb(self) -> float:
        b = self.b_vec
        return float(b @ b)

    @property
    def dim(self) -> int:
        return len(self.b)


class JammerBudget(BaseModel):
    """Total instantaneous jammer power P, so that the strategy set is {w : ‖w‖² ≤ P}."""

    model_config = ConfigDict(frozen=True, extra="forbid", allow_inf_nan=False)

    power: float = Field(..., ge=0, description="Total power budget P.")


class Tolerances(BaseModel):
    """Grid sizes, sample counts and tolerances used by the verifiers."""

    model_config = ConfigDict(frozen=True, extra="forbid", allow_inf_nan=False)

    identity: float = Field(1e-12, gt=0, description="Tolerance for closed-form identities.")
    grid: float = Field(1e-9, gt=0, description="Tolerance for grid-versus-closed-form comparisons.")
    unimodal_grid_points: int = Field(2000, ge=1000, description="Threshold grid size for unimodality checks.")
    lambda_grid_points: int = Field(2000, ge=2000, description="Threshold grid size for saddle audits.")
    w_samples: int = Field(10000, ge=10000, description="Uniform power-ball samples for saddle audits.")
    seed: int = Field(0, ge=0, description="Seed for sampled audits.")


class GameConfig(BaseModel):
    """Threshold set Λ = [-R, R] and verifier settings."""

    model_config = ConfigDict(frozen=True, extra="forbid", allow_inf_nan=False)

    threshold_bound: Optional[float] = Field(
        None, gt=0, description="R; defaults to |c| + sqrt(P bᵀb) + 6σ."
    )
    tolerances: Tolerances = Field(default_factory=Tolerances)

    def resolve(self, agg: ChannelAggregate, budget: JammerBudget) -> float:
        """Return R, checking a user-supplied bound contains every analyzed threshold."""
        required = required_threshold_bound(agg, budget)
        if self.threshold_bound is None:
            return required
        if self.threshold_bound < required:
            raise InvalidGameConfig(
                f"threshold_bound {self.threshold_bound} is below |c| + sqrt(P bᵀb) + 6σ = {required}."
            )
        return self.threshold_bound


def required_threshold_bound(agg: ChannelAggregate, budget: JammerBudget) -> float:
    return abs(agg.c) + math.sqrt(budget.power * agg.btb) + NOISE_DEVIATIONS * agg.sigma


def aggregate(network: NetworkParams, priors: Priors) -> ChannelAggregate:
    """Collapse the sensing and MAC stages into (a, b, σ², c)."""
    network.check()
    phi = np.asarray(network.phi, dtype=float)
    a = float(phi @ np.asarray(network.alpha, dtype=float))
    if not a > 0:
        raise DegenerateModel(f"effective PoI gain a = Σ φ_i α_i must be positive, got {a}.")

    b = np.concatenate([phi @ network.beta_matrix, np.asarray(network.psi, dtype=float)])
    negative = np.flatnonzero(b < 0)
    if negative.size:
        raise NegativeGain(
            f"effective jammer gains must be non-negative, entries {negative.tolist()} are {b[negative].tolist()}."
        )

    sigma2 = network.sigma_fc**2 + network.sigma_s**2 * float(phi @ phi)
    # same value as (a² + 2σ² log(π0/π1)) / 2a, and exactly a/2 for equal priors
    c = a / 2 + sigma2 * priors.log_ratio / a
    return ChannelAggregate(a=a, b=tuple(b.tolist()), sigma2=sigma2, c=c)


def strategy_vector(w: Sequence[float], dim: int) -> np.ndarray:
    """Return w as a float vector, raising DimensionMismatch unless it has `dim` entries."""
    vec = np.asarray(w, dtype=float)
    if vec.ndim != 1 or vec.shape[0] != dim:
        raise DimensionMismatch(f"jammer vector must have {dim} entries, got shape {vec.shape}.")
    return vec


def validate_strategy(w: Sequence[float], budget: JammerBudget, agg: Optional[ChannelAggregate] = None) -> bool:
    """True iff ‖w‖² ≤ P up to POWER_SLACK. With `agg`, also enforce len(w) == L + M."""
    vec = strategy_vector(w, agg.dim) if agg is not None else np.asarray(w, dtype=float)
    return float(vec @ vec) <= budget.power + POWER_SLACK


def split_strategy(w: Sequence[float], n_sensing: int) -> Tuple[np.ndarray, np.ndarray]:
    """Split the super-symbol w into (w_s, w_fc) along its last axis."""
    vec = np.asarray(w, dtype=float)
    return vec[..., :n_sensing], vec[..., n_sensing:]
