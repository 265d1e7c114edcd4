"""Closed-form error probability at the fusion center and its structure in λ and w."""
import logging
import math
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, Field
from scipy.special import erfc

from jamming_game.model import ChannelAggregate, Priors, strategy_vector

logger = logging.getLogger("jamming-game")

# exponents of f2/f4 are clamped here; only the sign of the bracket matters downstream
EXP_CLAMP = 700.0
PLATEAU_TOLERANCE = 1e-12
GRID_TOLERANCE = 1e-9

ArrayLike = Union[float, Sequence[float], np.ndarray]


class PureStrategyProfile(BaseModel):
    """A threshold λ at the fusion center paired with a jammer vector w."""

    model_config = ConfigDict(frozen=True, allow_inf_nan=False)

    threshold: float = Field(..., description="Decision threshold λ.")
    w: Tuple[float, ...] = Field(..., description="Jammer super-symbol (w_s, w_fc) of length L + M.")

    @property
    def w_vec(self) -> np.ndarray:
        return np.asarray(self.w, dtype=float)

    @classmethod
    def of(cls, threshold: float, w: Sequence[float]) -> "PureStrategyProfile":
        return cls(threshold=float(threshold), w=tuple(float(x) for x in np.asarray(w, dtype=float)))


class StructureReport(BaseModel):
    """Sampled P_E(λ) on a threshold grid with the single-valley verdict."""

    grid: List[float]
    values: List[float]
    unimodal: bool
    argmin: float
    max_violation: float = Field(..., ge=0)
    best_response: float = Field(..., description="Closed-form minimizer bᵀw + c.")
    step: float = Field(..., gt=0)
    argmin_agrees: bool = Field(..., description="Grid argmin within one step (plus the grid tolerance) of the closed form.")

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({"lambda": self.grid, "pe": self.values})


def gaussian_q(x: ArrayLike):
    """Standard normal upper tail Q(x) = P(Z > x), via erfc. Returns a float for scalar input."""
    result = 0.5 * erfc(np.asarray(x, dtype=float) / math.sqrt(2.0))
    return float(result) if np.ndim(result) == 0 else result


def jammer_shift(w: Sequence[float], agg: ChannelAggregate) -> float:
    """bᵀw."""
    return float(agg.b_vec @ strategy_vector(w, agg.dim))


def error_probability_at(u: ArrayLike, agg: ChannelAggregate, priors: Priors, sigma: Optional[float] = None):
    """P_E as a function of the shift u = λ - bᵀw (optionally with an effective deviation)."""
    sigma = agg.sigma if sigma is None else sigma
    u = np.asarray(u, dtype=float)
    pe = priors.pi0 * gaussian_q(u / sigma) + priors.pi1 * (1.0 - gaussian_q((u - agg.a) / sigma))
    return float(pe) if np.ndim(pe) == 0 else pe


def error_probability(profile: PureStrategyProfile, agg: ChannelAggregate, priors: Priors) -> float:
    """π0 Q((λ - bᵀw)/σ) + π1 [1 - Q((λ - bᵀw - a)/σ)]."""
    return error_probability_at(profile.threshold - jammer_shift(profile.w, agg), agg, priors)


def _gaussian_kernel(x, sigma):
    return np.exp(-np.square(x) / (2.0 * sigma**2)) / (sigma * math.sqrt(2.0 * math.pi))


def _likelihood_ratio(u, agg: ChannelAggregate):
    exponent = (2.0 * agg.a * u - agg.a**2) / (2.0 * agg.sigma2)
    return np.exp(np.clip(exponent, -EXP_CLAMP, EXP_CLAMP))


def _stationarity_bracket(u, agg: ChannelAggregate, priors: Priors):
    """f(u) [π1 f_ratio(u) - π0]: the λ-derivative of P_E written on the shift u."""
    u = np.asarray(u, dtype=float)
    value = _gaussian_kernel(u, agg.sigma) * (priors.pi1 * _likelihood_ratio(u, agg) - priors.pi0)
    return float(value) if np.ndim(value) == 0 else value


def threshold_derivative(profile: PureStrategyProfile, agg: ChannelAggregate, priors: Priors) -> float:
    """Analytic ∂P_E/∂λ = f1(λ) [π1 f2(λ) - π0]."""
    return _stationarity_bracket(profile.threshold - jammer_shift(profile.w, agg), agg, priors)


def score_g(y: ArrayLike, threshold: float, agg: ChannelAggregate, priors: Priors):
    """g(y) = f3(y) [π1 f4(y) - π0] with y = bᵀw, so that dP_E/dy = -g(y)."""
    return _stationarity_bracket(threshold - np.asarray(y, dtype=float), agg, priors)


def zero_crossing(threshold: float, agg: ChannelAggregate, priors: Priors) -> float:
    """The unique root y0 of g, where f4(y0) = π0/π1."""
    return threshold - agg.c


def single_valley(values: np.ndarray, tolerance: float = PLATEAU_TOLERANCE):
    """Return (unimodal, argmin index, max violation) for a sampled sequence.

    A sequence is a single valley if it never rises by more than `tolerance` before its
    minimum and never falls by more than `tolerance` after it.
    """
    values = np.asarray(values, dtype=float)
    idx = int(np.argmin(values))
    steps = np.diff(values)
    rises = steps[:idx]
    falls = -steps[idx:]
    violation = max(float(rises.max(initial=0.0)), float(falls.max(initial=0.0)))
    return violation <= tolerance, idx, max(violation, 0.0)


def check_unimodal_in_threshold(
    w: Sequence[float],
    agg: ChannelAggregate,
    priors: Priors,
    bound: float,
    points: int = 2000,
    tolerance: float = PLATEAU_TOLERANCE,
    grid_tolerance: float = GRID_TOLERANCE,
) -> StructureReport:
    """Sample P_E(·, w) on an even grid over [-bound, bound] and report its valley structure."""
    if points < 1000:
        raise ValueError(f"unimodality grids need at least 1000 points, got {points}.")
    grid, step = np.linspace(-bound, bound, points, retstep=True)
    step = float(step)
    shift = jammer_shift(w, agg)
    values = error_probability_at(grid - shift, agg, priors)
    unimodal, idx, violation = single_valley(values, tolerance)
    best_response = shift + agg.c
    logger.debug("unimodality check over %d points: unimodal=%s argmin=%.6g", points, unimodal, grid[idx])
    return StructureReport(
        grid=grid.tolist(),
        values=values.tolist(),
        unimodal=unimodal,
        argmin=float(grid[idx]),
        max_violation=violation,
        best_response=best_response,
        step=step,
        argmin_agrees=bool(abs(float(grid[idx]) - best_response) <= step + grid_tolerance),
    )
