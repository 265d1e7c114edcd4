"""Best responses, the ε-parameterized equilibrium family and the sampled saddle-point audit."""
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from typing import List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from jamming_game.analysis import (
    PureStrategyProfile,
    error_probability,
    error_probability_at,
    jammer_shift,
)
from jamming_game.errors import (
    NotInFamily,
    ParameterOutOfRange,
    ZeroJammerChannel,
)
from jamming_game.model import (
    POWER_SLACK,
    ChannelAggregate,
    JammerBudget,
    Priors,
    Tolerances,
    strategy_vector,
)
from jamming_game.utils import chunk_bounds, default_workers

logger = logging.getLogger("jamming-game")

IDENTITY_TOLERANCE = 1e-12


class EquilibriumParameter(BaseModel):
    """The vector ε with -b ≤ ε ≤ b indexing the pure-strategy equilibrium family."""

    model_config = ConfigDict(frozen=True, allow_inf_nan=False)

    epsilon: Tuple[float, ...] = Field(..., description="Family parameter ε, one entry per jammer gain.")

    def check(self, agg: ChannelAggregate) -> np.ndarray:
        eps = strategy_vector(self.epsilon, agg.dim)
        outside = np.flatnonzero(np.abs(eps) > agg.b_vec)
        if outside.size:
            raise ParameterOutOfRange(
                f"epsilon entries {outside.tolist()} exceed the bound |ε_j| ≤ b_j = {agg.b_vec[outside].tolist()}."
            )
        return eps


class StationarySolutionSet(BaseModel):
    """Jammer responses to λ: the hyperplane bᵀw = offset intersected with ‖w‖² ≤ P."""

    normal: Tuple[float, ...]
    offset: float
    radius: float
    feasible: bool
    min_norm: Tuple[float, ...]

    def contains(self, w: Sequence[float], tol: float) -> bool:
        vec = np.asarray(w, dtype=float)
        on_plane = abs(float(np.asarray(self.normal) @ vec) - self.offset) <= tol
        return on_plane and float(vec @ vec) <= self.radius**2 + POWER_SLACK


class DeviationResult(BaseModel):
    w: Tuple[float, ...]
    pe: float
    violation: float


class AuditSpec(BaseModel):
    """How densely verify_saddle samples each side of the saddle inequality."""

    model_config = ConfigDict(frozen=True, extra="forbid", allow_inf_nan=False)

    lambda_grid_points: int = Field(2000, ge=2000)
    w_samples: int = Field(10000, ge=10000)
    seed: int = Field(0, ge=0)
    tolerance: float = Field(IDENTITY_TOLERANCE, gt=0)
    deviations: List[Tuple[float, ...]] = Field(default_factory=list, description="Extra jammer vectors to audit.")
    workers: Optional[int] = Field(None, ge=1)

    @classmethod
    def from_tolerances(cls, tolerances: Tolerances, **overrides) -> "AuditSpec":
        fields = dict(
            lambda_grid_points=tolerances.lambda_grid_points,
            w_samples=tolerances.w_samples,
            seed=tolerances.seed,
            tolerance=tolerances.identity,
        )
        fields.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**fields)


class SaddleReport(BaseModel):
    """Both sides of P_E(λ*, w) ≤ P_E(λ*, w*) ≤ P_E(λ, w*), measured rather than assumed."""

    profile: PureStrategyProfile
    equilibrium_value: float
    fc_side_max_violation: float
    fc_witness: float = Field(..., description="Threshold attaining the FC-side violation.")
    jammer_side_max_violation: float
    jammer_witness: Tuple[float, ...] = Field(..., description="Jammer vector attaining the jammer-side violation.")
    samples: int
    lambda_points: int
    tolerance: float
    holds_fc_side: bool
    holds_jammer_side: bool
    deviations: List[DeviationResult] = Field(default_factory=list)


def _require_jammer_channel(agg: ChannelAggregate) -> float:
    btb = agg.btb
    if not btb > 0:
        raise ZeroJammerChannel("the jammer has no effect on the fusion center: bᵀb = 0.")
    return btb


def fc_best_response(w: Sequence[float], agg: ChannelAggregate, priors: Optional[Priors] = None) -> float:
    """λ* = bᵀw + c, the unique minimizer of P_E(·, w)."""
    return jammer_shift(w, agg) + agg.c


def best_response_value(w: Optional[Sequence[float]], agg: ChannelAggregate, priors: Priors) -> float:
    """P_E at the FC best response: π0 Q(c/σ) + π1 [1 - Q((c - a)/σ)], whatever w is."""
    return error_probability_at(agg.c, agg, priors)


def feasibility_window(agg: ChannelAggregate, budget: JammerBudget) -> Tuple[float, float]:
    """Thresholds for which bᵀw = λ - c has a power-feasible solution.

    With bᵀb = 0 the jammer cannot move the FC statistic and the window is the single point c.
    """
    half_width = math.sqrt(budget.power * agg.btb)
    return agg.c - half_width, agg.c + half_width


def jammer_stationary_response(
    threshold: float, agg: ChannelAggregate, budget: JammerBudget
) -> Tuple[np.ndarray, bool]:
    """Minimum-norm solution of bᵀw = λ - c, saturated at full power along ±b outside the window."""
    btb = _require_jammer_channel(agg)
    b = agg.b_vec
    offset = threshold - agg.c
    if abs(offset) <= math.sqrt(budget.power * btb):
        return offset / btb * b, True
    return math.copysign(math.sqrt(budget.power / btb), offset) * b, False


def stationary_solution_set(threshold: float, agg: ChannelAggregate, budget: JammerBudget) -> StationarySolutionSet:
    w, feasible = jammer_stationary_response(threshold, agg, budget)
    return StationarySolutionSet(
        normal=agg.b,
        offset=threshold - agg.c,
        radius=math.sqrt(budget.power),
        feasible=feasible,
        min_norm=tuple(w.tolist()),
    )


def equilibrium_family(
    param: EquilibriumParameter, agg: ChannelAggregate, budget: JammerBudget
) -> PureStrategyProfile:
    """(λ*, w*) = (c + k bᵀε, k ε) with k = sqrt(P / bᵀb)."""
    btb = _require_jammer_channel(agg)
    eps = param.check(agg)
    w_star = math.sqrt(budget.power / btb) * eps
    # λ* written as bᵀw* + c so the family is an exact fixed point of fc_best_response
    return PureStrategyProfile.of(fc_best_response(w_star, agg), w_star)


def is_in_family(
    profile: PureStrategyProfile, agg: ChannelAggregate, budget: JammerBudget, tol: float = IDENTITY_TOLERANCE
) -> bool:
    w = strategy_vector(profile.w, agg.dim)
    on_line = abs(profile.threshold - (float(agg.b_vec @ w) + agg.c)) <= tol
    return on_line and float(w @ w) <= budget.power + tol


def boundary_deviations(agg: ChannelAggregate, budget: JammerBudget) -> np.ndarray:
    """Axis-aligned full-power points and ±full power along b."""
    dim = agg.dim
    radius = math.sqrt(budget.power)
    axes = radius * np.eye(dim)
    deviations = [axes, -axes]
    if agg.btb > 0:
        along_b = radius * agg.b_vec / math.sqrt(agg.btb)
        deviations.append(np.stack([along_b, -along_b]))
    return np.concatenate(deviations, axis=0) if dim else np.zeros((0, 0))


def sample_power_ball(dim: int, power: float, count: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform samples from {w : ‖w‖² ≤ P}."""
    if dim == 0:
        return np.zeros((count, 0))
    directions = rng.standard_normal((count, dim))
    norms = np.linalg.norm(directions, axis=1, keepdims=True)
    directions /= np.where(norms > 0, norms, 1.0)
    radii = math.sqrt(power) * rng.random(count) ** (1.0 / dim)
    return directions * radii[:, None]


def _pe_over_strategies(
    threshold: float, candidates: np.ndarray, agg: ChannelAggregate, priors: Priors, workers: int
) -> np.ndarray:
    if candidates.shape[0] == 0:
        return np.zeros(0)
    shifts = candidates @ agg.b_vec

    def evaluate(bounds):
        start, stop = bounds
        return np.atleast_1d(error_probability_at(threshold - shifts[start:stop], agg, priors))

    chunks = chunk_bounds(len(shifts), workers)
    if workers == 1:
        parts = [evaluate(bounds) for bounds in chunks]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(evaluate, chunks))
    return np.concatenate(parts)


def jammer_empirical_response(
    threshold: float,
    agg: ChannelAggregate,
    priors: Priors,
    budget: JammerBudget,
    samples: int = 10000,
    seed: int = 0,
    workers: Optional[int] = None,
) -> np.ndarray:
    """Sampled maximizer of P_E(λ, ·) over the power ball and its boundary deviations."""
    rng = np.random.default_rng(seed)
    candidates = np.concatenate(
        [boundary_deviations(agg, budget), sample_power_ball(agg.dim, budget.power, samples, rng)]
    )
    values = _pe_over_strategies(threshold, candidates, agg, priors, workers or default_workers())
    return candidates[int(np.argmax(values))]


def verify_saddle(
    profile: PureStrategyProfile,
    agg: ChannelAggregate,
    priors: Priors,
    budget: JammerBudget,
    bound: float,
    audit: Optional[AuditSpec] = None,
) -> SaddleReport:
    """Measure both saddle inequalities around a family profile.

    The FC side is scanned on an even λ-grid over [-bound, bound]; the jammer side on
    uniform power-ball samples plus boundary deviations, w* itself and any user deviations.
    Violations are reported as measured, with the points that attain them.
    """
    audit = audit or AuditSpec()
    if not is_in_family(profile, agg, budget, audit.tolerance):
        raise NotInFamily(f"profile λ={profile.threshold}, w={list(profile.w)} is not a λ = bᵀw + c family member.")
    workers = audit.workers or default_workers()
    w_star = profile.w_vec
    value = error_probability(profile, agg, priors)

    thresholds = np.append(np.linspace(-bound, bound, audit.lambda_grid_points), profile.threshold)
    fc_values = error_probability_at(thresholds - jammer_shift(w_star, agg), agg, priors)
    fc_gaps = value - fc_values
    fc_idx = int(np.argmax(fc_gaps))

    deviations = np.array([strategy_vector(p, agg.dim) for p in audit.deviations]).reshape(len(audit.deviations), agg.dim)
    for deviation in deviations:
        if float(deviation @ deviation) > budget.power + POWER_SLACK:
            raise ParameterOutOfRange(f"deviation {deviation.tolist()} exceeds the power budget {budget.power}.")

    rng = np.random.default_rng(audit.seed)
    candidates = np.concatenate(
        [
            w_star.reshape(1, agg.dim),
            deviations,
            boundary_deviations(agg, budget),
            sample_power_ball(agg.dim, budget.power, audit.w_samples, rng),
        ]
    )
    jammer_gaps = _pe_over_strategies(profile.threshold, candidates, agg, priors, workers) - value
    jam_idx = int(np.argmax(jammer_gaps))

    deviation_results = [
        DeviationResult(w=tuple(p.tolist()), pe=value + float(gap), violation=float(gap))
        for p, gap in zip(deviations, jammer_gaps[1 : 1 + len(deviations)])
    ]
    report = SaddleReport(
        profile=profile,
        equilibrium_value=value,
        fc_side_max_violation=float(fc_gaps[fc_idx]),
        fc_witness=float(thresholds[fc_idx]),
        jammer_side_max_violation=float(jammer_gaps[jam_idx]),
        jammer_witness=tuple(candidates[jam_idx].tolist()),
        samples=int(candidates.shape[0]),
        lambda_points=int(thresholds.shape[0]),
        tolerance=audit.tolerance,
        holds_fc_side=bool(fc_gaps[fc_idx] <= audit.tolerance),
        holds_jammer_side=bool(jammer_gaps[jam_idx] <= audit.tolerance),
        deviations=deviation_results,
    )
    if not report.holds_jammer_side:
        logger.warning(
            "jammer-side saddle violation %.6g at w=%s (λ*=%.6g)",
            report.jammer_side_max_violation,
            list(report.jammer_witness),
            profile.threshold,
        )
    if not report.holds_fc_side:
        logger.warning("FC-side saddle violation %.6g at λ=%.6g", report.fc_side_max_violation, report.fc_witness)
    return report
