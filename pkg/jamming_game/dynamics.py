"""Perfectly observable repeated play: alternating best responses from an initial profile."""
import logging
from enum import Enum
from typing import List, Optional

import numpy as np
import pandas as pd
from pydantic import BaseModel, Field

from jamming_game.analysis import PureStrategyProfile, error_probability
from jamming_game.equilibrium import (
    fc_best_response,
    feasibility_window,
    jammer_empirical_response,
    stationary_solution_set,
)
from jamming_game.errors import InfeasibleInitial
from jamming_game.model import ChannelAggregate, JammerBudget, Priors, validate_strategy
from jamming_game.utils import vector_columns

logger = logging.getLogger("jamming-game")

CONVERGENCE_TOLERANCE = 1e-12


class PlayOrder(str, Enum):
    network_first = "network_first"
    jammer_first = "jammer_first"


class JammerMode(str, Enum):
    stationary = "stationary"
    empirical = "empirical"


class WindowPosition(str, Enum):
    inside_window = "inside_window"
    outside_window = "outside_window"


class HalfStep(BaseModel):
    half_step: int = Field(..., ge=0)
    player: str = Field(..., description="'initial', 'network' or 'jammer'.")
    profile: PureStrategyProfile
    pe: float


class DynamicsTrace(BaseModel):
    """One entry per half-step, starting with the initial profile."""

    order: PlayOrder
    mode: JammerMode = JammerMode.stationary
    steps: List[HalfStep]
    converged: bool
    converged_at_half_step: Optional[int] = None

    @property
    def final(self) -> PureStrategyProfile:
        return self.steps[-1].profile

    def to_frame(self) -> pd.DataFrame:
        rows = []
        for step in self.steps:
            row = {"half_step": step.half_step, "player": step.player, "lambda": step.profile.threshold}
            vector_columns("w", step.profile.w, row)
            row["pe"] = step.pe
            rows.append(row)
        return pd.DataFrame(rows)


def classify_initial(initial: PureStrategyProfile, agg: ChannelAggregate, budget: JammerBudget) -> WindowPosition:
    low, high = feasibility_window(agg, budget)
    if low <= initial.threshold <= high:
        return WindowPosition.inside_window
    return WindowPosition.outside_window


def _same(first: PureStrategyProfile, second: PureStrategyProfile, tol: float) -> bool:
    if abs(first.threshold - second.threshold) > tol:
        return False
    gap = np.abs(first.w_vec - second.w_vec)
    return bool(gap.max(initial=0.0) <= tol)


class _Players:
    def __init__(self, agg, priors, budget, mode, tol, samples, seed):
        self.agg = agg
        self.priors = priors
        self.budget = budget
        self.mode = mode
        self.tol = tol
        self.samples = samples
        self.seed = seed

    def network(self, profile: PureStrategyProfile) -> PureStrategyProfile:
        return PureStrategyProfile.of(fc_best_response(profile.w, self.agg), profile.w)

    def jammer(self, profile: PureStrategyProfile) -> PureStrategyProfile:
        if self.agg.btb == 0:
            # P_E does not depend on w
            return profile
        if self.mode == JammerMode.empirical:
            w = jammer_empirical_response(
                profile.threshold, self.agg, self.priors, self.budget, self.samples, self.seed
            )
            return PureStrategyProfile.of(profile.threshold, w)
        # any w on bᵀw = λ - c is a best response, so a jammer already there stays put
        solutions = stationary_solution_set(profile.threshold, self.agg, self.budget)
        if solutions.contains(profile.w, self.tol):
            return profile
        return PureStrategyProfile.of(profile.threshold, solutions.min_norm)

    def move(self, player: str, profile: PureStrategyProfile) -> PureStrategyProfile:
        return self.network(profile) if player == "network" else self.jammer(profile)

    def is_rest_point(self, profile: PureStrategyProfile) -> bool:
        """Neither player's next move changes the profile."""
        return _same(self.network(profile), profile, self.tol) and _same(self.jammer(profile), profile, self.tol)


def run_dynamics(
    initial: PureStrategyProfile,
    order: PlayOrder,
    agg: ChannelAggregate,
    priors: Priors,
    budget: JammerBudget,
    max_half_steps: int = 20,
    mode: JammerMode = JammerMode.stationary,
    tol: float = CONVERGENCE_TOLERANCE,
    samples: int = 10000,
    seed: int = 0,
) -> DynamicsTrace:
    """Alternate best responses starting with `order`'s player until neither would move again.

    In the stationary mode the jammer answers with the minimum-norm solution of
    bᵀw = λ - c (saturated outside the feasibility window). The empirical mode replaces it
    with a sampled maximizer of P_E over the power ball; such traces are labeled and are not
    expected to settle.
    """
    order = PlayOrder(order)
    mode = JammerMode(mode)
    if not validate_strategy(initial.w, budget, agg):
        raise InfeasibleInitial(
            f"initial jammer power {float(initial.w_vec @ initial.w_vec)} exceeds the budget {budget.power}."
        )
    players = _Players(agg, priors, budget, mode, tol, samples, seed)
    steps = [HalfStep(half_step=0, player="initial", profile=initial, pe=error_probability(initial, agg, priors))]
    player = "network" if order == PlayOrder.network_first else "jammer"
    profile = initial
    converged_at = None

    for half_step in range(1, max_half_steps + 1):
        profile = players.move(player, profile)
        steps.append(
            HalfStep(half_step=half_step, player=player, profile=profile, pe=error_probability(profile, agg, priors))
        )
        if players.is_rest_point(profile):
            converged_at = half_step
            break
        player = "jammer" if player == "network" else "network"

    trace = DynamicsTrace(
        order=order,
        mode=mode,
        steps=steps,
        converged=converged_at is not None,
        converged_at_half_step=converged_at,
    )
    logger.info(
        "%s dynamics (%s jammer): converged=%s after %s half-steps",
        order.value,
        mode.value,
        trace.converged,
        converged_at if converged_at is not None else max_half_steps,
    )
    return trace
