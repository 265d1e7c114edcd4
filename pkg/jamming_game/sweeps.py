"""Report kinds available to parameter sweeps, one CSV column group each."""
import logging
from typing import Any, Callable, Dict

import pandas as pd

from jamming_game.equilibrium import best_response_value, feasibility_window
from jamming_game.errors import InvalidSweep
from jamming_game.mixed import compare_mixed_vs_pure, max_utility_covariance
from jamming_game.scenario import Scenario, SweepSpec, parse_scenario, set_parameter

logger = logging.getLogger("jamming-game")


def bayes_offset(scenario: Scenario) -> Dict[str, float]:
    return {"c": scenario.agg.c}


def equilibrium_error(scenario: Scenario) -> Dict[str, float]:
    return {"equilibrium_error": best_response_value(None, scenario.agg, scenario.priors)}


def window(scenario: Scenario) -> Dict[str, float]:
    low, high = feasibility_window(scenario.agg, scenario.budget)
    return {"window_low": low, "window_high": high}


def mixed_utility_max(scenario: Scenario) -> Dict[str, float]:
    cov = max_utility_covariance(scenario.agg, scenario.budget)
    comparison = compare_mixed_vs_pure(cov, scenario.agg, scenario.priors)
    return {"mixed_utility_max": comparison.utility, "mixed_advantage_max": comparison.advantage}


SWEEP_OUTPUTS: Dict[str, Callable[[Scenario], Dict[str, float]]] = {
    "bayes_offset": bayes_offset,
    "equilibrium_error": equilibrium_error,
    "window": window,
    "mixed_utility_max": mixed_utility_max,
}


def run_sweep(data: Dict[str, Any], sweep: SweepSpec) -> pd.DataFrame:
    """Re-validate the scenario at every sweep value and collect the requested outputs."""
    unknown = [name for name in sweep.outputs if name not in SWEEP_OUTPUTS]
    if unknown:
        raise InvalidSweep(f"unknown sweep outputs {unknown}; choose from {sorted(SWEEP_OUTPUTS)}.")
    rows = []
    for value in sweep.values:
        try:
            scenario = parse_scenario(set_parameter(data, sweep.parameter, value))
        except ValueError as e:
            raise InvalidSweep(f"{sweep.parameter} = {value!r} is invalid: {e}") from e
        row = {sweep.parameter: value}
        for name in sweep.outputs:
            row.update(SWEEP_OUTPUTS[name](scenario))
        rows.append(row)
    logger.info("sweep over %s: %d points", sweep.parameter, len(rows))
    return pd.DataFrame(rows)
