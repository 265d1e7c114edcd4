import argparse
import logging
import os
import sys
from typing import List, Optional, Tuple

import pandas as pd
import yaml

from jamming_game.analysis import PureStrategyProfile, check_unimodal_in_threshold, error_probability
from jamming_game.dynamics import JammerMode, PlayOrder, classify_initial, run_dynamics
from jamming_game.equilibrium import (
    AuditSpec,
    EquilibriumParameter,
    best_response_value,
    equilibrium_family,
    feasibility_window,
    is_in_family,
    verify_saddle,
)
from jamming_game.errors import InvariantBreach
from jamming_game.mixed import (
    compare_mixed_vs_pure,
    gamma_functional,
    max_utility_covariance,
)
from jamming_game.montecarlo import simulate_error, simulate_mixed_error
from jamming_game.scenario import Scenario, SweepSpec, load_covariance, load_scenario
from jamming_game.sweeps import SWEEP_OUTPUTS, run_sweep
from jamming_game.utils import dumps_csv, dumps_json, load_document, vector_columns, write_output

logger = logging.getLogger("jamming-game")

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_BREACH = 3
MC_AGREEMENT_SIGMAS = 4.0


def parse_vector(text: str) -> List[float]:
    """'0.8,0.4' -> [0.8, 0.4]; an empty string is the empty vector."""
    text = text.strip()
    if not text:
        return []
    try:
        return [float(part) for part in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _zeros(scenario: Scenario) -> List[float]:
    return [0.0] * scenario.agg.dim


def aggregate_report(args) -> Tuple[dict, pd.DataFrame]:
    scenario = load_scenario(args.scenario)
    agg = scenario.agg
    window = list(feasibility_window(agg, scenario.budget))
    report = {
        "a": agg.a,
        "b": list(agg.b),
        "sigma2": agg.sigma2,
        "c": agg.c,
        "window": window,
        "threshold_bound": scenario.bound,
    }
    row = {"a": agg.a, "sigma2": agg.sigma2, "c": agg.c}
    row["window_low"], row["window_high"] = window
    row["threshold_bound"] = scenario.bound
    vector_columns("b", agg.b, row)
    return report, pd.DataFrame([row])


def equilibrium_report(args) -> Tuple[dict, pd.DataFrame]:
    scenario = load_scenario(args.scenario)
    epsilon = args.epsilon if args.epsilon is not None else _zeros(scenario)
    profile = equilibrium_family(EquilibriumParameter(epsilon=epsilon), scenario.agg, scenario.budget)
    in_family = is_in_family(profile, scenario.agg, scenario.budget, scenario.tolerances.identity)
    if not in_family:
        raise InvariantBreach(f"equilibrium_family produced a non-member {profile}.")
    pe = error_probability(profile, scenario.agg, scenario.priors)
    report = {
        "lambda": profile.threshold,
        "w": list(profile.w),
        "pe": pe,
        "equilibrium_error": best_response_value(profile.w, scenario.agg, scenario.priors),
        "in_family": in_family,
    }
    row = vector_columns("w", profile.w, {"lambda": profile.threshold})
    row.update(pe=pe, in_family=in_family)
    return report, pd.DataFrame([row])


def dynamics_report(args) -> Tuple[dict, pd.DataFrame]:
    scenario = load_scenario(args.scenario)
    w0 = args.w0 if args.w0 is not None else _zeros(scenario)
    initial = PureStrategyProfile.of(args.lambda0, w0)
    trace = run_dynamics(
        initial,
        PlayOrder(args.order),
        scenario.agg,
        scenario.priors,
        scenario.budget,
        max_half_steps=args.max_half_steps,
        mode=JammerMode(args.mode),
        tol=scenario.tolerances.identity,
        samples=scenario.tolerances.w_samples,
        seed=scenario.tolerances.seed,
    )
    if trace.mode == JammerMode.stationary and trace.converged:
        if not is_in_family(trace.final, scenario.agg, scenario.budget, scenario.tolerances.identity):
            raise InvariantBreach("converged stationary dynamics ended outside the equilibrium family.")
    report = trace.model_dump(mode="json")
    report["initial_position"] = classify_initial(initial, scenario.agg, scenario.budget).value
    return report, trace.to_frame()


def saddle_report(args) -> Tuple[dict, pd.DataFrame]:
    scenario = load_scenario(args.scenario)
    epsilon = args.epsilon if args.epsilon is not None else _zeros(scenario)
    profile = equilibrium_family(EquilibriumParameter(epsilon=epsilon), scenario.agg, scenario.budget)
    audit = AuditSpec.from_tolerances(
        scenario.tolerances,
        w_samples=args.samples,
        seed=args.seed,
        lambda_grid_points=args.lambda_points,
        deviations=args.deviation,
        workers=args.workers,
    )
    report = verify_saddle(profile, scenario.agg, scenario.priors, scenario.budget, scenario.bound, audit)
    row = {
        "lambda": profile.threshold,
        "equilibrium_value": report.equilibrium_value,
        "fc_side_max_violation": report.fc_side_max_violation,
        "fc_witness": report.fc_witness,
        "jammer_side_max_violation": report.jammer_side_max_violation,
        "holds_fc_side": report.holds_fc_side,
        "holds_jammer_side": report.holds_jammer_side,
        "samples": report.samples,
    }
    vector_columns("w", profile.w, row)
    vector_columns("jammer_witness", report.jammer_witness, row)
    return report, pd.DataFrame([row])


def mixed_report(args) -> Tuple[dict, pd.DataFrame]:
    scenario = load_scenario(args.scenario)
    if args.covariance:
        cov = load_covariance(args.covariance, scenario)
    else:
        cov = max_utility_covariance(scenario.agg, scenario.budget)
    comparison = compare_mixed_vs_pure(cov, scenario.agg, scenario.priors)
    if comparison.advantage < -scenario.tolerances.identity:
        raise InvariantBreach(f"Gaussian jammer did worse than the pure equilibrium: {comparison}.")
    report = comparison.model_dump()
    report["covariance"] = [list(row) for row in cov.W]
    return report, pd.DataFrame([comparison.model_dump()])


def mc_report(args) -> Tuple[dict, pd.DataFrame]:
    scenario = load_scenario(args.scenario)
    if args.covariance and args.w is not None:
        raise argparse.ArgumentTypeError("--w and --covariance are mutually exclusive")
    if args.covariance:
        cov = load_covariance(args.covariance, scenario)
        estimate = simulate_mixed_error(
            args.threshold, cov, scenario.network, scenario.priors, args.trials, args.seed, args.workers, args.block_size
        )
        closed_form = gamma_functional(args.threshold, cov, scenario.agg, scenario.priors)
    else:
        w = args.w if args.w is not None else _zeros(scenario)
        profile = PureStrategyProfile.of(args.threshold, w)
        estimate = simulate_error(
            profile, scenario.network, scenario.priors, args.trials, args.seed, args.workers, args.block_size
        )
        closed_form = error_probability(profile, scenario.agg, scenario.priors)
    report = estimate.model_dump()
    report.update(closed_form=closed_form, passed=estimate.agrees_with(closed_form, MC_AGREEMENT_SIGMAS))
    if not report["passed"]:
        logger.warning("Monte Carlo estimate %.6g is more than 4 stderr from %.6g", estimate.estimate, closed_form)
    return report, pd.DataFrame([report])


def sweep_report(args) -> Tuple[list, pd.DataFrame]:
    sweep = SweepSpec(parameter=args.param, values=args.values, outputs=args.outputs)
    frame = run_sweep(load_document(args.scenario), sweep)
    return frame.to_dict(orient="records"), frame


def structure_report(args) -> Tuple[dict, pd.DataFrame]:
    scenario = load_scenario(args.scenario)
    w = args.w if args.w is not None else _zeros(scenario)
    report = check_unimodal_in_threshold(
        w,
        scenario.agg,
        scenario.priors,
        scenario.bound,
        args.points or scenario.tolerances.unimodal_grid_points,
        grid_tolerance=scenario.tolerances.grid,
    )
    return report, report.to_frame()


def add_common_arguments(parser: argparse.ArgumentParser, default_format: str = "json"):
    parser.add_argument("--scenario", required=True, help="Scenario file (JSON, or YAML by suffix).")
    parser.add_argument("--output", choices=["json", "csv"], default=default_format)
    parser.add_argument("--out", default="stdout", help="Output path, or 'stdout'.")
    parser.add_argument("--log-level", default=None, help="Overrides JAMMING_GAME_LOG_LEVEL.")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description="Jamming game between a detection network and a multi-antenna jammer.")
    subparsers = parser.add_subparsers()

    parser_aggregate = subparsers.add_parser("aggregate", help="Collapsed signal model and feasibility window.")
    add_common_arguments(parser_aggregate)
    parser_aggregate.set_defaults(func=aggregate_report)

    parser_equilibrium = subparsers.add_parser("equilibrium", help="Pure-strategy equilibrium for a family parameter.")
    add_common_arguments(parser_equilibrium)
    parser_equilibrium.add_argument("--epsilon", type=parse_vector, default=None, help="Comma-separated ε, default 0.")
    parser_equilibrium.set_defaults(func=equilibrium_report)

    parser_dynamics = subparsers.add_parser("dynamics", help="Alternating best-response play.")
    add_common_arguments(parser_dynamics)
    parser_dynamics.add_argument("--lambda0", type=float, required=True)
    parser_dynamics.add_argument("--w0", type=parse_vector, default=None, help="Use --w0=-1,2 for negative entries.")
    parser_dynamics.add_argument("--order", choices=[o.value for o in PlayOrder], default=PlayOrder.network_first.value)
    parser_dynamics.add_argument("--mode", choices=[m.value for m in JammerMode], default=JammerMode.stationary.value)
    parser_dynamics.add_argument("--max-half-steps", type=int, default=20)
    parser_dynamics.set_defaults(func=dynamics_report)

    parser_saddle = subparsers.add_parser("saddle", help="Audit both saddle-point inequalities.")
    add_common_arguments(parser_saddle)
    parser_saddle.add_argument("--epsilon", type=parse_vector, default=None)
    parser_saddle.add_argument("--samples", type=int, default=None)
    parser_saddle.add_argument("--seed", type=int, default=None)
    parser_saddle.add_argument("--lambda-points", type=int, default=None)
    parser_saddle.add_argument("--deviation", type=parse_vector, action="append", default=None)
    parser_saddle.add_argument("--workers", type=int, default=None)
    parser_saddle.set_defaults(func=saddle_report)

    parser_mixed = subparsers.add_parser("mixed", help="Gaussian jammer versus the pure equilibrium.")
    add_common_arguments(parser_mixed)
    parser_mixed.add_argument("--covariance", default=None, help="Covariance file; default P b̂b̂ᵀ.")
    parser_mixed.set_defaults(func=mixed_report)

    parser_mc = subparsers.add_parser("mc", help="Monte Carlo estimate against the closed form.")
    add_common_arguments(parser_mc)
    parser_mc.add_argument("--lambda", dest="threshold", type=float, required=True)
    parser_mc.add_argument("--w", type=parse_vector, default=None)
    parser_mc.add_argument("--covariance", default=None)
    parser_mc.add_argument("--trials", type=int, default=100000)
    parser_mc.add_argument("--seed", type=int, default=0)
    parser_mc.add_argument("--workers", type=int, default=None)
    parser_mc.add_argument("--block-size", type=int, default=None)
    parser_mc.set_defaults(func=mc_report)

    parser_sweep = subparsers.add_parser("sweep", help="Re-run reports over values of one scenario field.")
    add_common_arguments(parser_sweep, default_format="csv")
    parser_sweep.add_argument("--param", required=True, help="Dotted path, e.g. jammer.power.")
    parser_sweep.add_argument("--values", type=parse_vector, required=True)
    parser_sweep.add_argument(
        "--outputs", type=lambda s: [p for p in s.split(",") if p], default=["equilibrium_error"],
        help=f"Comma-separated report kinds from {sorted(SWEEP_OUTPUTS)}.",
    )
    parser_sweep.set_defaults(func=sweep_report)

    parser_structure = subparsers.add_parser("structure", help="P_E over the threshold grid (plot-ready CSV).")
    add_common_arguments(parser_structure)
    parser_structure.add_argument("--w", type=parse_vector, default=None)
    parser_structure.add_argument("--points", type=int, default=None)
    parser_structure.set_defaults(func=structure_report)
    return parser


def setup_logging(level: Optional[str] = None):
    level = (level or os.environ.get("JAMMING_GAME_LOG_LEVEL", "INFO")).upper()
    logging.basicConfig(stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s")
    logger.setLevel(level)


def run(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_INVALID if e.code else EXIT_OK
    if not hasattr(args, "func"):
        parser.print_help()
        return EXIT_INVALID
    try:
        setup_logging(args.log_level)
        report, frame = args.func(args)
        text = dumps_csv(frame) if args.output == "csv" else dumps_json(report)
        write_output(text, args.out)
    except InvariantBreach as e:
        print(f"InvariantBreach: {e}", file=sys.stderr)
        return EXIT_BREACH
    except (ValueError, OSError, yaml.YAMLError, argparse.ArgumentTypeError) as e:
        print(f"{type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_INVALID
    return EXIT_OK


def main():
    sys.exit(run())


if __name__ == '__main__':
    main()
