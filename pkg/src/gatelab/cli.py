"""Batch front door: config ingestion, subcommand dispatch, result emission.

Every command reads an optional JSON config (flags override config
values), derives all randomness from one global seed, and writes its
results as ``<command>.csv`` / ``<command>.json`` under the output
directory. Reruns with identical config and seed are byte-identical.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import io
from .choice import TREATMENT_PRESETS, TreatmentConfig, UtilityParams
from .design import PolicySpec, build_experiment, simulate_choices
from .des import DISCIPLINES, DesConfig, run_des
from .equilibrium import (
    DEFAULT_P_B_VALUES,
    DEFAULT_SCENARIOS,
    DEFAULT_T_BAR_GRID,
    DEFAULT_THETA,
    ScenarioFlags,
    solve_scenario,
    sweep,
    sweep_summary,
)
from .errors import GatelabError
from .estimation import PARAM_NAMES, FitOptions, bootstrap_se, fit_mle
from .queueing import SystemConfig, mdl_queue_wait
from .stats import holm_adjust, one_sample_t, proportion_test, uptake_counts

THREADS_ENV_VAR = "GATELAB_THREADS"

_TOP_KEYS = {"seed", "design", "simulate", "fit", "equilibrium", "sweep", "des", "analyze"}
_THETA_KEYS = set(PARAM_NAMES) | {"r"}
_SYSTEM_KEYS = {
    "lambda_total", "p_B", "t_serve_A", "t_serve1_B", "t_serve2_B",
    "unit_staffing_cost", "priority_factor",
}
_FLAGS_KEYS = {"transparency", "nudge", "priority"}
_TREATMENT_KEYS = {"context", "transparency", "nudge", "deterministic"}
_POLICY_KEYS = {"kind", "theta", "tie_break", "seed"}
_BLOCK_KEYS = {
    "design": {"scale"},
    "simulate": {"scale", "treatment", "policy", "n_subjects"},
    "fit": {
        "data", "n_starts", "max_iterations", "tolerance",
        "start_dispersion", "bootstrap_replicates",
    },
    "equilibrium": {"system", "theta", "flags", "t_bar_line"},
    "sweep": {"system", "theta", "scenarios", "t_bar_grid", "p_B_values"},
    "des": {"system", "rho_B", "mu", "discipline", "n_arrivals", "warmup_fraction", "trace"},
    "analyze": {"data", "mu0", "sidedness", "proportion"},
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # exit 1 instead of argparse's default 2
        raise UsageError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="gatelab", description=__doc__)
    parser.add_argument("--config", help="JSON config file")
    parser.add_argument("--seed", type=int, help="global seed; overrides config")
    parser.add_argument("--out", default=".", help="output directory (default: .)")
    parser.add_argument("--force", action="store_true", help="overwrite existing outputs")
    parser.add_argument(
        "--threads", type=int, default=None,
        help=f"worker threads (default: ${THREADS_ENV_VAR} or 1)",
    )
    sub = parser.add_subparsers(dest="command")

    p = sub.add_parser("design", help="emit the decision-grid CSV")
    p.add_argument("--scale", type=int, choices=(1, 2))

    p = sub.add_parser("simulate", help="emit a synthetic choice-data CSV")
    p.add_argument("--scale", type=int, choices=(1, 2))
    p.add_argument("--treatment", help=f"preset: {', '.join(sorted(TREATMENT_PRESETS))}")
    p.add_argument("--policy-kind", choices=("time_minimizer", "logit"))
    p.add_argument("--tie-break", choices=("random", "always_A", "always_B"))
    p.add_argument("--subjects", type=int)

    p = sub.add_parser("fit", help="maximum-likelihood fit of a choice-data CSV")
    p.add_argument("--data", help="choice-data CSV path")
    p.add_argument("--starts", type=int)
    p.add_argument("--replicates", type=int, help="bootstrap replicates (0 = skip)")

    p = sub.add_parser("equilibrium", help="solve one counterfactual scenario point")
    p.add_argument("--t-bar", type=float, help="announced average line wait")

    sub.add_parser("sweep", help="emit the counterfactual savings sweep CSV + summary")

    p = sub.add_parser("des", help="run the discrete-event validator")
    p.add_argument("--arrivals", type=int)
    p.add_argument("--discipline", choices=DISCIPLINES)
    p.add_argument("--trace", action="store_true", help="also emit a per-customer trace CSV")

    p = sub.add_parser("analyze", help="uptake statistics and benchmark tests")
    p.add_argument("--data", help="choice-data CSV path")

    return parser


def dispatch(argv: list[str]) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        parser.print_usage(sys.stderr)
        return 1
    except SystemExit as exc:  # --help
        return int(exc.code or 0)

    try:
        if args.command is None:
            raise UsageError("a subcommand is required")
        config = _load_config(args.config)
        seed = args.seed if args.seed is not None else int(config.get("seed", 0))
        if seed < 0:
            raise UsageError("seed must be non-negative")
        threads = _resolve_threads(args.threads)
        out = Path(args.out)
        handler = {
            "design": _cmd_design,
            "simulate": _cmd_simulate,
            "fit": _cmd_fit,
            "equilibrium": _cmd_equilibrium,
            "sweep": _cmd_sweep,
            "des": _cmd_des,
            "analyze": _cmd_analyze,
        }[args.command]
        block = config.get(args.command, {})
        if not isinstance(block, dict):
            raise UsageError(f"config section '{args.command}' must be an object")
        _check_keys(block, _BLOCK_KEYS[args.command], args.command)
        handler(args, block, seed, out, threads)
        return 0
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        parser.print_usage(sys.stderr)
        return 1
    except (GatelabError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(dispatch(sys.argv[1:]))


# ---------------------------------------------------------------------------
# command handlers

def _cmd_design(args, block, seed, out, threads):
    scale = args.scale if args.scale is not None else int(block.get("scale", 1))
    path = _output_path(out, "design.csv", args.force)
    io.write_grid_csv(path, build_experiment(scale))


def _cmd_simulate(args, block, seed, out, threads):
    scale = args.scale if args.scale is not None else int(block.get("scale", 1))
    treatment = _treatment_from(
        args.treatment if args.treatment is not None else block.get("treatment", "context"),
        scale,
    )
    policy_block = dict(block.get("policy", {"kind": "time_minimizer"}))
    _check_keys(policy_block, _POLICY_KEYS, "simulate.policy")
    if args.policy_kind is not None:
        policy_block["kind"] = args.policy_kind
    if args.tie_break is not None:
        policy_block["tie_break"] = args.tie_break
    theta = _theta_from(policy_block.get("theta"), default=None)
    policy = _build(
        "policy", PolicySpec,
        kind=policy_block.get("kind", "time_minimizer"),
        theta=theta,
        tie_break=policy_block.get("tie_break", "random"),
        seed=int(policy_block.get("seed", 0)),
    )
    n_subjects = args.subjects if args.subjects is not None else int(block.get("n_subjects", 100))
    records = simulate_choices(build_experiment(scale), treatment, policy, n_subjects, seed)
    path = _output_path(out, "simulate.csv", args.force)
    io.write_choices_csv(path, records)


def _cmd_fit(args, block, seed, out, threads):
    data = args.data if args.data is not None else block.get("data")
    if not data:
        raise UsageError("fit requires --data or config fit.data")
    records = io.read_choices_csv(data)
    options = _build(
        "fit options", FitOptions,
        n_starts=args.starts if args.starts is not None else int(block.get("n_starts", 8)),
        max_iterations=int(block.get("max_iterations", 5000)),
        tolerance=float(block.get("tolerance", 1e-8)),
        start_dispersion=float(block.get("start_dispersion", 0.5)),
        seed=seed,
    )
    result = fit_mle(records, options)
    report = {
        "theta_hat": {name: getattr(result.theta_hat, name) for name in PARAM_NAMES},
        "log_likelihood": result.log_likelihood,
        "converged": result.converged,
        "n_function_evals": result.n_function_evals,
        "start_index_of_best": result.start_index_of_best,
        "n_records": len(records),
        "n_subjects": len({r.subject_id for r in records}),
    }
    replicates = (
        args.replicates if args.replicates is not None
        else int(block.get("bootstrap_replicates", 0))
    )
    if replicates:
        boot = bootstrap_se(records, options, n_replicates=replicates, seed=seed)
        report["bootstrap"] = {
            "standard_errors": dict(zip(PARAM_NAMES, boot.standard_errors.tolist())),
            "n_replicates": boot.n_replicates,
            "n_skipped": boot.n_skipped,
        }
    path = _output_path(out, "fit.json", args.force)
    io.write_json(path, report)


def _cmd_equilibrium(args, block, seed, out, threads):
    system = _system_from(block.get("system"))
    theta = _theta_from(block.get("theta"), default=DEFAULT_THETA)
    flags = _flags_from(block.get("flags"))
    t_bar = args.t_bar if args.t_bar is not None else float(block.get("t_bar_line", 20.0))
    solution = solve_scenario(system, theta, flags, t_bar)
    report = {
        "t_bar_line": t_bar,
        "flags": {
            "transparency": flags.transparency,
            "nudge": flags.nudge,
            "priority": flags.priority,
        },
        "t_line_A": solution.t_line_A,
        "t_line_B": solution.t_line_B,
        "rho_A": solution.rho_A,
        "rho_B": solution.rho_B,
        "lambda_A": solution.lambda_A,
        "lambda_B": solution.lambda_B,
        "mu": solution.mu,
        "utilization": solution.utilization,
        "staffing_cost": solution.staffing_cost,
        "fixed_point_iterations": solution.fixed_point_iterations,
    }
    path = _output_path(out, "equilibrium.json", args.force)
    io.write_json(path, report)


def _cmd_sweep(args, block, seed, out, threads):
    system = _system_from(block.get("system"))
    theta = _theta_from(block.get("theta"), default=DEFAULT_THETA)
    scenarios = _scenarios_from(block.get("scenarios"))
    t_bar_grid = _grid_from(block.get("t_bar_grid"))
    p_b_values = [float(p) for p in block.get("p_B_values", DEFAULT_P_B_VALUES)]
    csv_path = _output_path(out, "sweep.csv", args.force)
    json_path = _output_path(out, "sweep.json", args.force)
    rows = sweep(system, theta, scenarios, t_bar_grid, p_b_values, threads=threads)
    io.write_sweep_csv(csv_path, rows)
    io.write_json(json_path, {"summary": sweep_summary(rows)})


def _cmd_des(args, block, seed, out, threads):
    system = _system_from(block.get("system"))
    config = _build(
        "des config", DesConfig,
        system=system,
        rho_B=float(block.get("rho_B", 0.5)),
        mu=float(block.get("mu", 0.2)),
        discipline=(
            args.discipline if args.discipline is not None
            else block.get("discipline", "pooled_fifo")
        ),
        n_arrivals=(
            args.arrivals if args.arrivals is not None else int(block.get("n_arrivals", 100_000))
        ),
        warmup_fraction=float(block.get("warmup_fraction", 0.1)),
        seed=seed,
    )
    want_trace = args.trace or bool(block.get("trace", False))
    if want_trace:
        stats, trace = run_des(config, collect_trace=True)
    else:
        stats = run_des(config)
    lam_a = config.implied_lambda_A()
    # the staffing formula's time target reads as a queue wait algebraically
    # but as a sojourn in prose; report both readings, choosing neither
    if lam_a < config.mu:
        pk_wait = mdl_queue_wait(lam_a, config.mu)
        analytical = {
            "implied_lambda_A": lam_a,
            "pk_mean_queue_wait": pk_wait,
            "pk_mean_sojourn": pk_wait + 1.0 / config.mu,
            "utilization": lam_a / config.mu,
        }
    else:
        analytical = {"implied_lambda_A": lam_a, "unstable": True}
    report = {
        "config": {
            "rho_B": config.rho_B,
            "mu": config.mu,
            "discipline": config.discipline,
            "n_arrivals": config.n_arrivals,
            "warmup_fraction": config.warmup_fraction,
            "seed": config.seed,
            "lambda_total": system.lambda_total,
            "p_B": system.p_B,
            "t_serve1_B": system.t_serve1_B,
        },
        "stats": {
            "mean_queue_wait_direct": stats.mean_queue_wait_direct,
            "mean_queue_wait_bot_failures": stats.mean_queue_wait_bot_failures,
            "mean_queue_wait_overall": stats.mean_queue_wait_overall,
            "utilization_observed": stats.utilization_observed,
            "n_served": stats.n_served,
            "half_width_95": stats.half_width_95,
            "n_direct_served": stats.n_direct_served,
            "n_bot_failure_served": stats.n_bot_failure_served,
            "n_bot_success_served": stats.n_bot_success_served,
            "stability_warning": stats.stability_warning,
        },
        "analytical_reference": analytical,
    }
    path = _output_path(out, "des.json", args.force)
    io.write_json(path, report)
    if want_trace:
        io.write_trace_csv(_output_path(out, "des_trace.csv", args.force), trace)


def _cmd_analyze(args, block, seed, out, threads):
    data = args.data if args.data is not None else block.get("data")
    if not data:
        raise UsageError("analyze requires --data or config analyze.data")
    records = io.read_choices_csv(data)
    summary = uptake_counts(records)
    mu0 = float(block.get("mu0", 5.5))
    sidedness = block.get("sidedness", "lower")
    t, df, p = one_sample_t(summary.values(), mu0, sidedness)
    p_values = [p]
    report = {
        "n_records": len(records),
        "n_subjects": summary.n_subjects,
        "uptake": {
            "mean_uptake": summary.mean_uptake,
            "n_groups": len(summary.counts),
        },
        "uptake_t_test": {"mu0": mu0, "sidedness": sidedness, "t": t, "df": df, "p": p},
    }
    prop = block.get("proportion")
    if prop is not None:
        _check_keys(prop, {"k", "n", "p0"}, "analyze.proportion")
        p_prop = proportion_test(int(prop["k"]), int(prop["n"]), float(prop.get("p0", 0.5)))
        report["proportion_test"] = {
            "k": int(prop["k"]),
            "n": int(prop["n"]),
            "p0": float(prop.get("p0", 0.5)),
            "p": p_prop,
        }
        p_values.append(p_prop)
    report["holm_adjusted_p"] = holm_adjust(p_values)
    path = _output_path(out, "analyze.json", args.force)
    io.write_json(path, report)


# ---------------------------------------------------------------------------
# config plumbing

def _load_config(path: str | None) -> dict:
    if path is None:
        return {}
    try:
        with open(path) as fh:
            config = json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read config: {exc}")
    except json.JSONDecodeError as exc:
        raise UsageError(f"config is not valid JSON: {exc}")
    if not isinstance(config, dict):
        raise UsageError("config root must be a JSON object")
    _check_keys(config, _TOP_KEYS, "config")
    return config


def _check_keys(block: dict, allowed: set, where: str) -> None:
    unknown = set(block) - allowed
    if unknown:
        raise UsageError(f"unknown configuration key(s) in {where}: {', '.join(sorted(unknown))}")


def _build(what: str, constructor, *args, **kwargs):
    # config-derived construction problems are usage errors, not tracebacks
    try:
        return constructor(*args, **kwargs)
    except (TypeError, ValueError) as exc:
        raise UsageError(f"invalid {what}: {exc}")


def _resolve_threads(flag_value: int | None) -> int:
    if flag_value is not None:
        threads = flag_value
    else:
        threads = int(os.environ.get(THREADS_ENV_VAR, "1"))
    if threads < 1:
        raise UsageError("threads must be >= 1")
    return threads


def _output_path(out: Path, name: str, force: bool) -> Path:
    out.mkdir(parents=True, exist_ok=True)
    path = out / name
    if path.exists() and not force:
        raise UsageError(f"{path} exists; pass --force to overwrite")
    return path


def _theta_from(block, default=None) -> UtilityParams | None:
    if block is None:
        return default
    _check_keys(block, _THETA_KEYS, "theta")
    return _build("theta", UtilityParams, **{k: float(v) for k, v in block.items()})


def _system_from(block) -> SystemConfig:
    if block is None:
        return SystemConfig()
    _check_keys(block, _SYSTEM_KEYS, "system")
    return _build("system", SystemConfig, **{k: float(v) for k, v in block.items()})


def _flags_from(block) -> ScenarioFlags:
    if block is None:
        return ScenarioFlags.baseline()
    _check_keys(block, _FLAGS_KEYS, "flags")
    return ScenarioFlags(**{k: bool(v) for k, v in block.items()})


def _scenarios_from(blocks) -> list[ScenarioFlags]:
    if blocks is None:
        return list(DEFAULT_SCENARIOS)
    return [_flags_from(b) for b in blocks]


def _grid_from(block) -> list[float]:
    if block is None:
        return list(DEFAULT_T_BAR_GRID)
    if isinstance(block, dict):
        _check_keys(block, {"start", "stop", "step"}, "t_bar_grid")
        start = float(block.get("start", 1))
        stop = float(block.get("stop", 200))
        step = float(block.get("step", 1))
        if step <= 0:
            raise UsageError("t_bar_grid.step must be > 0")
        grid = []
        value = start
        while value <= stop + 1e-12:
            grid.append(value)
            value += step
        return grid
    return [float(v) for v in block]


def _treatment_from(spec, scale: int) -> TreatmentConfig:
    if isinstance(spec, str):
        preset = TREATMENT_PRESETS.get(spec)
        if preset is None:
            raise UsageError(
                f"unknown treatment preset '{spec}'; "
                f"choose from {', '.join(sorted(TREATMENT_PRESETS))}"
            )
        return preset(scale)
    if isinstance(spec, dict):
        _check_keys(spec, _TREATMENT_KEYS, "treatment")
        return _build("treatment", TreatmentConfig, scale=scale, **{k: bool(v) for k, v in spec.items()})
    raise UsageError("treatment must be a preset name or a flags object")
