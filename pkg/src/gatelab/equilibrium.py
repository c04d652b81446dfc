"""Endogenous-demand staffing solutions and the counterfactual savings sweep.

For a given announced average line wait, customers split between the
channels by the logit choice model; the live-agent service rate is then
set to deliver the announced waits, and staffing cost is linear in that
rate. Scenarios toggle transparency, the waiting-time nudge and a
priority bump for gatekeeper-failure customers; savings are measured
against the all-off baseline at the same grid point.
"""

from __future__ import annotations

import dataclasses
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

from .choice import (
    ChannelAParams,
    ChannelBParams,
    DecisionProblem,
    TreatmentConfig,
    UtilityParams,
    choice_prob_B,
)
from .errors import DegenerateInputError, FixedPointDivergenceError, GatelabError
from .queueing import SystemConfig, channel_demands, required_service_rate

# stand-in utility parameters: the study's fitted estimates are not
# public, so counterfactual defaults use this configurable placeholder
# (indifference-decision bot share ~0.38 under transparent, no-nudge flags)
DEFAULT_THETA = UtilityParams(
    c_line=0.05, c_agent=0.03, c_bot=0.04, c_nt=1.0, beta_base=1.5, beta_nudge=1.0
)

DEFAULT_T_BAR_GRID = tuple(range(1, 201))
DEFAULT_P_B_VALUES = (0.4, 0.5, 0.6)

FIXED_POINT_TOL = 1e-9
FIXED_POINT_DAMPING = 0.5
FIXED_POINT_MAX_ITER = 10_000


@dataclass(frozen=True)
class ScenarioFlags:
    """Which interventions a counterfactual scenario applies."""

    transparency: bool = False
    nudge: bool = False
    priority: bool = False

    @classmethod
    def baseline(cls) -> "ScenarioFlags":
        return cls(False, False, False)


DEFAULT_SCENARIOS = (
    ScenarioFlags.baseline(),
    ScenarioFlags(transparency=True),
    ScenarioFlags(nudge=True),
    ScenarioFlags(priority=True),
    ScenarioFlags(transparency=True, nudge=True, priority=True),
)


@dataclass(frozen=True)
class EquilibriumSolution:
    """One solved scenario point: announced waits, demand split, staffing."""

    t_line_A: float
    t_line_B: float
    rho_A: float
    rho_B: float
    lambda_A: float
    lambda_B: float
    mu: float
    utilization: float
    staffing_cost: float
    fixed_point_iterations: int


@dataclass(frozen=True)
class SweepRow:
    t_bar_line: float
    p_B: float
    scenario: ScenarioFlags
    rho_B: float
    lambda_A: float
    mu: float
    cost: float
    savings_vs_baseline: float


def _choice_inputs(
    system: SystemConfig, flags: ScenarioFlags, t_line_A: float, t_line_B: float
) -> tuple[DecisionProblem, TreatmentConfig]:
    # set/position are grid bookkeeping only; utilities ignore them
    d = DecisionProblem(
        set_index=1,
        position=6,
        a=ChannelAParams(t_line_A=t_line_A, t_serve_A=system.t_serve_A),
        b=ChannelBParams(
            t_serve1_B=system.t_serve1_B,
            p_B=system.p_B,
            t_line_B=t_line_B,
            t_serve2_B=system.t_serve2_B,
        ),
        scale=1,
    )
    treatment = TreatmentConfig(
        context=True,
        transparency=flags.transparency,
        nudge=flags.nudge,
        deterministic=False,
        scale=1,
    )
    return d, treatment


def _solve_at_waits(
    system: SystemConfig,
    theta: UtilityParams,
    flags: ScenarioFlags,
    t_bar_line: float,
    t_line_A: float,
    t_line_B: float,
    iterations: int,
) -> EquilibriumSolution:
    d, treatment = _choice_inputs(system, flags, t_line_A, t_line_B)
    rho_B = choice_prob_B(theta, d, treatment)
    lambda_A, lambda_B = channel_demands(system.lambda_total, rho_B, system.p_B)
    mu = required_service_rate(lambda_A, t_bar_line + system.t_serve_A)
    return EquilibriumSolution(
        t_line_A=t_line_A,
        t_line_B=t_line_B,
        rho_A=1.0 - rho_B,
        rho_B=rho_B,
        lambda_A=lambda_A,
        lambda_B=lambda_B,
        mu=mu,
        utilization=lambda_A / mu,
        staffing_cost=system.unit_staffing_cost * mu,
        fixed_point_iterations=iterations,
    )


def solve_pooled(
    system: SystemConfig,
    theta: UtilityParams,
    flags: ScenarioFlags,
    t_bar_line: float,
) -> EquilibriumSolution:
    """Solve one scenario point with a pooled live-agent queue.

    Both entry routes are announced the same wait ``t_bar_line``; the
    service rate delivers the announced sojourn target
    ``t_bar_line + t_serve_A``.
    """
    if flags.priority:
        raise ValueError("solve_pooled requires flags.priority = False")
    if t_bar_line <= 0:
        raise ValueError("t_bar_line must be > 0")
    return _solve_at_waits(system, theta, flags, t_bar_line, t_bar_line, t_bar_line, 0)


def solve_priority(
    system: SystemConfig,
    theta: UtilityParams,
    flags: ScenarioFlags,
    t_bar_line: float,
) -> EquilibriumSolution:
    """Solve one scenario point with a priority bump for bot-failure customers.

    Announced waits satisfy t_line_B = priority_factor * t_line_A while
    their average, weighted by each route's share of live-agent demand,
    equals ``t_bar_line``. Because the demand split itself depends on
    the announced waits, t_line_A is found by damped fixed-point
    iteration; everything else follows the pooled computation.
    """
    if not flags.priority:
        raise ValueError("solve_priority requires flags.priority = True")
    if t_bar_line <= 0:
        raise ValueError("t_bar_line must be > 0")
    f = system.priority_factor
    t_a = t_bar_line
    for iteration in range(1, FIXED_POINT_MAX_ITER + 1):
        t_b = f * t_a
        d, treatment = _choice_inputs(system, flags, t_a, t_b)
        rho_B = choice_prob_B(theta, d, treatment)
        lambda_A, _ = channel_demands(system.lambda_total, rho_B, system.p_B)
        if lambda_A <= 0:
            raise DegenerateInputError("no live-agent demand; priority weights undefined")
        w_a = system.lambda_total * (1.0 - rho_B) / lambda_A
        w_b = system.lambda_total * rho_B * (1.0 - system.p_B) / lambda_A
        weighted = w_a * t_a + w_b * t_b
        if abs(weighted - t_bar_line) <= FIXED_POINT_TOL * t_bar_line:
            return _solve_at_waits(system, theta, flags, t_bar_line, t_a, f * t_a, iteration)
        target = t_bar_line / (w_a + f * w_b)
        t_a = (1.0 - FIXED_POINT_DAMPING) * t_a + FIXED_POINT_DAMPING * target
    raise FixedPointDivergenceError(
        f"announced-wait fixed point not converged after {FIXED_POINT_MAX_ITER} iterations "
        f"(t_bar_line={t_bar_line}, p_B={system.p_B})"
    )


def solve_scenario(
    system: SystemConfig,
    theta: UtilityParams,
    flags: ScenarioFlags,
    t_bar_line: float,
) -> EquilibriumSolution:
    if flags.priority:
        return solve_priority(system, theta, flags, t_bar_line)
    return solve_pooled(system, theta, flags, t_bar_line)


def sweep(
    system: SystemConfig,
    theta: UtilityParams = DEFAULT_THETA,
    scenarios: Sequence[ScenarioFlags] = DEFAULT_SCENARIOS,
    t_bar_grid: Sequence[float] = DEFAULT_T_BAR_GRID,
    p_B_values: Sequence[float] = DEFAULT_P_B_VALUES,
    threads: int = 1,
) -> list[SweepRow]:
    """Solve every (t_bar, p_B, scenario) cell and compute savings.

    The baseline scenario is prepended if missing; savings compare each
    scenario's staffing cost against the baseline cost at the same
    (t_bar, p_B). Failed cells are recorded as NaN rows rather than
    aborting the sweep. Row order follows the grid regardless of
    ``threads``.
    """
    scenario_list = list(scenarios)
    baseline = ScenarioFlags.baseline()
    if baseline not in scenario_list:
        scenario_list.insert(0, baseline)

    cells = [
        (t_bar, p_b, flags)
        for t_bar in t_bar_grid
        for p_b in p_B_values
        for flags in scenario_list
    ]

    def solve_cell(cell):
        t_bar, p_b, flags = cell
        try:
            return solve_scenario(dataclasses.replace(system, p_B=p_b), theta, flags, t_bar)
        except (GatelabError, ValueError):
            return None

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            solutions = list(pool.map(solve_cell, cells))
    else:
        solutions = [solve_cell(cell) for cell in cells]

    baseline_cost: dict[tuple[float, float], float] = {}
    for cell, sol in zip(cells, solutions):
        t_bar, p_b, flags = cell
        if flags == baseline and sol is not None:
            baseline_cost[(t_bar, p_b)] = sol.staffing_cost

    rows = []
    for cell, sol in zip(cells, solutions):
        t_bar, p_b, flags = cell
        if sol is None:
            rows.append(
                SweepRow(t_bar, p_b, flags, math.nan, math.nan, math.nan, math.nan, math.nan)
            )
            continue
        base = baseline_cost.get((t_bar, p_b), math.nan)
        savings = 1.0 - sol.staffing_cost / base if math.isfinite(base) else math.nan
        rows.append(
            SweepRow(
                t_bar_line=t_bar,
                p_B=p_b,
                scenario=flags,
                rho_B=sol.rho_B,
                lambda_A=sol.lambda_A,
                mu=sol.mu,
                cost=sol.staffing_cost,
                savings_vs_baseline=savings,
            )
        )
    return rows


def sweep_summary(rows: Sequence[SweepRow]) -> list[dict]:
    """Peak savings and its t_bar per (scenario, p_B), baseline included."""
    groups: dict[tuple[ScenarioFlags, float], list[SweepRow]] = {}
    for row in rows:
        groups.setdefault((row.scenario, row.p_B), []).append(row)
    summary = []
    for (flags, p_b), group in groups.items():
        finite = [r for r in group if math.isfinite(r.savings_vs_baseline)]
        if finite:
            peak = max(finite, key=lambda r: r.savings_vs_baseline)
            peak_savings, argmax_t = peak.savings_vs_baseline, peak.t_bar_line
        else:
            peak_savings, argmax_t = math.nan, math.nan
        summary.append(
            {
                "transparency": flags.transparency,
                "nudge": flags.nudge,
                "priority": flags.priority,
                "p_B": p_b,
                "peak_savings": peak_savings,
                "argmax_t_bar_line": argmax_t,
                "n_failed_cells": len(group) - len(finite),
            }
        )
    return summary
