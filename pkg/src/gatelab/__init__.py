"""Gatekeeper service-channel choice laboratory.

Rebuilds the two-channel (live agent vs. gatekeeper bot) decision
grids, fits the structural random-utility model of channel choice, and
solves the endogenous-demand M/D/1 staffing problem to quantify cost
savings from transparency, nudge and priority-queue interventions.
"""

from .choice import (
    TREATMENT_PRESETS,
    ChannelAParams,
    ChannelBParams,
    DecisionProblem,
    TreatmentConfig,
    UtilityParams,
    choice_prob_A,
    choice_prob_B,
    expected_time_A,
    expected_time_B,
    utility_A,
    utility_B,
)
from .des import DesConfig, DesStats, run_des
from .design import (
    ChoiceRecord,
    DecisionSetSpec,
    PolicySpec,
    build_decision_set,
    build_experiment,
    grid_lookup,
    presented_decision,
    simulate_choices,
    to_deterministic,
)
from .equilibrium import (
    DEFAULT_SCENARIOS,
    DEFAULT_THETA,
    EquilibriumSolution,
    ScenarioFlags,
    SweepRow,
    solve_pooled,
    solve_priority,
    solve_scenario,
    sweep,
    sweep_summary,
)
from .errors import (
    DegenerateInputError,
    DegenerateSampleError,
    FixedPointDivergenceError,
    GatelabError,
    IdentificationError,
    IncompleteSetError,
    UnknownDecisionError,
    UnstableSystemError,
)
from .estimation import (
    PARAM_NAMES,
    BootstrapResult,
    FitOptions,
    FitResult,
    bootstrap_se,
    fit_mle,
    log_likelihood,
)
from .queueing import SystemConfig, channel_demands, mdl_queue_wait, required_service_rate
from .stats import UptakeSummary, holm_adjust, one_sample_t, proportion_test, uptake_counts

__version__ = "0.1.0"
