"""Core domain types and the structural utility / logit choice model.

Two service channels. Channel A is a single stage with a certain
resolution: wait in line, then get served. Channel B is a gatekeeper:
a first service stage that succeeds with probability ``p_B``; on failure
the customer waits in a second line and is served by the expert stage.

All arithmetic here is plain Python, so exact types (``int``,
``fractions.Fraction``) pass through without rounding. The experiment
grids rely on this to keep expected-time differences exact.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass


@dataclass(frozen=True)
class ChannelAParams:
    """Stage durations of the single-stage live channel, in seconds."""

    t_line_A: float
    t_serve_A: float

    def __post_init__(self) -> None:
        if not (_finite(self.t_line_A) and _finite(self.t_serve_A)):
            raise ValueError("ChannelAParams durations must be finite")
        if self.t_line_A < 0:
            raise ValueError("t_line_A must be >= 0")
        if self.t_serve_A <= 0:
            raise ValueError("t_serve_A must be > 0")


@dataclass(frozen=True)
class ChannelBParams:
    """Stage durations and success probability of the gatekeeper channel."""

    t_serve1_B: float
    p_B: float
    t_line_B: float
    t_serve2_B: float

    def __post_init__(self) -> None:
        for name in ("t_serve1_B", "t_line_B", "t_serve2_B"):
            v = getattr(self, name)
            if not _finite(v) or v < 0:
                raise ValueError(f"{name} must be finite and >= 0")
        if self.t_serve1_B <= 0:
            raise ValueError("t_serve1_B must be > 0")
        if not (0 <= self.p_B <= 1):
            raise ValueError("p_B must lie in [0, 1]")


@dataclass(frozen=True)
class DecisionProblem:
    """One binary choice between Channel A and Channel B.

    ``set_index`` and ``position`` locate the decision on the 3 x 11
    experiment grid; counterfactual solvers also assemble free-standing
    decisions, so the grid's expected-time-difference relation is a
    property of grid construction, not enforced here.
    """

    set_index: int
    position: int
    a: ChannelAParams
    b: ChannelBParams
    scale: int = 1

    def __post_init__(self) -> None:
        if self.set_index not in (1, 2, 3):
            raise ValueError("set_index must be 1, 2 or 3")
        if not (1 <= self.position <= 11):
            raise ValueError("position must lie in 1..11")
        if self.scale not in (1, 2):
            raise ValueError("scale must be 1 or 2")


@dataclass(frozen=True)
class UtilityParams:
    """Structural parameter vector of the channel-choice utility model.

    ``r`` is the reward for completed service; it cancels in the utility
    difference and is normalized to zero (kept as a field so the
    normalization itself can be tested). Costs are disutility per second
    in the respective stage; ``c_nt`` is the lump-sum disutility of an
    untransparent gatekeeper failure; ``beta_base`` / ``beta_nudge``
    multiply the failure-path delay costs without / with the
    waiting-time nudge. The logit noise scale is fixed to 1, so all
    parameters are in noise-scale units.
    """

    c_line: float
    c_agent: float
    c_bot: float
    c_nt: float = 0.0
    beta_base: float = 1.0
    beta_nudge: float = 1.0
    r: float = 0.0

    def __post_init__(self) -> None:
        for name in ("r", "c_line", "c_agent", "c_bot", "c_nt", "beta_base", "beta_nudge"):
            if not _finite(getattr(self, name)):
                raise ValueError(f"UtilityParams.{name} must be finite")
        negative = [n for n in ("c_line", "c_agent", "c_bot", "c_nt") if getattr(self, n) < 0]
        if negative:
            warnings.warn(
                f"negative cost parameter(s): {', '.join(negative)}",
                UserWarning,
                stacklevel=2,
            )


@dataclass(frozen=True)
class TreatmentConfig:
    """Flags that gate which utility terms and grid transforms apply.

    ``transparency`` switches the lump-sum failure disutility off;
    ``nudge`` selects ``beta_nudge`` over ``beta_base``;
    ``deterministic`` marks the arm whose Channel B always runs both
    stages (with failure-path durations rescaled to preserve expected
    time); ``scale`` is the duration arm (1 = short, 2 = long/doubled).
    """

    context: bool = True
    transparency: bool = True
    nudge: bool = False
    deterministic: bool = False
    scale: int = 1

    def __post_init__(self) -> None:
        if self.scale not in (1, 2):
            raise ValueError("scale must be 1 or 2")
        if self.deterministic and self.context:
            raise ValueError("the deterministic arm is context-free")

    @classmethod
    def context_only(cls, scale: int = 1) -> "TreatmentConfig":
        return cls(context=True, transparency=True, nudge=False, deterministic=False, scale=scale)

    @classmethod
    def context_nudge(cls, scale: int = 1) -> "TreatmentConfig":
        return cls(context=True, transparency=True, nudge=True, deterministic=False, scale=scale)

    @classmethod
    def context_no_transparency(cls, scale: int = 1) -> "TreatmentConfig":
        return cls(context=True, transparency=False, nudge=False, deterministic=False, scale=scale)

    @classmethod
    def no_context(cls, scale: int = 1) -> "TreatmentConfig":
        return cls(context=False, transparency=True, nudge=False, deterministic=False, scale=scale)

    @classmethod
    def no_context_deterministic(cls, scale: int = 1) -> "TreatmentConfig":
        return cls(context=False, transparency=True, nudge=False, deterministic=True, scale=scale)


TREATMENT_PRESETS = {
    "context": TreatmentConfig.context_only,
    "context+nudge": TreatmentConfig.context_nudge,
    "context+no_transparency": TreatmentConfig.context_no_transparency,
    "no_context": TreatmentConfig.no_context,
    "no_context+deterministic": TreatmentConfig.no_context_deterministic,
}


def expected_time_A(a: ChannelAParams) -> float:
    """Expected total time in Channel A: line plus service."""
    return a.t_line_A + a.t_serve_A


def expected_time_B(b: ChannelBParams) -> float:
    """Expected total time in Channel B.

    First stage always runs; the failure branch (probability 1 - p_B)
    adds the second line and the expert stage.
    """
    return b.t_serve1_B + (1 - b.p_B) * (b.t_line_B + b.t_serve2_B)


def utility_A(theta: UtilityParams, a: ChannelAParams) -> float:
    """Deterministic utility of Channel A."""
    return theta.r - theta.c_line * a.t_line_A - theta.c_agent * a.t_serve_A


def utility_B(theta: UtilityParams, b: ChannelBParams, treatment: TreatmentConfig) -> float:
    """Deterministic utility of Channel B under the treatment's gating.

    The lump-sum failure disutility applies only without transparency;
    the failure-path delay multiplier is ``beta_nudge`` when the nudge
    is shown and ``beta_base`` otherwise.
    """
    c_nt_eff = 0.0 if treatment.transparency else theta.c_nt
    beta_eff = theta.beta_nudge if treatment.nudge else theta.beta_base
    failure_cost = c_nt_eff + beta_eff * (
        theta.c_line * b.t_line_B + theta.c_agent * b.t_serve2_B
    )
    return theta.r - theta.c_bot * b.t_serve1_B - (1 - b.p_B) * failure_cost


def choice_prob_B(theta: UtilityParams, d: DecisionProblem, treatment: TreatmentConfig) -> float:
    """Logit probability of choosing Channel B.

    Evaluated in the shifted form 1 / (1 + exp(U_A - U_B)) with the
    exponent kept non-positive, so extreme utility gaps saturate
    instead of overflowing.
    """
    diff = utility_A(theta, d.a) - utility_B(theta, d.b, treatment)
    return _logistic(-float(diff))


def choice_prob_A(theta: UtilityParams, d: DecisionProblem, treatment: TreatmentConfig) -> float:
    """Complement of :func:`choice_prob_B`, computed as 1 - p exactly."""
    return 1.0 - choice_prob_B(theta, d, treatment)


def _logistic(x: float) -> float:
    # exp() argument <= 0 on both branches
    if x >= 0:
        return 1.0 / (1.0 + math.exp(-x))
    e = math.exp(x)
    return e / (1.0 + e)


def _finite(x) -> bool:
    try:
        return math.isfinite(x)
    except TypeError:
        return math.isfinite(float(x))
