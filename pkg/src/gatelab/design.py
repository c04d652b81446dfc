"""Decision-grid reconstruction and synthetic choice-data generation.

Each experiment arm presents 33 binary choices, organized as three
decision sets of 11. Within a set one Channel B parameter is varied so
that the alternative improves monotonically down the list (a multiple
price list); every other stage duration is anchored at 20 seconds times
the scale factor. Set 1 varies the gatekeeper success probability
ascending, set 2 the gatekeeper service time descending, set 3 the
failure-line wait descending. The three sets share the same
expected-time difference at each position: (2*position - 12) * scale
seconds, which is negative for positions 1-5, zero at position 6 and
positive for positions 7-11.

Grids are built with exact rational arithmetic (integer seconds,
``Fraction`` probabilities) so those differences hold exactly, not just
to float tolerance.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .choice import (
    ChannelAParams,
    ChannelBParams,
    DecisionProblem,
    TreatmentConfig,
    UtilityParams,
    choice_prob_B,
    expected_time_A,
    expected_time_B,
)

VARIED_BY_SET = {1: "p_B", 2: "t_serve1_B", 3: "t_line_B"}


@dataclass(frozen=True)
class DecisionSetSpec:
    """Identifies one decision set: which parameter it varies, at which scale."""

    set_index: int
    scale: int = 1
    varied_parameter: str | None = None

    def __post_init__(self) -> None:
        if self.set_index not in (1, 2, 3):
            raise ValueError("set_index must be 1, 2 or 3")
        if self.scale not in (1, 2):
            raise ValueError("scale must be 1 or 2")
        expected = VARIED_BY_SET[self.set_index]
        if self.varied_parameter is None:
            object.__setattr__(self, "varied_parameter", expected)
        elif self.varied_parameter != expected:
            raise ValueError(
                f"set {self.set_index} varies {expected}, not {self.varied_parameter}"
            )


@dataclass(frozen=True)
class ChoiceRecord:
    """One subject's choice on one grid decision; the unit of estimation.

    The decision is referenced by (set_index, position) plus the
    treatment's scale rather than embedded, so records survive a CSV
    round trip and are resolved against the grid when needed.
    """

    subject_id: str
    set_index: int
    position: int
    treatment: TreatmentConfig
    chose_B: bool

    @property
    def scale(self) -> int:
        return self.treatment.scale


@dataclass(frozen=True)
class PolicySpec:
    """Synthetic behavioral policy used to generate choice data.

    ``time_minimizer`` picks the channel with the smaller expected time
    and settles exact ties per ``tie_break``; ``logit`` draws choices
    from the structural model at ``theta``. ``seed`` is a policy-level
    stream component combined with the dataset seed.
    """

    kind: str
    theta: UtilityParams | None = None
    tie_break: str = "random"
    seed: int = 0

    def __post_init__(self) -> None:
        if self.kind not in ("time_minimizer", "logit"):
            raise ValueError("kind must be 'time_minimizer' or 'logit'")
        if self.tie_break not in ("random", "always_A", "always_B"):
            raise ValueError("tie_break must be 'random', 'always_A' or 'always_B'")
        if self.kind == "logit" and self.theta is None:
            raise ValueError("logit policy requires theta")
        if self.seed < 0:
            raise ValueError("seed must be non-negative")


def build_decision_set(spec: DecisionSetSpec) -> list[DecisionProblem]:
    """Reconstruct the 11 decisions of one set at the spec's scale.

    Anchors: every fixed stage duration is 20*scale seconds and the
    fixed success probability is 1/2. Varied parameter by set --
    set 1: p_B = 0.25 .. 0.75 ascending in steps of 0.05;
    set 2: t_serve1_B = 30*scale .. 10*scale descending in steps of 2*scale;
    set 3: t_line_B = 40*scale .. 0 descending in steps of 4*scale.
    """
    s = spec.scale
    anchor = 20 * s
    a = ChannelAParams(t_line_A=anchor, t_serve_A=anchor)
    decisions = []
    for position in range(1, 12):
        k = position - 1
        serve1, p, line, serve2 = anchor, Fraction(1, 2), anchor, anchor
        if spec.set_index == 1:
            p = Fraction(25 + 5 * k, 100)
        elif spec.set_index == 2:
            serve1 = (30 - 2 * k) * s
        else:
            line = (40 - 4 * k) * s
        b = ChannelBParams(t_serve1_B=serve1, p_B=p, t_line_B=line, t_serve2_B=serve2)
        decisions.append(
            DecisionProblem(set_index=spec.set_index, position=position, a=a, b=b, scale=s)
        )
    return decisions


def build_experiment(scale: int = 1) -> list[DecisionProblem]:
    """All 33 decisions of one arm: sets 1..3 concatenated."""
    out: list[DecisionProblem] = []
    for set_index in (1, 2, 3):
        out.extend(build_decision_set(DecisionSetSpec(set_index=set_index, scale=scale)))
    return out


def to_deterministic(d: DecisionProblem) -> DecisionProblem:
    """Deterministic-equivalent transform of one decision.

    Channel B always runs both stages, with the failure-path durations
    scaled by (1 - p_B) so the expected total time is unchanged.
    """
    q = 1 - d.b.p_B
    b = ChannelBParams(
        t_serve1_B=d.b.t_serve1_B,
        p_B=0,
        t_line_B=q * d.b.t_line_B,
        t_serve2_B=q * d.b.t_serve2_B,
    )
    return DecisionProblem(
        set_index=d.set_index, position=d.position, a=d.a, b=b, scale=d.scale
    )


def presented_decision(d: DecisionProblem, treatment: TreatmentConfig) -> DecisionProblem:
    """The decision as the treatment arm presents it.

    The deterministic arm shows the deterministic-equivalent transform;
    every other arm shows the decision as built.
    """
    return to_deterministic(d) if treatment.deterministic else d


def simulate_choices(
    decisions: Sequence[DecisionProblem],
    treatment: TreatmentConfig,
    policy: PolicySpec,
    n_subjects: int,
    seed: int,
) -> list[ChoiceRecord]:
    """Generate ``n_subjects`` synthetic subjects' choices over ``decisions``.

    Each subject draws from an independent generator seeded by
    (seed, policy.seed, subject index), so output is reproducible and
    independent of any parallel generation order.
    """
    if n_subjects < 0:
        raise ValueError("n_subjects must be >= 0")
    shown = [presented_decision(d, treatment) for d in decisions]

    if policy.kind == "logit":
        probs = np.array(
            [choice_prob_B(policy.theta, d, treatment) for d in shown], dtype=float
        )
    else:
        diffs = [expected_time_A(d.a) - expected_time_B(d.b) for d in shown]

    records: list[ChoiceRecord] = []
    for i in range(n_subjects):
        rng = np.random.default_rng((seed, policy.seed, i))
        subject_id = f"s{i:05d}"
        if policy.kind == "logit":
            chose = rng.random(len(shown)) < probs
        else:
            draws = rng.random(len(shown))
            chose = np.empty(len(shown), dtype=bool)
            for j, diff in enumerate(diffs):
                if diff > 0:
                    chose[j] = True
                elif diff < 0:
                    chose[j] = False
                elif policy.tie_break == "random":
                    chose[j] = draws[j] < 0.5
                else:
                    chose[j] = policy.tie_break == "always_B"
        for d, c in zip(decisions, chose):
            records.append(
                ChoiceRecord(
                    subject_id=subject_id,
                    set_index=d.set_index,
                    position=d.position,
                    treatment=treatment,
                    chose_B=bool(c),
                )
            )
    return records


def grid_lookup(scale: int) -> dict[tuple[int, int], DecisionProblem]:
    """Map (set_index, position) -> DecisionProblem for one scale."""
    return {(d.set_index, d.position): d for d in build_experiment(scale)}


def grid_rows(decisions: Iterable[DecisionProblem]) -> list[dict]:
    """Flatten decisions into export rows, expected times included."""
    rows = []
    for d in decisions:
        rows.append(
            {
                "scale": d.scale,
                "set_index": d.set_index,
                "position": d.position,
                "t_line_A": d.a.t_line_A,
                "t_serve_A": d.a.t_serve_A,
                "t_serve1_B": d.b.t_serve1_B,
                "p_B": d.b.p_B,
                "t_line_B": d.b.t_line_B,
                "t_serve2_B": d.b.t_serve2_B,
                "exp_time_A": expected_time_A(d.a),
                "exp_time_B": expected_time_B(d.b),
            }
        )
    return rows
