"""Uptake statistics and the benchmark hypothesis tests on choice data."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from scipy import stats as _sps

from .design import ChoiceRecord
from .errors import DegenerateSampleError, IncompleteSetError

DECISIONS_PER_SET = 11


@dataclass(frozen=True)
class UptakeSummary:
    """Channel B choice counts per (subject, decision set), out of 11."""

    counts: dict[tuple[str, int], int]
    mean_uptake: float
    n_subjects: int

    def values(self) -> list[int]:
        """Counts in deterministic (subject, set) order."""
        return [self.counts[k] for k in sorted(self.counts)]


def uptake_counts(records: Iterable[ChoiceRecord]) -> UptakeSummary:
    """Count Channel B choices per subject per set and average over groups.

    Every (subject, set) group must contain all 11 positions exactly
    once; anything else raises :class:`IncompleteSetError`.
    """
    groups: dict[tuple[str, int], set[int]] = {}
    b_counts: dict[tuple[str, int], int] = {}
    for r in records:
        key = (r.subject_id, r.set_index)
        positions = groups.setdefault(key, set())
        if r.position in positions:
            raise IncompleteSetError(f"duplicate position {r.position} in group {key}")
        positions.add(r.position)
        b_counts[key] = b_counts.get(key, 0) + (1 if r.chose_B else 0)
    if not groups:
        raise IncompleteSetError("empty record set")
    for key, positions in groups.items():
        if len(positions) != DECISIONS_PER_SET:
            raise IncompleteSetError(
                f"group {key} has {len(positions)} decisions, expected {DECISIONS_PER_SET}"
            )
    ordered = {k: b_counts[k] for k in sorted(b_counts)}
    mean = sum(ordered.values()) / len(ordered)
    n_subjects = len({subject for subject, _ in ordered})
    return UptakeSummary(counts=ordered, mean_uptake=mean, n_subjects=n_subjects)


def one_sample_t(
    values: Sequence[float], mu0: float, sidedness: str = "two"
) -> tuple[float, int, float]:
    """One-sample t test of mean(values) against ``mu0``.

    Returns (t, df, p). ``sidedness`` is 'two', 'lower' (alternative
    mean < mu0) or 'upper' (alternative mean > mu0).
    """
    if sidedness not in ("two", "lower", "upper"):
        raise ValueError("sidedness must be 'two', 'lower' or 'upper'")
    n = len(values)
    if n < 2:
        raise DegenerateSampleError("one_sample_t needs at least 2 values")
    mean = sum(values) / n
    var = sum((v - mean) ** 2 for v in values) / (n - 1)
    if var == 0:
        raise DegenerateSampleError("one_sample_t needs nonzero variance")
    t = (mean - mu0) / math.sqrt(var / n)
    df = n - 1
    if sidedness == "two":
        p = 2.0 * _sps.t.sf(abs(t), df)
    elif sidedness == "lower":
        p = _sps.t.cdf(t, df)
    else:
        p = _sps.t.sf(t, df)
    return t, df, float(p)


def proportion_test(k: int, n: int, p0: float) -> float:
    """Two-sided normal-approximation proportion test with continuity correction.

    z = (|k - n*p0| - 0.5) / sqrt(n*p0*(1-p0)), the corrected numerator
    clamped at 0, and p = 2*(1 - Phi(z)). Reproduces the 49/100 vs 0.5
    benchmark p = 0.920.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if not (0 <= k <= n):
        raise ValueError("k must lie in [0, n]")
    if not (0 < p0 < 1):
        raise ValueError("p0 must lie in (0, 1)")
    num = max(abs(k - n * p0) - 0.5, 0.0)
    z = num / math.sqrt(n * p0 * (1.0 - p0))
    return 2.0 * (1.0 - _norm_cdf(z))


def holm_adjust(p_values: Sequence[float]) -> list[float]:
    """Step-down Holm adjustment, monotone and capped at 1.

    Output order matches input order.
    """
    for p in p_values:
        if not (0 <= p <= 1):
            raise ValueError("p-values must lie in [0, 1]")
    m = len(p_values)
    order = sorted(range(m), key=lambda i: p_values[i])
    adjusted = [0.0] * m
    running = 0.0
    for rank, i in enumerate(order):
        running = max(running, min(1.0, (m - rank) * p_values[i]))
        adjusted[i] = running
    return adjusted


def _norm_cdf(z: float) -> float:
    # erf-based, absolute error well below 1e-10
    return 0.5 * (1.0 + math.erf(z / math.sqrt(2.0)))
