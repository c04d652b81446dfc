"""Discrete-event simulation of the two-channel gatekeeper system.

Customers arrive in a Poisson stream and route to the gatekeeper with a
fixed probability (announced waits are constant within a scenario, so
the routing split is exogenous here). Gatekeeper customers spend the
first-stage service time and then either exit (success) or join the
live-agent queue. The live agent is a single server with deterministic
service time, drained under pooled FIFO or with non-preemptive priority
for gatekeeper-failure customers. Used to cross-validate the analytical
M/D/1 formulas.
"""

from __future__ import annotations

import heapq
import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import stats as _sps

from .queueing import SystemConfig

DISCIPLINES = ("pooled_fifo", "nonpreemptive_priority_bot_failures")

_N_BATCHES = 32


@dataclass(frozen=True)
class DesConfig:
    system: SystemConfig
    rho_B: float
    mu: float
    discipline: str = "pooled_fifo"
    n_arrivals: int = 100_000
    warmup_fraction: float = 0.1
    seed: int = 0

    def __post_init__(self) -> None:
        if not (0 <= self.rho_B <= 1):
            raise ValueError("rho_B must lie in [0, 1]")
        if self.mu <= 0:
            raise ValueError("mu must be > 0")
        if self.discipline not in DISCIPLINES:
            raise ValueError(f"discipline must be one of {DISCIPLINES}")
        if self.n_arrivals < 1:
            raise ValueError("n_arrivals must be >= 1")
        if not (0 <= self.warmup_fraction < 1):
            raise ValueError("warmup_fraction must lie in [0, 1)")
        if self.implied_lambda_A() >= self.mu:
            warnings.warn(
                "implied live-agent load is at or above capacity; "
                "the run will execute but waits will not stabilize",
                UserWarning,
                stacklevel=2,
            )

    def implied_lambda_A(self) -> float:
        lam = self.system.lambda_total
        return lam * (1.0 - self.rho_B) + lam * self.rho_B * (1.0 - self.system.p_B)


@dataclass(frozen=True)
class DesStats:
    mean_queue_wait_direct: float
    mean_queue_wait_bot_failures: float
    mean_queue_wait_overall: float
    utilization_observed: float
    n_served: int
    half_width_95: float
    n_direct_served: int = 0
    n_bot_failure_served: int = 0
    n_bot_success_served: int = 0
    stability_warning: bool = False


def run_des(config: DesConfig, collect_trace: bool = False):
    """Simulate the configured system and return aggregate statistics.

    Statistics cover customers arriving after the warmup fraction; the
    run itself drains every customer. With ``collect_trace`` the return
    value is ``(stats, trace)`` where trace holds one row per customer
    (only sensible for small runs).
    """
    sys_ = config.system
    n = config.n_arrivals
    rng = np.random.default_rng(config.seed)
    interarrival = rng.exponential(1.0 / sys_.lambda_total, n)
    u_route = rng.random(n)
    u_fail = rng.random(n)

    arrivals = np.cumsum(interarrival)
    to_bot = u_route < config.rho_B
    failed = to_bot & (u_fail < 1.0 - sys_.p_B)
    succeeded = to_bot & ~failed

    warmup_count = int(config.warmup_fraction * n)
    monitored_from = arrivals[warmup_count] if warmup_count > 0 else 0.0

    # all queue-join instants are known upfront: direct customers join on
    # arrival, gatekeeper failures join after the first-stage service
    direct_idx = np.flatnonzero(~to_bot)
    fail_idx = np.flatnonzero(failed)
    join_time = np.concatenate([arrivals[direct_idx], arrivals[fail_idx] + sys_.t_serve1_B])
    join_cust = np.concatenate([direct_idx, fail_idx])
    join_is_fail = np.concatenate(
        [np.zeros(len(direct_idx), dtype=bool), np.ones(len(fail_idx), dtype=bool)]
    )
    order = np.lexsort((join_cust, join_time))
    join_time = join_time[order]
    join_cust = join_cust[order]
    join_is_fail = join_is_fail[order]
    n_joins = len(join_time)

    priority = config.discipline == "nonpreemptive_priority_bot_failures"
    service_time = 1.0 / config.mu

    if collect_trace:
        trace_queue_entry = np.full(n, math.nan)
        trace_start = np.full(n, math.nan)
        trace_end = np.full(n, math.nan)

    waits_direct: list[float] = []
    waits_fail: list[float] = []
    waits_all: list[float] = []
    busy_in_window = 0.0
    t_end = monitored_from

    JOIN, DEPART = 0, 1
    events: list[tuple] = []
    next_join = 0
    seq = 0
    if n_joins:
        heapq.heappush(events, (join_time[0], seq, JOIN, 0))
        next_join = 1
        seq += 1
    waiting: list[tuple] = []
    busy = False

    def start_service(now: float) -> None:
        nonlocal busy, seq, busy_in_window, t_end
        entry = heapq.heappop(waiting)
        jt, cust, is_fail = entry[-3], entry[-2], entry[-1]
        wait = now - jt
        if cust >= warmup_count:
            waits_all.append(wait)
            (waits_fail if is_fail else waits_direct).append(wait)
        end = now + service_time
        busy_in_window += max(0.0, end - max(now, monitored_from))
        t_end = end
        if collect_trace:
            trace_start[cust] = now
            trace_end[cust] = end
        heapq.heappush(events, (end, seq, DEPART, -1))
        seq += 1
        busy = True

    while events:
        now, _, kind, j = heapq.heappop(events)
        if kind == JOIN:
            jt, cust, is_fail = join_time[j], int(join_cust[j]), bool(join_is_fail[j])
            key = (0 if is_fail else 1, jt, cust) if priority else (jt, cust)
            heapq.heappush(waiting, key + (jt, cust, is_fail))
            if collect_trace:
                trace_queue_entry[cust] = jt
            if next_join < n_joins:
                heapq.heappush(events, (join_time[next_join], seq, JOIN, next_join))
                next_join += 1
                seq += 1
            if not busy:
                start_service(now)
        else:
            busy = False
            if waiting:
                start_service(now)

    n_direct = len(waits_direct)
    n_fail = len(waits_fail)
    n_success = int(np.count_nonzero(succeeded[warmup_count:]))
    window = t_end - monitored_from
    stats = DesStats(
        mean_queue_wait_direct=_mean(waits_direct),
        mean_queue_wait_bot_failures=_mean(waits_fail),
        mean_queue_wait_overall=_mean(waits_all),
        utilization_observed=float(busy_in_window / window) if window > 0 else 0.0,
        n_served=n_direct + n_fail + n_success,
        half_width_95=_batch_means_half_width(waits_all),
        n_direct_served=n_direct,
        n_bot_failure_served=n_fail,
        n_bot_success_served=n_success,
        stability_warning=config.implied_lambda_A() >= config.mu,
    )
    if not collect_trace:
        return stats
    trace = []
    for i in range(n):
        trace.append(
            {
                "customer": i,
                "arrival_time": arrivals[i],
                "route": "B" if to_bot[i] else "A",
                "bot_failed": bool(failed[i]),
                "queue_entry": trace_queue_entry[i],
                "queue_exit": trace_start[i],
                "service_start": trace_start[i],
                "service_end": trace_end[i],
            }
        )
    return stats, trace


def _mean(xs: list[float]) -> float:
    return float(np.mean(xs)) if xs else 0.0


def _batch_means_half_width(xs: list[float], n_batches: int = _N_BATCHES) -> float:
    """95% confidence half-width of the mean via non-overlapping batch means."""
    m = len(xs) // n_batches
    if m < 1:
        return math.inf
    batches = np.array(xs[: m * n_batches]).reshape(n_batches, m).mean(axis=1)
    spread = batches.std(ddof=1) / math.sqrt(n_batches)
    return float(_sps.t.ppf(0.975, n_batches - 1) * spread)
