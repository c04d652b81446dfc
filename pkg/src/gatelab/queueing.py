"""M/D/1 waiting-time formulas, staffing-rate inversion, demand composition.

Rates are customers per second, durations are seconds throughout; no
unit conversion happens anywhere in this module.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DegenerateInputError, UnstableSystemError


@dataclass(frozen=True)
class SystemConfig:
    """Service-system parameters for the counterfactual staffing analysis."""

    lambda_total: float = 0.1
    p_B: float = 0.5
    t_serve_A: float = 20.0
    t_serve1_B: float = 20.0
    t_serve2_B: float = 20.0
    unit_staffing_cost: float = 1.0
    priority_factor: float = 0.9

    def __post_init__(self) -> None:
        if self.lambda_total <= 0:
            raise ValueError("lambda_total must be > 0")
        if not (0 <= self.p_B <= 1):
            raise ValueError("p_B must lie in [0, 1]")
        for name in ("t_serve_A", "t_serve1_B", "t_serve2_B"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be > 0")
        if self.unit_staffing_cost < 0:
            raise ValueError("unit_staffing_cost must be >= 0")
        if not (0 < self.priority_factor <= 1):
            raise ValueError("priority_factor must lie in (0, 1]")


def mdl_queue_wait(lam: float, mu: float) -> float:
    """Mean M/D/1 queue wait (Pollaczek-Khinchine with deterministic service).

    W_q = lam / (2 * mu * (mu - lam)).
    """
    if lam < 0:
        raise DegenerateInputError("arrival rate must be >= 0")
    if mu <= 0:
        raise DegenerateInputError("service rate must be > 0")
    if lam >= mu:
        raise UnstableSystemError(f"offered load at or above capacity: lam={lam}, mu={mu}")
    return lam / (2.0 * mu * (mu - lam))


def required_service_rate(lambda_A: float, T_A: float) -> float:
    """Service rate that delivers waiting-time target ``T_A`` at load ``lambda_A``.

    mu = (lam + sqrt(lam^2 + 2*lam/T)) / 2, the closed-form inverse of
    :func:`mdl_queue_wait` in mu. Always exceeds ``lambda_A``, so the
    staffed queue is stable by construction.
    """
    if lambda_A <= 0:
        raise DegenerateInputError("lambda_A must be > 0")
    if T_A <= 0:
        raise DegenerateInputError("T_A must be > 0")
    return (lambda_A + math.sqrt(lambda_A * lambda_A + 2.0 * lambda_A / T_A)) / 2.0


def channel_demands(lambda_total: float, rho_B: float, p_B: float) -> tuple[float, float]:
    """Split total demand into live-agent and gatekeeper arrival rates.

    The live channel serves both the customers who choose it directly
    and the gatekeeper customers whose first stage failed.
    """
    if not (0 <= rho_B <= 1):
        raise DegenerateInputError("rho_B must lie in [0, 1]")
    if not (0 <= p_B <= 1):
        raise DegenerateInputError("p_B must lie in [0, 1]")
    lambda_B = lambda_total * rho_B
    lambda_A = lambda_total * (1.0 - rho_B) + lambda_B * (1.0 - p_B)
    return lambda_A, lambda_B
