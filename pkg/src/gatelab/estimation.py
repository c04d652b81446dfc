"""Maximum-likelihood estimation of the channel-choice utility parameters.

The six free parameters are (c_line, c_agent, c_bot, c_nt, beta_base,
beta_nudge); the service reward r is normalized to zero and excluded
(it cancels in the utility difference, so it is not identified).

Records are compiled once into flat numpy arrays in a canonical order
(subject, set, position), which makes the log likelihood exactly
invariant to the order records arrive in and keeps the inner
optimization loop fully vectorized.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy import optimize

from .choice import UtilityParams
from .design import ChoiceRecord, grid_lookup, presented_decision
from .errors import DegenerateSampleError, IdentificationError, UnknownDecisionError

PARAM_NAMES = ("c_line", "c_agent", "c_bot", "c_nt", "beta_base", "beta_nudge")

# heuristic start: 0.01 per cost, neutral multipliers
_HEURISTIC_START = np.array([0.01, 0.01, 0.01, 0.01, 1.0, 1.0])

# likelihood-evaluation clamp: probabilities in [1e-300, 1 - 1e-16]
_LOG_P_MIN = math.log(1e-300)
_LOG_P_MAX = math.log1p(-1e-16)


@dataclass(frozen=True)
class FitOptions:
    n_starts: int = 8
    max_iterations: int = 5000
    tolerance: float = 1e-8
    start_dispersion: float = 0.5
    seed: int = 0

    def __post_init__(self) -> None:
        if self.n_starts < 1:
            raise ValueError("n_starts must be >= 1")
        if self.tolerance <= 0:
            raise ValueError("tolerance must be > 0")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")


@dataclass(frozen=True)
class FitResult:
    theta_hat: UtilityParams
    log_likelihood: float
    converged: bool
    n_function_evals: int
    start_index_of_best: int


@dataclass(frozen=True)
class BootstrapResult:
    standard_errors: np.ndarray
    replicate_estimates: np.ndarray
    n_replicates: int
    n_skipped: int = 0


class _Compiled:
    """Choice records resolved against the grid and flattened to arrays."""

    def __init__(self, records: Sequence[ChoiceRecord]):
        if not records:
            raise ValueError("records must be non-empty")
        ordered = sorted(records, key=lambda r: (r.subject_id, r.set_index, r.position))
        grids: dict[int, dict] = {}
        n = len(ordered)
        cols = {name: np.empty(n) for name in (
            "tA_line", "tA_serve", "tB_serve1", "q_fail", "tB_line", "tB_serve2",
            "no_transp", "nudged", "sign",
        )}
        subjects: list[str] = []
        subject_code = np.empty(n, dtype=np.int64)
        last_subject = None
        for i, r in enumerate(ordered):
            scale = r.treatment.scale
            if scale not in grids:
                grids[scale] = grid_lookup(scale)
            try:
                d = grids[scale][(r.set_index, r.position)]
            except KeyError:
                raise UnknownDecisionError(
                    f"no grid decision (set={r.set_index}, position={r.position}, scale={scale})"
                ) from None
            d = presented_decision(d, r.treatment)
            cols["tA_line"][i] = d.a.t_line_A
            cols["tA_serve"][i] = d.a.t_serve_A
            cols["tB_serve1"][i] = d.b.t_serve1_B
            cols["q_fail"][i] = 1.0 - float(d.b.p_B)
            cols["tB_line"][i] = d.b.t_line_B
            cols["tB_serve2"][i] = d.b.t_serve2_B
            cols["no_transp"][i] = 0.0 if r.treatment.transparency else 1.0
            cols["nudged"][i] = 1.0 if r.treatment.nudge else 0.0
            cols["sign"][i] = 1.0 if r.chose_B else -1.0
            if r.subject_id != last_subject:
                subjects.append(r.subject_id)
                last_subject = r.subject_id
            subject_code[i] = len(subjects) - 1
        self.arrays = cols
        self.subjects = subjects
        self.subject_code = subject_code
        self.n = n
        self._rows_by_subject: list[np.ndarray] | None = None

    def loglik(self, v: np.ndarray) -> float:
        c_line, c_agent, c_bot, c_nt, beta_base, beta_nudge = v
        a = self.arrays
        u_a = -(c_line * a["tA_line"] + c_agent * a["tA_serve"])
        beta_eff = beta_base + (beta_nudge - beta_base) * a["nudged"]
        failure = c_nt * a["no_transp"] + beta_eff * (
            c_line * a["tB_line"] + c_agent * a["tB_serve2"]
        )
        u_b = -c_bot * a["tB_serve1"] - a["q_fail"] * failure
        ll = -np.logaddexp(0.0, a["sign"] * (u_a - u_b))
        np.clip(ll, _LOG_P_MIN, _LOG_P_MAX, out=ll)
        return float(np.sum(ll))

    def subset_by_subjects(self, subject_indices: np.ndarray) -> "_Compiled":
        """New compiled dataset containing the given subjects (with repeats)."""
        if self._rows_by_subject is None:
            self._rows_by_subject = [
                np.flatnonzero(self.subject_code == s) for s in range(len(self.subjects))
            ]
        by_subject = self._rows_by_subject
        rows = np.concatenate([by_subject[s] for s in subject_indices])
        clone = object.__new__(_Compiled)
        clone.arrays = {k: arr[rows] for k, arr in self.arrays.items()}
        clone.subjects = [f"r{j}" for j in range(len(subject_indices))]
        clone.subject_code = np.repeat(
            np.arange(len(subject_indices)), [len(by_subject[s]) for s in subject_indices]
        )
        clone.n = len(rows)
        clone._rows_by_subject = None
        return clone

    def check_identification(self) -> None:
        a = self.arrays
        if not np.any(a["no_transp"] > 0):
            raise IdentificationError("c_nt needs records without transparency")
        if not np.any(a["nudged"] > 0):
            raise IdentificationError("beta_nudge needs records with the nudge")
        if not np.any(a["nudged"] == 0):
            raise IdentificationError("beta_base needs records without the nudge")


def log_likelihood(theta: UtilityParams, records: Sequence[ChoiceRecord]) -> float:
    """Sum of log choice probabilities of the observed choices under theta.

    Resolves each record against its grid decision (with the
    deterministic-equivalent transform in the deterministic arm) and
    clamps probabilities to [1e-300, 1 - 1e-16] before taking logs.
    """
    compiled = _Compiled(records)
    v = np.array([getattr(theta, name) for name in PARAM_NAMES])
    return compiled.loglik(v)


def fit_mle(records: Sequence[ChoiceRecord], options: FitOptions = FitOptions()) -> FitResult:
    """Multi-start Nelder-Mead maximum likelihood over the six free parameters.

    Start 0 is the heuristic point; the remaining starts scatter it in
    log-magnitude space with scale ``start_dispersion``. ``converged``
    reports whether the best start terminated by tolerance rather than
    by the iteration cap.
    """
    compiled = _Compiled(records)
    compiled.check_identification()
    return _fit_compiled(compiled, options)


def _fit_compiled(compiled: _Compiled, options: FitOptions) -> FitResult:
    def nll(v: np.ndarray) -> float:
        return -compiled.loglik(v)

    fatol = options.tolerance * (1.0 + abs(nll(_HEURISTIC_START)))
    best = None
    best_start = -1
    total_evals = 1
    for start in range(options.n_starts):
        if start == 0:
            x0 = _HEURISTIC_START.copy()
        else:
            rng = np.random.default_rng((options.seed, start))
            x0 = _HEURISTIC_START * np.exp(options.start_dispersion * rng.standard_normal(6))
        res = optimize.minimize(
            nll,
            x0,
            method="Nelder-Mead",
            options={
                "maxiter": options.max_iterations,
                "maxfev": 2 * options.max_iterations,
                "xatol": 1e-6,
                "fatol": fatol,
                "adaptive": True,
            },
        )
        total_evals += res.nfev
        if best is None or res.fun < best.fun:
            best = res
            best_start = start
    theta_hat = UtilityParams(**dict(zip(PARAM_NAMES, (float(x) for x in best.x))))
    return FitResult(
        theta_hat=theta_hat,
        log_likelihood=-float(best.fun),
        converged=bool(best.success),
        n_function_evals=total_evals,
        start_index_of_best=best_start,
    )


def bootstrap_se(
    records: Sequence[ChoiceRecord],
    options: FitOptions = FitOptions(),
    n_replicates: int = 200,
    seed: int = 0,
) -> BootstrapResult:
    """Subject-level bootstrap standard errors.

    Subjects (not records) are resampled with replacement; each
    replicate refits from the full-sample estimate with a single start.
    Replicate seeds derive from (seed, replicate index), so replicates
    are independent of execution order. Non-convergent replicates are
    skipped and counted.
    """
    if n_replicates < 0:
        raise ValueError("n_replicates must be >= 0")
    compiled = _Compiled(records)
    n_subjects = len(compiled.subjects)
    if n_subjects < 2:
        raise DegenerateSampleError("bootstrap needs at least 2 distinct subjects")
    if n_replicates == 0:
        return BootstrapResult(
            standard_errors=np.zeros(len(PARAM_NAMES)),
            replicate_estimates=np.empty((0, len(PARAM_NAMES))),
            n_replicates=0,
        )
    compiled.check_identification()
    full = _fit_compiled(compiled, options)
    x_full = np.array([getattr(full.theta_hat, name) for name in PARAM_NAMES])
    replicate_options = FitOptions(
        n_starts=1,
        max_iterations=options.max_iterations,
        tolerance=options.tolerance,
        start_dispersion=0.0,
        seed=options.seed,
    )
    estimates = []
    skipped = 0
    for rep in range(n_replicates):
        rng = np.random.default_rng((seed, rep))
        chosen = rng.integers(0, n_subjects, size=n_subjects)
        resampled = compiled.subset_by_subjects(chosen)
        resampled.check_identification()
        fit = _fit_from(resampled, x_full, replicate_options)
        if fit.converged:
            estimates.append([getattr(fit.theta_hat, name) for name in PARAM_NAMES])
        else:
            skipped += 1
    matrix = np.array(estimates) if estimates else np.empty((0, len(PARAM_NAMES)))
    if len(matrix) >= 2:
        ses = matrix.std(axis=0, ddof=1)
    else:
        ses = np.zeros(len(PARAM_NAMES))
    return BootstrapResult(
        standard_errors=ses,
        replicate_estimates=matrix,
        n_replicates=len(matrix),
        n_skipped=skipped,
    )


def _fit_from(compiled: _Compiled, x0: np.ndarray, options: FitOptions) -> FitResult:
    def nll(v: np.ndarray) -> float:
        return -compiled.loglik(v)

    fatol = options.tolerance * (1.0 + abs(nll(x0)))
    res = optimize.minimize(
        nll,
        x0,
        method="Nelder-Mead",
        options={
            "maxiter": options.max_iterations,
            "maxfev": 2 * options.max_iterations,
            "xatol": 1e-6,
            "fatol": fatol,
            "adaptive": True,
        },
    )
    theta_hat = UtilityParams(**dict(zip(PARAM_NAMES, (float(x) for x in res.x))))
    return FitResult(
        theta_hat=theta_hat,
        log_likelihood=-float(res.fun),
        converged=bool(res.success),
        n_function_evals=res.nfev,
        start_index_of_best=0,
    )
