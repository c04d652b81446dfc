"""Recover the utility parameters from synthetic choice data.

Simulates subjects from a known parameter vector across the three
information treatments (with and without the nudge, with and without
transparency) on both duration arms, then refits by maximum likelihood
and attaches subject-bootstrap standard errors. Small sample sizes keep
this demo quick; the acceptance suite runs the full 600-subject
version.
"""

import gatelab as gl
from gatelab.estimation import PARAM_NAMES

theta_true = gl.UtilityParams(
    c_line=0.05, c_agent=0.03, c_bot=0.04, c_nt=1.0, beta_base=1.5, beta_nudge=1.0
)

records = []
cells = [
    (scale, preset)
    for scale in (1, 2)
    for preset in (
        gl.TreatmentConfig.context_only,
        gl.TreatmentConfig.context_nudge,
        gl.TreatmentConfig.context_no_transparency,
    )
]
for cell_index, (scale, preset) in enumerate(cells):
    treatment = preset(scale)
    policy = gl.PolicySpec(kind="logit", theta=theta_true, seed=cell_index)
    for r in gl.simulate_choices(gl.build_experiment(scale), treatment, policy, 25, seed=42):
        records.append(gl.ChoiceRecord(
            f"c{cell_index}_{r.subject_id}", r.set_index, r.position, r.treatment, r.chose_B
        ))

print(f"dataset: {len(records)} records from {len(cells) * 25} subjects")

options = gl.FitOptions(n_starts=4, seed=0)
fit = gl.fit_mle(records, options)
print(f"fit: log-likelihood {fit.log_likelihood:.1f}, converged={fit.converged}, "
      f"{fit.n_function_evals} evaluations, best start {fit.start_index_of_best}")

boot = gl.bootstrap_se(records, options, n_replicates=60, seed=7)
print(f"bootstrap: {boot.n_replicates} replicates kept, {boot.n_skipped} skipped\n")

print(f"{'parameter':<12}{'true':>8}{'estimate':>10}{'boot SE':>9}{'rel err':>9}")
for i, name in enumerate(PARAM_NAMES):
    true = getattr(theta_true, name)
    hat = getattr(fit.theta_hat, name)
    print(f"{name:<12}{true:>8.3f}{hat:>10.4f}{boot.standard_errors[i]:>9.4f}"
          f"{abs(hat - true) / abs(true):>9.1%}")

print("\nGating sanity: with transparency everywhere, c_nt is inert --")
transparent_only = [r for r in records if r.treatment.transparency]
base = gl.log_likelihood(gl.UtilityParams(0.05, 0.03, 0.04, c_nt=0.0), transparent_only)
bumped = gl.log_likelihood(gl.UtilityParams(0.05, 0.03, 0.04, c_nt=9.9), transparent_only)
print(f"  log-likelihood {base:.6f} with c_nt=0 vs {bumped:.6f} with c_nt=9.9 (identical)")
