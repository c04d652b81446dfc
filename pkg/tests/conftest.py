import pytest

import gatelab as gl

# true parameter vector for synthetic-recovery exercises
THETA_STAR = gl.UtilityParams(
    c_line=0.05, c_agent=0.03, c_bot=0.04, c_nt=1.0, beta_base=1.5, beta_nudge=1.0
)


def estimation_treatments(scales=(1, 2)):
    """The three remedies-experiment treatments, one per duration arm."""
    out = []
    for scale in scales:
        out += [
            gl.TreatmentConfig.context_only(scale),
            gl.TreatmentConfig.context_nudge(scale),
            gl.TreatmentConfig.context_no_transparency(scale),
        ]
    return out


def synthetic_records(theta, n_per_treatment, seed, scales=(1, 2)):
    """Logit choice data from theta, split evenly across treatments.

    Subject ids are prefixed per treatment cell so they stay unique
    across the pooled dataset.
    """
    records = []
    for ti, treatment in enumerate(estimation_treatments(scales)):
        decisions = gl.build_experiment(treatment.scale)
        policy = gl.PolicySpec(kind="logit", theta=theta, seed=ti)
        for r in gl.simulate_choices(decisions, treatment, policy, n_per_treatment, seed):
            records.append(
                gl.ChoiceRecord(
                    subject_id=f"g{ti}_{r.subject_id}",
                    set_index=r.set_index,
                    position=r.position,
                    treatment=r.treatment,
                    chose_B=r.chose_B,
                )
            )
    return records


@pytest.fixture(scope="session")
def recovery_records():
    """600 subjects x 33 decisions: the acceptance-scale recovery dataset."""
    return synthetic_records(THETA_STAR, n_per_treatment=100, seed=123)
