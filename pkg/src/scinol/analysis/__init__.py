"""Potentials, conjugates, regret bounds and numerical lemma checks."""
from .bounds import (ideal_bound, linearized_regret, ogd_bound, oracle_rates, theorem1_bound,
                     theorem2_bound, true_regret)
from .conjugates import (conjugate_oracle_1, conjugate_oracle_2, fenchel_bound_1,
                         fenchel_bound_2, golden_section_max)
from .history import RunHistory
from .potentials import h_fn, psi1, psi2
from .verify import (CheckResult, DeltaBound, check_beta_floor, check_core_ineq_1,
                     check_core_ineq_2, check_delta_bound, check_per_trial,
                     core_ineq_1_violation, core_ineq_2_violation, lemma_grid,
                     per_trial_violations, report_json, report_text, run_verification_suite)

__all__ = [
    "CheckResult", "DeltaBound", "RunHistory", "check_beta_floor", "check_core_ineq_1",
    "check_core_ineq_2", "check_delta_bound", "check_per_trial", "conjugate_oracle_1",
    "conjugate_oracle_2", "core_ineq_1_violation", "core_ineq_2_violation", "fenchel_bound_1",
    "fenchel_bound_2", "golden_section_max", "h_fn", "ideal_bound", "lemma_grid",
    "linearized_regret", "ogd_bound", "oracle_rates", "per_trial_violations", "psi1", "psi2",
    "report_json", "report_text", "run_verification_suite", "theorem1_bound", "theorem2_bound",
    "true_regret",
]
