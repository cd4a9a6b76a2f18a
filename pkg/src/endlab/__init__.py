"""Tail-bound evaluators, dependent-array constructions, norming-condition
checkers, and Monte Carlo strong-law diagnostics."""

from .bounds import (BoundInputs, FukNagaevInputs, TailBoundResult,
                     bennett_bound, bernstein_bound, comparison_gap,
                     fuk_nagaev_bound, fuk_nagaev_general)
from .dependence import (CertificationError, DominationReport, EndCertificate,
                         JointTable, MarginalSpec, TriangularArrayModel,
                         certify_end_row, certify_model_row,
                         check_stochastic_domination, check_weak_mean_domination,
                         load_joint_table, dump_joint_table, sample_row,
                         sample_rows)
from .norming import (ConditionEntry, ConditionReport, MonotoneFunction,
                      NormingScheme, check_asymptotic_conditions,
                      check_condition_a, check_condition_a_integral_form,
                      check_dominating_growth, check_integral_condition_e,
                      check_integral_condition_f, check_lemma3_conditions,
                      check_theorem1_conditions, log_plus, parse_monotone)
from .simulate import (ExperimentPlan, MonteCarloEstimate, SweepParams,
                       TruncationSplit, WeightRule, bound_validity_sweep,
                       complete_convergence_diagnostic, estimate_tail,
                       normalized_row_sum, strong_law_path_diagnostic,
                       truncate_split)

__version__ = "0.1.0"
