"""Strong approximation toolkit for almost periodic trigonometric sums.

Core objects: gap-constrained trigonometric polynomials (`APPolynomial`),
Stepanov/Besicovitch/sup norms and moduli of continuity, the oscillatory
kernel representation of spectral truncations, lower-triangular summability
matrices with RBVS/HBVS variation classes, and harnesses that verify the
strong-approximation rate bounds at desk scale.

The FastAPI service (`apx.service.app`) wraps every operation; the `apx`
CLI is a thin client of the service.
"""

from .errors import (ApxError, CapacityError, ConfigError,
                     DegenerateModulusError, GateRefusal, NumericError,
                     QuadratureError)
from .kernel import (KernelEvaluation, KernelParams, QuadraturePlan,
                     averaged_difference, partial_sum_via_kernel,
                     plan_quadrature, psi)
from .matrices import (SummabilityMatrix, VariationReport, builtin, classify,
                       hbvs_constant, load_matrix_file, matrix_from_rows,
                       rbvs_constant, riesz_matrix, strong_mean,
                       strong_mean_profile, validate_rows)
from .moduli import ModulusModel, validate_modulus_type
from .norms import (MembershipResult, besicovitch_norm, best_approx_bracket,
                    class_membership_check, compute_norm, omega_modulus,
                    search_window, stepanov_norm, sup_norm, wx_modulus)
from .poly import (APPolynomial, StarPartialSum, SymmetricDifference,
                   from_config, lacunary, load_function, make_test_corpus)
from .rates import (ConditionResult, ExperimentReport, ExperimentRow,
                    check_condition_6, check_condition_7, check_lemma_1,
                    check_lemma_2, default_n_list, lemma2_family_max_ratio,
                    run_norm_experiment, run_pointwise_experiment,
                    theorem_bound, verdict_from_ratios)

__version__ = "0.1.0"
