"""Orlicz-type gauge norms with explicit concentration machinery.

The package is organized around a family of coordinate-wise convex
specifications (PowerNorm, SeparableTwoLevel, SeparableFromPhi,
BobkovLedouxCap, UserSeparable) and everything downstream of them:
Luxemburg-type p-gauges, conjugate growth profiles, closed-form moment and
tail bound evaluators, multi-index form norms, exact samplers for the
reference measures, and a Monte Carlo verification harness.
"""

from .bounds import (MomentBoundInputs, PartitionNorms, TailProfile,
                     alpha1_moment_bound, bcg_derivative_chain, bcg_first_line,
                     bcg_moment_bound, bcg_tail, bcg_tail_profile,
                     centered_moment_bound, chebyshev_level,
                     chebyshev_tail_profile, defective_moment_bound,
                     defective_moment_bound_q, enlargement_bound,
                     enlargement_profile, enlargement_rate, gk_moment,
                     hanson_wright_tail, hanson_wright_tail_profile,
                     l_constant, lipschitz_profile, lipschitz_tail_profile,
                     moment_interpolation_factor, poincare_beta_bound,
                     quadratic_chaos_moment, two_level_tail,
                     two_level_tail_profile)
from .conjugacy import (OmegaProfile, conjugate_ray_radius, lam, legendre_1d,
                        omega, omega_inv, omega_profile, omega_star,
                        omega_values, profile_table, psi_star,
                        support_argmax, support_function)
from .empirics import (EnlargementCurve, MlsiReport, MomentReport,
                       NuLogPReport, TestFunction, batch_se, comparison_check,
                       empirical_entropy, empirical_moment, enlargement_mc,
                       euclidean_norm, exp_tilt, halfspace_distance, linear,
                       max_coordinate, mlsi_report, mlsi_residual,
                       quadratic_form, top_mass_fraction, verify_centered,
                       verify_nu_logp)
from .errors import InputError, NumericalError
from .measures import (CHUNK, NuMeasure, ProductPhiTail, SamplerSpec,
                       StandardGaussian, isoperimetric_profile_nu, nu_cdf,
                       nu_pdf, nu_quantile, sample, sample_chunk,
                       save_samples)
from .psi import (BobkovLedouxCap, CheckReport, GrowthEnvelope, PhiSpec,
                  PowerNorm, PsiSpec, SeparableFromPhi, SeparableTwoLevel,
                  UserSeparable, check_condition_C, check_growth,
                  empirical_triangle_constant, env_from_dict, env_to_dict,
                  eval_psi, eval_psi_p, eval_psi_rows, psi_from_dict,
                  psi_from_json, psi_p_norm, psi_p_norm_rows, psi_to_dict,
                  psi_to_json, rearranged_two_level_norm,
                  two_level_equiv_norm)
from .tensors import (MultiIndexMatrix, chaos_deterministic_term, eval_form,
                      form_gradient, load_matrix, partition_norms,
                      save_matrix, symmetrize)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
