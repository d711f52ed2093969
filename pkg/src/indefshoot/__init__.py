"""Shooting-method solver for two-point boundary value problems with a
sign-alternating weight: positive-solution multiplicity, phase-plane
continua, closed-form parameter thresholds, and bifurcation sweeps."""

from .errors import AdmissibilityError, NumericsError, StiffnessError
from .integrator import (DEFAULT_CONFIG, IntegratorConfig, PhasePoint,
                         Trajectory, integrate, poincare_map,
                         poincare_map_batch)
from .model import (NonlinearitySpec, ParameterPair, WeightSpec, delta_tilde,
                    eval_weight, g_min_on, integral_Aminus, integral_Aplus,
                    load_problem, neumann_necessary_mu, omega_sigma_default,
                    problem_from_dict, threshold_lambda_star,
                    threshold_lambda_star_star, threshold_mu_star)
from .phaseplane import (Continuum, CrossingStructure, InitialSet,
                         check_prohibited, check_trapping, detect_crossings,
                         shoot_set, shoot_set_sections)
from .shooting import (BoundaryConditionType, BvpSolution, EndCondition,
                       intersect_continua, solution_records,
                       solve_multiplicity, verify_solution)

__version__ = "0.1.0"
