#pragma once

namespace gmaxent {

// Numerical contracts of the Hermitian matrix routines.
struct HermitianConfig {
  double hermiticity_tolerance = 1e-12;
  int max_jacobi_sweeps = 100;
  // Relative gap below which eigenvalues of the real embedding are grouped.
  double cluster_tolerance = 1e-11;
  // exp() refuses eigenvalues above this; callers pre-shift.
  double exp_overflow_threshold = 700.0;
  double log_negative_tolerance = 1e-10;
  double log_zero_threshold = 1e-300;
  double divided_difference_tolerance = 1e-9;
};

// Membership and validation tolerances of states, effects and observables.
struct ModelConfig {
  double unit_tolerance = 1e-10;
  double cone_tolerance = 1e-10;
  double polytope_membership_tolerance = 1e-8;
  double vertex_unit_tolerance = 1e-12;
  double effect_tolerance = 1e-10;
  double completeness_tolerance = 1e-10;
  double purity_tolerance = 1e-8;
  double projection_tolerance = 1e-8;
  double axiom_tolerance = 1e-9;
};

struct LatticeConfig {
  double membership_tolerance = 1e-8;
  double duplicate_tolerance = 1e-10;
  double dedup_tolerance = 1e-8;
  // Bound on constraint count + ambient dimension for H-rep vertex enumeration.
  int enumeration_cap = 12;
  // Bound on lifted weight variables when regions carry generators.
  int generator_cap = 24;
};

struct SolverConfig {
  double gradient_tolerance = 1e-10;
  // Relative Newton step size below which the dual minimum counts as attained.
  double step_tolerance = 1e-7;
  int max_iterations = 500;
  double multiplier_bound = 1e4;
  // Spread of the Gibbs exponent beyond which the state is numerically singular.
  double exponent_spread_bound = 700.0;
  double hessian_regularization = 1e-12;
  double rank_pivot_tolerance = 1e-10;
  // A dual value below -this certifies an empty region (weak duality, S >= 0).
  double infeasibility_certificate = 1e-9;
  double boundary_residual_tolerance = 1e-6;
  int max_line_search_halvings = 60;
  int max_step_expansions = 60;
  double frank_wolfe_gap = 1e-7;
  int frank_wolfe_max_iterations = 5000;
  double residual_tolerance = 1e-8;
};

}  // namespace gmaxent
