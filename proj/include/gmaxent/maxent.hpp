#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gmaxent/config.hpp"
#include "gmaxent/lattice.hpp"
#include "gmaxent/model.hpp"

namespace gmaxent {

enum class ObjectiveKind { Shannon, VonNeumann, FiducialMeasurementEntropy, Custom };

std::string_view to_string(ObjectiveKind kind);

// A concave functional on ambient coordinates together with its gradient.
struct CustomObjective {
  std::string name;
  std::function<double(const Eigen::VectorXd&)> value;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> gradient;
};

class Objective {
 public:
  static Objective shannon();
  static Objective von_neumann();
  // Sum of the Shannon entropies of the outcome distributions of the given
  // measurements. Concave: each term is entropy composed with a linear map.
  static Objective fiducial(std::vector<Observable> measurements);
  static Objective custom(CustomObjective objective);

  ObjectiveKind kind() const { return kind_; }
  const std::vector<Observable>& measurements() const { return measurements_; }
  const CustomObjective& custom_objective() const { return custom_; }

  bool compatible_with(const ModelSpace& model) const;
  // Value at ambient coordinates, in nats.
  double value(const ModelSpace& model, const Eigen::VectorXd& coords) const;
  // Gradient with respect to ambient coordinates. Probabilities are floored
  // at 1e-300 so boundary points give large finite slopes.
  Eigen::VectorXd gradient(const ModelSpace& model, const Eigen::VectorXd& coords) const;

 private:
  explicit Objective(ObjectiveKind kind) : kind_(kind) {}

  ObjectiveKind kind_;
  std::vector<Observable> measurements_;
  CustomObjective custom_;
};

// Shannon/von Neumann/fiducial entropy of a state (0 ln 0 = 0).
double entropy(const Objective& objective, const State& state);
double shannon_entropy(std::span<const double> p);

struct MaxEntProblem {
  ModelPtr model;
  ConvexRegion region;
  Objective objective;
};

// Checks objective/model compatibility; throws IncompatibleObjective.
MaxEntProblem make_problem(ConvexRegion region, Objective objective);

enum class SolveStatus { Converged, BoundaryOnly, Infeasible, NonConvergence };

std::string_view to_string(SolveStatus status);

struct MaxEntSolution {
  SolveStatus status = SolveStatus::NonConvergence;
  std::optional<State> state;
  // One multiplier per region constraint; constraints dropped as redundant
  // keep multiplier 0 and are listed in `redundant`.
  Eigen::VectorXd multipliers;
  std::optional<double> lambda0;  // ln Z at the multipliers
  double entropy = 0.0;
  int iterations = 0;
  Eigen::VectorXd residuals;  // |<R_i> - r_i| per region constraint
  std::vector<int> redundant;
  // Newton diagnostics: dual value and the extremes of the Hessian spectra seen.
  double dual_value = 0.0;
  double min_hessian_eigenvalue = 0.0;
  double max_hessian_asymmetry = 0.0;
  // Frank-Wolfe duality gap at exit.
  double gap = 0.0;
  std::string message;

  double max_residual() const { return residuals.size() == 0 ? 0.0 : residuals.maxCoeff(); }
};

struct PartitionValue {
  double z = 0.0;  // may overflow to inf; log_z stays finite
  double log_z = 0.0;
};

// Z(lambda) = tr exp(-sum_i lambda_i R_i) for quantum models,
// sum_x exp(-sum_i lambda_i R_i(x)) for classical ones, with the largest
// exponent shifted out before exponentiating.
PartitionValue partition_function(const ModelSpace& model, std::span<const LinearConstraint> constraints,
                                  const Eigen::VectorXd& lambdas);

// Gradient of D(lambda) = ln Z(lambda) + sum_i lambda_i r_i, i.e.
// r_i - <R_i> under rho(lambda) = exp(-sum_i lambda_i R_i) / Z.
Eigen::VectorXd dual_gradient(const ModelSpace& model, std::span<const LinearConstraint> constraints,
                              const Eigen::VectorXd& targets, const Eigen::VectorXd& lambdas);

struct DualEvaluation {
  double value = 0.0;           // D(lambda)
  Eigen::VectorXd gradient;     // r - <R>
  Eigen::MatrixXd hessian;      // constraint covariance (Kubo-Mori for quantum)
  Eigen::VectorXd state;        // ambient coordinates of rho(lambda)
  double exponent_spread = 0.0; // max - min eigenvalue of -sum lambda_i K_i
};

// Full dual evaluation with constraint targets taken from the constraints.
DualEvaluation evaluate_dual(const ModelSpace& model, std::span<const LinearConstraint> constraints,
                             const Eigen::VectorXd& lambdas, bool with_hessian = true);

// Damped Newton on the convex dual for Shannon (Classical) and von Neumann
// (Quantum) objectives over H-rep regions.
MaxEntSolution solve_dual(const MaxEntProblem& problem, const SolverConfig& config = {});

// Pairwise Frank-Wolfe over mixing weights of the region's (or model's)
// generators, for any concave objective with a gradient.
MaxEntSolution solve_polytope(const MaxEntProblem& problem, const SolverConfig& config = {});

// Dispatches to solve_dual when it applies, solve_polytope otherwise.
MaxEntSolution solve(const MaxEntProblem& problem, const SolverConfig& config = {});

struct OracleConfig {
  // Grid points beyond this budget make the instance Unsupported.
  double max_grid_points = 2e8;
  double membership_slack = 1e-12;
};

struct OracleResult {
  SolveStatus status = SolveStatus::Infeasible;  // Converged or Infeasible
  std::optional<State> state;
  double entropy = 0.0;
  long long grid_points = 0;
  long long feasible_points = 0;
};

// Brute-force grid search over an affine parametrization of the state space:
// free parameters step through [lo, hi] at `resolution`, the remaining ones
// are solved from the equality constraints, and the best feasible point
// wins. Supports Classical(d <= 4), Quantum(2) (Bloch ball) and polytopes
// with at most 4 vertices; throws Unsupported otherwise. For objectives that
// are Lipschitz on the region the result is within O(resolution) of the
// optimum; entropy is only log-Lipschitz near the boundary, so the gap there
// can reach O(resolution * ln(1/resolution)). The grid never overshoots:
// its value is a lower bound of the true maximum.
OracleResult oracle_maxent(const MaxEntProblem& problem, double resolution, const OracleConfig& config = {});

}  // namespace gmaxent
