#include "gmaxent/error.hpp"
#include "gmaxent/lattice.hpp"
#include "gmaxent/linear_program.hpp"
#include "gmaxent/maxent.hpp"

namespace gmaxent {

Feasibility feasibility(const ConvexRegion& region, const LatticeConfig& config, const SolverConfig& solver) {
  if (region.known_empty()) return {FeasibilityKind::Infeasible, std::nullopt};
  if (region.has_generators()) return {FeasibilityKind::Feasible, region.generators()->front()};

  const ModelSpace& model = region.model();
  if (model.kind() != ModelKind::Quantum) {
    const Eigen::MatrixXd& g = model.generators();
    const auto& constraints = region.constraints();
    const auto k = static_cast<Eigen::Index>(constraints.size());
    Eigen::MatrixXd a(k + 1, g.cols());
    Eigen::VectorXd b(k + 1);
    a.row(0).setOnes();
    b(0) = 1.0;
    for (Eigen::Index i = 0; i < k; ++i) {
      a.row(i + 1) = constraints[static_cast<std::size_t>(i)].functional().transpose() * g;
      b(i + 1) = constraints[static_cast<std::size_t>(i)].target();
    }
    const auto w = lp::feasible_point(a, b, config.membership_tolerance);
    if (!w) return {FeasibilityKind::Infeasible, std::nullopt};
    return {FeasibilityKind::Feasible, State::unchecked(region.model_ptr(), g * *w)};
  }

  const MaxEntSolution s = solve_dual(make_problem(region, Objective::von_neumann()), solver);
  switch (s.status) {
    case SolveStatus::Converged: return {FeasibilityKind::Feasible, s.state};
    case SolveStatus::BoundaryOnly: return {FeasibilityKind::BoundaryOnly, s.state};
    case SolveStatus::Infeasible: return {FeasibilityKind::Infeasible, std::nullopt};
    case SolveStatus::NonConvergence:
      if (s.max_residual() <= solver.boundary_residual_tolerance) return {FeasibilityKind::BoundaryOnly, s.state};
      return {FeasibilityKind::Infeasible, std::nullopt};
  }
  return {FeasibilityKind::Infeasible, std::nullopt};
}

}  // namespace gmaxent
