#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "gmaxent/error.hpp"
#include "gmaxent/linear_program.hpp"
#include "gmaxent/log.hpp"
#include "gmaxent/maxent.hpp"

namespace gmaxent {

namespace {

struct Atom {
  Eigen::VectorXd vertex;  // vertex of the weight polytope
  double weight = 0.0;
};

Eigen::MatrixXd generator_matrix(const MaxEntProblem& problem) {
  const ConvexRegion& region = problem.region;
  if (region.has_generators()) {
    const auto& gens = *region.generators();
    Eigen::MatrixXd g(problem.model->ambient_dim(), static_cast<Eigen::Index>(gens.size()));
    for (std::size_t j = 0; j < gens.size(); ++j) g.col(static_cast<Eigen::Index>(j)) = gens[j].coords();
    return g;
  }
  if (problem.model->kind() == ModelKind::Quantum) {
    throw Error(ErrorCode::UnsupportedRepresentation,
                "the polytope solver needs generators for quantum regions given by constraints");
  }
  return problem.model->generators();
}

// Largest t in [0, t_max] maximizing the concave objective along x + t d,
// found by bisection on the directional derivative.
double line_search(const MaxEntProblem& problem, const Eigen::MatrixXd& g, const Eigen::VectorXd& x,
                   const Eigen::VectorXd& d, double t_max) {
  const Eigen::VectorXd direction = g * d;
  const auto derivative = [&](double t) {
    return problem.objective.gradient(*problem.model, g * (x + t * d)).dot(direction);
  };
  if (derivative(t_max) >= 0.0) return t_max;
  double lo = 0.0;
  double hi = t_max;
  for (int k = 0; k < 60 && hi - lo > 1e-16 * t_max; ++k) {
    const double mid = 0.5 * (lo + hi);
    (derivative(mid) > 0.0 ? lo : hi) = mid;
  }
  return lo;
}

}  // namespace

MaxEntSolution solve_polytope(const MaxEntProblem& problem, const SolverConfig& config) {
  const ModelSpace& model = *problem.model;
  const ConvexRegion& region = problem.region;
  const std::vector<LinearConstraint>& constraints = region.constraints();
  const auto k = static_cast<Eigen::Index>(constraints.size());

  MaxEntSolution out;
  out.residuals = Eigen::VectorXd::Zero(k);
  if (region.known_empty()) {
    out.status = SolveStatus::Infeasible;
    out.message = region.contradictory() ? "conflicting parallel constraints" : "the region has no generators";
    return out;
  }

  const Eigen::MatrixXd g = generator_matrix(problem);
  const Eigen::Index m = g.cols();
  Eigen::MatrixXd a(k + 1, m);
  Eigen::VectorXd b(k + 1);
  a.row(0).setOnes();
  b(0) = 1.0;
  for (Eigen::Index i = 0; i < k; ++i) {
    a.row(i + 1) = constraints[static_cast<std::size_t>(i)].functional().transpose() * g;
    b(i + 1) = constraints[static_cast<std::size_t>(i)].target();
  }
  if (!lp::feasible_point(a, b, config.residual_tolerance)) {
    out.status = SolveStatus::Infeasible;
    out.message = "no mixture of generators satisfies the constraints";
    return out;
  }

  // Start from the average of the maximizers of each weight: it has the
  // largest support available in the weight polytope.
  std::vector<Atom> atoms;
  const auto add_atom = [&](const Eigen::VectorXd& v, double weight) {
    for (auto& atom : atoms) {
      if ((atom.vertex - v).cwiseAbs().maxCoeff() <= 1e-12) {
        atom.weight += weight;
        return;
      }
    }
    atoms.push_back({v, weight});
  };
  for (Eigen::Index j = 0; j < m; ++j) {
    const lp::LpResult r = lp::maximize(a, b, Eigen::VectorXd::Unit(m, j), config.residual_tolerance);
    if (r.status == lp::LpStatus::Optimal) add_atom(r.solution, 1.0);
  }
  double total = 0.0;
  for (const auto& atom : atoms) total += atom.weight;
  for (auto& atom : atoms) atom.weight /= total;

  const auto current = [&] {
    Eigen::VectorXd x = Eigen::VectorXd::Zero(m);
    for (const auto& atom : atoms) x += atom.weight * atom.vertex;
    return x;
  };

  Eigen::VectorXd x = current();
  double gap = std::numeric_limits<double>::infinity();
  int iterations = 0;
  for (; iterations < config.frank_wolfe_max_iterations; ++iterations) {
    const Eigen::VectorXd c = g.transpose() * problem.objective.gradient(model, g * x);
    const lp::LpResult toward = lp::maximize(a, b, c, config.residual_tolerance);
    if (toward.status != lp::LpStatus::Optimal) {
      throw Error(ErrorCode::NumericalFailure, "linear subproblem over the weight polytope failed");
    }
    gap = c.dot(toward.solution - x);
    if (gap <= config.frank_wolfe_gap) break;

    std::size_t away = 0;
    for (std::size_t i = 1; i < atoms.size(); ++i) {
      if (c.dot(atoms[i].vertex) < c.dot(atoms[away].vertex)) away = i;
    }
    const Eigen::VectorXd d = toward.solution - atoms[away].vertex;
    const double t = line_search(problem, g, x, d, atoms[away].weight);
    if (t <= 0.0) break;
    atoms[away].weight -= t;
    add_atom(toward.solution, t);
    std::erase_if(atoms, [](const Atom& atom) { return atom.weight <= 0.0; });
    x = current();
    if (iterations % 100 == 0) log::debug("frank-wolfe {:4d}: gap = {:.3e}", iterations, gap);
  }

  out.iterations = iterations;
  out.gap = gap;
  out.multipliers = Eigen::VectorXd();
  out.state = State::unchecked(problem.model, g * x);
  for (Eigen::Index i = 0; i < k; ++i) out.residuals(i) = std::abs(constraints[static_cast<std::size_t>(i)].residual(*out.state));
  out.entropy = problem.objective.value(model, out.state->coords());
  if (gap <= config.frank_wolfe_gap) {
    out.status = SolveStatus::Converged;
  } else {
    out.status = SolveStatus::NonConvergence;
    out.message = fmt::format("Frank-Wolfe gap {:.3e} after {} iterations", gap, iterations);
  }
  return out;
}

}  // namespace gmaxent
