#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>
#include <fmt/format.h>

#include "gmaxent/error.hpp"
#include "gmaxent/linear_program.hpp"
#include "gmaxent/log.hpp"
#include "gmaxent/maxent.hpp"

namespace gmaxent {

namespace {

// The constraint family of a dual problem: functionals R_i either as
// operators (Quantum) or as outcome vectors (Classical), shifted by c_i so
// the Gibbs exponent is -sum_i lambda_i (R_i - c_i).
struct Family {
  const ModelSpace* model = nullptr;
  std::vector<HermitianMatrix> operators;
  std::vector<Eigen::VectorXd> outcomes;
  Eigen::VectorXd targets;
  Eigen::VectorXd shifts;

  Eigen::Index size() const { return targets.size(); }
  bool quantum() const { return model->kind() == ModelKind::Quantum; }
};

Family make_family(const ModelSpace& model, std::span<const LinearConstraint> constraints, bool kernel) {
  if (model.kind() != ModelKind::Quantum && model.kind() != ModelKind::Classical) {
    throw Error(ErrorCode::Unsupported, fmt::format("the dual applies to classical and quantum models, not {}",
                                                    model.describe()));
  }
  Family family;
  family.model = &model;
  const auto n = static_cast<Eigen::Index>(constraints.size());
  family.targets.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const LinearConstraint& c = constraints[static_cast<std::size_t>(i)];
    require_same_model(model, c.model());
    family.targets(i) = c.target();
    if (family.quantum()) {
      family.operators.push_back(c.as_operator());
    } else {
      family.outcomes.push_back(c.functional());
    }
  }
  family.shifts = kernel ? family.targets : Eigen::VectorXd::Zero(n);
  return family;
}

// ln(sum_a e^{x_a}) with the largest exponent shifted out; the top term is
// kept out of the log1p argument so values near 0 stay accurate.
struct ShiftedWeights {
  Eigen::VectorXd weights;  // e^{x_a - max}
  double total = 0.0;
  double log_sum = 0.0;
  double spread = 0.0;
};

ShiftedWeights shifted_weights(const Eigen::VectorXd& exponents) {
  ShiftedWeights out;
  Eigen::Index top = 0;
  const double m = exponents.maxCoeff(&top);
  out.weights = (exponents.array() - m).exp().matrix();
  double rest = 0.0;
  for (Eigen::Index a = 0; a < exponents.size(); ++a) {
    if (a != top) rest += out.weights(a);
  }
  out.total = 1.0 + rest;
  out.log_sum = m + std::log1p(rest);
  out.spread = m - exponents.minCoeff();
  return out;
}

DualEvaluation evaluate(const Family& family, const Eigen::VectorXd& lambdas, bool with_hessian,
                        const HermitianConfig& hconfig = {}) {
  const Eigen::Index n = family.size();
  if (lambdas.size() != n) {
    throw Error(ErrorCode::DimensionMismatch,
                fmt::format("{} multipliers for {} constraints", lambdas.size(), n));
  }
  DualEvaluation out;
  Eigen::VectorXd means(n);

  if (family.quantum()) {
    const int d = family.model->dimension();
    Eigen::MatrixXcd exponent = Eigen::MatrixXcd::Identity(d, d) * lambdas.dot(family.shifts);
    for (Eigen::Index i = 0; i < n; ++i) exponent -= lambdas(i) * family.operators[static_cast<std::size_t>(i)].entries();
    const EigenDecomposition dec = eig(HermitianMatrix::symmetrized(exponent), hconfig);
    const ShiftedWeights w = shifted_weights(dec.values);
    const Eigen::VectorXd p = w.weights / w.total;
    const Eigen::MatrixXcd& u = dec.vectors;
    const Eigen::MatrixXcd rho = u * p.cast<Complex>().asDiagonal() * u.adjoint();
    out.state = family.model->coordinates(HermitianMatrix::symmetrized(rho));
    out.value = w.log_sum;
    out.exponent_spread = w.spread;

    std::vector<Eigen::MatrixXcd> rotated(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
      rotated[static_cast<std::size_t>(i)] = u.adjoint() * family.operators[static_cast<std::size_t>(i)].entries() * u;
      means(i) = (rotated[static_cast<std::size_t>(i)].diagonal().real().array() * p.array()).sum();
    }
    if (with_hessian) {
      // Kubo-Mori covariance in the eigenbasis of the exponent, with centered
      // operators so no cancellation against the product of means occurs.
      Eigen::MatrixXd phi(d, d);
      const double m = dec.values.maxCoeff();
      for (int a = 0; a < d; ++a) {
        for (int b = 0; b < d; ++b) phi(a, b) = exp_divided_difference(dec.values(a) - m, dec.values(b) - m, hconfig);
      }
      phi /= w.total;
      for (Eigen::Index i = 0; i < n; ++i) {
        rotated[static_cast<std::size_t>(i)].diagonal().array() -= means(i);
      }
      out.hessian.resize(n, n);
      for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
          const auto& ai = rotated[static_cast<std::size_t>(i)];
          const auto& aj = rotated[static_cast<std::size_t>(j)];
          out.hessian(i, j) = ((ai.conjugate().array() * aj.array()).real() * phi.array()).sum();
        }
      }
    }
  } else {
    const int d = family.model->dimension();
    Eigen::VectorXd exponent = Eigen::VectorXd::Constant(d, lambdas.dot(family.shifts));
    for (Eigen::Index i = 0; i < n; ++i) exponent -= lambdas(i) * family.outcomes[static_cast<std::size_t>(i)];
    const ShiftedWeights w = shifted_weights(exponent);
    const Eigen::VectorXd p = w.weights / w.total;
    out.state = p;
    out.value = w.log_sum;
    out.exponent_spread = w.spread;
    for (Eigen::Index i = 0; i < n; ++i) means(i) = family.outcomes[static_cast<std::size_t>(i)].dot(p);
    if (with_hessian) {
      Eigen::MatrixXd centered(d, n);
      for (Eigen::Index i = 0; i < n; ++i) {
        centered.col(i) = family.outcomes[static_cast<std::size_t>(i)].array() - means(i);
      }
      out.hessian = centered.transpose() * p.asDiagonal() * centered;
    }
  }
  out.gradient = family.targets - means;
  return out;
}

double inf_norm(const Eigen::VectorXd& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }

MaxEntSolution infeasible(Eigen::Index constraints, std::string message) {
  MaxEntSolution out;
  out.status = SolveStatus::Infeasible;
  out.multipliers = Eigen::VectorXd::Zero(constraints);
  out.residuals = Eigen::VectorXd::Zero(constraints);
  out.message = std::move(message);
  return out;
}

bool classical_region_empty(const ModelSpace& model, const std::vector<LinearConstraint>& constraints,
                            const SolverConfig& config) {
  const auto n = static_cast<Eigen::Index>(constraints.size());
  const int d = model.dimension();
  Eigen::MatrixXd a(n + 1, d);
  Eigen::VectorXd b(n + 1);
  for (Eigen::Index i = 0; i < n; ++i) {
    a.row(i) = constraints[static_cast<std::size_t>(i)].functional().transpose();
    b(i) = constraints[static_cast<std::size_t>(i)].target();
  }
  a.row(n).setOnes();
  b(n) = 1.0;
  return !lp::feasible_point(a, b, config.residual_tolerance).has_value();
}

}  // namespace

PartitionValue partition_function(const ModelSpace& model, std::span<const LinearConstraint> constraints,
                                  const Eigen::VectorXd& lambdas) {
  const DualEvaluation ev = evaluate(make_family(model, constraints, false), lambdas, false);
  return PartitionValue{std::exp(ev.value), ev.value};
}

Eigen::VectorXd dual_gradient(const ModelSpace& model, std::span<const LinearConstraint> constraints,
                              const Eigen::VectorXd& targets, const Eigen::VectorXd& lambdas) {
  Family family = make_family(model, constraints, false);
  if (targets.size() != family.size()) {
    throw Error(ErrorCode::DimensionMismatch,
                fmt::format("{} targets for {} constraints", targets.size(), family.size()));
  }
  family.targets = targets;
  return evaluate(family, lambdas, false).gradient;
}

DualEvaluation evaluate_dual(const ModelSpace& model, std::span<const LinearConstraint> constraints,
                             const Eigen::VectorXd& lambdas, bool with_hessian) {
  return evaluate(make_family(model, constraints, true), lambdas, with_hessian);
}

MaxEntSolution solve_dual(const MaxEntProblem& problem, const SolverConfig& config) {
  const ModelSpace& model = *problem.model;
  const ConvexRegion& region = problem.region;
  const bool shannon = problem.objective.kind() == ObjectiveKind::Shannon && model.kind() == ModelKind::Classical;
  const bool von_neumann = problem.objective.kind() == ObjectiveKind::VonNeumann && model.kind() == ModelKind::Quantum;
  if (!shannon && !von_neumann) {
    throw Error(ErrorCode::IncompatibleObjective, "the dual solver needs Shannon/Classical or von Neumann/Quantum");
  }
  if (region.has_generators()) {
    throw Error(ErrorCode::UnsupportedRepresentation, "the dual solver works on constraint regions only");
  }

  const std::vector<LinearConstraint>& all = region.constraints();
  const auto total = static_cast<Eigen::Index>(all.size());
  if (region.contradictory()) return infeasible(total, "conflicting parallel constraints");
  if (model.kind() == ModelKind::Classical && classical_region_empty(model, all, config)) {
    return infeasible(total, "no probability vector satisfies the constraints");
  }

  // Normalization comes first so constraints implied by u are caught too.
  const int ambient = model.ambient_dim();
  Eigen::MatrixXd rows(total + 1, ambient);
  Eigen::VectorXd targets(total + 1);
  rows.row(0) = model.unit().transpose();
  targets(0) = 1.0;
  for (Eigen::Index i = 0; i < total; ++i) {
    rows.row(i + 1) = all[static_cast<std::size_t>(i)].functional().transpose();
    targets(i + 1) = all[static_cast<std::size_t>(i)].target();
  }
  const lp::RowSelection selection = lp::select_independent_rows(rows, targets, config.rank_pivot_tolerance);
  if (!selection.inconsistent.empty()) return infeasible(total, "constraints conflict with each other");

  MaxEntSolution out;
  std::vector<LinearConstraint> active;
  std::vector<Eigen::Index> active_index;
  for (int r : selection.independent) {
    if (r == 0) continue;
    active.push_back(all[static_cast<std::size_t>(r - 1)]);
    active_index.push_back(r - 1);
  }
  for (int r : selection.redundant) {
    out.redundant.push_back(r - 1);
    log::warn("constraint {} is implied by the others and was dropped", r - 1);
  }

  const Family family = make_family(model, active, true);
  const auto n = family.size();
  Eigen::VectorXd lambda = Eigen::VectorXd::Zero(n);
  DualEvaluation ev = evaluate(family, lambda, true);
  double min_eigenvalue = std::numeric_limits<double>::infinity();
  double max_asymmetry = 0.0;
  std::optional<SolveStatus> status;
  int iterations = 0;

  const auto boundary_reached = [&](const DualEvaluation& e, const Eigen::VectorXd& l) {
    return inf_norm(l) > config.multiplier_bound || e.exponent_spread > config.exponent_spread_bound;
  };

  // Rounding in D grows with the size of the exponent.
  double kernel_scale = 0.0;
  for (const auto& op : family.operators) kernel_scale = std::max(kernel_scale, op.max_abs());
  for (const auto& f : family.outcomes) kernel_scale = std::max(kernel_scale, f.cwiseAbs().maxCoeff());
  kernel_scale += inf_norm(family.targets);

  while (!status) {
    const double noise_floor = 1e-13 * (1.0 + lambda.lpNorm<1>() * kernel_scale);
    if (ev.value < -config.infeasibility_certificate - noise_floor) {
      status = SolveStatus::Infeasible;
      out.message = fmt::format("dual value {:.3e} < 0 certifies an empty region", ev.value);
      break;
    }
    const double gnorm = inf_norm(ev.gradient);
    if (boundary_reached(ev, lambda) && gnorm <= config.boundary_residual_tolerance) {
      status = SolveStatus::BoundaryOnly;
      out.message = "targets lie on the boundary of the state space; reporting the limiting state";
      break;
    }

    Eigen::VectorXd step = Eigen::VectorXd::Zero(n);
    if (n > 0) {
      const Eigen::MatrixXd& h = ev.hessian;
      max_asymmetry = std::max(max_asymmetry, (h - h.transpose()).cwiseAbs().maxCoeff());
      const Eigen::MatrixXd sym = 0.5 * (h + h.transpose());
      min_eigenvalue = std::min(min_eigenvalue, Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(sym, Eigen::EigenvaluesOnly).eigenvalues()(0));
      const double scale = std::max(sym.diagonal().maxCoeff(), 1e-300);
      const Eigen::MatrixXd reg = sym + config.hessian_regularization * scale * Eigen::MatrixXd::Identity(n, n);
      step = -reg.ldlt().solve(ev.gradient);
      if (!step.allFinite()) step = -ev.gradient;
    }
    const double step_norm = inf_norm(step);
    if (gnorm <= config.gradient_tolerance && step_norm <= config.step_tolerance * (1.0 + inf_norm(lambda)) &&
        !boundary_reached(ev, lambda)) {
      status = SolveStatus::Converged;
      break;
    }
    if (iterations >= config.max_iterations) break;

    double slope = ev.gradient.dot(step);
    bool newton = true;
    if (!(slope < 0.0)) {
      step = -ev.gradient;
      slope = -ev.gradient.squaredNorm();
      newton = false;
    }
    // Newton steps need only a decrease; gradient steps the Armijo condition.
    const double armijo = newton ? 0.0 : 1e-4;
    const double noise = 1e-14 * (1.0 + std::abs(ev.value));
    double t = 1.0;
    std::optional<DualEvaluation> accepted;
    for (int k = 0; k <= config.max_line_search_halvings; ++k, t *= 0.5) {
      DualEvaluation trial = evaluate(family, lambda + t * step, false);
      const bool decrease = trial.value < ev.value + armijo * t * slope;
      const bool flat = trial.value <= ev.value + noise && inf_norm(trial.gradient) < gnorm;
      if (decrease || flat) {
        accepted = std::move(trial);
        break;
      }
    }
    if (!accepted) {
      out.message = "line search made no progress";
      if (gnorm <= config.gradient_tolerance && !boundary_reached(ev, lambda)) {
        status = SolveStatus::Converged;
      } else if (gnorm <= config.boundary_residual_tolerance) {
        status = SolveStatus::BoundaryOnly;
      }
      break;
    }
    if (t == 1.0) {
      // Multipliers running off to infinity grow only linearly under Newton;
      // keep doubling while the dual strictly decreases.
      for (int k = 0; k < config.max_step_expansions; ++k) {
        if (inf_norm(lambda + 2.0 * t * step) > config.multiplier_bound) break;
        DualEvaluation trial = evaluate(family, lambda + 2.0 * t * step, false);
        if (!(trial.value < accepted->value - 1e-14 * std::abs(accepted->value))) break;
        t *= 2.0;
        accepted = std::move(trial);
      }
    }
    lambda += t * step;
    ++iterations;
    ev = evaluate(family, lambda, true);
    log::debug("newton {:3d}: D = {:.17g}, |g| = {:.3e}, step = {:.3e}, |lambda| = {:.3e}", iterations, ev.value,
               inf_norm(ev.gradient), t * step_norm, inf_norm(lambda));
  }

  out.iterations = iterations;
  out.min_hessian_eigenvalue = std::isfinite(min_eigenvalue) ? min_eigenvalue : 0.0;
  out.max_hessian_asymmetry = max_asymmetry;
  out.dual_value = ev.value;
  out.multipliers = Eigen::VectorXd::Zero(total);
  out.residuals = Eigen::VectorXd::Zero(total);

  if (status == SolveStatus::Infeasible) {
    out.status = SolveStatus::Infeasible;
    return out;
  }
  out.status = status.value_or(SolveStatus::NonConvergence);
  if (!status) out.message = fmt::format("no convergence after {} iterations", iterations);

  for (Eigen::Index i = 0; i < n; ++i) out.multipliers(active_index[static_cast<std::size_t>(i)]) = lambda(i);
  out.state = State::unchecked(problem.model, ev.state);
  for (Eigen::Index i = 0; i < total; ++i) out.residuals(i) = std::abs(all[static_cast<std::size_t>(i)].residual(*out.state));
  out.entropy = problem.objective.value(model, ev.state);
  if (out.status == SolveStatus::Converged) out.lambda0 = ev.value - lambda.dot(family.targets);
  return out;
}

MaxEntSolution solve(const MaxEntProblem& problem, const SolverConfig& config) {
  const ObjectiveKind kind = problem.objective.kind();
  const bool dual = !problem.region.has_generators() &&
                    ((kind == ObjectiveKind::Shannon && problem.model->kind() == ModelKind::Classical) ||
                     (kind == ObjectiveKind::VonNeumann && problem.model->kind() == ModelKind::Quantum));
  return dual ? solve_dual(problem, config) : solve_polytope(problem, config);
}

}  // namespace gmaxent
