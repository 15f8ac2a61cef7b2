#include "gmaxent/lattice.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "gmaxent/error.hpp"
#include "gmaxent/linear_program.hpp"
#include "gmaxent/log.hpp"

namespace gmaxent {

LinearConstraint::LinearConstraint(ModelPtr model, Eigen::VectorXd functional, double target,
                                   ConstraintOrigin origin)
    : model_(std::move(model)), functional_(std::move(functional)), target_(target), origin_(origin) {
  if (functional_.size() != model_->ambient_dim()) {
    throw Error(ErrorCode::DimensionMismatch,
                fmt::format("constraint functional has {} coordinates, model needs {}", functional_.size(),
                            model_->ambient_dim()));
  }
  if (functional_.cwiseAbs().maxCoeff() == 0.0) throw Error(ErrorCode::ZeroFunctional, "constraint functional is zero");
  if (!std::isfinite(target_)) throw Error(ErrorCode::InvalidTarget, "constraint target is not finite");
  if (origin_ == ConstraintOrigin::Probability && (target_ < 0.0 || target_ > 1.0)) {
    throw Error(ErrorCode::InvalidTarget, fmt::format("probability target {} outside [0, 1]", target_));
  }
}

LinearConstraint LinearConstraint::from_operator(ModelPtr model, const HermitianMatrix& op, double target) {
  Eigen::VectorXd f = model->coordinates(op);
  return LinearConstraint(std::move(model), std::move(f), target, ConstraintOrigin::Mean);
}

Eigen::VectorXd LinearConstraint::kernel_functional() const { return functional_ - target_ * model_->unit(); }

double LinearConstraint::residual(const State& state) const {
  require_same_model(*model_, state.model());
  return functional_.dot(state.coords()) - target_;
}

HermitianMatrix LinearConstraint::as_operator() const { return model_->operator_from(functional_); }

namespace {

// Matrix whose columns are the generating points of the region: its own
// generators, the model's extreme points, or nothing for quantum H-reps.
std::optional<Eigen::MatrixXd> generator_columns(const ConvexRegion& region) {
  if (region.generators()) {
    const auto& gens = *region.generators();
    Eigen::MatrixXd g(region.model().ambient_dim(), static_cast<Eigen::Index>(gens.size()));
    for (std::size_t i = 0; i < gens.size(); ++i) g.col(static_cast<Eigen::Index>(i)) = gens[i].coords();
    return g;
  }
  if (region.model().kind() == ModelKind::Quantum) return std::nullopt;
  return region.model().generators();
}

std::vector<State> dedup_states(const ModelPtr& model, const std::vector<Eigen::VectorXd>& points, double tolerance) {
  std::vector<State> out;
  for (const auto& p : points) {
    const bool seen = std::any_of(out.begin(), out.end(), [&](const State& s) {
      return (s.coords() - p).cwiseAbs().maxCoeff() < tolerance;
    });
    if (!seen) out.push_back(State::unchecked(model, p));
  }
  return out;
}

struct Block {
  Eigen::MatrixXd columns;  // ambient x weights
};

// Vertices of {sum_b G_b w_b : w_b in simplex, G_0 w_0 = G_b w_b, constraints}
// via basic feasible solutions in the lifted weight space. The projection of
// a polytope is the hull of its projected vertices.
std::vector<Eigen::VectorXd> lifted_vertices(const std::vector<Block>& blocks,
                                             const std::vector<LinearConstraint>& constraints,
                                             const LatticeConfig& config) {
  const Eigen::Index ambient = blocks.front().columns.rows();
  Eigen::Index vars = 0;
  for (const auto& b : blocks) vars += b.columns.cols();
  if (vars > config.generator_cap) {
    throw Error(ErrorCode::Unsupported,
                fmt::format("vertex enumeration over {} weights exceeds the cap of {}", vars, config.generator_cap));
  }
  const Eigen::Index rows = static_cast<Eigen::Index>(blocks.size()) + ambient * (static_cast<Eigen::Index>(blocks.size()) - 1) +
                            static_cast<Eigen::Index>(constraints.size());
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(rows, vars);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(rows);

  Eigen::Index row = 0;
  Eigen::Index offset = 0;
  const Eigen::MatrixXd& g0 = blocks.front().columns;
  for (std::size_t k = 0; k < blocks.size(); ++k) {
    const Eigen::MatrixXd& g = blocks[k].columns;
    a.block(row, offset, 1, g.cols()).setOnes();
    b(row++) = 1.0;
    if (k > 0) {
      a.block(row, 0, ambient, g0.cols()) = g0;
      a.block(row, offset, ambient, g.cols()) = -g;
      row += ambient;
    }
    offset += g.cols();
  }
  for (const auto& c : constraints) {
    a.block(row, 0, 1, g0.cols()) = c.functional().transpose() * g0;
    b(row++) = c.target();
  }

  std::vector<Eigen::VectorXd> projected;
  for (const auto& w : lp::basic_feasible_solutions(a, b, config.dedup_tolerance)) {
    projected.push_back(g0 * w.head(g0.cols()));
  }
  return projected;
}

}  // namespace

void ConvexRegion::add_constraint(const LinearConstraint& c, const LatticeConfig& config) {
  require_same_model(*model_, c.model());
  const double norm = c.functional().norm();
  const Eigen::VectorXd direction = c.functional() / norm;
  const double level = c.target() / norm;

  // A functional parallel to u is either implied by normalization or
  // contradicts it.
  const double unit_norm = model_->unit().norm();
  const Eigen::VectorXd unit_direction = model_->unit() / unit_norm;
  for (double sign : {1.0, -1.0}) {
    if ((direction - sign * unit_direction).cwiseAbs().maxCoeff() <= config.duplicate_tolerance) {
      if (std::abs(level - sign / unit_norm) <= config.duplicate_tolerance) {
        ++duplicates_removed_;
      } else {
        contradictory_ = true;
        constraints_.push_back(c);
      }
      return;
    }
  }

  for (const auto& existing : constraints_) {
    const double existing_norm = existing.functional().norm();
    const Eigen::VectorXd other = existing.functional() / existing_norm;
    const double other_level = existing.target() / existing_norm;
    for (double sign : {1.0, -1.0}) {
      if ((direction - sign * other).cwiseAbs().maxCoeff() <= config.duplicate_tolerance) {
        if (std::abs(level - sign * other_level) <= config.duplicate_tolerance) {
          ++duplicates_removed_;
        } else {
          contradictory_ = true;
          constraints_.push_back(c);
        }
        return;
      }
    }
  }
  constraints_.push_back(c);
}

ConvexRegion ConvexRegion::whole_space(ModelPtr model) { return ConvexRegion(std::move(model)); }

ConvexRegion ConvexRegion::empty(ModelPtr model) {
  ConvexRegion region(std::move(model));
  region.generators_ = std::vector<State>{};
  return region;
}

ConvexRegion ConvexRegion::from_constraints(ModelPtr model, std::vector<LinearConstraint> constraints,
                                            const LatticeConfig& config) {
  ConvexRegion region(std::move(model));
  for (const auto& c : constraints) region.add_constraint(c, config);
  return region;
}

ConvexRegion ConvexRegion::hull(ModelPtr model, std::vector<State> generators, const LatticeConfig& config) {
  ConvexRegion region(model);
  std::vector<Eigen::VectorXd> points;
  for (const auto& s : generators) {
    require_same_model(*model, s.model());
    points.push_back(s.coords());
  }
  region.generators_ = dedup_states(model, points, config.dedup_tolerance);
  return region;
}

bool ConvexRegion::contains(const State& state, const LatticeConfig& config) const {
  require_same_model(*model_, state.model());
  if (known_empty()) return false;
  for (const auto& c : constraints_) {
    if (std::abs(c.residual(state)) > config.membership_tolerance) return false;
  }
  if (!generators_) return true;
  const auto g = *generator_columns(*this);
  Eigen::MatrixXd a(g.rows() + 1, g.cols());
  a << g, Eigen::RowVectorXd::Ones(g.cols());
  Eigen::VectorXd b(g.rows() + 1);
  b << state.coords(), 1.0;
  return lp::feasible_point(a, b, config.membership_tolerance).has_value();
}

ConvexRegion region_from_mean(const Observable& observable, double target, const LatticeConfig& config) {
  LinearConstraint c(observable.model_ptr(), observable.mean_functional(), target, ConstraintOrigin::Mean);
  return ConvexRegion::from_constraints(observable.model_ptr(), {c}, config);
}

ConvexRegion region_from_effect(const Effect& effect, double lambda, const LatticeConfig& config) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    throw Error(ErrorCode::InvalidTarget, fmt::format("effect probability {} outside [0, 1]", lambda));
  }
  LinearConstraint c(effect.model_ptr(), effect.functional(), lambda, ConstraintOrigin::Probability);
  return ConvexRegion::from_constraints(effect.model_ptr(), {c}, config);
}

ConvexRegion meet(const ConvexRegion& a, const ConvexRegion& b, const LatticeConfig& config) {
  require_same_model(a.model(), b.model());
  ConvexRegion out(a.model_ptr());
  out.duplicates_removed_ = 0;
  for (const auto& c : a.constraints()) out.add_constraint(c, config);
  for (const auto& c : b.constraints()) out.add_constraint(c, config);
  out.contradictory_ = out.contradictory_ || a.contradictory() || b.contradictory();
  if (!a.has_generators() && !b.has_generators()) return out;

  if (out.contradictory_ || a.known_empty() || b.known_empty()) {
    out.generators_ = std::vector<State>{};
    return out;
  }
  std::vector<Block> blocks;
  for (const ConvexRegion* r : {&a, &b}) {
    if (r->has_generators()) blocks.push_back({*generator_columns(*r)});
  }
  // With one generator block the other side contributes constraints only;
  // its hull already lies in Omega.
  out.generators_ = dedup_states(out.model_ptr(), lifted_vertices(blocks, out.constraints_, config),
                                 config.dedup_tolerance);
  return out;
}

std::vector<State> enumerate_vertices(const ConvexRegion& region, const LatticeConfig& config) {
  if (region.known_empty()) return {};
  if (!region.has_generators()) {
    if (region.model().kind() == ModelKind::Quantum) {
      throw Error(ErrorCode::UnsupportedRepresentation,
                  "quantum regions given by constraints are not polytopes; supply generators");
    }
    const int size = static_cast<int>(region.constraints().size()) + region.model().ambient_dim();
    if (size > config.enumeration_cap) {
      throw Error(ErrorCode::Unsupported,
                  fmt::format("constraint count + ambient dimension {} exceeds the cap of {}", size, config.enumeration_cap));
    }
  }
  const std::vector<Block> blocks{{*generator_columns(region)}};
  return dedup_states(region.model_ptr(), lifted_vertices(blocks, region.constraints(), config),
                      config.dedup_tolerance);
}

namespace {

std::vector<State> v_representation(const ConvexRegion& region, const LatticeConfig& config) {
  if (region.has_generators()) return *region.generators();
  return enumerate_vertices(region, config);
}

}  // namespace

ConvexRegion join(const ConvexRegion& a, const ConvexRegion& b, const LatticeConfig& config) {
  require_same_model(a.model(), b.model());
  std::vector<Eigen::VectorXd> points;
  for (const ConvexRegion* r : {&a, &b}) {
    for (const auto& s : v_representation(*r, config)) points.push_back(s.coords());
  }
  ConvexRegion out(a.model_ptr());
  out.generators_ = dedup_states(a.model_ptr(), points, config.dedup_tolerance);
  return out;
}

bool includes(const ConvexRegion& outer, const ConvexRegion& inner, const LatticeConfig& config) {
  require_same_model(outer.model(), inner.model());
  if (inner.known_empty()) return true;
  if (outer.is_whole_space()) return true;

  const std::vector<State> points = v_representation(inner, config);
  if (points.empty()) return true;
  if (outer.known_empty()) return false;
  return std::all_of(points.begin(), points.end(), [&](const State& s) { return outer.contains(s, config); });
}

}  // namespace gmaxent
