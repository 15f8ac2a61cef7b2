#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "gmaxent/config.hpp"
#include "gmaxent/model.hpp"

namespace gmaxent {

enum class ConstraintOrigin { Functional, Mean, Probability };

// The affine condition functional(omega) = target. Mean-value and
// effect-probability conditions are both expressed with this one type; the
// region it cuts from the state space is ker(functional - target u) cap Omega.
class LinearConstraint {
 public:
  // Throws ZeroFunctional for a zero functional and InvalidTarget for a
  // probability condition outside [0, 1].
  LinearConstraint(ModelPtr model, Eigen::VectorXd functional, double target,
                   ConstraintOrigin origin = ConstraintOrigin::Functional);
  static LinearConstraint from_operator(ModelPtr model, const HermitianMatrix& op, double target);

  const ModelSpace& model() const { return *model_; }
  const ModelPtr& model_ptr() const { return model_; }
  const Eigen::VectorXd& functional() const { return functional_; }
  double target() const { return target_; }
  ConstraintOrigin origin() const { return origin_; }

  // functional - target * u; its kernel is the constraint subspace.
  Eigen::VectorXd kernel_functional() const;
  double residual(const State& state) const;
  HermitianMatrix as_operator() const;  // Quantum only

 private:
  ModelPtr model_;
  Eigen::VectorXd functional_;
  double target_;
  ConstraintOrigin origin_;
};

// Convex subset of the state space: the affine equalities (H-rep) cut from
// Omega, optionally intersected with the convex hull of finitely many states
// (V-rep). When generators are present every one of them satisfies the
// constraints, so the region is their hull.
class ConvexRegion {
 public:
  static ConvexRegion whole_space(ModelPtr model);
  static ConvexRegion from_constraints(ModelPtr model, std::vector<LinearConstraint> constraints,
                                       const LatticeConfig& config = {});
  static ConvexRegion hull(ModelPtr model, std::vector<State> generators,
                           const LatticeConfig& config = {});
  static ConvexRegion empty(ModelPtr model);

  const ModelSpace& model() const { return *model_; }
  const ModelPtr& model_ptr() const { return model_; }
  const std::vector<LinearConstraint>& constraints() const { return constraints_; }
  const std::optional<std::vector<State>>& generators() const { return generators_; }
  bool has_generators() const { return generators_.has_value(); }
  // Conflicting parallel constraints were found; the region is empty.
  bool contradictory() const { return contradictory_; }
  // Known to be empty without solving anything.
  bool known_empty() const { return contradictory_ || (generators_ && generators_->empty()); }
  bool is_whole_space() const { return !contradictory_ && !generators_ && constraints_.empty(); }
  // Constraints dropped as duplicates while building this region.
  int duplicates_removed() const { return duplicates_removed_; }

  bool contains(const State& state, const LatticeConfig& config = {}) const;

 private:
  explicit ConvexRegion(ModelPtr model) : model_(std::move(model)) {}

  // Appends with duplicate/trivial detection; conflicts mark the region empty.
  void add_constraint(const LinearConstraint& c, const LatticeConfig& config);

  ModelPtr model_;
  std::vector<LinearConstraint> constraints_;
  std::optional<std::vector<State>> generators_;
  bool contradictory_ = false;
  int duplicates_removed_ = 0;

  friend ConvexRegion meet(const ConvexRegion&, const ConvexRegion&, const LatticeConfig&);
  friend ConvexRegion join(const ConvexRegion&, const ConvexRegion&, const LatticeConfig&);
};

// {omega : <F>_omega = r}; throws NoValues when outcomes carry no values.
ConvexRegion region_from_mean(const Observable& observable, double target,
                              const LatticeConfig& config = {});
// {omega : e(omega) = lambda}; throws InvalidTarget outside [0, 1].
ConvexRegion region_from_effect(const Effect& effect, double lambda,
                                const LatticeConfig& config = {});

// Intersection. Constraint lists are concatenated without duplicates; when
// either side carries generators the hull of the intersection is recomputed
// by vertex enumeration so the result stays exact.
ConvexRegion meet(const ConvexRegion& a, const ConvexRegion& b, const LatticeConfig& config = {});

// Convex hull of the union. Needs V-representations; throws
// UnsupportedRepresentation for quantum regions given only by constraints.
ConvexRegion join(const ConvexRegion& a, const ConvexRegion& b, const LatticeConfig& config = {});

// outer contains inner, checked on the generators of inner.
bool includes(const ConvexRegion& outer, const ConvexRegion& inner, const LatticeConfig& config = {});

enum class FeasibilityKind { Feasible, Infeasible, BoundaryOnly };

struct Feasibility {
  FeasibilityKind kind = FeasibilityKind::Infeasible;
  std::optional<State> witness;
};

// Classical/Polytope and V-rep regions: exact Phase-I LP. Quantum H-rep
// regions: the MaxEnt dual iteration, whose weak-duality bound certifies
// emptiness and whose divergence at small residuals signals BoundaryOnly.
Feasibility feasibility(const ConvexRegion& region, const LatticeConfig& config = {},
                        const SolverConfig& solver = {});

// Exact vertex set of a Classical/Polytope H-rep region or of any region with
// generators. Throws Unsupported beyond the configured caps.
std::vector<State> enumerate_vertices(const ConvexRegion& region, const LatticeConfig& config = {});

}  // namespace gmaxent
