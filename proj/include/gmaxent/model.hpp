#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gmaxent/config.hpp"
#include "gmaxent/hermitian.hpp"

namespace gmaxent {

enum class ModelKind { Classical, Quantum, Polytope };

std::string_view to_string(ModelKind kind);

class ModelSpace;
using ModelPtr = std::shared_ptr<const ModelSpace>;

// A convex operational model: an ordered real vector space with a positive
// cone and a unit functional u. States are cone elements with u = 1.
//
//  Classical(d)  coordinates are probabilities, u = (1, ..., 1).
//  Quantum(d)    d^2 real coordinates of a Hermitian operator in the
//                orthonormal basis {I/sqrt(d), symmetric, antisymmetric,
//                diagonal generators}; u is the trace.
//  Polytope      the cone is spanned by finitely many vertices with u(v) = 1.
class ModelSpace {
 public:
  static ModelPtr classical(int outcomes);
  static ModelPtr quantum(int hilbert_dim);
  // Vertices are given in the ambient space; u must be 1 on each of them.
  static ModelPtr polytope(std::vector<Eigen::VectorXd> vertices, Eigen::VectorXd unit,
                           const ModelConfig& config = {});
  // Vertices are affine points p; the ambient embedding is (1, p) with
  // u = (1, 0, ..., 0).
  static ModelPtr affine_polytope(const std::vector<Eigen::VectorXd>& points,
                                  const ModelConfig& config = {});
  // The square bit: vertices (+-1, +-1).
  static ModelPtr square_bit();

  ModelKind kind() const { return kind_; }
  // Outcome count (Classical), Hilbert dimension (Quantum), vertex count (Polytope).
  int dimension() const { return dimension_; }
  int ambient_dim() const { return static_cast<int>(unit_.size()); }
  const Eigen::VectorXd& unit() const { return unit_; }
  bool is_affine() const { return affine_; }

  // Extreme points of the state space as ambient columns: the basis for
  // Classical, the vertices for Polytope. Empty for Quantum.
  const Eigen::MatrixXd& generators() const { return generators_; }
  int generator_count() const { return static_cast<int>(generators_.cols()); }

  // Quantum only: operator <-> real coordinates.
  Eigen::VectorXd coordinates(const HermitianMatrix& op) const;
  HermitianMatrix operator_from(const Eigen::VectorXd& coords) const;

  bool operator==(const ModelSpace& other) const;
  std::string describe() const;

 private:
  ModelSpace(ModelKind kind, int dimension, Eigen::VectorXd unit, Eigen::MatrixXd generators,
             bool affine)
      : kind_(kind), dimension_(dimension), unit_(std::move(unit)),
        generators_(std::move(generators)), affine_(affine) {}

  ModelKind kind_;
  int dimension_;
  Eigen::VectorXd unit_;
  Eigen::MatrixXd generators_;
  bool affine_ = false;
};

bool same_model(const ModelSpace& a, const ModelSpace& b);
void require_same_model(const ModelSpace& a, const ModelSpace& b);

Eigen::VectorXd quantum_coordinates(const HermitianMatrix& op);
HermitianMatrix quantum_operator(const Eigen::VectorXd& coords, int hilbert_dim);

// Reason the coordinates fail to be a state, if any.
std::optional<std::string> state_violation(const ModelSpace& model, const Eigen::VectorXd& coords,
                                           const ModelConfig& config = {});

class State {
 public:
  // Throws InvalidState when the unit or cone condition fails.
  State(ModelPtr model, Eigen::VectorXd coords, const ModelConfig& config = {});
  static State unchecked(ModelPtr model, Eigen::VectorXd coords);
  static State from_density_matrix(ModelPtr model, const HermitianMatrix& rho,
                                   const ModelConfig& config = {});
  static State from_probabilities(ModelPtr model, const Eigen::VectorXd& p,
                                  const ModelConfig& config = {});
  // Polytope built by affine_polytope(): the state at affine point p.
  static State from_affine_point(ModelPtr model, const Eigen::VectorXd& point,
                                 const ModelConfig& config = {});

  const ModelSpace& model() const { return *model_; }
  const ModelPtr& model_ptr() const { return model_; }
  const Eigen::VectorXd& coords() const { return coords_; }

  HermitianMatrix density_matrix() const;  // Quantum only
  Eigen::VectorXd affine_point() const;    // affine Polytope only

 private:
  State(ModelPtr model, Eigen::VectorXd coords, bool)
      : model_(std::move(model)), coords_(std::move(coords)) {}

  ModelPtr model_;
  Eigen::VectorXd coords_;
};

struct EffectRange {
  double min = 0.0;
  double max = 0.0;
};

// A linear functional f on the ambient space with 0 <= f <= u on states.
class Effect {
 public:
  Effect(ModelPtr model, Eigen::VectorXd functional, const ModelConfig& config = {});
  static Effect unchecked(ModelPtr model, Eigen::VectorXd functional);
  static Effect from_operator(ModelPtr model, const HermitianMatrix& op,
                              const ModelConfig& config = {});
  static Effect unit(ModelPtr model);

  const ModelSpace& model() const { return *model_; }
  const ModelPtr& model_ptr() const { return model_; }
  const Eigen::VectorXd& functional() const { return functional_; }
  HermitianMatrix as_operator() const;  // Quantum only

  // Extremes of f over the state space (attained on extreme states).
  EffectRange range() const;

 private:
  Effect(ModelPtr model, Eigen::VectorXd functional, bool)
      : model_(std::move(model)), functional_(std::move(functional)) {}

  ModelPtr model_;
  Eigen::VectorXd functional_;
};

struct Outcome {
  std::string label;
  Effect effect;
  std::optional<double> value;
};

// Finite family of effects summing to u; a POVM in the quantum case.
class Observable {
 public:
  // Throws InvalidEffect when validate_povm reports any violation.
  Observable(ModelPtr model, std::vector<Outcome> outcomes, const ModelConfig& config = {});
  static Observable unchecked(ModelPtr model, std::vector<Outcome> outcomes);
  // Spectral observable of a Hermitian operator: one projector per distinct eigenvalue.
  static Observable spectral(ModelPtr model, const HermitianMatrix& op);

  const ModelSpace& model() const { return *model_; }
  const ModelPtr& model_ptr() const { return model_; }
  const std::vector<Outcome>& outcomes() const { return outcomes_; }
  const Outcome* find(std::string_view label) const;

  bool has_values() const;
  // sum_x value_x F_x; throws NoValues.
  Eigen::VectorXd mean_functional() const;

 private:
  Observable(ModelPtr model, std::vector<Outcome> outcomes, bool)
      : model_(std::move(model)), outcomes_(std::move(outcomes)) {}

  ModelPtr model_;
  std::vector<Outcome> outcomes_;
};

// Born rule: f(omega); tr(E rho) for quantum models.
double evaluate(const Effect& effect, const State& state, const ModelConfig& config = {});

// <F>_omega = sum_x value_x F_x(omega)
double mean_value(const Observable& observable, const State& state, const ModelConfig& config = {});

enum class PovmViolationKind { Completeness, Negative, ExceedsUnit, ModelMismatch };

struct PovmViolation {
  PovmViolationKind kind;
  std::string outcome;  // empty for completeness
  double magnitude = 0.0;
};

struct PovmReport {
  std::vector<PovmViolation> violations;
  // max-abs of sum_x F_x - u in ambient coordinates (operator norm for quantum)
  double completeness_residual = 0.0;
  Eigen::VectorXd completeness_defect;

  bool valid() const { return violations.empty(); }
};

// Finite-outcome POVM conditions: sum to the unit, each effect within [0, u].
PovmReport validate_povm(const Observable& observable, const ModelConfig& config = {});

// |psi><psi| / <psi|psi>; throws DegenerateInput on the zero vector.
State pure_state_from_vector(ModelPtr model, const Eigen::VectorXcd& amplitudes,
                             const ModelConfig& config = {});

bool is_pure(const State& state, const ModelConfig& config = {});

struct MixtureTerm {
  double weight = 0.0;
  State state;
};

// rho = sum_i p_i |psi_i><psi_i| from the eigendecomposition; zero-weight
// terms are omitted, heaviest first.
std::vector<MixtureTerm> spectral_mixture(const State& state, const ModelConfig& config = {});

struct AxiomReport {
  double zero_residual = 0.0;                    // |s(0)|
  std::vector<double> complement_residuals;      // |s(P) + s(1 - P) - 1|
  double additivity_residual = 0.0;              // |s(sum P_j) - sum s(P_j)|
  double max_residual() const;
  bool satisfied(double tolerance) const { return max_residual() <= tolerance; }
};

// Checks s(0) = 0, s(P^perp) = 1 - s(P) and finite additivity of the measure
// s(P) = tr(rho P) over a pairwise orthogonal projection family.
AxiomReport check_state_axioms(const State& state, std::span<const HermitianMatrix> projections,
                               const ModelConfig& config = {});

// Seeded generator of random model objects; one per thread.
class Sampler {
 public:
  explicit Sampler(std::uint64_t seed) : engine_(seed) {}

  std::mt19937_64& engine() { return engine_; }

  State random_state(const ModelPtr& model);
  Effect random_effect(const ModelPtr& model);
  Observable random_povm(const ModelPtr& model, int outcomes);
  HermitianMatrix random_hermitian(int dim, double scale = 1.0);
  Eigen::MatrixXcd random_unitary(int dim);
  // Pairwise orthogonal projectors onto disjoint groups of a random basis;
  // ranks are positive and sum to at most dim.
  std::vector<HermitianMatrix> random_orthogonal_projectors(int dim, int count);
  double uniform(double lo = 0.0, double hi = 1.0);
  double normal();

 private:
  std::mt19937_64 engine_;
};

}  // namespace gmaxent
