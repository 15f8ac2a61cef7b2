#include "gmaxent/model.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "gmaxent/error.hpp"
#include "gmaxent/linear_program.hpp"

namespace gmaxent {

std::string_view to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::Classical: return "classical";
    case ModelKind::Quantum: return "quantum";
    case ModelKind::Polytope: return "polytope";
  }
  return "unknown";
}

// Coordinates in the Hilbert-Schmidt orthonormal basis: index 0 is I/sqrt(d),
// then the symmetric pairs (E_jk + E_kj)/sqrt2 for j < k, then the
// antisymmetric pairs (-iE_jk + iE_kj)/sqrt2, then the d-1 diagonal
// generators (sum_{j<l} E_jj - l E_ll)/sqrt(l(l+1)).
Eigen::VectorXd quantum_coordinates(const HermitianMatrix& op) {
  const int d = op.dim();
  const int pairs = d * (d - 1) / 2;
  Eigen::VectorXd c(d * d);
  c(0) = op.trace() / std::sqrt(static_cast<double>(d));
  int p = 0;
  for (int j = 0; j < d; ++j) {
    for (int k = j + 1; k < d; ++k, ++p) {
      c(1 + p) = std::sqrt(2.0) * op(j, k).real();
      c(1 + pairs + p) = -std::sqrt(2.0) * op(j, k).imag();
    }
  }
  double prefix = 0.0;
  for (int l = 1; l < d; ++l) {
    prefix += op(l - 1, l - 1).real();
    c(1 + 2 * pairs + (l - 1)) = (prefix - l * op(l, l).real()) / std::sqrt(l * (l + 1.0));
  }
  return c;
}

HermitianMatrix quantum_operator(const Eigen::VectorXd& coords, int d) {
  if (coords.size() != d * d) {
    throw Error(ErrorCode::DimensionMismatch,
                fmt::format("expected {} quantum coordinates, got {}", d * d, coords.size()));
  }
  const int pairs = d * (d - 1) / 2;
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(d, d);
  int p = 0;
  for (int j = 0; j < d; ++j) {
    for (int k = j + 1; k < d; ++k, ++p) {
      const Complex entry(coords(1 + p) / std::sqrt(2.0), -coords(1 + pairs + p) / std::sqrt(2.0));
      m(j, k) = entry;
      m(k, j) = std::conj(entry);
    }
  }
  const double base = coords(0) / std::sqrt(static_cast<double>(d));
  for (int j = 0; j < d; ++j) m(j, j) = base;
  for (int l = 1; l < d; ++l) {
    const double c = coords(1 + 2 * pairs + (l - 1)) / std::sqrt(l * (l + 1.0));
    for (int j = 0; j < l; ++j) m(j, j) += c;
    m(l, l) -= l * c;
  }
  return HermitianMatrix::symmetrized(m);
}

ModelPtr ModelSpace::classical(int outcomes) {
  if (outcomes < 1) throw Error(ErrorCode::InvalidModel, "classical model needs at least one outcome");
  return ModelPtr(new ModelSpace(ModelKind::Classical, outcomes, Eigen::VectorXd::Ones(outcomes),
                                 Eigen::MatrixXd::Identity(outcomes, outcomes), false));
}

ModelPtr ModelSpace::quantum(int hilbert_dim) {
  if (hilbert_dim < 1) throw Error(ErrorCode::InvalidModel, "quantum model needs dimension >= 1");
  Eigen::VectorXd unit = Eigen::VectorXd::Zero(hilbert_dim * hilbert_dim);
  unit(0) = std::sqrt(static_cast<double>(hilbert_dim));
  return ModelPtr(new ModelSpace(ModelKind::Quantum, hilbert_dim, std::move(unit), Eigen::MatrixXd(), false));
}

ModelPtr ModelSpace::polytope(std::vector<Eigen::VectorXd> vertices, Eigen::VectorXd unit,
                              const ModelConfig& config) {
  if (vertices.empty()) throw Error(ErrorCode::InvalidModel, "polytope model needs vertices");
  const Eigen::Index n = unit.size();
  Eigen::MatrixXd generators(n, static_cast<Eigen::Index>(vertices.size()));
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    if (vertices[i].size() != n) {
      throw Error(ErrorCode::InvalidModel, fmt::format("vertex {} has length {}, expected {}", i,
                                                       vertices[i].size(), n));
    }
    const double u = unit.dot(vertices[i]);
    if (std::abs(u - 1.0) > config.vertex_unit_tolerance) {
      throw Error(ErrorCode::InvalidModel,
                  fmt::format("unit functional is {:.17g} on vertex {}, must be 1", u, i));
    }
    generators.col(static_cast<Eigen::Index>(i)) = vertices[i];
  }
  return ModelPtr(new ModelSpace(ModelKind::Polytope, static_cast<int>(vertices.size()), std::move(unit),
                                 std::move(generators), false));
}

ModelPtr ModelSpace::affine_polytope(const std::vector<Eigen::VectorXd>& points, const ModelConfig& config) {
  if (points.empty()) throw Error(ErrorCode::InvalidModel, "polytope model needs vertices");
  const Eigen::Index n = points.front().size() + 1;
  std::vector<Eigen::VectorXd> vertices;
  vertices.reserve(points.size());
  for (const auto& p : points) {
    if (p.size() + 1 != n) throw Error(ErrorCode::InvalidModel, "polytope points differ in length");
    Eigen::VectorXd v(n);
    v << 1.0, p;
    vertices.push_back(std::move(v));
  }
  Eigen::VectorXd unit = Eigen::VectorXd::Zero(n);
  unit(0) = 1.0;
  auto base = polytope(std::move(vertices), std::move(unit), config);
  return ModelPtr(new ModelSpace(ModelKind::Polytope, base->dimension_, base->unit_, base->generators_, true));
}

ModelPtr ModelSpace::square_bit() {
  std::vector<Eigen::VectorXd> points;
  for (auto [x, y] : {std::pair{1.0, 1.0}, {1.0, -1.0}, {-1.0, -1.0}, {-1.0, 1.0}}) {
    points.push_back((Eigen::VectorXd(2) << x, y).finished());
  }
  return affine_polytope(points);
}

Eigen::VectorXd ModelSpace::coordinates(const HermitianMatrix& op) const {
  if (kind_ != ModelKind::Quantum) throw Error(ErrorCode::ModelMismatch, "operator coordinates need a quantum model");
  if (op.dim() != dimension_) {
    throw Error(ErrorCode::DimensionMismatch,
                fmt::format("operator dimension {} differs from model dimension {}", op.dim(), dimension_));
  }
  return quantum_coordinates(op);
}

HermitianMatrix ModelSpace::operator_from(const Eigen::VectorXd& coords) const {
  if (kind_ != ModelKind::Quantum) throw Error(ErrorCode::ModelMismatch, "operators exist only in quantum models");
  return quantum_operator(coords, dimension_);
}

bool ModelSpace::operator==(const ModelSpace& other) const {
  if (kind_ != other.kind_ || dimension_ != other.dimension_ || unit_.size() != other.unit_.size()) return false;
  if (kind_ != ModelKind::Polytope) return true;
  return generators_.cols() == other.generators_.cols() &&
         (generators_ - other.generators_).cwiseAbs().maxCoeff() <= 1e-12 &&
         (unit_ - other.unit_).cwiseAbs().maxCoeff() <= 1e-12;
}

std::string ModelSpace::describe() const {
  switch (kind_) {
    case ModelKind::Classical: return fmt::format("Classical({})", dimension_);
    case ModelKind::Quantum: return fmt::format("Quantum({})", dimension_);
    case ModelKind::Polytope: return fmt::format("Polytope({} vertices in R^{})", dimension_, ambient_dim());
  }
  return "unknown";
}

bool same_model(const ModelSpace& a, const ModelSpace& b) { return &a == &b || a == b; }

void require_same_model(const ModelSpace& a, const ModelSpace& b) {
  if (!same_model(a, b)) {
    throw Error(ErrorCode::ModelMismatch, fmt::format("{} and {} are different models", a.describe(), b.describe()));
  }
}

std::optional<std::string> state_violation(const ModelSpace& model, const Eigen::VectorXd& coords,
                                           const ModelConfig& config) {
  if (coords.size() != model.ambient_dim()) {
    return fmt::format("state has {} coordinates, model needs {}", coords.size(), model.ambient_dim());
  }
  if (!coords.allFinite()) return std::string("state has non-finite coordinates");
  const double u = model.unit().dot(coords);
  if (std::abs(u - 1.0) > config.unit_tolerance) {
    return fmt::format("unit functional is {:.17g}, must be 1", u);
  }
  switch (model.kind()) {
    case ModelKind::Classical: {
      const double low = coords.minCoeff();
      if (low < -config.cone_tolerance) return fmt::format("negative probability {:.3e}", low);
      break;
    }
    case ModelKind::Quantum: {
      const double low = eig(model.operator_from(coords)).values(0);
      if (low < -config.cone_tolerance) return fmt::format("density matrix has eigenvalue {:.3e}", low);
      break;
    }
    case ModelKind::Polytope: {
      const Eigen::MatrixXd& g = model.generators();
      Eigen::MatrixXd a(g.rows() + 1, g.cols());
      a << g, Eigen::RowVectorXd::Ones(g.cols());
      Eigen::VectorXd b(g.rows() + 1);
      b << coords, 1.0;
      if (!lp::feasible_point(a, b, config.polytope_membership_tolerance)) {
        return std::string("point is not a convex combination of the vertices");
      }
      break;
    }
  }
  return std::nullopt;
}

State::State(ModelPtr model, Eigen::VectorXd coords, const ModelConfig& config)
    : model_(std::move(model)), coords_(std::move(coords)) {
  if (!model_) throw Error(ErrorCode::InvalidModel, "state without a model");
  if (auto why = state_violation(*model_, coords_, config)) throw Error(ErrorCode::InvalidState, *why);
}

State State::unchecked(ModelPtr model, Eigen::VectorXd coords) {
  return State(std::move(model), std::move(coords), true);
}

State State::from_density_matrix(ModelPtr model, const HermitianMatrix& rho, const ModelConfig& config) {
  Eigen::VectorXd coords = model->coordinates(rho);
  return State(std::move(model), std::move(coords), config);
}

State State::from_probabilities(ModelPtr model, const Eigen::VectorXd& p, const ModelConfig& config) {
  if (model->kind() != ModelKind::Classical) throw Error(ErrorCode::ModelMismatch, "probabilities need a classical model");
  return State(std::move(model), p, config);
}

State State::from_affine_point(ModelPtr model, const Eigen::VectorXd& point, const ModelConfig& config) {
  if (!model->is_affine()) throw Error(ErrorCode::ModelMismatch, "model has no affine embedding");
  Eigen::VectorXd coords(point.size() + 1);
  coords << 1.0, point;
  return State(std::move(model), std::move(coords), config);
}

HermitianMatrix State::density_matrix() const { return model_->operator_from(coords_); }

Eigen::VectorXd State::affine_point() const {
  if (!model_->is_affine()) throw Error(ErrorCode::ModelMismatch, "model has no affine embedding");
  return coords_.tail(coords_.size() - 1);
}

Effect::Effect(ModelPtr model, Eigen::VectorXd functional, const ModelConfig& config)
    : model_(std::move(model)), functional_(std::move(functional)) {
  if (functional_.size() != model_->ambient_dim()) {
    throw Error(ErrorCode::DimensionMismatch,
                fmt::format("effect has {} coordinates, model needs {}", functional_.size(), model_->ambient_dim()));
  }
  const EffectRange r = range();
  if (r.min < -config.effect_tolerance || r.max > 1.0 + config.effect_tolerance) {
    throw Error(ErrorCode::InvalidEffect,
                fmt::format("effect takes values in [{:.6g}, {:.6g}] on states", r.min, r.max));
  }
}

Effect Effect::unchecked(ModelPtr model, Eigen::VectorXd functional) {
  if (functional.size() != model->ambient_dim()) {
    throw Error(ErrorCode::DimensionMismatch,
                fmt::format("effect has {} coordinates, model needs {}", functional.size(), model->ambient_dim()));
  }
  return Effect(std::move(model), std::move(functional), true);
}

Effect Effect::from_operator(ModelPtr model, const HermitianMatrix& op, const ModelConfig& config) {
  Eigen::VectorXd functional = model->coordinates(op);
  return Effect(std::move(model), std::move(functional), config);
}

Effect Effect::unit(ModelPtr model) {
  Eigen::VectorXd u = model->unit();
  return Effect(std::move(model), std::move(u), true);
}

HermitianMatrix Effect::as_operator() const { return model_->operator_from(functional_); }

EffectRange Effect::range() const {
  if (model_->kind() == ModelKind::Quantum) {
    const Eigen::VectorXd values = eig(as_operator()).values;
    return {values(0), values(values.size() - 1)};
  }
  const Eigen::VectorXd on_vertices = model_->generators().transpose() * functional_;
  return {on_vertices.minCoeff(), on_vertices.maxCoeff()};
}

Observable::Observable(ModelPtr model, std::vector<Outcome> outcomes, const ModelConfig& config)
    : model_(std::move(model)), outcomes_(std::move(outcomes)) {
  const PovmReport report = validate_povm(*this, config);
  if (!report.valid()) {
    const PovmViolation& first = report.violations.front();
    throw Error(ErrorCode::InvalidEffect,
                first.kind == PovmViolationKind::Completeness
                    ? fmt::format("effects do not sum to the unit (residual {:.3e})", first.magnitude)
                    : fmt::format("outcome '{}' is not an effect", first.outcome));
  }
}

Observable Observable::unchecked(ModelPtr model, std::vector<Outcome> outcomes) {
  return Observable(std::move(model), std::move(outcomes), true);
}

Observable Observable::spectral(ModelPtr model, const HermitianMatrix& op) {
  const EigenDecomposition d = eig(op);
  std::vector<Outcome> outcomes;
  int begin = 0;
  while (begin < d.dim()) {
    int end = begin + 1;
    while (end < d.dim() && d.values(end) - d.values(begin) <= 1e-9 * (1.0 + std::abs(d.values(begin)))) ++end;
    const Eigen::MatrixXcd basis = d.vectors.middleCols(begin, end - begin);
    const HermitianMatrix projector = HermitianMatrix::symmetrized(basis * basis.adjoint());
    double value = d.values.segment(begin, end - begin).mean();
    outcomes.push_back({fmt::format("{:.17g}", value), Effect::unchecked(model, model->coordinates(projector)), value});
    begin = end;
  }
  return Observable(std::move(model), std::move(outcomes));
}

const Outcome* Observable::find(std::string_view label) const {
  for (const auto& o : outcomes_) {
    if (o.label == label) return &o;
  }
  return nullptr;
}

bool Observable::has_values() const {
  return !outcomes_.empty() &&
         std::all_of(outcomes_.begin(), outcomes_.end(), [](const Outcome& o) { return o.value.has_value(); });
}

Eigen::VectorXd Observable::mean_functional() const {
  if (!has_values()) throw Error(ErrorCode::NoValues, "observable outcomes carry no values");
  Eigen::VectorXd f = Eigen::VectorXd::Zero(model_->ambient_dim());
  for (const auto& o : outcomes_) f += *o.value * o.effect.functional();
  return f;
}

double evaluate(const Effect& effect, const State& state, const ModelConfig& config) {
  require_same_model(effect.model(), state.model());
  double p = effect.functional().dot(state.coords());
  if (p < 0.0 && p >= -config.effect_tolerance) p = 0.0;
  if (p > 1.0 && p <= 1.0 + config.effect_tolerance) p = 1.0;
  return p;
}

double mean_value(const Observable& observable, const State& state, const ModelConfig& config) {
  if (!observable.has_values()) throw Error(ErrorCode::NoValues, "observable outcomes carry no values");
  double mean = 0.0;
  for (const auto& o : observable.outcomes()) mean += *o.value * evaluate(o.effect, state, config);
  return mean;
}

PovmReport validate_povm(const Observable& observable, const ModelConfig& config) {
  PovmReport report;
  const ModelSpace& model = observable.model();
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(model.ambient_dim());
  for (const auto& o : observable.outcomes()) {
    if (!same_model(o.effect.model(), model)) {
      report.violations.push_back({PovmViolationKind::ModelMismatch, o.label, 0.0});
      continue;
    }
    sum += o.effect.functional();
    const EffectRange r = o.effect.range();
    if (r.min < -config.effect_tolerance) {
      report.violations.push_back({PovmViolationKind::Negative, o.label, -r.min});
    }
    if (r.max > 1.0 + config.effect_tolerance) {
      report.violations.push_back({PovmViolationKind::ExceedsUnit, o.label, r.max - 1.0});
    }
  }
  report.completeness_defect = sum - model.unit();
  const double componentwise = report.completeness_defect.cwiseAbs().maxCoeff();
  report.completeness_residual = componentwise;
  if (model.kind() == ModelKind::Quantum) {
    const Eigen::VectorXd values = eig(model.operator_from(report.completeness_defect)).values;
    report.completeness_residual = std::max(std::abs(values(0)), std::abs(values(values.size() - 1)));
  }
  if (componentwise > config.completeness_tolerance) {
    report.violations.insert(report.violations.begin(),
                             {PovmViolationKind::Completeness, "", report.completeness_residual});
  }
  return report;
}

State pure_state_from_vector(ModelPtr model, const Eigen::VectorXcd& amplitudes, const ModelConfig& config) {
  if (model->kind() != ModelKind::Quantum) throw Error(ErrorCode::ModelMismatch, "pure vector states need a quantum model");
  if (amplitudes.size() != model->dimension()) {
    throw Error(ErrorCode::DimensionMismatch,
                fmt::format("amplitude vector has length {}, model dimension is {}", amplitudes.size(), model->dimension()));
  }
  const double norm = amplitudes.norm();
  if (norm == 0.0 || !std::isfinite(norm)) throw Error(ErrorCode::DegenerateInput, "zero amplitude vector");
  const Eigen::VectorXcd psi = amplitudes / norm;
  return State::from_density_matrix(std::move(model), HermitianMatrix::symmetrized(psi * psi.adjoint()), config);
}

bool is_pure(const State& state, const ModelConfig& config) {
  const ModelSpace& model = state.model();
  switch (model.kind()) {
    case ModelKind::Quantum: {
      const Eigen::MatrixXcd rho = state.density_matrix().entries();
      return (rho * rho - rho).cwiseAbs().maxCoeff() <= config.purity_tolerance;
    }
    case ModelKind::Classical:
    case ModelKind::Polytope: {
      const Eigen::MatrixXd& g = model.generators();
      for (Eigen::Index v = 0; v < g.cols(); ++v) {
        if ((g.col(v) - state.coords()).cwiseAbs().maxCoeff() <= config.purity_tolerance) return true;
      }
      return false;
    }
  }
  return false;
}

std::vector<MixtureTerm> spectral_mixture(const State& state, const ModelConfig& config) {
  if (state.model().kind() != ModelKind::Quantum) {
    throw Error(ErrorCode::ModelMismatch, "spectral mixtures need a quantum state");
  }
  const EigenDecomposition d = eig(state.density_matrix());
  std::vector<MixtureTerm> terms;
  for (int i = d.dim() - 1; i >= 0; --i) {
    const double weight = d.values(i);
    if (weight <= 1e-12) continue;
    terms.push_back({weight, pure_state_from_vector(state.model_ptr(), d.vectors.col(i), config)});
  }
  return terms;
}

double AxiomReport::max_residual() const {
  double worst = std::max(zero_residual, additivity_residual);
  for (double r : complement_residuals) worst = std::max(worst, r);
  return worst;
}

AxiomReport check_state_axioms(const State& state, std::span<const HermitianMatrix> projections,
                               const ModelConfig& config) {
  if (state.model().kind() != ModelKind::Quantum) {
    throw Error(ErrorCode::ModelMismatch, "state axioms are checked on quantum states");
  }
  const HermitianMatrix rho = state.density_matrix();
  const int d = rho.dim();
  const auto measure = [&](const HermitianMatrix& p) { return rho.trace_product(p); };

  for (std::size_t i = 0; i < projections.size(); ++i) {
    const auto& p = projections[i];
    if (p.dim() != d) throw Error(ErrorCode::DimensionMismatch, "projection dimension differs from state");
    const double idempotence = (p.entries() * p.entries() - p.entries()).cwiseAbs().maxCoeff();
    if (idempotence > config.projection_tolerance) {
      throw Error(ErrorCode::NotAProjection, fmt::format("matrix {} has |P^2 - P| = {:.3e}", i, idempotence));
    }
  }
  for (std::size_t i = 0; i < projections.size(); ++i) {
    for (std::size_t j = i + 1; j < projections.size(); ++j) {
      const double overlap = (projections[i].entries() * projections[j].entries()).cwiseAbs().maxCoeff();
      if (overlap > config.projection_tolerance) {
        throw Error(ErrorCode::NotOrthogonal, fmt::format("projections {} and {} overlap by {:.3e}", i, j, overlap));
      }
    }
  }

  AxiomReport report;
  report.zero_residual = std::abs(measure(HermitianMatrix::zero(d)));
  HermitianMatrix sum = HermitianMatrix::zero(d);
  double measure_sum = 0.0;
  for (const auto& p : projections) {
    const HermitianMatrix complement = HermitianMatrix::identity(d) - p;
    report.complement_residuals.push_back(std::abs(measure(p) + measure(complement) - 1.0));
    sum = sum + p;
    measure_sum += measure(p);
  }
  report.additivity_residual = std::abs(measure(sum) - measure_sum);
  return report;
}

}  // namespace gmaxent
