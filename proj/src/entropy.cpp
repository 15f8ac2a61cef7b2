#include <cmath>

#include <fmt/format.h>

#include "gmaxent/error.hpp"
#include "gmaxent/maxent.hpp"

namespace gmaxent {

namespace {

constexpr double kProbabilityFloor = 1e-300;

double plogp(double p) { return p > 0.0 ? p * std::log(p) : 0.0; }

double slope(double p) { return -(std::log(std::max(p, kProbabilityFloor)) + 1.0); }

}  // namespace

std::string_view to_string(ObjectiveKind kind) {
  switch (kind) {
    case ObjectiveKind::Shannon: return "shannon";
    case ObjectiveKind::VonNeumann: return "von_neumann";
    case ObjectiveKind::FiducialMeasurementEntropy: return "fiducial";
    case ObjectiveKind::Custom: return "custom";
  }
  return "unknown";
}

std::string_view to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::Converged: return "Converged";
    case SolveStatus::BoundaryOnly: return "BoundaryOnly";
    case SolveStatus::Infeasible: return "Infeasible";
    case SolveStatus::NonConvergence: return "NonConvergence";
  }
  return "unknown";
}

double shannon_entropy(std::span<const double> p) {
  double h = 0.0;
  for (double x : p) h -= plogp(x);
  return h;
}

Objective Objective::shannon() { return Objective(ObjectiveKind::Shannon); }

Objective Objective::von_neumann() { return Objective(ObjectiveKind::VonNeumann); }

Objective Objective::fiducial(std::vector<Observable> measurements) {
  if (measurements.empty()) throw Error(ErrorCode::DegenerateInput, "fiducial entropy needs at least one measurement");
  for (const auto& m : measurements) require_same_model(measurements.front().model(), m.model());
  Objective objective(ObjectiveKind::FiducialMeasurementEntropy);
  objective.measurements_ = std::move(measurements);
  return objective;
}

Objective Objective::custom(CustomObjective custom) {
  if (!custom.value || !custom.gradient) {
    throw Error(ErrorCode::DegenerateInput, "custom objective needs a value and a gradient");
  }
  Objective objective(ObjectiveKind::Custom);
  objective.custom_ = std::move(custom);
  return objective;
}

bool Objective::compatible_with(const ModelSpace& model) const {
  switch (kind_) {
    case ObjectiveKind::Shannon: return model.kind() == ModelKind::Classical;
    case ObjectiveKind::VonNeumann: return model.kind() == ModelKind::Quantum;
    case ObjectiveKind::FiducialMeasurementEntropy:
      return model.kind() != ModelKind::Quantum && same_model(measurements_.front().model(), model);
    case ObjectiveKind::Custom: return model.kind() != ModelKind::Quantum;
  }
  return false;
}

double Objective::value(const ModelSpace& model, const Eigen::VectorXd& coords) const {
  switch (kind_) {
    case ObjectiveKind::Shannon:
      return shannon_entropy(std::span<const double>(coords.data(), static_cast<std::size_t>(coords.size())));
    case ObjectiveKind::VonNeumann: {
      const Eigen::VectorXd k = eig(model.operator_from(coords)).values;
      return shannon_entropy(std::span<const double>(k.data(), static_cast<std::size_t>(k.size())));
    }
    case ObjectiveKind::FiducialMeasurementEntropy: {
      double h = 0.0;
      for (const auto& m : measurements_) {
        for (const auto& o : m.outcomes()) h -= plogp(o.effect.functional().dot(coords));
      }
      return h;
    }
    case ObjectiveKind::Custom: return custom_.value(coords);
  }
  return 0.0;
}

Eigen::VectorXd Objective::gradient(const ModelSpace& model, const Eigen::VectorXd& coords) const {
  switch (kind_) {
    case ObjectiveKind::Shannon: return coords.unaryExpr([](double p) { return slope(p); });
    case ObjectiveKind::VonNeumann: {
      // dS = -tr((ln rho + 1) d rho); the coordinate basis is orthonormal.
      const EigenDecomposition d = eig(model.operator_from(coords));
      return model.coordinates(d.apply([](double k) { return slope(k); }));
    }
    case ObjectiveKind::FiducialMeasurementEntropy: {
      Eigen::VectorXd g = Eigen::VectorXd::Zero(coords.size());
      for (const auto& m : measurements_) {
        for (const auto& o : m.outcomes()) g += slope(o.effect.functional().dot(coords)) * o.effect.functional();
      }
      return g;
    }
    case ObjectiveKind::Custom: return custom_.gradient(coords);
  }
  return Eigen::VectorXd();
}

double entropy(const Objective& objective, const State& state) {
  if (!objective.compatible_with(state.model()) &&
      !(objective.kind() == ObjectiveKind::VonNeumann && state.model().kind() == ModelKind::Quantum)) {
    throw Error(ErrorCode::IncompatibleObjective,
                fmt::format("{} entropy does not apply to {}", to_string(objective.kind()), state.model().describe()));
  }
  return objective.value(state.model(), state.coords());
}

MaxEntProblem make_problem(ConvexRegion region, Objective objective) {
  if (!objective.compatible_with(region.model())) {
    throw Error(ErrorCode::IncompatibleObjective,
                fmt::format("{} objective does not apply to {}", to_string(objective.kind()), region.model().describe()));
  }
  ModelPtr model = region.model_ptr();
  return MaxEntProblem{std::move(model), std::move(region), std::move(objective)};
}

}  // namespace gmaxent
