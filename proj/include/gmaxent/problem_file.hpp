#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "gmaxent/config.hpp"
#include "gmaxent/lattice.hpp"
#include "gmaxent/maxent.hpp"
#include "gmaxent/model.hpp"

namespace gmaxent {

// Matrices (Quantum) or ambient coordinate vectors (Classical/Polytope) as
// written in a problem file.
struct Coordinates {
  std::optional<Eigen::MatrixXcd> matrix;
  Eigen::VectorXd vector;

  bool operator==(const Coordinates& other) const;
};

struct ModelSection {
  std::string kind;  // classical | quantum | polytope | square_bit
  int dimension = 0;
  std::vector<Eigen::VectorXd> vertices;
  std::optional<Eigen::VectorXd> unit;  // absent: vertices are affine points

  bool operator==(const ModelSection& other) const;
};

struct OutcomeSection {
  std::string label;
  Coordinates effect;
  std::optional<double> value;

  bool operator==(const OutcomeSection& other) const = default;
};

struct ObservableSection {
  std::string name;
  std::vector<OutcomeSection> outcomes;

  bool operator==(const ObservableSection& other) const = default;
};

struct NamedCoordinates {
  std::string name;
  Coordinates value;

  bool operator==(const NamedCoordinates& other) const = default;
};

enum class ConditionType { Mean, Probability };

struct ConditionSection {
  std::string ref;
  ConditionType type = ConditionType::Mean;
  std::optional<std::string> outcome;
  double target = 0.0;

  bool operator==(const ConditionSection& other) const = default;
};

struct ObjectiveSection {
  std::string name;  // shannon | von_neumann | fiducial; empty: model default
  std::vector<std::string> measurements;

  bool operator==(const ObjectiveSection& other) const = default;
};

struct SolverSection {
  std::optional<double> tolerance;
  std::optional<int> max_iterations;
  std::optional<std::uint64_t> seed;

  bool operator==(const SolverSection& other) const = default;
};

struct ProblemFile {
  ModelSection model;
  std::vector<ObservableSection> observables;
  std::vector<NamedCoordinates> effects;
  std::vector<NamedCoordinates> operators;  // Quantum: Hermitian operators for mean conditions
  std::vector<ConditionSection> conditions;
  ObjectiveSection objective;
  SolverSection solver;
  std::vector<Coordinates> generators;  // optional V-rep of the region
  bool has_generators = false;

  bool operator==(const ProblemFile& other) const = default;
};

// Throws Error(ParseError) with "line L, column C" for malformed JSON and a
// JSON path for schema violations.
ProblemFile parse_problem(std::string_view text);
ProblemFile load_problem(const std::filesystem::path& path);
std::string serialize_problem(const ProblemFile& problem);

// Semantic layer. Each throws the com-core error of the offending object.
ModelPtr build_model(const ModelSection& section);
Effect build_effect(const ModelPtr& model, const Coordinates& c);
State build_state(const ModelPtr& model, const Coordinates& c);
Observable build_observable(const ModelPtr& model, const ObservableSection& section);

struct BuiltProblem {
  ModelPtr model;
  std::vector<Observable> observables;  // unchecked, in file order
  std::vector<std::pair<std::string, Effect>> effects;
  ConvexRegion region;
  std::optional<Objective> objective;  // absent when the file names none and the model has no default
  SolverConfig solver;
};

BuiltProblem build_problem(const ProblemFile& file);

struct SolutionReport {
  SolveStatus status = SolveStatus::NonConvergence;
  std::optional<Coordinates> state;
  Eigen::VectorXd multipliers;
  std::optional<double> lambda0;
  double entropy = 0.0;
  Eigen::VectorXd residuals;
  std::vector<int> redundant;
  int iterations = 0;
  double wall_time_ms = 0.0;
  std::string message;

  bool operator==(const SolutionReport& other) const;
};

SolutionReport make_report(const MaxEntSolution& solution, double wall_time_ms);
Coordinates state_coordinates(const State& state);
std::string serialize_report(const SolutionReport& report);
SolutionReport parse_report(std::string_view text);

// Numbers at 17 significant digits, two-space indentation.
std::string format_number(double x);

}  // namespace gmaxent
