#include "gmaxent/problem_file.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

#include "gmaxent/error.hpp"
#include "json_io.hpp"

namespace gmaxent {

using json = nlohmann::json;

namespace detail {

namespace {

bool flat(const json& j) {
  return std::all_of(j.begin(), j.end(), [](const json& e) {
    return e.is_primitive() || (e.is_array() && std::all_of(e.begin(), e.end(), [](const json& x) { return x.is_primitive(); }));
  });
}

void emit(const json& j, int indent, std::string& out) {
  const std::string pad(static_cast<std::size_t>(indent), ' ');
  const std::string inner(static_cast<std::size_t>(indent + 2), ' ');
  switch (j.type()) {
    case json::value_t::number_float: out += format_number(j.get<double>()); return;
    case json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (const auto& [key, value] : j.items()) {
        if (!first) out += ",\n";
        first = false;
        out += inner + json(key).dump() + ": ";
        emit(value, indent + 2, out);
      }
      out += "\n" + pad + "}";
      return;
    }
    case json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      if (flat(j)) {
        out += "[";
        for (std::size_t i = 0; i < j.size(); ++i) {
          if (i > 0) out += ", ";
          emit(j[i], indent, out);
        }
        out += "]";
        return;
      }
      out += "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i > 0) out += ",\n";
        out += inner;
        emit(j[i], indent + 2, out);
      }
      out += "\n" + pad + "]";
      return;
    }
    default: out += j.dump(); return;
  }
}

}  // namespace

std::string write_json(const json& j) {
  std::string out;
  emit(j, 0, out);
  out += "\n";
  return out;
}

json to_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (double x : v) out.push_back(x);
  return out;
}

json to_json(const Coordinates& c) {
  if (!c.matrix) return to_json(c.vector);
  json out = json::array();
  for (Eigen::Index r = 0; r < c.matrix->rows(); ++r) {
    json row = json::array();
    for (Eigen::Index col = 0; col < c.matrix->cols(); ++col) {
      row.push_back(json::array({(*c.matrix)(r, col).real(), (*c.matrix)(r, col).imag()}));
    }
    out.push_back(std::move(row));
  }
  return out;
}

}  // namespace detail

using detail::to_json;
using detail::write_json;

namespace {

template <typename Derived>
bool same_entries(const Eigen::DenseBase<Derived>& a, const Eigen::DenseBase<Derived>& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() && (a.derived().array() == b.derived().array()).all();
}

[[noreturn]] void schema_error(const std::string& path, const std::string& what) {
  throw Error(ErrorCode::ParseError, fmt::format("{}: {}", path, what));
}

const json& field(const json& object, const char* key, const std::string& path) {
  if (!object.is_object()) schema_error(path, "expected an object");
  const auto it = object.find(key);
  if (it == object.end()) schema_error(path, fmt::format("missing field \"{}\"", key));
  return *it;
}

const json* optional_field(const json& object, const char* key) {
  const auto it = object.find(key);
  return it == object.end() || it->is_null() ? nullptr : &*it;
}

double number(const json& j, const std::string& path) {
  if (!j.is_number()) schema_error(path, "expected a number");
  return j.get<double>();
}

int integer(const json& j, const std::string& path) {
  if (!j.is_number_integer()) schema_error(path, "expected an integer");
  return j.get<int>();
}

std::string text(const json& j, const std::string& path) {
  if (!j.is_string()) schema_error(path, "expected a string");
  return j.get<std::string>();
}

const json& array(const json& j, const std::string& path) {
  if (!j.is_array()) schema_error(path, "expected an array");
  return j;
}

Eigen::VectorXd real_vector(const json& j, const std::string& path) {
  array(j, path);
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = number(j[i], fmt::format("{}[{}]", path, i));
  return v;
}

Complex complex_entry(const json& j, const std::string& path) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2) return {number(j[0], path + "[0]"), number(j[1], path + "[1]")};
  schema_error(path, "expected a number or an [re, im] pair");
}

Eigen::MatrixXcd complex_matrix(const json& j, const std::string& path) {
  array(j, path);
  const auto rows = static_cast<Eigen::Index>(j.size());
  if (rows == 0) schema_error(path, "empty matrix");
  Eigen::MatrixXcd m(rows, rows);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const std::string row_path = fmt::format("{}[{}]", path, r);
    const json& row = array(j[static_cast<std::size_t>(r)], row_path);
    if (static_cast<Eigen::Index>(row.size()) != rows) schema_error(row_path, "matrix must be square");
    for (Eigen::Index c = 0; c < rows; ++c) {
      m(r, c) = complex_entry(row[static_cast<std::size_t>(c)], fmt::format("{}[{}]", row_path, c));
    }
  }
  return m;
}

Coordinates coordinates(const json& j, bool quantum, const std::string& path) {
  Coordinates c;
  if (quantum) {
    c.matrix = complex_matrix(j, path);
  } else {
    c.vector = real_vector(j, path);
  }
  return c;
}

std::string location(std::string_view text, std::size_t byte) {
  std::size_t line = 1;
  std::size_t column = 1;
  for (std::size_t i = 0; i + 1 < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return fmt::format("line {}, column {}", line, column);
}

json parse_json(std::string_view text) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    std::string what = e.what();
    if (const auto pos = what.find("syntax error"); pos != std::string::npos) what = what.substr(pos);
    throw Error(ErrorCode::ParseError, fmt::format("{}: {}", location(text, e.byte), what));
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::ParseError, fmt::format("cannot open {}", path.string()));
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

}  // namespace

std::string format_number(double x) {
  if (!std::isfinite(x)) return "null";
  if (x == 0.0 && std::signbit(x)) return "-0.0";
  return fmt::format("{:.17g}", x);
}

bool Coordinates::operator==(const Coordinates& other) const {
  if (matrix.has_value() != other.matrix.has_value()) return false;
  if (matrix && !same_entries(*matrix, *other.matrix)) return false;
  return same_entries(vector, other.vector);
}

bool ModelSection::operator==(const ModelSection& other) const {
  if (kind != other.kind || dimension != other.dimension || vertices.size() != other.vertices.size()) return false;
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    if (!same_entries(vertices[i], other.vertices[i])) return false;
  }
  if (unit.has_value() != other.unit.has_value()) return false;
  return !unit || same_entries(*unit, *other.unit);
}

ProblemFile parse_problem(std::string_view source) {
  const json root = parse_json(source);
  if (!root.is_object()) schema_error("$", "expected an object");
  ProblemFile p;

  const json& model = field(root, "model", "$");
  p.model.kind = text(field(model, "kind", "$.model"), "$.model.kind");
  if (p.model.kind == "classical" || p.model.kind == "quantum") {
    p.model.dimension = integer(field(model, "dimension", "$.model"), "$.model.dimension");
  } else if (p.model.kind == "polytope") {
    const json& vertices = array(field(model, "vertices", "$.model"), "$.model.vertices");
    for (std::size_t i = 0; i < vertices.size(); ++i) {
      p.model.vertices.push_back(real_vector(vertices[i], fmt::format("$.model.vertices[{}]", i)));
    }
    if (const json* unit = optional_field(model, "unit")) p.model.unit = real_vector(*unit, "$.model.unit");
  } else if (p.model.kind != "square_bit") {
    schema_error("$.model.kind", fmt::format("unknown model kind \"{}\"", p.model.kind));
  }
  const bool quantum = p.model.kind == "quantum";

  if (const json* observables = optional_field(root, "observables")) {
    array(*observables, "$.observables");
    for (std::size_t i = 0; i < observables->size(); ++i) {
      const std::string path = fmt::format("$.observables[{}]", i);
      const json& o = (*observables)[i];
      ObservableSection section;
      section.name = text(field(o, "name", path), path + ".name");
      const json& outcomes = array(field(o, "outcomes", path), path + ".outcomes");
      for (std::size_t k = 0; k < outcomes.size(); ++k) {
        const std::string opath = fmt::format("{}.outcomes[{}]", path, k);
        OutcomeSection outcome;
        outcome.label = text(field(outcomes[k], "label", opath), opath + ".label");
        outcome.effect = coordinates(field(outcomes[k], "effect", opath), quantum, opath + ".effect");
        if (const json* value = optional_field(outcomes[k], "value")) outcome.value = number(*value, opath + ".value");
        section.outcomes.push_back(std::move(outcome));
      }
      p.observables.push_back(std::move(section));
    }
  }

  const auto named = [&](const char* key, std::vector<NamedCoordinates>& into, const char* value_key) {
    const json* list = optional_field(root, key);
    if (!list) return;
    array(*list, fmt::format("$.{}", key));
    for (std::size_t i = 0; i < list->size(); ++i) {
      const std::string path = fmt::format("$.{}[{}]", key, i);
      NamedCoordinates n;
      n.name = text(field((*list)[i], "name", path), path + ".name");
      n.value = coordinates(field((*list)[i], value_key, path), quantum, fmt::format("{}.{}", path, value_key));
      into.push_back(std::move(n));
    }
  };
  named("effects", p.effects, "effect");
  named("operators", p.operators, "matrix");
  if (!quantum && !p.operators.empty()) schema_error("$.operators", "operators apply to quantum models only");

  if (const json* conditions = optional_field(root, "conditions")) {
    array(*conditions, "$.conditions");
    for (std::size_t i = 0; i < conditions->size(); ++i) {
      const std::string path = fmt::format("$.conditions[{}]", i);
      const json& c = (*conditions)[i];
      ConditionSection section;
      section.ref = text(field(c, "ref", path), path + ".ref");
      const std::string type = text(field(c, "type", path), path + ".type");
      if (type == "mean") {
        section.type = ConditionType::Mean;
      } else if (type == "probability") {
        section.type = ConditionType::Probability;
      } else {
        schema_error(path + ".type", fmt::format("expected \"mean\" or \"probability\", got \"{}\"", type));
      }
      if (const json* outcome = optional_field(c, "outcome")) section.outcome = text(*outcome, path + ".outcome");
      section.target = number(field(c, "target", path), path + ".target");
      p.conditions.push_back(std::move(section));
    }
  }

  if (const json* objective = optional_field(root, "objective")) {
    if (const json* name = optional_field(*objective, "name")) p.objective.name = text(*name, "$.objective.name");
    if (const json* m = optional_field(*objective, "measurements")) {
      array(*m, "$.objective.measurements");
      for (std::size_t i = 0; i < m->size(); ++i) {
        p.objective.measurements.push_back(text((*m)[i], fmt::format("$.objective.measurements[{}]", i)));
      }
    }
  }

  if (const json* solver = optional_field(root, "solver")) {
    if (const json* t = optional_field(*solver, "tolerance")) p.solver.tolerance = number(*t, "$.solver.tolerance");
    if (const json* m = optional_field(*solver, "max_iterations")) {
      p.solver.max_iterations = integer(*m, "$.solver.max_iterations");
    }
    if (const json* s = optional_field(*solver, "seed")) {
      if (!s->is_number_unsigned()) schema_error("$.solver.seed", "expected a non-negative integer");
      p.solver.seed = s->get<std::uint64_t>();
    }
  }

  if (const json* generators = optional_field(root, "generators")) {
    array(*generators, "$.generators");
    p.has_generators = true;
    for (std::size_t i = 0; i < generators->size(); ++i) {
      p.generators.push_back(coordinates((*generators)[i], quantum, fmt::format("$.generators[{}]", i)));
    }
  }
  return p;
}

ProblemFile load_problem(const std::filesystem::path& path) { return parse_problem(read_file(path)); }

std::string serialize_problem(const ProblemFile& p) {
  json root = json::object();
  json model = {{"kind", p.model.kind}};
  if (p.model.kind == "classical" || p.model.kind == "quantum") model["dimension"] = p.model.dimension;
  if (p.model.kind == "polytope") {
    model["vertices"] = json::array();
    for (const auto& v : p.model.vertices) model["vertices"].push_back(to_json(v));
    if (p.model.unit) model["unit"] = to_json(*p.model.unit);
  }
  root["model"] = model;

  if (!p.observables.empty()) {
    json list = json::array();
    for (const auto& o : p.observables) {
      json outcomes = json::array();
      for (const auto& x : o.outcomes) {
        json entry = {{"label", x.label}, {"effect", to_json(x.effect)}};
        if (x.value) entry["value"] = *x.value;
        outcomes.push_back(std::move(entry));
      }
      list.push_back({{"name", o.name}, {"outcomes", std::move(outcomes)}});
    }
    root["observables"] = std::move(list);
  }
  const auto named = [&](const char* key, const std::vector<NamedCoordinates>& from, const char* value_key) {
    if (from.empty()) return;
    json list = json::array();
    for (const auto& n : from) list.push_back({{"name", n.name}, {value_key, to_json(n.value)}});
    root[key] = std::move(list);
  };
  named("effects", p.effects, "effect");
  named("operators", p.operators, "matrix");

  if (!p.conditions.empty()) {
    json list = json::array();
    for (const auto& c : p.conditions) {
      json entry = {{"ref", c.ref}, {"type", c.type == ConditionType::Mean ? "mean" : "probability"}};
      if (c.outcome) entry["outcome"] = *c.outcome;
      entry["target"] = c.target;
      list.push_back(std::move(entry));
    }
    root["conditions"] = std::move(list);
  }
  if (!p.objective.name.empty() || !p.objective.measurements.empty()) {
    json objective = json::object();
    if (!p.objective.name.empty()) objective["name"] = p.objective.name;
    if (!p.objective.measurements.empty()) objective["measurements"] = p.objective.measurements;
    root["objective"] = std::move(objective);
  }
  if (p.solver.tolerance || p.solver.max_iterations || p.solver.seed) {
    json solver = json::object();
    if (p.solver.tolerance) solver["tolerance"] = *p.solver.tolerance;
    if (p.solver.max_iterations) solver["max_iterations"] = *p.solver.max_iterations;
    if (p.solver.seed) solver["seed"] = *p.solver.seed;
    root["solver"] = std::move(solver);
  }
  if (p.has_generators) {
    json list = json::array();
    for (const auto& g : p.generators) list.push_back(to_json(g));
    root["generators"] = std::move(list);
  }
  return write_json(root);
}

ModelPtr build_model(const ModelSection& section) {
  if (section.kind == "classical") return ModelSpace::classical(section.dimension);
  if (section.kind == "quantum") return ModelSpace::quantum(section.dimension);
  if (section.kind == "square_bit") return ModelSpace::square_bit();
  if (section.kind == "polytope") {
    if (section.unit) return ModelSpace::polytope(section.vertices, *section.unit);
    return ModelSpace::affine_polytope(section.vertices);
  }
  throw Error(ErrorCode::InvalidModel, fmt::format("unknown model kind \"{}\"", section.kind));
}

namespace {

Eigen::VectorXd functional_of(const ModelPtr& model, const Coordinates& c) {
  if (model->kind() == ModelKind::Quantum) {
    if (!c.matrix) throw Error(ErrorCode::DimensionMismatch, "quantum objects are matrices");
    if (c.matrix->rows() != model->dimension()) {
      throw Error(ErrorCode::DimensionMismatch,
                  fmt::format("{}x{} matrix for a {}-dimensional Hilbert space", c.matrix->rows(), c.matrix->cols(),
                              model->dimension()));
    }
    return model->coordinates(HermitianMatrix(*c.matrix));
  }
  if (c.vector.size() != model->ambient_dim()) {
    throw Error(ErrorCode::DimensionMismatch,
                fmt::format("{} coordinates, model needs {}", c.vector.size(), model->ambient_dim()));
  }
  return c.vector;
}

}  // namespace

Effect build_effect(const ModelPtr& model, const Coordinates& c) {
  return Effect::unchecked(model, functional_of(model, c));
}

State build_state(const ModelPtr& model, const Coordinates& c) {
  return State::unchecked(model, functional_of(model, c));
}

Observable build_observable(const ModelPtr& model, const ObservableSection& section) {
  std::vector<Outcome> outcomes;
  for (const auto& o : section.outcomes) outcomes.push_back(Outcome{o.label, build_effect(model, o.effect), o.value});
  return Observable::unchecked(model, std::move(outcomes));
}

BuiltProblem build_problem(const ProblemFile& file) {
  BuiltProblem out{build_model(file.model), {}, {}, ConvexRegion::whole_space(nullptr), std::nullopt, {}};
  out.region = ConvexRegion::whole_space(out.model);
  for (const auto& o : file.observables) out.observables.push_back(build_observable(out.model, o));
  for (const auto& e : file.effects) out.effects.emplace_back(e.name, build_effect(out.model, e.value));

  const auto find_observable = [&](const std::string& name) -> const Observable* {
    for (std::size_t i = 0; i < file.observables.size(); ++i) {
      if (file.observables[i].name == name) return &out.observables[i];
    }
    return nullptr;
  };

  for (std::size_t i = 0; i < file.conditions.size(); ++i) {
    const ConditionSection& c = file.conditions[i];
    const std::string path = fmt::format("$.conditions[{}]", i);
    ConvexRegion region = ConvexRegion::whole_space(out.model);
    if (c.type == ConditionType::Mean) {
      if (const Observable* o = find_observable(c.ref)) {
        region = region_from_mean(*o, c.target);
      } else {
        const auto op = std::find_if(file.operators.begin(), file.operators.end(),
                                     [&](const NamedCoordinates& n) { return n.name == c.ref; });
        if (op == file.operators.end()) schema_error(path + ".ref", fmt::format("no observable or operator \"{}\"", c.ref));
        region = ConvexRegion::from_constraints(
            out.model, {LinearConstraint::from_operator(out.model, HermitianMatrix(*op->value.matrix), c.target)});
      }
    } else {
      std::optional<Effect> effect;
      if (const Observable* o = find_observable(c.ref)) {
        if (!c.outcome) schema_error(path, "probability conditions on an observable need an \"outcome\"");
        const Outcome* outcome = o->find(*c.outcome);
        if (!outcome) schema_error(path + ".outcome", fmt::format("\"{}\" has no outcome \"{}\"", c.ref, *c.outcome));
        effect = outcome->effect;
      } else {
        for (const auto& [name, e] : out.effects) {
          if (name == c.ref) effect = e;
        }
        if (!effect) schema_error(path + ".ref", fmt::format("no effect or observable \"{}\"", c.ref));
      }
      region = region_from_effect(*effect, c.target);
    }
    out.region = meet(out.region, region);
  }

  if (file.has_generators) {
    std::vector<State> states;
    for (const auto& g : file.generators) states.push_back(build_state(out.model, g));
    out.region = meet(out.region, ConvexRegion::hull(out.model, std::move(states)));
  }

  const std::string& name = file.objective.name;
  if (name == "shannon") {
    out.objective = Objective::shannon();
  } else if (name == "von_neumann") {
    out.objective = Objective::von_neumann();
  } else if (name == "fiducial" || (name.empty() && !file.objective.measurements.empty())) {
    std::vector<Observable> measurements;
    for (const auto& m : file.objective.measurements) {
      const Observable* o = find_observable(m);
      if (!o) schema_error("$.objective.measurements", fmt::format("no observable \"{}\"", m));
      measurements.push_back(*o);
    }
    if (measurements.empty()) measurements = out.observables;
    if (!measurements.empty()) out.objective = Objective::fiducial(std::move(measurements));
  } else if (name.empty()) {
    if (out.model->kind() == ModelKind::Classical) out.objective = Objective::shannon();
    if (out.model->kind() == ModelKind::Quantum) out.objective = Objective::von_neumann();
    if (out.model->kind() == ModelKind::Polytope && !out.observables.empty()) {
      out.objective = Objective::fiducial(out.observables);
    }
  } else {
    schema_error("$.objective.name", fmt::format("unknown objective \"{}\"", name));
  }

  if (file.solver.tolerance) {
    out.solver.gradient_tolerance = *file.solver.tolerance;
    out.solver.frank_wolfe_gap = *file.solver.tolerance;
  }
  if (file.solver.max_iterations) {
    out.solver.max_iterations = *file.solver.max_iterations;
    out.solver.frank_wolfe_max_iterations = *file.solver.max_iterations;
  }
  return out;
}

Coordinates state_coordinates(const State& state) {
  Coordinates c;
  if (state.model().kind() == ModelKind::Quantum) {
    c.matrix = state.density_matrix().entries();
  } else {
    c.vector = state.coords();
  }
  return c;
}

SolutionReport make_report(const MaxEntSolution& solution, double wall_time_ms) {
  SolutionReport r;
  r.status = solution.status;
  if (solution.state) r.state = state_coordinates(*solution.state);
  r.multipliers = solution.multipliers;
  r.lambda0 = solution.lambda0;
  r.entropy = solution.entropy;
  r.residuals = solution.residuals;
  r.redundant = solution.redundant;
  r.iterations = solution.iterations;
  r.wall_time_ms = wall_time_ms;
  r.message = solution.message;
  return r;
}

bool SolutionReport::operator==(const SolutionReport& other) const {
  return status == other.status && state == other.state && same_entries(multipliers, other.multipliers) &&
         lambda0 == other.lambda0 && entropy == other.entropy && same_entries(residuals, other.residuals) &&
         redundant == other.redundant && iterations == other.iterations && wall_time_ms == other.wall_time_ms &&
         message == other.message;
}

std::string serialize_report(const SolutionReport& r) {
  json root = json::object();
  root["status"] = std::string(to_string(r.status));
  root["state"] = r.state ? to_json(*r.state) : json(nullptr);
  root["multipliers"] = to_json(r.multipliers);
  root["lambda0"] = r.lambda0 ? json(*r.lambda0) : json(nullptr);
  root["entropy"] = r.entropy;
  root["residuals"] = to_json(r.residuals);
  root["redundant"] = r.redundant;
  root["iterations"] = r.iterations;
  root["wall_time_ms"] = r.wall_time_ms;
  if (!r.message.empty()) root["message"] = r.message;
  return write_json(root);
}

SolutionReport parse_report(std::string_view source) {
  const json root = parse_json(source);
  SolutionReport r;
  const std::string status = text(field(root, "status", "$"), "$.status");
  bool known = false;
  for (SolveStatus s : {SolveStatus::Converged, SolveStatus::BoundaryOnly, SolveStatus::Infeasible, SolveStatus::NonConvergence}) {
    if (to_string(s) == status) {
      r.status = s;
      known = true;
    }
  }
  if (!known) schema_error("$.status", fmt::format("unknown status \"{}\"", status));
  if (const json* state = optional_field(root, "state")) {
    const bool matrix = state->is_array() && !state->empty() && (*state)[0].is_array();
    r.state = coordinates(*state, matrix, "$.state");
  }
  r.multipliers = real_vector(field(root, "multipliers", "$"), "$.multipliers");
  if (const json* l = optional_field(root, "lambda0")) r.lambda0 = number(*l, "$.lambda0");
  r.entropy = number(field(root, "entropy", "$"), "$.entropy");
  r.residuals = real_vector(field(root, "residuals", "$"), "$.residuals");
  for (const auto& x : array(field(root, "redundant", "$"), "$.redundant")) r.redundant.push_back(integer(x, "$.redundant"));
  r.iterations = integer(field(root, "iterations", "$"), "$.iterations");
  r.wall_time_ms = number(field(root, "wall_time_ms", "$"), "$.wall_time_ms");
  if (const json* m = optional_field(root, "message")) r.message = text(*m, "$.message");
  return r;
}

}  // namespace gmaxent
