#include "gmaxent/commands.hpp"

#include <chrono>
#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "gmaxent/error.hpp"
#include "gmaxent/log.hpp"
#include "gmaxent/problem_file.hpp"
#include "json_io.hpp"

namespace gmaxent {

using json = nlohmann::json;

namespace {

int code_for(const Error& e) {
  switch (e.code()) {
    case ErrorCode::ParseError: return kExitParse;
    case ErrorCode::UnsupportedRepresentation: return kExitUnsupportedRepresentation;
    default: return kExitValidation;
  }
}

// Runs a command body and maps library errors to exit codes.
template <typename F>
int guarded(std::ostream& err, F&& body) {
  try {
    return body();
  } catch (const Error& e) {
    fmt::print(err, "error ({}): {}\n", to_string(e.code()), e.what());
    return code_for(e);
  }
}

void emit(const std::string& text, std::ostream& out, const CommandOptions& options) {
  if (!options.output) {
    out << text;
    return;
  }
  std::ofstream file(*options.output, std::ios::binary);
  if (!file) throw Error(ErrorCode::ParseError, fmt::format("cannot write {}", options.output->string()));
  file << text;
}

ProblemFile load_with_overrides(const std::filesystem::path& path, const CommandOptions& options) {
  ProblemFile file = load_problem(path);
  if (options.tolerance) file.solver.tolerance = options.tolerance;
  if (options.max_iterations) file.solver.max_iterations = options.max_iterations;
  if (options.seed) file.solver.seed = options.seed;
  return file;
}

// Rejects invalid observables and effects before anything is solved.
void require_valid(const BuiltProblem& built) {
  for (const auto& o : built.observables) (void)Observable(o.model_ptr(), o.outcomes());
  for (const auto& [name, e] : built.effects) (void)Effect(e.model_ptr(), e.functional());
}

MaxEntProblem problem_of(const BuiltProblem& built) {
  if (!built.objective) {
    throw Error(ErrorCode::IncompatibleObjective,
                fmt::format("{} has no default objective; name one", built.model->describe()));
  }
  return make_problem(built.region, *built.objective);
}

json region_json(const ConvexRegion& region) {
  json r = json::object();
  json constraints = json::array();
  for (const auto& c : region.constraints()) {
    constraints.push_back({{"functional", detail::to_json(c.functional())}, {"target", c.target()}});
  }
  r["constraints"] = std::move(constraints);
  if (region.generators()) {
    json generators = json::array();
    for (const auto& g : *region.generators()) generators.push_back(detail::to_json(state_coordinates(g)));
    r["generators"] = std::move(generators);
  } else {
    r["generators"] = nullptr;
  }
  r["duplicates_removed"] = region.duplicates_removed();
  r["contradictory"] = region.contradictory();
  return r;
}

}  // namespace

int exit_code(SolveStatus status) {
  switch (status) {
    case SolveStatus::Converged: return kExitOk;
    case SolveStatus::Infeasible: return kExitInfeasible;
    case SolveStatus::BoundaryOnly: return kExitBoundary;
    case SolveStatus::NonConvergence: return kExitNonConvergence;
  }
  return kExitNonConvergence;
}

int cmd_validate(const std::filesystem::path& path, std::ostream& out, std::ostream& err,
                 const CommandOptions& options) {
  return guarded(err, [&] {
    const ProblemFile file = load_problem(path);
    std::ostringstream report;
    bool ok = true;
    const auto line = [&](bool pass, const std::string& what, const std::string& detail) {
      ok = ok && pass;
      fmt::print(report, "{} {}{}\n", pass ? "PASS" : "FAIL", what, detail.empty() ? "" : ": " + detail);
    };

    ModelPtr model;
    try {
      model = build_model(file.model);
      line(true, "model", model->describe());
    } catch (const Error& e) {
      line(false, "model", e.what());
      emit(report.str(), out, options);
      return static_cast<int>(kExitValidation);
    }

    for (const auto& section : file.observables) {
      const std::string what = fmt::format("observable {}", section.name);
      try {
        const PovmReport r = validate_povm(build_observable(model, section));
        std::string detail = fmt::format("completeness residual {}", format_number(r.completeness_residual));
        for (const auto& v : r.violations) {
          switch (v.kind) {
            case PovmViolationKind::Completeness: detail += "; effects do not sum to the unit"; break;
            case PovmViolationKind::Negative:
              detail += fmt::format("; outcome {} negative by {}", v.outcome, format_number(v.magnitude));
              break;
            case PovmViolationKind::ExceedsUnit:
              detail += fmt::format("; outcome {} exceeds the unit by {}", v.outcome, format_number(v.magnitude));
              break;
            case PovmViolationKind::ModelMismatch: detail += fmt::format("; outcome {} on another model", v.outcome); break;
          }
        }
        line(r.valid(), what, detail);
      } catch (const Error& e) {
        line(false, what, e.what());
      }
    }
    for (const auto& section : file.effects) {
      const std::string what = fmt::format("effect {}", section.name);
      try {
        const Effect e = build_effect(model, section.value);
        const EffectRange range = e.range();
        const bool pass = range.min >= -ModelConfig{}.effect_tolerance && range.max <= 1.0 + ModelConfig{}.effect_tolerance;
        line(pass, what, fmt::format("range [{}, {}]", format_number(range.min), format_number(range.max)));
      } catch (const Error& e) {
        line(false, what, e.what());
      }
    }
    for (std::size_t i = 0; i < file.generators.size(); ++i) {
      const std::string what = fmt::format("generator {}", i);
      try {
        const State s = build_state(model, file.generators[i]);
        const auto violation = state_violation(*model, s.coords());
        line(!violation, what, violation.value_or(""));
      } catch (const Error& e) {
        line(false, what, e.what());
      }
    }
    if (!file.conditions.empty() || file.has_generators) {
      try {
        const BuiltProblem built = build_problem(file);
        line(true, "conditions", fmt::format("{} constraints", built.region.constraints().size()));
      } catch (const Error& e) {
        if (e.code() == ErrorCode::ParseError) throw;
        line(false, "conditions", e.what());
      }
    }
    emit(report.str(), out, options);
    return static_cast<int>(ok ? kExitOk : kExitValidation);
  });
}

int cmd_solve(const std::filesystem::path& path, std::ostream& out, std::ostream& err,
              const CommandOptions& options) {
  return guarded(err, [&] {
    const BuiltProblem built = build_problem(load_with_overrides(path, options));
    require_valid(built);
    const MaxEntProblem problem = problem_of(built);
    const auto start = std::chrono::steady_clock::now();
    const MaxEntSolution solution = solve(problem, built.solver);
    const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    log::info("{}: {} after {} iterations", path.filename().string(), to_string(solution.status), solution.iterations);
    emit(serialize_report(make_report(solution, ms)), out, options);
    return exit_code(solution.status);
  });
}

int cmd_lattice(LatticeOp op, const std::filesystem::path& a, const std::filesystem::path& b, std::ostream& out,
                std::ostream& err, const CommandOptions& options) {
  return guarded(err, [&] {
    const BuiltProblem left = build_problem(load_problem(a));
    const BuiltProblem right = build_problem(load_problem(b));
    require_valid(left);
    require_valid(right);
    json report = json::object();
    switch (op) {
      case LatticeOp::Meet:
        report["op"] = "meet";
        report["region"] = region_json(meet(left.region, right.region));
        break;
      case LatticeOp::Join:
        report["op"] = "join";
        report["region"] = region_json(join(left.region, right.region));
        break;
      case LatticeOp::Leq:
        report["op"] = "leq";
        report["result"] = includes(right.region, left.region);
        break;
    }
    emit(detail::write_json(report), out, options);
    return static_cast<int>(kExitOk);
  });
}

int cmd_oracle(const std::filesystem::path& path, std::ostream& out, std::ostream& err,
               const CommandOptions& options) {
  return guarded(err, [&] {
    const BuiltProblem built = build_problem(load_with_overrides(path, options));
    require_valid(built);
    const MaxEntProblem problem = problem_of(built);
    OracleResult oracle;
    try {
      oracle = oracle_maxent(problem, options.resolution);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::Unsupported) throw;
      fmt::print(err, "error ({}): {}\n", to_string(e.code()), e.what());
      return static_cast<int>(kExitOracleUnsupported);
    }
    json report = json::object();
    report["status"] = std::string(to_string(oracle.status));
    report["resolution"] = options.resolution;
    report["entropy"] = oracle.entropy;
    report["state"] = oracle.state ? detail::to_json(state_coordinates(*oracle.state)) : json(nullptr);
    report["grid_points"] = oracle.grid_points;
    report["feasible_points"] = oracle.feasible_points;
    if (options.compare) {
      const MaxEntSolution solution = solve(problem, built.solver);
      report["solver_status"] = std::string(to_string(solution.status));
      report["solver_entropy"] = solution.entropy;
      report["delta"] = solution.entropy - oracle.entropy;
    }
    emit(detail::write_json(report), out, options);
    return exit_code(oracle.status);
  });
}

}  // namespace gmaxent
