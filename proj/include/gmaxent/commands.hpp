#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>

#include "gmaxent/maxent.hpp"

namespace gmaxent {

enum ExitCode : int {
  kExitOk = 0,
  kExitValidation = 1,
  kExitParse = 2,
  kExitInfeasible = 3,
  kExitBoundary = 4,
  kExitNonConvergence = 5,
  kExitUnsupportedRepresentation = 6,
  kExitOracleUnsupported = 7,
};

int exit_code(SolveStatus status);

struct CommandOptions {
  std::optional<double> tolerance;
  std::optional<int> max_iterations;
  std::optional<std::uint64_t> seed;
  std::optional<std::filesystem::path> output;
  double resolution = 1e-3;
  bool compare = false;
};

enum class LatticeOp { Meet, Join, Leq };

// Each command writes its report to `out` (or to options.output) and
// diagnostics to `err`, and returns the process exit code.
int cmd_validate(const std::filesystem::path& path, std::ostream& out, std::ostream& err,
                 const CommandOptions& options = {});
int cmd_solve(const std::filesystem::path& path, std::ostream& out, std::ostream& err,
              const CommandOptions& options = {});
// leq(a, b) is true when region a is contained in region b.
int cmd_lattice(LatticeOp op, const std::filesystem::path& a, const std::filesystem::path& b, std::ostream& out,
                std::ostream& err, const CommandOptions& options = {});
int cmd_oracle(const std::filesystem::path& path, std::ostream& out, std::ostream& err,
               const CommandOptions& options = {});

}  // namespace gmaxent
