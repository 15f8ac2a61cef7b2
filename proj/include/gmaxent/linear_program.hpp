#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

namespace gmaxent::lp {

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpResult {
  LpStatus status = LpStatus::Infeasible;
  Eigen::VectorXd solution;
  double objective = 0.0;
  // Sum of Phase-I artificials at the end of Phase I.
  double infeasibility = 0.0;
};

// maximize c.x subject to A x = b, x >= 0. Dense two-phase tableau simplex
// with Bland's rule, so degenerate problems terminate.
LpResult maximize(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, const Eigen::VectorXd& c,
                  double feasibility_tolerance = 1e-8);

// Phase I only: some x >= 0 with A x = b, if one exists.
std::optional<Eigen::VectorXd> feasible_point(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                                              double feasibility_tolerance = 1e-8);

struct RowSelection {
  std::vector<int> independent;
  std::vector<int> redundant;     // implied by earlier rows, consistent target
  std::vector<int> inconsistent;  // implied functional, conflicting target
};

// Scans rows in order, keeping each one that is linearly independent of the
// rows kept so far. Rows are normalized before the pivot test.
RowSelection select_independent_rows(const Eigen::MatrixXd& rows, const Eigen::VectorXd& targets,
                                     double pivot_tolerance = 1e-10,
                                     double consistency_tolerance = 1e-9);

// All basic feasible solutions of {x >= 0 : A x = b}, i.e. the vertices of
// the polytope in weight space. Duplicates (max-norm < dedup) are removed.
std::vector<Eigen::VectorXd> basic_feasible_solutions(const Eigen::MatrixXd& a,
                                                      const Eigen::VectorXd& b,
                                                      double dedup_tolerance = 1e-8);

}  // namespace gmaxent::lp
