#include "gmaxent/linear_program.hpp"

#include <algorithm>
#include <cmath>

#include "gmaxent/error.hpp"

namespace gmaxent::lp {
namespace {

constexpr double kPivotTolerance = 1e-9;
constexpr int kMaxPivots = 100000;

class Tableau {
 public:
  Tableau(Eigen::MatrixXd rows, std::vector<int> basis)
      : t_(std::move(rows)), basis_(std::move(basis)) {}

  Eigen::Index rows() const { return t_.rows(); }
  Eigen::Index columns() const { return t_.cols() - 1; }
  double rhs(Eigen::Index i) const { return t_(i, t_.cols() - 1); }
  double objective() const { return -reduced_(reduced_.size() - 1); }
  const std::vector<int>& basis() const { return basis_; }
  double at(Eigen::Index i, Eigen::Index j) const { return t_(i, j); }

  void set_costs(const Eigen::VectorXd& c) {
    reduced_ = Eigen::RowVectorXd::Zero(t_.cols());
    reduced_.head(c.size()) = c.transpose();
    for (Eigen::Index i = 0; i < rows(); ++i) {
      const double cb = basis_[i] < c.size() ? c(basis_[i]) : 0.0;
      if (cb != 0.0) reduced_ -= cb * t_.row(i);
    }
  }

  void pivot(Eigen::Index row, Eigen::Index col) {
    t_.row(row) /= t_(row, col);
    for (Eigen::Index i = 0; i < rows(); ++i) {
      if (i != row && t_(i, col) != 0.0) t_.row(i) -= t_(i, col) * t_.row(row);
    }
    if (reduced_(col) != 0.0) reduced_ -= reduced_(col) * t_.row(row);
    basis_[row] = static_cast<int>(col);
  }

  // Returns false when unbounded.
  bool optimize(Eigen::Index allowed_columns) {
    for (int iteration = 0; iteration < kMaxPivots; ++iteration) {
      Eigen::Index entering = -1;
      for (Eigen::Index j = 0; j < allowed_columns; ++j) {
        if (reduced_(j) > kPivotTolerance) {
          entering = j;
          break;
        }
      }
      if (entering < 0) return true;

      Eigen::Index leaving = -1;
      double best_ratio = 0.0;
      for (Eigen::Index i = 0; i < rows(); ++i) {
        if (t_(i, entering) <= kPivotTolerance) continue;
        const double ratio = rhs(i) / t_(i, entering);
        if (leaving < 0 || ratio < best_ratio - 1e-12 ||
            (ratio <= best_ratio + 1e-12 && basis_[i] < basis_[leaving])) {
          leaving = i;
          best_ratio = ratio;
        }
      }
      if (leaving < 0) return false;
      pivot(leaving, entering);
    }
    throw Error(ErrorCode::NumericalFailure, "simplex pivot budget exhausted");
  }

  void drop_row(Eigen::Index row) {
    const Eigen::Index last = rows() - 1;
    if (row != last) {
      t_.row(row) = t_.row(last);
      basis_[row] = basis_[last];
    }
    t_.conservativeResize(last, Eigen::NoChange);
    basis_.pop_back();
  }

  // Removes columns [from, to) keeping the right-hand side.
  void drop_columns(Eigen::Index from, Eigen::Index to) {
    const Eigen::Index width = t_.cols();
    Eigen::MatrixXd kept(t_.rows(), width - (to - from));
    kept.leftCols(from) = t_.leftCols(from);
    kept.rightCols(width - to) = t_.rightCols(width - to);
    t_ = std::move(kept);
  }

  Eigen::VectorXd solution(Eigen::Index n) const {
    Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
    for (Eigen::Index i = 0; i < rows(); ++i) {
      if (basis_[i] < n) x(basis_[i]) = std::max(0.0, rhs(i));
    }
    return x;
  }

 private:
  Eigen::MatrixXd t_;
  Eigen::RowVectorXd reduced_;
  std::vector<int> basis_;
};

struct PhaseOne {
  std::optional<Tableau> tableau;
  double infeasibility = 0.0;
};

PhaseOne run_phase_one(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, double tolerance) {
  const Eigen::Index m = a.rows();
  const Eigen::Index n = a.cols();
  if (b.size() != m) throw Error(ErrorCode::DimensionMismatch, "LP right-hand side length differs");

  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m, n + m + 1);
  std::vector<int> basis(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const double sign = b(i) < 0 ? -1.0 : 1.0;
    t.row(i).head(n) = sign * a.row(i);
    t(i, n + i) = 1.0;
    t(i, n + m) = sign * b(i);
    basis[i] = static_cast<int>(n + i);
  }

  Tableau tableau(std::move(t), std::move(basis));
  Eigen::VectorXd cost = Eigen::VectorXd::Zero(n + m);
  cost.tail(m).setConstant(-1.0);
  tableau.set_costs(cost);
  tableau.optimize(n + m);

  PhaseOne out;
  out.infeasibility = -tableau.objective();
  if (out.infeasibility > tolerance * (1.0 + b.cwiseAbs().maxCoeff())) return out;

  // Drive remaining artificials out of the basis; rows where that is
  // impossible are linearly dependent on the others.
  for (Eigen::Index i = tableau.rows() - 1; i >= 0; --i) {
    if (tableau.basis()[i] < n) continue;
    Eigen::Index col = -1;
    double best = kPivotTolerance;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (std::abs(tableau.at(i, j)) > best) {
        best = std::abs(tableau.at(i, j));
        col = j;
      }
    }
    if (col >= 0) {
      tableau.pivot(i, col);
    } else {
      tableau.drop_row(i);
    }
  }
  tableau.drop_columns(n, n + m);
  out.tableau = std::move(tableau);
  return out;
}

}  // namespace

LpResult maximize(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, const Eigen::VectorXd& c,
                  double feasibility_tolerance) {
  if (c.size() != a.cols()) throw Error(ErrorCode::DimensionMismatch, "LP cost length differs");
  PhaseOne phase = run_phase_one(a, b, feasibility_tolerance);
  LpResult result;
  result.infeasibility = phase.infeasibility;
  if (!phase.tableau) {
    result.status = LpStatus::Infeasible;
    return result;
  }
  Tableau& tableau = *phase.tableau;
  tableau.set_costs(c);
  if (!tableau.optimize(a.cols())) {
    result.status = LpStatus::Unbounded;
    return result;
  }
  result.status = LpStatus::Optimal;
  result.solution = tableau.solution(a.cols());
  result.objective = c.dot(result.solution);
  return result;
}

std::optional<Eigen::VectorXd> feasible_point(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                                              double feasibility_tolerance) {
  PhaseOne phase = run_phase_one(a, b, feasibility_tolerance);
  if (!phase.tableau) return std::nullopt;
  return phase.tableau->solution(a.cols());
}

RowSelection select_independent_rows(const Eigen::MatrixXd& rows, const Eigen::VectorXd& targets,
                                     double pivot_tolerance, double consistency_tolerance) {
  RowSelection out;
  std::vector<Eigen::VectorXd> basis;  // orthonormal functional directions
  std::vector<double> basis_targets;   // targets carried through the same reduction
  for (Eigen::Index i = 0; i < rows.rows(); ++i) {
    const double norm = rows.row(i).norm();
    if (norm == 0.0) {
      (std::abs(targets(i)) <= consistency_tolerance ? out.redundant : out.inconsistent)
          .push_back(static_cast<int>(i));
      continue;
    }
    Eigen::VectorXd v = rows.row(i).transpose() / norm;
    double target = targets(i) / norm;
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t k = 0; k < basis.size(); ++k) {
        const double coefficient = basis[k].dot(v);
        v -= coefficient * basis[k];
        target -= coefficient * basis_targets[k];
      }
    }
    const double residual = v.norm();
    if (residual <= pivot_tolerance) {
      (std::abs(target) <= consistency_tolerance ? out.redundant : out.inconsistent)
          .push_back(static_cast<int>(i));
      continue;
    }
    basis.push_back(v / residual);
    basis_targets.push_back(target / residual);
    out.independent.push_back(static_cast<int>(i));
  }
  return out;
}

std::vector<Eigen::VectorXd> basic_feasible_solutions(const Eigen::MatrixXd& a,
                                                      const Eigen::VectorXd& b,
                                                      double dedup_tolerance) {
  const RowSelection selection = select_independent_rows(a, b);
  if (!selection.inconsistent.empty()) return {};
  const int r = static_cast<int>(selection.independent.size());
  const int n = static_cast<int>(a.cols());
  std::vector<Eigen::VectorXd> vertices;
  if (r == 0 || r > n) return vertices;

  Eigen::MatrixXd reduced(r, n);
  Eigen::VectorXd rhs(r);
  for (int i = 0; i < r; ++i) {
    reduced.row(i) = a.row(selection.independent[i]);
    rhs(i) = b(selection.independent[i]);
  }

  std::vector<int> subset(r);
  for (int i = 0; i < r; ++i) subset[i] = i;
  Eigen::MatrixXd square(r, r);
  while (true) {
    for (int k = 0; k < r; ++k) square.col(k) = reduced.col(subset[k]);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(square);
    lu.setThreshold(1e-10);
    if (lu.rank() == r) {
      const Eigen::VectorXd w = lu.solve(rhs);
      if (w.minCoeff() >= -1e-10 && (square * w - rhs).cwiseAbs().maxCoeff() <= 1e-9) {
        Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
        for (int k = 0; k < r; ++k) x(subset[k]) = std::max(0.0, w(k));
        const bool duplicate = std::any_of(vertices.begin(), vertices.end(), [&](const Eigen::VectorXd& v) {
          return (v - x).cwiseAbs().maxCoeff() < dedup_tolerance;
        });
        if (!duplicate) vertices.push_back(std::move(x));
      }
    }
    // next combination in lexicographic order
    int k = r - 1;
    while (k >= 0 && subset[k] == n - r + k) --k;
    if (k < 0) break;
    ++subset[k];
    for (int j = k + 1; j < r; ++j) subset[j] = subset[j - 1] + 1;
  }
  return vertices;
}

}  // namespace gmaxent::lp
