#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "gmaxent/error.hpp"
#include "gmaxent/maxent.hpp"

namespace gmaxent {

namespace {

enum class Shape { Simplex, Ball, Interval, Polygon, Tetrahedron };

// States x(t) = origin + basis * t for t in a box, subject to a shape test.
struct Parametrization {
  Eigen::VectorXd origin;
  Eigen::MatrixXd basis;
  Eigen::VectorXd lo;
  Eigen::VectorXd hi;
  Shape shape = Shape::Simplex;
  // Polygon: outward half-planes n.t <= c; Tetrahedron: inverse of the
  // barycentric map, rows act on (t - vertex 0).
  Eigen::MatrixXd normals;
  Eigen::VectorXd offsets;
};

Parametrization classical(const ModelSpace& model) {
  const int d = model.dimension();
  Parametrization p;
  p.origin = Eigen::VectorXd::Unit(d, d - 1);
  p.basis = Eigen::MatrixXd::Zero(d, d - 1);
  for (int i = 0; i < d - 1; ++i) {
    p.basis(i, i) = 1.0;
    p.basis(d - 1, i) = -1.0;
  }
  p.lo = Eigen::VectorXd::Zero(d - 1);
  p.hi = Eigen::VectorXd::Ones(d - 1);
  p.shape = Shape::Simplex;
  return p;
}

HermitianMatrix pauli(int axis) {
  Eigen::Matrix2cd m;
  switch (axis) {
    case 0: m << 0, 1, 1, 0; break;
    case 1: m << 0, Complex(0, -1), Complex(0, 1), 0; break;
    default: m << 1, 0, 0, -1; break;
  }
  return HermitianMatrix(m);
}

Parametrization bloch(const ModelSpace& model) {
  Parametrization p;
  p.origin = model.coordinates(HermitianMatrix::identity(2) * 0.5);
  p.basis.resize(model.ambient_dim(), 3);
  for (int axis = 0; axis < 3; ++axis) p.basis.col(axis) = model.coordinates(pauli(axis) * 0.5);
  p.lo = Eigen::VectorXd::Constant(3, -1.0);
  p.hi = Eigen::VectorXd::Constant(3, 1.0);
  p.shape = Shape::Ball;
  return p;
}

// Convex hull of planar points, counter-clockwise (monotone chain).
std::vector<Eigen::Vector2d> hull_2d(std::vector<Eigen::Vector2d> points) {
  std::sort(points.begin(), points.end(), [](const auto& a, const auto& b) {
    return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
  });
  const auto cross = [](const Eigen::Vector2d& o, const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
    return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
  };
  std::vector<Eigen::Vector2d> hull(2 * points.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], points[i]) <= 0) --k;
    hull[k++] = points[i];
  }
  for (std::size_t i = points.size() - 1, t = k + 1; i > 0; --i) {
    while (k >= t && cross(hull[k - 2], hull[k - 1], points[i - 1]) <= 0) --k;
    hull[k++] = points[i - 1];
  }
  hull.resize(k - 1);
  return hull;
}

Parametrization polytope(const ModelSpace& model) {
  const Eigen::MatrixXd& v = model.generators();
  const Eigen::VectorXd centroid = v.rowwise().mean();
  const Eigen::MatrixXd centered = v.colwise() - centroid;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(centered, Eigen::ComputeThinU);
  const double top = svd.singularValues()(0);
  int rank = 0;
  while (rank < svd.singularValues().size() && svd.singularValues()(rank) > 1e-10 * std::max(top, 1.0)) ++rank;

  Parametrization p;
  p.origin = centroid;
  p.basis = svd.matrixU().leftCols(rank);
  const Eigen::MatrixXd t = p.basis.transpose() * centered;  // rank x vertices
  p.lo = t.rowwise().minCoeff();
  p.hi = t.rowwise().maxCoeff();
  if (rank == 1) {
    p.shape = Shape::Interval;
  } else if (rank == 2) {
    std::vector<Eigen::Vector2d> points;
    for (Eigen::Index j = 0; j < t.cols(); ++j) points.emplace_back(t(0, j), t(1, j));
    const auto hull = hull_2d(points);
    p.shape = Shape::Polygon;
    p.normals.resize(static_cast<Eigen::Index>(hull.size()), 2);
    p.offsets.resize(static_cast<Eigen::Index>(hull.size()));
    for (std::size_t i = 0; i < hull.size(); ++i) {
      const Eigen::Vector2d edge = hull[(i + 1) % hull.size()] - hull[i];
      const Eigen::Vector2d normal(edge.y(), -edge.x());
      p.normals.row(static_cast<Eigen::Index>(i)) = normal.transpose();
      p.offsets(static_cast<Eigen::Index>(i)) = normal.dot(hull[i]);
    }
  } else if (rank == 3) {
    // Four affinely independent vertices: a tetrahedron.
    p.shape = Shape::Tetrahedron;
    Eigen::Matrix3d edges;
    for (int j = 0; j < 3; ++j) edges.col(j) = t.col(j + 1) - t.col(0);
    p.normals = edges.inverse();
    p.offsets = t.col(0);
  } else {
    p.shape = Shape::Interval;
  }
  return p;
}

Parametrization parametrize(const ModelSpace& model) {
  switch (model.kind()) {
    case ModelKind::Classical:
      if (model.dimension() <= 4) return classical(model);
      break;
    case ModelKind::Quantum:
      if (model.dimension() == 2) return bloch(model);
      break;
    case ModelKind::Polytope:
      if (model.dimension() <= 4) return polytope(model);
      break;
  }
  throw Error(ErrorCode::Unsupported,
              fmt::format("the grid oracle covers Classical(d <= 4), Quantum(2) and polytopes with at most 4 "
                          "vertices, not {}",
                          model.describe()));
}

bool inside(const Parametrization& p, const Eigen::VectorXd& t, double slack) {
  for (Eigen::Index i = 0; i < t.size(); ++i) {
    if (t(i) < p.lo(i) - slack || t(i) > p.hi(i) + slack) return false;
  }
  switch (p.shape) {
    case Shape::Simplex: return t.sum() <= 1.0 + slack;
    case Shape::Ball: return t.squaredNorm() <= 1.0 + slack;
    case Shape::Interval: return true;
    case Shape::Polygon: return ((p.normals * t - p.offsets).array() <= slack).all();
    case Shape::Tetrahedron: {
      const Eigen::Vector3d w = p.normals * (t - p.offsets);
      return w.minCoeff() >= -slack && w.sum() <= 1.0 + slack;
    }
  }
  return false;
}

// Reduced row echelon form of [c | e] with full pivoting. Pivot variables
// are expressed through the free ones; an inconsistent system returns false.
struct Elimination {
  std::vector<int> pivots;
  std::vector<int> free;
  Eigen::MatrixXd coefficients;  // pivot row r: t_pivot = rhs(r) - coefficients.row(r) . t_free
  Eigen::VectorXd rhs;
};

std::optional<Elimination> eliminate(Eigen::MatrixXd c, Eigen::VectorXd e) {
  const Eigen::Index rows = c.rows();
  const Eigen::Index cols = c.cols();
  const double scale = std::max(1.0, rows > 0 ? c.cwiseAbs().maxCoeff() : 0.0);
  std::vector<bool> used(static_cast<std::size_t>(cols), false);
  Elimination out;
  Eigen::Index row = 0;
  while (row < rows) {
    double best = 0.0;
    Eigen::Index bi = -1;
    Eigen::Index bj = -1;
    for (Eigen::Index i = row; i < rows; ++i) {
      for (Eigen::Index j = 0; j < cols; ++j) {
        if (!used[static_cast<std::size_t>(j)] && std::abs(c(i, j)) > best) {
          best = std::abs(c(i, j));
          bi = i;
          bj = j;
        }
      }
    }
    if (best <= 1e-10 * scale) break;
    c.row(row).swap(c.row(bi));
    std::swap(e(row), e(bi));
    const double pivot = c(row, bj);
    c.row(row) /= pivot;
    e(row) /= pivot;
    for (Eigen::Index i = 0; i < rows; ++i) {
      if (i == row) continue;
      const double factor = c(i, bj);
      c.row(i) -= factor * c.row(row);
      e(i) -= factor * e(row);
    }
    used[static_cast<std::size_t>(bj)] = true;
    out.pivots.push_back(static_cast<int>(bj));
    ++row;
  }
  for (Eigen::Index i = row; i < rows; ++i) {
    if (std::abs(e(i)) > 1e-9 * scale) return std::nullopt;
  }
  for (Eigen::Index j = 0; j < cols; ++j) {
    if (!used[static_cast<std::size_t>(j)]) out.free.push_back(static_cast<int>(j));
  }
  const auto rank = static_cast<Eigen::Index>(out.pivots.size());
  out.coefficients.resize(rank, static_cast<Eigen::Index>(out.free.size()));
  for (Eigen::Index r = 0; r < rank; ++r) {
    for (std::size_t f = 0; f < out.free.size(); ++f) {
      out.coefficients(r, static_cast<Eigen::Index>(f)) = c(r, out.free[f]);
    }
  }
  out.rhs = e.head(rank);
  return out;
}

double binary_entropy_of_radius(double radius) {
  const double p = 0.5 * (1.0 + std::min(radius, 1.0));
  const double q = 1.0 - p;
  return -(p > 0.0 ? p * std::log(p) : 0.0) - (q > 0.0 ? q * std::log(q) : 0.0);
}

}  // namespace

OracleResult oracle_maxent(const MaxEntProblem& problem, double resolution, const OracleConfig& config) {
  if (!(resolution > 0.0)) throw Error(ErrorCode::InvalidTarget, "oracle resolution must be positive");
  if (problem.region.has_generators()) {
    throw Error(ErrorCode::Unsupported, "the grid oracle works on constraint regions only");
  }
  const ModelSpace& model = *problem.model;
  const Parametrization p = parametrize(model);
  OracleResult out;
  if (problem.region.contradictory()) return out;

  const auto& constraints = problem.region.constraints();
  const auto k = static_cast<Eigen::Index>(constraints.size());
  const Eigen::Index dims = p.basis.cols();
  Eigen::MatrixXd c(k, dims);
  Eigen::VectorXd e(k);
  for (Eigen::Index i = 0; i < k; ++i) {
    const auto& f = constraints[static_cast<std::size_t>(i)].functional();
    c.row(i) = f.transpose() * p.basis;
    e(i) = constraints[static_cast<std::size_t>(i)].target() - f.dot(p.origin);
  }
  const auto elimination = eliminate(c, e);
  if (!elimination) return out;

  const auto& free = elimination->free;
  std::vector<long long> steps(free.size());
  std::vector<double> spacing(free.size());
  double total = 1.0;
  for (std::size_t f = 0; f < free.size(); ++f) {
    const double width = p.hi(free[f]) - p.lo(free[f]);
    steps[f] = std::max<long long>(1, static_cast<long long>(std::ceil(width / resolution - 1e-9)));
    spacing[f] = width / static_cast<double>(steps[f]);
    total *= static_cast<double>(steps[f] + 1);
  }
  if (total > config.max_grid_points) {
    throw Error(ErrorCode::Unsupported,
                fmt::format("{:.3g} grid points at resolution {} exceed the budget of {:.3g}", total, resolution,
                            config.max_grid_points));
  }

  const bool bloch_entropy =
      model.kind() == ModelKind::Quantum && problem.objective.kind() == ObjectiveKind::VonNeumann;
  const bool shannon = problem.objective.kind() == ObjectiveKind::Shannon;
  Eigen::VectorXd t(dims);
  Eigen::VectorXd x(model.ambient_dim());
  Eigen::VectorXd best_x;
  double best = -std::numeric_limits<double>::infinity();
  std::vector<long long> index(free.size(), 0);
  const auto rank = static_cast<Eigen::Index>(elimination->pivots.size());

  while (true) {
    ++out.grid_points;
    for (std::size_t f = 0; f < free.size(); ++f) {
      t(free[f]) = p.lo(free[f]) + static_cast<double>(index[f]) * spacing[f];
    }
    for (Eigen::Index r = 0; r < rank; ++r) {
      double value = elimination->rhs(r);
      for (std::size_t f = 0; f < free.size(); ++f) {
        value -= elimination->coefficients(r, static_cast<Eigen::Index>(f)) * t(free[f]);
      }
      t(elimination->pivots[static_cast<std::size_t>(r)]) = value;
    }
    if (inside(p, t, config.membership_slack)) {
      ++out.feasible_points;
      x.noalias() = p.origin + p.basis * t;
      double h = 0.0;
      if (bloch_entropy) {
        h = binary_entropy_of_radius(t.norm());
      } else if (shannon) {
        for (Eigen::Index i = 0; i < x.size(); ++i) {
          const double q = std::max(x(i), 0.0);
          if (q > 0.0) h -= q * std::log(q);
        }
      } else {
        h = problem.objective.value(model, x);
      }
      if (h > best) {
        best = h;
        best_x = x;
      }
    }
    std::size_t f = 0;
    while (f < free.size() && ++index[f] > steps[f]) index[f++] = 0;
    if (f == free.size()) break;
  }

  if (out.feasible_points == 0) return out;
  out.status = SolveStatus::Converged;
  out.entropy = best;
  out.state = State::unchecked(problem.model, best_x);
  return out;
}

}  // namespace gmaxent
