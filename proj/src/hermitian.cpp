#include "gmaxent/hermitian.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include <fmt/format.h>

#include "gmaxent/error.hpp"

namespace gmaxent {

HermitianMatrix::HermitianMatrix(const Eigen::MatrixXcd& entries, const HermitianConfig& config) {
  if (entries.rows() < 1 || entries.rows() != entries.cols()) {
    throw Error(ErrorCode::DimensionMismatch,
                fmt::format("Hermitian matrix must be square and non-empty, got {}x{}",
                            entries.rows(), entries.cols()));
  }
  const double asymmetry = (entries - entries.adjoint()).cwiseAbs().maxCoeff();
  if (asymmetry > config.hermiticity_tolerance) {
    throw Error(ErrorCode::NotHermitian,
                fmt::format("matrix deviates from its adjoint by {:.3e}", asymmetry));
  }
  entries_ = 0.5 * (entries + entries.adjoint());
}

HermitianMatrix HermitianMatrix::symmetrized(const Eigen::MatrixXcd& entries) {
  return HermitianMatrix(Trusted{}, 0.5 * (entries + entries.adjoint()));
}

HermitianMatrix HermitianMatrix::zero(int dim) {
  return HermitianMatrix(Trusted{}, Eigen::MatrixXcd::Zero(dim, dim));
}

HermitianMatrix HermitianMatrix::identity(int dim) {
  return HermitianMatrix(Trusted{}, Eigen::MatrixXcd::Identity(dim, dim));
}

HermitianMatrix HermitianMatrix::diagonal(std::span<const double> values) {
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(values.size(), values.size());
  for (std::size_t i = 0; i < values.size(); ++i) m(i, i) = values[i];
  return HermitianMatrix(Trusted{}, std::move(m));
}

HermitianMatrix HermitianMatrix::diagonal(std::initializer_list<double> values) {
  return diagonal(std::span<const double>(values.begin(), values.size()));
}

HermitianMatrix HermitianMatrix::from_real(const Eigen::MatrixXd& entries,
                                           const HermitianConfig& config) {
  return HermitianMatrix(entries.cast<Complex>(), config);
}

double HermitianMatrix::trace_product(const HermitianMatrix& other) const {
  // tr(AB) = sum_ij A_ij B_ji = sum_ij A_ij conj(B_ij)
  return entries_.cwiseProduct(other.entries_.conjugate()).sum().real();
}

double HermitianMatrix::max_abs() const { return entries_.cwiseAbs().maxCoeff(); }

HermitianMatrix HermitianMatrix::operator+(const HermitianMatrix& other) const {
  if (dim() != other.dim()) throw Error(ErrorCode::DimensionMismatch, "matrix dimensions differ");
  return HermitianMatrix(Trusted{}, entries_ + other.entries_);
}

HermitianMatrix HermitianMatrix::operator-(const HermitianMatrix& other) const {
  if (dim() != other.dim()) throw Error(ErrorCode::DimensionMismatch, "matrix dimensions differ");
  return HermitianMatrix(Trusted{}, entries_ - other.entries_);
}

HermitianMatrix HermitianMatrix::operator-() const { return HermitianMatrix(Trusted{}, -entries_); }

HermitianMatrix HermitianMatrix::operator*(double scale) const {
  return HermitianMatrix(Trusted{}, scale * entries_);
}

HermitianMatrix EigenDecomposition::apply(const std::function<double(double)>& f) const {
  Eigen::VectorXd mapped(values.size());
  for (Eigen::Index i = 0; i < values.size(); ++i) mapped(i) = f(values(i));
  return HermitianMatrix::symmetrized(vectors * mapped.cast<Complex>().asDiagonal() *
                                      vectors.adjoint());
}

namespace {

// Cyclic Jacobi on a real symmetric matrix. On return `a` is (numerically)
// diagonal and `v` holds the rotations accumulated column-wise.
void jacobi_symmetric(Eigen::MatrixXd& a, Eigen::MatrixXd& v, int max_sweeps) {
  const Eigen::Index n = a.rows();
  v = Eigen::MatrixXd::Identity(n, n);
  const double scale = a.norm();
  if (scale == 0.0) return;

  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double off = 0.0;
    for (Eigen::Index p = 0; p < n; ++p)
      for (Eigen::Index q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    if (off == 0.0 || std::sqrt(off) <= 1e-15 * scale) return;

    for (Eigen::Index p = 0; p < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (std::abs(apq) <= 1e-300) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;

        for (Eigen::Index r = 0; r < n; ++r) {
          if (r == p || r == q) continue;
          const double arp = a(r, p);
          const double arq = a(r, q);
          a(r, p) = a(p, r) = c * arp - s * arq;
          a(r, q) = a(q, r) = s * arp + c * arq;
        }
        a(p, p) -= t * apq;
        a(q, q) += t * apq;
        a(p, q) = a(q, p) = 0.0;

        for (Eigen::Index r = 0; r < n; ++r) {
          const double vrp = v(r, p);
          const double vrq = v(r, q);
          v(r, p) = c * vrp - s * vrq;
          v(r, q) = s * vrp + c * vrq;
        }
      }
    }
  }
  throw Error(ErrorCode::NumericalFailure,
              fmt::format("Jacobi eigensolver did not converge in {} sweeps", max_sweeps));
}

}  // namespace

EigenDecomposition eig(const HermitianMatrix& m, const HermitianConfig& config) {
  const int d = m.dim();
  const Eigen::MatrixXd re = m.entries().real();
  const Eigen::MatrixXd im = m.entries().imag();

  Eigen::MatrixXd embedded(2 * d, 2 * d);
  embedded << re, -im, im, re;
  Eigen::MatrixXd rotations;
  jacobi_symmetric(embedded, rotations, config.max_jacobi_sweeps);

  // Each eigenvalue of m appears twice in the embedding, with real
  // eigenvectors (u; v) and (-v; u) that both map to u + iv up to a phase.
  std::vector<int> order(2 * d);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](int i, int j) { return embedded(i, i) < embedded(j, j); });

  double spectral_scale = 1.0;
  for (int i = 0; i < 2 * d; ++i) spectral_scale = std::max(spectral_scale, std::abs(embedded(i, i)));
  const double gap = config.cluster_tolerance * spectral_scale;

  EigenDecomposition out;
  out.values.resize(d);
  out.vectors.resize(d, d);
  int filled = 0;

  std::size_t begin = 0;
  while (begin < order.size()) {
    std::size_t end = begin + 1;
    while (end < order.size() &&
           (embedded(order[end], order[end]) - embedded(order[end - 1], order[end - 1]) <= gap ||
            (end - begin) % 2 == 1)) {
      ++end;
    }
    const int picks = static_cast<int>(end - begin) / 2;

    std::vector<Eigen::VectorXcd> candidates;
    candidates.reserve(end - begin);
    for (std::size_t k = begin; k < end; ++k) {
      const int col = order[k];
      Eigen::VectorXcd z(d);
      for (int i = 0; i < d; ++i) z(i) = Complex(rotations(i, col), rotations(i + d, col));
      candidates.push_back(std::move(z));
    }

    // Pivoted Gram-Schmidt picks an orthonormal basis of the complex eigenspace.
    const int first = filled;
    for (int pick = 0; pick < picks; ++pick) {
      for (auto& z : candidates) {
        for (int j = first; j < filled; ++j) {
          z -= out.vectors.col(j).dot(z) * out.vectors.col(j);
        }
      }
      auto best = std::max_element(candidates.begin(), candidates.end(),
                                   [](const auto& x, const auto& y) { return x.norm() < y.norm(); });
      const double norm = best->norm();
      if (norm < 1e-6) {
        throw Error(ErrorCode::NumericalFailure, "degenerate eigenvector cluster in Hermitian eigensolver");
      }
      Eigen::VectorXcd q = *best / norm;
      // Second Gram-Schmidt pass for orthogonality at rounding level.
      for (int j = first; j < filled; ++j) q -= out.vectors.col(j).dot(q) * out.vectors.col(j);
      q.normalize();
      out.vectors.col(filled) = q;
      out.values(filled) = q.dot(m.entries() * q).real();
      *best = Eigen::VectorXcd::Zero(d);
      ++filled;
    }
    begin = end;
  }

  // Rayleigh quotients can reorder near-equal values; restore ascending order.
  std::vector<int> perm(d);
  std::iota(perm.begin(), perm.end(), 0);
  std::stable_sort(perm.begin(), perm.end(),
                   [&](int i, int j) { return out.values(i) < out.values(j); });
  EigenDecomposition sorted;
  sorted.values.resize(d);
  sorted.vectors.resize(d, d);
  for (int i = 0; i < d; ++i) {
    sorted.values(i) = out.values(perm[i]);
    sorted.vectors.col(i) = out.vectors.col(perm[i]);
  }
  return sorted;
}

HermitianMatrix matrix_exp(const HermitianMatrix& m, const HermitianConfig& config) {
  const EigenDecomposition decomposition = eig(m, config);
  const double top = decomposition.values(decomposition.dim() - 1);
  if (top > config.exp_overflow_threshold) {
    throw Error(ErrorCode::Overflow,
                fmt::format("exp of eigenvalue {:.6g} overflows; shift the argument first", top));
  }
  return decomposition.apply([](double k) { return std::exp(k); });
}

HermitianMatrix matrix_log(const HermitianMatrix& m, const HermitianConfig& config) {
  const EigenDecomposition decomposition = eig(m, config);
  if (decomposition.values(0) < -config.log_negative_tolerance) {
    throw Error(ErrorCode::NotPositive,
                fmt::format("log of a matrix with eigenvalue {:.6g}", decomposition.values(0)));
  }
  const double floor = config.log_zero_threshold;
  return decomposition.apply([floor](double k) { return k < floor ? 0.0 : std::log(k); });
}

double exp_divided_difference(double x, double y, const HermitianConfig& config) {
  const double scale = std::max({1.0, std::abs(x), std::abs(y)});
  if (std::abs(x - y) <= config.divided_difference_tolerance * scale) {
    return std::exp(0.5 * (x + y));
  }
  const double low = std::min(x, y);
  const double high = std::max(x, y);
  if (high - low > 1.0) return (std::exp(high) - std::exp(low)) / (high - low);
  // expm1 keeps small gaps free of cancellation.
  return std::exp(low) * std::expm1(high - low) / (high - low);
}

HermitianMatrix frechet_exp_directional(const EigenDecomposition& decomposition,
                                        const HermitianMatrix& h, const HermitianConfig& config) {
  const int d = decomposition.dim();
  if (h.dim() != d) throw Error(ErrorCode::DimensionMismatch, "direction dimension differs");
  const Eigen::MatrixXcd& u = decomposition.vectors;
  Eigen::MatrixXcd rotated = u.adjoint() * h.entries() * u;
  for (int a = 0; a < d; ++a) {
    for (int b = 0; b < d; ++b) {
      rotated(a, b) *= exp_divided_difference(decomposition.values(a), decomposition.values(b), config);
    }
  }
  return HermitianMatrix::symmetrized(u * rotated * u.adjoint());
}

HermitianMatrix frechet_exp_directional(const HermitianMatrix& m, const HermitianMatrix& h,
                                        const HermitianConfig& config) {
  if (h.dim() != m.dim()) throw Error(ErrorCode::DimensionMismatch, "direction dimension differs");
  return frechet_exp_directional(eig(m, config), h, config);
}

}  // namespace gmaxent
