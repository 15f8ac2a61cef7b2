#pragma once

#include <complex>
#include <functional>
#include <span>

#include <Eigen/Dense>

#include "gmaxent/config.hpp"

namespace gmaxent {

using Complex = std::complex<double>;

// Dense complex Hermitian matrix. Construction checks hermiticity and stores
// the symmetrized part, so entries(i,j) == conj(entries(j,i)) exactly.
class HermitianMatrix {
 public:
  explicit HermitianMatrix(const Eigen::MatrixXcd& entries,
                           const HermitianConfig& config = {});

  // Skips the hermiticity check; for results that are Hermitian by
  // construction (sums, congruences) up to rounding.
  static HermitianMatrix symmetrized(const Eigen::MatrixXcd& entries);

  static HermitianMatrix zero(int dim);
  static HermitianMatrix identity(int dim);
  static HermitianMatrix diagonal(std::span<const double> values);
  static HermitianMatrix diagonal(std::initializer_list<double> values);
  static HermitianMatrix from_real(const Eigen::MatrixXd& entries,
                                   const HermitianConfig& config = {});

  int dim() const { return static_cast<int>(entries_.rows()); }
  const Eigen::MatrixXcd& entries() const { return entries_; }
  Complex operator()(int row, int col) const { return entries_(row, col); }

  double trace() const { return entries_.trace().real(); }
  // tr(this * other), real for Hermitian operands.
  double trace_product(const HermitianMatrix& other) const;
  double max_abs() const;

  HermitianMatrix operator+(const HermitianMatrix& other) const;
  HermitianMatrix operator-(const HermitianMatrix& other) const;
  HermitianMatrix operator-() const;
  HermitianMatrix operator*(double scale) const;
  friend HermitianMatrix operator*(double scale, const HermitianMatrix& m) { return m * scale; }

 private:
  struct Trusted {};
  HermitianMatrix(Trusted, Eigen::MatrixXcd entries) : entries_(std::move(entries)) {}

  Eigen::MatrixXcd entries_;
};

struct EigenDecomposition {
  Eigen::VectorXd values;    // ascending
  Eigen::MatrixXcd vectors;  // unitary, eigenvectors in columns

  int dim() const { return static_cast<int>(values.size()); }
  // U * diag(f(k)) * U^dagger
  HermitianMatrix apply(const std::function<double(double)>& f) const;
};

// Eigendecomposition through the 2d x 2d real symmetric embedding
// [[Re, -Im], [Im, Re]], diagonalized by cyclic Jacobi rotations.
// Throws NumericalFailure when the sweep budget runs out.
EigenDecomposition eig(const HermitianMatrix& m, const HermitianConfig& config = {});

// Throws Overflow when the largest eigenvalue exceeds the configured threshold.
HermitianMatrix matrix_exp(const HermitianMatrix& m, const HermitianConfig& config = {});

// Eigenvalues below log_zero_threshold map to 0 (the 0 ln 0 = 0 convention of
// entropy contractions). Throws NotPositive for eigenvalues below -1e-10.
HermitianMatrix matrix_log(const HermitianMatrix& m, const HermitianConfig& config = {});

// Divided difference of exp: (e^x - e^y)/(x - y), e^{(x+y)/2} when x ~ y.
double exp_divided_difference(double x, double y, const HermitianConfig& config = {});

// Directional derivative of exp at m along h (Daleckii-Krein formula).
HermitianMatrix frechet_exp_directional(const HermitianMatrix& m, const HermitianMatrix& h,
                                        const HermitianConfig& config = {});
HermitianMatrix frechet_exp_directional(const EigenDecomposition& decomposition,
                                        const HermitianMatrix& h,
                                        const HermitianConfig& config = {});

}  // namespace gmaxent
