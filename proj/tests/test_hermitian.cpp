#include <doctest.h>

#include <cmath>
#include <random>

#include "gmaxent/error.hpp"
#include "gmaxent/hermitian.hpp"
#include "test_support.hpp"

using namespace gmaxent;
using gmaxent::testing::max_abs_diff;
using gmaxent::testing::pauli_x;
using gmaxent::testing::random_hermitian;
using gmaxent::testing::taylor_exp;

TEST_CASE("construction rejects non-Hermitian input and symmetrizes") {
  Eigen::MatrixXcd bad(2, 2);
  bad << 1, 2, 3, 1;
  CHECK_THROWS_AS(HermitianMatrix{bad}, Error);

  Eigen::MatrixXcd almost(2, 2);
  almost << 1, Complex(2, 1e-13), Complex(2, -1e-13 + 5e-14), 1;
  HermitianMatrix m(almost);
  CHECK(m(0, 1) == std::conj(m(1, 0)));
}

TEST_CASE("eig examples") {
  SUBCASE("diagonal input") {
    auto d = eig(HermitianMatrix::diagonal({3.0, 1.0}));
    CHECK(d.values(0) == doctest::Approx(1.0));
    CHECK(d.values(1) == doctest::Approx(3.0));
    // eigenvectors are identity columns up to phase and order
    CHECK(std::abs(d.vectors(1, 0)) == doctest::Approx(1.0));
    CHECK(std::abs(d.vectors(0, 1)) == doctest::Approx(1.0));
  }
  SUBCASE("pauli x") {
    auto d = eig(pauli_x());
    CHECK(d.values(0) == doctest::Approx(-1.0).epsilon(1e-14));
    CHECK(d.values(1) == doctest::Approx(1.0).epsilon(1e-14));
  }
  SUBCASE("identity") {
    auto d = eig(HermitianMatrix::identity(4));
    for (int i = 0; i < 4; ++i) CHECK(d.values(i) == doctest::Approx(1.0));
    CHECK(max_abs_diff(d.vectors.adjoint() * d.vectors, Eigen::MatrixXcd::Identity(4, 4)) < 1e-12);
  }
}

TEST_CASE("eig reconstruction and unitarity over random matrices") {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> dims(2, 8);
  for (int trial = 0; trial < 200; ++trial) {
    const int d = dims(rng);
    auto m = random_hermitian(rng, d);
    auto e = eig(m);
    for (int i = 1; i < d; ++i) CHECK(e.values(i - 1) <= e.values(i));
    const double scale = 1.0 + e.values.cwiseAbs().maxCoeff();
    Eigen::MatrixXcd rebuilt = e.vectors * e.values.cast<Complex>().asDiagonal() * e.vectors.adjoint();
    CHECK(max_abs_diff(rebuilt, m.entries()) <= 1e-10 * scale);
    CHECK(max_abs_diff(e.vectors.adjoint() * e.vectors, Eigen::MatrixXcd::Identity(d, d)) <= 1e-10);
  }
}

TEST_CASE("eig handles degenerate spectra") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    // random unitary conjugation of a spectrum with repeated values
    auto g = random_hermitian(rng, 5);
    auto basis = eig(g).vectors;
    Eigen::VectorXd spectrum(5);
    spectrum << -1.0, 2.0, 2.0, 2.0, 0.5;
    HermitianMatrix m = HermitianMatrix::symmetrized(basis * spectrum.cast<Complex>().asDiagonal() * basis.adjoint());
    auto e = eig(m);
    Eigen::MatrixXcd rebuilt = e.vectors * e.values.cast<Complex>().asDiagonal() * e.vectors.adjoint();
    CHECK(max_abs_diff(rebuilt, m.entries()) <= 3e-10);
    CHECK(e.values(2) == doctest::Approx(2.0));
    CHECK(max_abs_diff(e.vectors.adjoint() * e.vectors, Eigen::MatrixXcd::Identity(5, 5)) <= 1e-10);
  }
}

TEST_CASE("matrix_exp examples") {
  CHECK(max_abs_diff(matrix_exp(HermitianMatrix::zero(3)).entries(), Eigen::MatrixXcd::Identity(3, 3)) < 1e-15);

  auto e = matrix_exp(HermitianMatrix::diagonal({0.0, std::log(2.0)}));
  CHECK(e(0, 0).real() == doctest::Approx(1.0));
  CHECK(e(1, 1).real() == doctest::Approx(2.0));

  // exp(theta sigma_x) = cosh(theta) I + sinh(theta) sigma_x
  auto x = matrix_exp(pauli_x());
  CHECK(x(0, 0).real() == doctest::Approx(std::cosh(1.0)).epsilon(1e-13));
  CHECK(x(0, 1).real() == doctest::Approx(std::sinh(1.0)).epsilon(1e-13));
  CHECK(x(0, 0).real() == doctest::Approx(1.54308).epsilon(1e-5));
  CHECK(x(0, 1).real() == doctest::Approx(1.17520).epsilon(1e-5));
  CHECK(max_abs_diff(x.entries(), taylor_exp(pauli_x().entries())) < 1e-12);
}

TEST_CASE("matrix_exp overflow is reported") {
  CHECK_THROWS_AS(matrix_exp(HermitianMatrix::diagonal({701.0, 0.0})), Error);
  try {
    matrix_exp(HermitianMatrix::diagonal({701.0, 0.0}));
  } catch (const Error& err) {
    CHECK(err.code() == ErrorCode::Overflow);
  }
}

TEST_CASE("matrix_exp agrees with Taylor oracle and satisfies structural properties") {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> dims(2, 6);
  for (int trial = 0; trial < 100; ++trial) {
    const int d = dims(rng);
    auto m = random_hermitian(rng, d);
    // bound the operator norm by 2 via the induced infinity norm
    const double row_norm = m.entries().cwiseAbs().rowwise().sum().maxCoeff();
    m = m * (2.0 / row_norm);

    auto e = matrix_exp(m);
    Eigen::MatrixXcd oracle = taylor_exp(m.entries());
    CHECK(max_abs_diff(e.entries(), oracle) <= 1e-8 * oracle.cwiseAbs().maxCoeff());

    // commutes with its argument
    CHECK(max_abs_diff(e.entries() * m.entries(), m.entries() * e.entries()) <= 1e-9);
    // positive definite
    CHECK(eig(e).values(0) > 0.0);
    // tr e^m >= d exp(tr m / d)
    CHECK(e.trace() >= d * std::exp(m.trace() / d) - 1e-9);
  }
}

TEST_CASE("matrix_log examples and errors") {
  CHECK(matrix_log(HermitianMatrix::identity(3)).max_abs() < 1e-15);

  auto l = matrix_log(HermitianMatrix::diagonal({std::exp(1.0), 1.0}));
  CHECK(l(0, 0).real() == doctest::Approx(1.0));
  CHECK(std::abs(l(1, 1)) < 1e-15);

  auto rho = HermitianMatrix::diagonal({0.5, 0.5});
  CHECK(-rho.trace_product(matrix_log(rho)) == doctest::Approx(0.693147).epsilon(1e-6));

  // zero eigenvalues contribute nothing: diag(1, 0) has entropy 0
  auto pure = HermitianMatrix::diagonal({1.0, 0.0});
  CHECK(std::abs(pure.trace_product(matrix_log(pure))) < 1e-15);

  try {
    matrix_log(HermitianMatrix::diagonal({1.0, -1e-6}));
    FAIL("expected NotPositive");
  } catch (const Error& err) {
    CHECK(err.code() == ErrorCode::NotPositive);
  }
}

TEST_CASE("frechet_exp_directional examples") {
  std::mt19937_64 rng(5);
  auto h = random_hermitian(rng, 3);
  CHECK(max_abs_diff(frechet_exp_directional(HermitianMatrix::zero(3), h).entries(), h.entries()) < 1e-14);

  auto commuting = frechet_exp_directional(HermitianMatrix::diagonal({0.0, std::log(2.0)}),
                                           HermitianMatrix::identity(2));
  CHECK(commuting(0, 0).real() == doctest::Approx(1.0));
  CHECK(commuting(1, 1).real() == doctest::Approx(2.0));

  auto off = frechet_exp_directional(HermitianMatrix::diagonal({0.0, 1.0}), pauli_x());
  const double expected = std::exp(1.0) - 1.0;
  CHECK(off(0, 1).real() == doctest::Approx(expected).epsilon(1e-14));
  CHECK(off(0, 1).real() == doctest::Approx(1.71828).epsilon(1e-5));
  CHECK(std::abs(off(0, 0)) < 1e-15);

  // cross-check against the central finite difference
  const double eps = 1e-5;
  auto m = HermitianMatrix::diagonal({0.0, 1.0});
  Eigen::MatrixXcd fd = (matrix_exp(m + pauli_x() * eps).entries() - matrix_exp(m - pauli_x() * eps).entries()) / (2 * eps);
  CHECK(max_abs_diff(fd, off.entries()) <= 1e-6 * off.max_abs());
}

TEST_CASE("frechet derivative matches finite differences on random input") {
  std::mt19937_64 rng(13);
  std::uniform_int_distribution<int> dims(2, 6);
  const double eps = 1e-5;
  for (int trial = 0; trial < 50; ++trial) {
    const int d = dims(rng);
    auto m = random_hermitian(rng, d);
    auto h = random_hermitian(rng, d);
    auto exact = frechet_exp_directional(m, h);
    Eigen::MatrixXcd fd = (matrix_exp(m + h * eps).entries() - matrix_exp(m - h * eps).entries()) / (2 * eps);
    CHECK(max_abs_diff(fd, exact.entries()) <= 1e-6 * exact.max_abs());
  }
}

TEST_CASE("frechet derivative is linear in the direction") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 30; ++trial) {
    auto m = random_hermitian(rng, 4);
    auto h1 = random_hermitian(rng, 4);
    auto h2 = random_hermitian(rng, 4);
    const double alpha = 0.7;
    const double beta = -1.3;
    auto lhs = frechet_exp_directional(m, h1 * alpha + h2 * beta);
    auto rhs = frechet_exp_directional(m, h1) * alpha + frechet_exp_directional(m, h2) * beta;
    CHECK(max_abs_diff(lhs.entries(), rhs.entries()) <= 1e-9);
  }
}

TEST_CASE("trace of exp has gradient tr(exp(m) h)") {
  std::mt19937_64 rng(19);
  const double eps = 1e-6;
  for (int trial = 0; trial < 30; ++trial) {
    auto m = random_hermitian(rng, 3);
    auto h = random_hermitian(rng, 3);
    const double fd = (matrix_exp(m + h * eps).trace() - matrix_exp(m - h * eps).trace()) / (2 * eps);
    CHECK(fd == doctest::Approx(matrix_exp(m).trace_product(h)).epsilon(1e-6));
  }
}

TEST_CASE("degenerate divided difference uses the midpoint exponential") {
  CHECK(exp_divided_difference(1.0, 1.0) == doctest::Approx(std::exp(1.0)));
  CHECK(exp_divided_difference(2.0, 2.0 + 1e-10) == doctest::Approx(std::exp(2.0 + 5e-11)).epsilon(1e-15));
  CHECK(exp_divided_difference(0.0, 1.0) == doctest::Approx(std::exp(1.0) - 1.0).epsilon(1e-15));
  CHECK(exp_divided_difference(-800.0, 0.0) == doctest::Approx(1.0 / 800.0));
}
