#include <doctest.h>

#include <cmath>

#include "gmaxent/error.hpp"
#include "gmaxent/maxent.hpp"
#include "test_support.hpp"

using namespace gmaxent;
using gmaxent::testing::pauli_x;
using gmaxent::testing::pauli_z;

namespace {

double binary_entropy(double p) { return -p * std::log(p) - (1 - p) * std::log(1 - p); }

MaxEntProblem qubit(std::vector<std::pair<HermitianMatrix, double>> conditions) {
  auto q = ModelSpace::quantum(2);
  std::vector<LinearConstraint> cs;
  for (const auto& [op, target] : conditions) cs.push_back(LinearConstraint::from_operator(q, op, target));
  return make_problem(ConvexRegion::from_constraints(q, cs), Objective::von_neumann());
}

}  // namespace

TEST_CASE("oracle on the Bloch ball") {
  const OracleResult gibbs = oracle_maxent(qubit({{HermitianMatrix::diagonal({0, 1}), 0.3}}), 1e-3);
  REQUIRE(gibbs.status == SolveStatus::Converged);
  CHECK(std::abs(gibbs.entropy - 0.610864) <= 2e-3);
  CHECK(gibbs.entropy <= binary_entropy(0.3) + 1e-12);

  const OracleResult empty = oracle_maxent(qubit({{pauli_z(), 1.0}, {pauli_x(), 1.0}}), 1e-2);
  CHECK(empty.status == SolveStatus::Infeasible);
  CHECK(empty.feasible_points == 0);

  const OracleResult pinned = oracle_maxent(qubit({{pauli_z(), 1.0}}), 1e-2);
  REQUIRE(pinned.status == SolveStatus::Converged);
  CHECK(pinned.entropy == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(pinned.feasible_points == 1);
}

TEST_CASE("oracle on the simplex") {
  auto c2 = ModelSpace::classical(2);
  const OracleResult flat = oracle_maxent(make_problem(ConvexRegion::whole_space(c2), Objective::shannon()), 1e-4);
  REQUIRE(flat.status == SolveStatus::Converged);
  CHECK(std::abs(flat.state->coords()(0) - 0.5) <= 1e-4);
  CHECK(std::abs(flat.state->coords()(1) - 0.5) <= 1e-4);

  auto c3 = ModelSpace::classical(3);
  const Eigen::Vector3d values(0, 1, 2);
  const MaxEntProblem p = make_problem(
      ConvexRegion::from_constraints(c3, {LinearConstraint(c3, values, 1.5, ConstraintOrigin::Mean)}), Objective::shannon());
  const OracleResult o = oracle_maxent(p, 1e-4);
  const MaxEntSolution s = solve(p);
  REQUIRE(o.status == SolveStatus::Converged);
  CHECK(o.entropy <= s.entropy + 1e-12);
  CHECK(s.entropy - o.entropy <= 1e-3);
}

TEST_CASE("oracle on the square bit") {
  auto m = ModelSpace::square_bit();
  Eigen::VectorXd plus_x(3), plus_y(3);
  plus_x << 0.5, 0.5, 0.0;
  plus_y << 0.5, 0.0, 0.5;
  const auto measurement = [&](const Eigen::VectorXd& plus) {
    return Observable(m, {Outcome{"+", Effect(m, plus), 1.0}, Outcome{"-", Effect(m, m->unit() - plus), -1.0}});
  };
  const Objective fiducial = Objective::fiducial({measurement(plus_x), measurement(plus_y)});

  const OracleResult center = oracle_maxent(make_problem(ConvexRegion::whole_space(m), fiducial), 1e-2);
  REQUIRE(center.status == SolveStatus::Converged);
  CHECK(center.entropy == doctest::Approx(2 * std::log(2.0)).epsilon(1e-9));
  CHECK(center.state->affine_point().cwiseAbs().maxCoeff() < 1e-9);

  const ConvexRegion region = region_from_effect(Effect(m, plus_x), 0.9);
  const OracleResult cut = oracle_maxent(make_problem(region, fiducial), 1e-3);
  REQUIRE(cut.status == SolveStatus::Converged);
  CHECK(cut.state->affine_point()(0) == doctest::Approx(0.8).epsilon(1e-12));
  const MaxEntSolution s = solve(make_problem(region, fiducial));
  CHECK(std::abs(s.entropy - cut.entropy) <= 1e-3);
}

TEST_CASE("oracle refuses instances beyond its reach") {
  const auto code = [](auto&& f) {
    try {
      f();
    } catch (const Error& err) {
      return err.code();
    }
    return ErrorCode::NumericalFailure;
  };
  CHECK(code([] { (void)oracle_maxent(make_problem(ConvexRegion::whole_space(ModelSpace::classical(5)), Objective::shannon()), 0.1); }) ==
        ErrorCode::Unsupported);
  CHECK(code([] { (void)oracle_maxent(make_problem(ConvexRegion::whole_space(ModelSpace::quantum(3)), Objective::von_neumann()), 0.1); }) ==
        ErrorCode::Unsupported);
  CHECK(code([] { (void)oracle_maxent(make_problem(ConvexRegion::whole_space(ModelSpace::classical(4)), Objective::shannon()), 1e-4); }) ==
        ErrorCode::Unsupported);
}
