#include <doctest.h>

#include <cmath>

#include <Eigen/Eigenvalues>

#include "gmaxent/error.hpp"
#include "gmaxent/maxent.hpp"
#include "test_support.hpp"

using namespace gmaxent;
using gmaxent::testing::pauli_x;
using gmaxent::testing::pauli_z;
using gmaxent::testing::taylor_exp;

namespace {

double binary_entropy(double p) { return -p * std::log(p) - (1 - p) * std::log(1 - p); }

Eigen::VectorXd vec(std::initializer_list<double> v) {
  return Eigen::Map<const Eigen::VectorXd>(v.begin(), static_cast<Eigen::Index>(v.size()));
}

MaxEntProblem quantum_problem(const ModelPtr& q, std::vector<std::pair<HermitianMatrix, double>> conditions) {
  std::vector<LinearConstraint> cs;
  for (const auto& [op, target] : conditions) cs.push_back(LinearConstraint::from_operator(q, op, target));
  return make_problem(ConvexRegion::from_constraints(q, cs), Objective::von_neumann());
}

MaxEntProblem classical_problem(const ModelPtr& c, std::vector<std::pair<Eigen::VectorXd, double>> conditions) {
  std::vector<LinearConstraint> cs;
  for (const auto& [f, target] : conditions) cs.emplace_back(c, f, target, ConstraintOrigin::Mean);
  return make_problem(ConvexRegion::from_constraints(c, cs), Objective::shannon());
}

// Random feasible conditions: random operators, targets read off a random state.
MaxEntProblem random_quantum(Sampler& sampler, int d, int k) {
  auto q = ModelSpace::quantum(d);
  const State s = sampler.random_state(q);
  std::vector<std::pair<HermitianMatrix, double>> conditions;
  for (int i = 0; i < k; ++i) {
    HermitianMatrix r = sampler.random_hermitian(d);
    conditions.emplace_back(r, s.density_matrix().trace_product(r));
  }
  return quantum_problem(q, conditions);
}

MaxEntProblem random_classical(Sampler& sampler, int d, int k) {
  auto c = ModelSpace::classical(d);
  const State s = sampler.random_state(c);
  std::vector<std::pair<Eigen::VectorXd, double>> conditions;
  for (int i = 0; i < k; ++i) {
    Eigen::VectorXd f(d);
    for (int x = 0; x < d; ++x) f(x) = sampler.normal();
    conditions.emplace_back(f, f.dot(s.coords()));
  }
  return classical_problem(c, conditions);
}

HermitianMatrix gibbs_operator(const MaxEntProblem& problem, const MaxEntSolution& s) {
  const auto& cs = problem.region.constraints();
  Eigen::MatrixXcd exponent = -*s.lambda0 * Eigen::MatrixXcd::Identity(problem.model->dimension(), problem.model->dimension());
  for (std::size_t i = 0; i < cs.size(); ++i) exponent -= s.multipliers(static_cast<Eigen::Index>(i)) * cs[i].as_operator().entries();
  return HermitianMatrix::symmetrized(taylor_exp(exponent, 60));
}

ModelPtr square() { return ModelSpace::square_bit(); }

// Two-outcome measurement of coordinate `axis` on the square bit: (1 +- x)/2.
Observable square_measurement(int axis) {
  auto m = square();
  Eigen::VectorXd plus = Eigen::VectorXd::Zero(3);
  plus(0) = 0.5;
  plus(1 + axis) = 0.5;
  Eigen::VectorXd minus = m->unit() - plus;
  return Observable(m, {Outcome{"+", Effect(m, plus), 1.0}, Outcome{"-", Effect(m, minus), -1.0}});
}

}  // namespace

TEST_CASE("partition_function") {
  auto q = ModelSpace::quantum(2);
  const std::vector<LinearConstraint> z{LinearConstraint::from_operator(q, pauli_z(), 0.0)};
  PartitionValue pv = partition_function(*q, z, vec({0.0}));
  CHECK(pv.z == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(pv.log_z == doctest::Approx(std::log(2.0)).epsilon(1e-14));

  auto c = ModelSpace::classical(2);
  const std::vector<LinearConstraint> r{LinearConstraint(c, vec({0, 1}), 0.3)};
  CHECK(partition_function(*c, r, vec({std::log(7.0 / 3.0)})).z == doctest::Approx(10.0 / 7.0).epsilon(1e-14));

  const std::vector<LinearConstraint> h{LinearConstraint::from_operator(q, HermitianMatrix::diagonal({0, 1}), 0.3)};
  CHECK(partition_function(*q, h, vec({std::log(7.0 / 3.0)})).z == doctest::Approx(10.0 / 7.0).epsilon(1e-13));

  // Large multipliers overflow Z but not ln Z.
  const PartitionValue big = partition_function(*q, z, vec({-2000.0}));
  CHECK(std::isinf(big.z));
  CHECK(big.log_z == doctest::Approx(2000.0).epsilon(1e-14));
}

TEST_CASE("dual_gradient") {
  auto q = ModelSpace::quantum(2);
  const std::vector<LinearConstraint> z{LinearConstraint::from_operator(q, pauli_z(), 0.0)};
  CHECK(std::abs(dual_gradient(*q, z, vec({0.0}), vec({0.0}))(0)) < 1e-15);
  const std::vector<LinearConstraint> h{LinearConstraint::from_operator(q, HermitianMatrix::diagonal({0, 1}), 0.3)};
  CHECK(dual_gradient(*q, h, vec({0.3}), vec({0.0}))(0) == doctest::Approx(-0.2).epsilon(1e-14));

  Sampler sampler(8);
  for (int trial = 0; trial < 20; ++trial) {
    const int d = 2 + trial % 3;
    const MaxEntProblem p = random_quantum(sampler, d, 1 + trial % 3);
    const auto& cs = p.region.constraints();
    Eigen::VectorXd lambda(static_cast<Eigen::Index>(cs.size()));
    Eigen::VectorXd targets(lambda.size());
    for (Eigen::Index i = 0; i < lambda.size(); ++i) {
      lambda(i) = sampler.normal();
      targets(i) = cs[static_cast<std::size_t>(i)].target();
    }
    const Eigen::VectorXd g = dual_gradient(*p.model, cs, targets, lambda);
    const auto dual = [&](const Eigen::VectorXd& l) { return partition_function(*p.model, cs, l).log_z + l.dot(targets); };
    for (Eigen::Index i = 0; i < lambda.size(); ++i) {
      const double eps = 1e-6;
      Eigen::VectorXd up = lambda, down = lambda;
      up(i) += eps;
      down(i) -= eps;
      CHECK(std::abs((dual(up) - dual(down)) / (2 * eps) - g(i)) <= 1e-5);
    }
    // The Hessian is the Jacobian of the gradient.
    const DualEvaluation ev = evaluate_dual(*p.model, cs, lambda);
    for (Eigen::Index j = 0; j < lambda.size(); ++j) {
      const double eps = 1e-5;
      Eigen::VectorXd up = lambda, down = lambda;
      up(j) += eps;
      down(j) -= eps;
      const Eigen::VectorXd column = (dual_gradient(*p.model, cs, targets, up) - dual_gradient(*p.model, cs, targets, down)) / (2 * eps);
      CHECK((column - ev.hessian.col(j)).cwiseAbs().maxCoeff() <= 1e-6);
    }
  }
}

TEST_CASE("solve_dual examples") {
  auto q = ModelSpace::quantum(2);
  SUBCASE("no constraints") {
    const MaxEntSolution s = solve_dual(quantum_problem(q, {}));
    REQUIRE(s.status == SolveStatus::Converged);
    CHECK((s.state->density_matrix() - HermitianMatrix::identity(2) * 0.5).max_abs() < 1e-15);
    CHECK(s.entropy == doctest::Approx(std::log(2.0)).epsilon(1e-14));
    CHECK(*s.lambda0 == doctest::Approx(std::log(2.0)).epsilon(1e-14));
    CHECK(s.iterations == 0);
  }
  SUBCASE("Gibbs state of a two-level Hamiltonian") {
    const MaxEntSolution s = solve_dual(quantum_problem(q, {{HermitianMatrix::diagonal({0, 1}), 0.3}}));
    REQUIRE(s.status == SolveStatus::Converged);
    CHECK((s.state->density_matrix() - HermitianMatrix::diagonal({0.7, 0.3})).max_abs() < 1e-10);
    CHECK(s.multipliers(0) == doctest::Approx(std::log(7.0 / 3.0)).epsilon(1e-10));
    CHECK(s.entropy == doctest::Approx(binary_entropy(0.3)).epsilon(1e-10));
    CHECK(s.entropy == doctest::Approx(0.610864).epsilon(1e-6));
    CHECK(s.max_residual() <= 1e-10);
  }
  SUBCASE("effect-probability condition") {
    const Effect e = Effect::from_operator(q, HermitianMatrix::diagonal({0.3, 0.7}));
    const MaxEntSolution s = solve_dual(make_problem(region_from_effect(e, 0.65), Objective::von_neumann()));
    REQUIRE(s.status == SolveStatus::Converged);
    CHECK((s.state->density_matrix() - HermitianMatrix::diagonal({0.125, 0.875})).max_abs() < 1e-9);
    CHECK(s.entropy == doctest::Approx(0.376770).epsilon(1e-6));
    CHECK(s.entropy == doctest::Approx(binary_entropy(0.125)).epsilon(1e-10));
  }
  SUBCASE("classical outcomes without conditions") {
    const MaxEntSolution s = solve_dual(classical_problem(ModelSpace::classical(7), {}));
    REQUIRE(s.status == SolveStatus::Converged);
    CHECK(s.entropy == doctest::Approx(std::log(7.0)).epsilon(1e-14));
  }
  SUBCASE("boundary target") {
    const MaxEntSolution s = solve_dual(quantum_problem(q, {{pauli_z(), 1.0}}));
    CHECK(s.status == SolveStatus::BoundaryOnly);
    REQUIRE(s.state);
    CHECK((s.state->density_matrix() - HermitianMatrix::diagonal({1, 0})).max_abs() < 1e-3);
    CHECK(s.max_residual() <= 1e-6);
  }
  SUBCASE("empty region") {
    CHECK(solve_dual(quantum_problem(q, {{pauli_z(), 1.0}, {pauli_x(), 1.0}})).status == SolveStatus::Infeasible);
    CHECK(solve_dual(quantum_problem(q, {{pauli_z(), 0.2}, {pauli_z() * 2.0, 0.8}})).status == SolveStatus::Infeasible);
    CHECK(solve_dual(quantum_problem(q, {{pauli_z(), 0.9}, {pauli_x(), 0.9}})).status == SolveStatus::Infeasible);
    CHECK(solve_dual(classical_problem(ModelSpace::classical(2), {{vec({0, 1}), 2.0}})).status == SolveStatus::Infeasible);
  }
  SUBCASE("classical boundary") {
    const MaxEntSolution s = solve_dual(classical_problem(ModelSpace::classical(3), {{vec({0, 1, 2}), 2.0}}));
    CHECK(s.status == SolveStatus::BoundaryOnly);
    CHECK(s.state->coords()(2) == doctest::Approx(1.0).epsilon(1e-6));
  }
  SUBCASE("redundant conditions keep multiplier zero") {
    const MaxEntSolution s = solve_dual(quantum_problem(q, {{pauli_z(), 0.2}, {pauli_z() + pauli_x(), 0.5}, {pauli_x() * 3.0, 0.9}}));
    REQUIRE(s.status == SolveStatus::Converged);
    REQUIRE(s.redundant.size() == 1);
    CHECK(s.redundant[0] == 2);
    CHECK(s.multipliers(2) == 0.0);
    CHECK(s.max_residual() <= 1e-8);
  }
  SUBCASE("incompatible objective") {
    try {
      (void)make_problem(ConvexRegion::whole_space(q), Objective::shannon());
      FAIL("expected IncompatibleObjective");
    } catch (const Error& err) {
      CHECK(err.code() == ErrorCode::IncompatibleObjective);
    }
  }
}

TEST_CASE("solve_polytope examples") {
  SUBCASE("classical without conditions matches the dual path") {
    const MaxEntProblem p = classical_problem(ModelSpace::classical(3), {});
    const MaxEntSolution fw = solve_polytope(p);
    REQUIRE(fw.status == SolveStatus::Converged);
    CHECK((fw.state->coords() - Eigen::VectorXd::Constant(3, 1.0 / 3.0)).cwiseAbs().maxCoeff() < 1e-6);
    CHECK(fw.entropy == doctest::Approx(std::log(3.0)).epsilon(1e-7));
    CHECK(std::abs(fw.entropy - solve_dual(p).entropy) <= 1e-6);
    CHECK(fw.multipliers.size() == 0);
    CHECK_FALSE(fw.lambda0);
  }
  SUBCASE("square bit fiducial entropy") {
    const Objective fiducial = Objective::fiducial({square_measurement(0), square_measurement(1)});
    const MaxEntSolution s = solve(make_problem(ConvexRegion::whole_space(square()), fiducial));
    REQUIRE(s.status == SolveStatus::Converged);
    CHECK(s.state->affine_point().cwiseAbs().maxCoeff() < 1e-4);
    CHECK(s.entropy == doctest::Approx(2 * std::log(2.0)).epsilon(1e-7));

    const ConvexRegion region = region_from_effect(square_measurement(0).outcomes()[0].effect, 0.9);
    const MaxEntSolution c = solve(make_problem(region, fiducial));
    REQUIRE(c.status == SolveStatus::Converged);
    CHECK(c.state->affine_point()(0) == doctest::Approx(0.8).epsilon(1e-9));
    CHECK(std::abs(c.state->affine_point()(1)) < 1e-4);
    CHECK(c.entropy == doctest::Approx(binary_entropy(0.9) + std::log(2.0)).epsilon(1e-7));
  }
  SUBCASE("quantum hull of finitely many states") {
    auto q = ModelSpace::quantum(2);
    const ConvexRegion segment = ConvexRegion::hull(
        q, {State::from_density_matrix(q, HermitianMatrix::diagonal({1, 0})),
            State::from_density_matrix(q, HermitianMatrix::diagonal({0.2, 0.8}))});
    const MaxEntSolution s = solve(make_problem(segment, Objective::von_neumann()));
    REQUIRE(s.status == SolveStatus::Converged);
    CHECK((s.state->density_matrix() - HermitianMatrix::diagonal({0.5, 0.5})).max_abs() < 1e-4);
  }
  SUBCASE("custom objective") {
    // Negative squared distance to a point outside the simplex.
    auto c = ModelSpace::classical(3);
    const Eigen::VectorXd target = vec({0.9, 0.3, -0.2});
    const Objective custom = Objective::custom({"proximity", [=](const Eigen::VectorXd& x) { return -(x - target).squaredNorm(); },
                                                [=](const Eigen::VectorXd& x) -> Eigen::VectorXd { return -2.0 * (x - target); }});
    const MaxEntSolution s = solve(make_problem(ConvexRegion::whole_space(c), custom));
    REQUIRE(s.status == SolveStatus::Converged);
    // Euclidean projection onto the simplex: (0.8, 0.2, 0).
    CHECK((s.state->coords() - vec({0.8, 0.2, 0.0})).cwiseAbs().maxCoeff() < 1e-6);
  }
}

TEST_CASE("entropy") {
  auto c5 = ModelSpace::classical(5);
  CHECK(entropy(Objective::shannon(), State::from_probabilities(c5, Eigen::VectorXd::Constant(5, 0.2))) ==
        doctest::Approx(std::log(5.0)).epsilon(1e-14));
  auto q = ModelSpace::quantum(3);
  Sampler sampler(2);
  const Eigen::VectorXcd psi = sampler.random_unitary(3).col(0);
  CHECK(std::abs(entropy(Objective::von_neumann(), pure_state_from_vector(q, psi))) < 1e-10);
  CHECK(entropy(Objective::von_neumann(),
                State::from_density_matrix(ModelSpace::quantum(2), HermitianMatrix::diagonal({0.7, 0.3}))) ==
        doctest::Approx(0.610864).epsilon(1e-6));
  CHECK(shannon_entropy(std::vector<double>{1.0, 0.0}) == 0.0);
}

TEST_CASE("exponential-family form, stationarity and normalization") {
  Sampler sampler(17);
  for (int trial = 0; trial < 30; ++trial) {
    const int d = 2 + trial % 3;
    const MaxEntProblem p = random_quantum(sampler, d, 1 + trial % 3);
    const MaxEntSolution s = solve_dual(p);
    REQUIRE(s.status == SolveStatus::Converged);
    CHECK(s.max_residual() <= 1e-8);
    CHECK(entropy(p.objective, *s.state) == doctest::Approx(s.entropy).epsilon(1e-10));
    CHECK((s.state->density_matrix() - gibbs_operator(p, s)).max_abs() <= 1e-8);

    const auto& cs = p.region.constraints();
    CHECK(std::abs(*s.lambda0 - partition_function(*p.model, cs, s.multipliers).log_z) <= 1e-10);
    for (Eigen::Index i = 0; i < s.multipliers.size(); ++i) {
      const double eps = 1e-6;
      Eigen::VectorXd up = s.multipliers, down = s.multipliers;
      up(i) += eps;
      down(i) -= eps;
      const double slope = (partition_function(*p.model, cs, up).log_z - partition_function(*p.model, cs, down).log_z) / (2 * eps);
      CHECK(std::abs(slope + cs[static_cast<std::size_t>(i)].target()) <= 1e-5);
    }
    CHECK(s.min_hessian_eigenvalue >= -1e-9);
    CHECK(s.max_hessian_asymmetry <= 1e-12);
  }
}

TEST_CASE("dual and Frank-Wolfe paths agree on classical problems") {
  Sampler sampler(23);
  for (int trial = 0; trial < 20; ++trial) {
    const MaxEntProblem p = random_classical(sampler, 3 + trial % 4, 1 + trial % 2);
    const MaxEntSolution dual = solve_dual(p);
    const MaxEntSolution fw = solve_polytope(p);
    REQUIRE(dual.status == SolveStatus::Converged);
    REQUIRE(fw.status == SolveStatus::Converged);
    CHECK(std::abs(dual.entropy - fw.entropy) <= 1e-6);
    CHECK(fw.max_residual() <= 1e-8);
  }
}

TEST_CASE("adding conditions never raises the entropy") {
  Sampler sampler(29);
  for (int trial = 0; trial < 20; ++trial) {
    const bool quantum = trial % 2 == 0;
    const MaxEntProblem full = quantum ? random_quantum(sampler, 3, 3) : random_classical(sampler, 5, 3);
    const auto& cs = full.region.constraints();
    double previous = std::numeric_limits<double>::infinity();
    ConvexRegion region = ConvexRegion::whole_space(full.model);
    for (std::size_t k = 0; k <= cs.size(); ++k) {
      if (k > 0) region = meet(region, ConvexRegion::from_constraints(full.model, {cs[k - 1]}));
      const MaxEntSolution s = solve(make_problem(region, full.objective));
      REQUIRE(s.status == SolveStatus::Converged);
      CHECK(s.entropy <= previous + 1e-8);
      previous = s.entropy;
    }
  }
}

TEST_CASE("solver entropy dominates the grid oracle") {
  Sampler sampler(31);
  for (int trial = 0; trial < 6; ++trial) {
    const MaxEntProblem p = trial % 2 == 0 ? random_quantum(sampler, 2, 1) : random_classical(sampler, 3, 1);
    const MaxEntSolution s = solve(p);
    const OracleResult o = oracle_maxent(p, 1e-3);
    REQUIRE(s.status == SolveStatus::Converged);
    REQUIRE(o.status == SolveStatus::Converged);
    CHECK(s.entropy >= o.entropy - 2e-3);
    CHECK(s.entropy - o.entropy <= 2e-2);
  }
}
