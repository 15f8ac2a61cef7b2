#include <doctest.h>

#include "gmaxent/linear_program.hpp"

using namespace gmaxent;

TEST_CASE("simplex solves a small LP") {
  // maximize x + 2y s.t. x + y + s = 4, x + 3y + t = 6
  Eigen::MatrixXd a(2, 4);
  a << 1, 1, 1, 0, 1, 3, 0, 1;
  Eigen::VectorXd b(2);
  b << 4, 6;
  Eigen::VectorXd c(4);
  c << 1, 2, 0, 0;
  auto r = lp::maximize(a, b, c);
  REQUIRE(r.status == lp::LpStatus::Optimal);
  CHECK(r.objective == doctest::Approx(5.0));
  CHECK(r.solution(0) == doctest::Approx(3.0));
  CHECK(r.solution(1) == doctest::Approx(1.0));
}

TEST_CASE("simplex reports infeasible and unbounded programs") {
  Eigen::MatrixXd a(2, 2);
  a << 1, 1, 1, 1;
  Eigen::VectorXd b(2);
  b << 1, 2;
  CHECK(lp::maximize(a, b, Eigen::VectorXd::Zero(2)).status == lp::LpStatus::Infeasible);
  CHECK_FALSE(lp::feasible_point(a, b).has_value());

  Eigen::MatrixXd u(1, 2);
  u << 1, -1;
  Eigen::VectorXd rhs(1);
  rhs << 0;
  CHECK(lp::maximize(u, rhs, Eigen::VectorXd::Ones(2)).status == lp::LpStatus::Unbounded);
}

TEST_CASE("phase one tolerates redundant and degenerate rows") {
  Eigen::MatrixXd a(3, 3);
  a << 1, 1, 1, 2, 2, 2, 0, 1, 2;
  Eigen::VectorXd b(3);
  b << 1, 2, 1;
  auto x = lp::feasible_point(a, b);
  REQUIRE(x.has_value());
  CHECK((a * *x - b).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(x->minCoeff() >= 0.0);
}

TEST_CASE("row selection separates redundant and inconsistent rows") {
  Eigen::MatrixXd rows(4, 2);
  rows << 1, 1, 1, -1, 2, 0, 2, 2;
  Eigen::VectorXd targets(4);
  targets << 1, 0, 1, 3;
  auto s = lp::select_independent_rows(rows, targets);
  CHECK(s.independent == std::vector<int>{0, 1});
  CHECK(s.redundant == std::vector<int>{2});
  CHECK(s.inconsistent == std::vector<int>{3});
}

TEST_CASE("basic feasible solutions of a cut simplex") {
  // {p in simplex(3) : p1 + 2 p2 = 1} has vertices (0,1,0) and (0.5,0,0.5)
  Eigen::MatrixXd a(2, 3);
  a << 1, 1, 1, 0, 1, 2;
  Eigen::VectorXd b(2);
  b << 1, 1;
  auto vertices = lp::basic_feasible_solutions(a, b);
  REQUIRE(vertices.size() == 2);
  bool found_edge = false;
  bool found_corner = false;
  for (const auto& v : vertices) {
    found_corner |= (v - Eigen::Vector3d(0, 1, 0)).norm() < 1e-12;
    found_edge |= (v - Eigen::Vector3d(0.5, 0, 0.5)).norm() < 1e-12;
  }
  CHECK(found_edge);
  CHECK(found_corner);
}
