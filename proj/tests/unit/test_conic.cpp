#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "flexpath/conic/cone_algebra.hpp"
#include "flexpath/conic/cone_program.hpp"

namespace fc = flexpath::conic;

namespace {

Eigen::VectorXd random_interior(const fc::ConeDims& dims, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::VectorXd v(dims.total());
  for (Eigen::Index i = 0; i < dims.nonneg; ++i) v(i) = 0.1 + std::abs(u(rng)) * 3.0;
  Eigen::Index off = dims.nonneg;
  for (auto k : dims.soc) {
    for (Eigen::Index i = 1; i < k; ++i) v(off + i) = u(rng) * 2.0;
    v(off) = v.segment(off + 1, k - 1).norm() + 0.05 + std::abs(u(rng));
    off += k;
  }
  return v;
}

}  // namespace

TEST(ConeAlgebra, NtScalingMapsBothSidesToLambda) {
  std::mt19937_64 rng(7);
  const fc::ConeDims dims{3, {1, 3, 5}};
  for (int trial = 0; trial < 50; ++trial) {
    const auto s = random_interior(dims, rng);
    const auto z = random_interior(dims, rng);
    const auto w = fc::compute_scaling(dims, s, z);
    const Eigen::VectorXd wz = fc::apply_w(dims, w, z);
    const Eigen::VectorXd wis = fc::apply_w_inv(dims, w, s);
    EXPECT_LT((wz - wis).norm(), 1e-10 * (1.0 + wz.norm()));
    EXPECT_LT((w.lambda - wz).norm(), 1e-10 * (1.0 + wz.norm()));
    const Eigen::VectorXd x = random_interior(dims, rng);
    EXPECT_LT((fc::apply_w_inv(dims, w, fc::apply_w(dims, w, x)) - x).norm(), 1e-10 * (1.0 + x.norm()));
  }
}

TEST(ConeAlgebra, JordanDivideInvertsProduct) {
  std::mt19937_64 rng(11);
  const fc::ConeDims dims{2, {4, 2}};
  const auto lam = random_interior(dims, rng);
  const auto u = random_interior(dims, rng);
  const Eigen::VectorXd y = fc::jordan_product(dims, lam, u);
  EXPECT_LT((fc::jordan_divide(dims, lam, y) - u).norm(), 1e-10);
}

TEST(ConeAlgebra, MaxStepLandsOnBoundary) {
  std::mt19937_64 rng(3);
  const fc::ConeDims dims{0, {4}};
  for (int trial = 0; trial < 20; ++trial) {
    const auto x = random_interior(dims, rng);
    Eigen::VectorXd d = -random_interior(dims, rng);
    const double a = fc::max_step(dims, x, d);
    ASSERT_TRUE(std::isfinite(a));
    const Eigen::VectorXd y = x + a * d;
    EXPECT_NEAR(y(0), y.tail(3).norm(), 1e-9 * (1.0 + y.norm()));
  }
}

TEST(InteriorPoint, SmallLp) {
  // max x + y  s.t.  x + 2y <= 4, 3x + y <= 6, x, y >= 0  ->  (1.6, 1.2), value 2.8
  fc::ConeProgramBuilder b(2);
  b.set_objective(0, -1.0);
  b.set_objective(1, -1.0);
  b.add_inequality({{0, 1.0}, {1, 2.0}}, 4.0);
  b.add_inequality({{0, 3.0}, {1, 1.0}}, 6.0);
  b.add_inequality({{0, -1.0}}, 0.0);
  b.add_inequality({{1, -1.0}}, 0.0);
  const auto res = fc::InteriorPointSolver{}.solve(b.build(), {});
  ASSERT_EQ(res.status, fc::SolveStatus::kOptimal);
  EXPECT_NEAR(res.x(0), 1.6, 1e-6);
  EXPECT_NEAR(res.x(1), 1.2, 1e-6);
  EXPECT_NEAR(res.primal_objective, -2.8, 1e-7);
}

TEST(InteriorPoint, LpWithEquality) {
  // min x0 + 2 x1 + 3 x2  s.t.  x0 + x1 + x2 = 1, x >= 0  ->  x0 = 1
  fc::ConeProgramBuilder b(3);
  for (int i = 0; i < 3; ++i) {
    b.set_objective(i, i + 1.0);
    b.add_inequality({{i, -1.0}}, 0.0);
  }
  b.add_equality({{0, 1.0}, {1, 1.0}, {2, 1.0}}, 1.0);
  const auto res = fc::InteriorPointSolver{}.solve(b.build(), {});
  ASSERT_EQ(res.status, fc::SolveStatus::kOptimal);
  EXPECT_NEAR(res.x(0), 1.0, 1e-6);
  EXPECT_NEAR(res.primal_objective, 1.0, 1e-7);
}

TEST(InteriorPoint, ProjectionOntoDisk) {
  // min t  s.t.  |(x - p)| <= t,  |x| <= 1  with p = (3, 4)  ->  x = (0.6, 0.8), t = 4
  fc::ConeProgramBuilder b(3);
  b.set_objective(2, 1.0);
  b.add_second_order_cone({{{{2, 1.0}}, 0.0}, {{{0, 1.0}}, -3.0}, {{{1, 1.0}}, -4.0}});
  b.add_second_order_cone({{{}, 1.0}, {{{0, 1.0}}, 0.0}, {{{1, 1.0}}, 0.0}});
  const auto res = fc::InteriorPointSolver{}.solve(b.build(), {});
  ASSERT_EQ(res.status, fc::SolveStatus::kOptimal);
  EXPECT_NEAR(res.x(0), 0.6, 1e-6);
  EXPECT_NEAR(res.x(1), 0.8, 1e-6);
  EXPECT_NEAR(res.x(2), 4.0, 1e-7);
}

TEST(InteriorPoint, MatchesRandomLpVertexEnumeration) {
  // max c'x over a random box-bounded polytope in 2D; compare with enumeration of constraint intersections.
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<Eigen::Vector3d> rows;  // a0 x + a1 y <= a2
    rows.push_back({1, 0, 2});
    rows.push_back({-1, 0, 2});
    rows.push_back({0, 1, 2});
    rows.push_back({0, -1, 2});
    for (int i = 0; i < 4; ++i) rows.push_back({u(rng), u(rng), 0.5 + std::abs(u(rng))});
    const Eigen::Vector2d c(u(rng), u(rng));
    double best = -1e300;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      for (std::size_t j = i + 1; j < rows.size(); ++j) {
        Eigen::Matrix2d m;
        m << rows[i](0), rows[i](1), rows[j](0), rows[j](1);
        if (std::abs(m.determinant()) < 1e-12) continue;
        const Eigen::Vector2d v = m.inverse() * (Eigen::Vector2d(rows[i](2), rows[j](2)));
        bool ok = true;
        for (const auto& r : rows) ok = ok && r(0) * v(0) + r(1) * v(1) <= r(2) + 1e-9;
        if (ok) best = std::max(best, c.dot(v));
      }
    }
    fc::ConeProgramBuilder b(2);
    b.set_objective(0, -c(0));
    b.set_objective(1, -c(1));
    for (const auto& r : rows) b.add_inequality({{0, r(0)}, {1, r(1)}}, r(2));
    const auto res = fc::InteriorPointSolver{}.solve(b.build(), {});
    ASSERT_EQ(res.status, fc::SolveStatus::kOptimal);
    EXPECT_NEAR(-res.primal_objective, best, 1e-6);
  }
}

TEST(InteriorPoint, RotatedConeEpigraph) {
  // min sigma s.t. sigma >= |x - p|^2 via (sigma+1, sigma-1, 2(x-p)), x1 <= 0, p = (1, 2)  ->  x = (0, 2), sigma = 1
  fc::ConeProgramBuilder b(3);
  b.set_objective(2, 1.0);
  b.add_second_order_cone({{{{2, 1.0}}, 1.0}, {{{2, 1.0}}, -1.0}, {{{0, 2.0}}, -2.0}, {{{1, 2.0}}, -4.0}});
  b.add_inequality({{0, 1.0}}, 0.0);
  const auto res = fc::InteriorPointSolver{}.solve(b.build(), {});
  ASSERT_EQ(res.status, fc::SolveStatus::kOptimal);
  EXPECT_NEAR(res.x(0), 0.0, 1e-6);
  EXPECT_NEAR(res.x(1), 2.0, 1e-6);
  EXPECT_NEAR(res.x(2), 1.0, 1e-6);
}
