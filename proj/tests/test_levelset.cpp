#include <catch_amalgamated.hpp>

#include <random>

#include "ballcage/innerpoint.hpp"
#include "ballcage/levelset.hpp"
#include "ballcage/lp.hpp"
#include "ballcage/props.hpp"

using namespace ballcage;
using Catch::Approx;

namespace {
Vec v2(double a, double b) { return (Vec(2) << a, b).finished(); }

Ball make_ball(Vec c, double r_sq) {
  Ball b;
  b.center = std::move(c);
  b.radius_sq = r_sq;
  return b;
}
}  // namespace

TEST_CASE("levelset_polytope single-ball example", "[levelset]") {
  const auto q = BallIntersection::custom({make_ball(v2(2, 0), 9.0)});
  const HPolytope p = levelset_polytope(q, v2(0, 0), 1.0);
  REQUIRE(p.size() == 1);
  CHECK(p[0].a == v2(-4, 0));
  CHECK(p[0].b == Approx(4.0));
  CHECK(p[0].label == "b1");
  // x = (-1, 0) makes the quadratic form vanish
  const Vec x = v2(-1, 0);
  CHECK(q.balls[0].excess(x) - x.squaredNorm() + 1.0 == Approx(0.0).margin(1e-12));
  CHECK(p[0].a.dot(x) == Approx(p[0].b));
}

TEST_CASE("raising R lowers every rhs by R^2, coefficients fixed", "[levelset]") {
  const auto inst = RsspInstance::from({5, -3, 2});
  const auto q = build_q(inst, 3.0);
  const Vec c = build_center(inst, 4.0);
  const HPolytope a = levelset_polytope(q, c, 0.5), b = levelset_polytope(q, c, 1.5);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].label == q.balls[i].tag.str());
    CHECK(a[i].a == b[i].a);
    CHECK(a[i].b - b[i].b == Approx(1.5 * 1.5 - 0.5 * 0.5));
  }
}

TEST_CASE("ball centred at C gives a constant row that stays aligned", "[levelset]") {
  const auto q = BallIntersection::custom({make_ball(v2(0, 0), 1.0), make_ball(v2(1, 0), 4.0)});
  const HPolytope p = levelset_polytope(q, v2(0, 0), 0.5);
  REQUIRE(p.size() == 2);
  CHECK(p.zero_rows() == std::vector<std::string>{"b1"});
  CHECK(p[0].b == Approx(0.75));
}

TEST_CASE("Q lies in the level set at R = 0", "[levelset]") {
  const auto inst = RsspInstance::from({4, -1, -2, 3});
  const auto q = build_q(inst, 2.5);
  const Vec c = build_center(inst, 6.0);
  const HPolytope p0 = levelset_polytope(q, c, 0.0);
  // the cube centre is outside Q when S^T 1 > 0; start from the centre of P instead
  const Vec start = chebyshev_center(build_polytope(inst))->center;
  for (const auto& x : sample_ball_intersection(q, start, 2000, 3))
    CHECK(p0.max_violation(x) <= 1e-9);
}

TEST_CASE("boundary consistency: h = 0 and |x - C| = R puts x on the level-set boundary", "[levelset]") {
  std::mt19937_64 rng(31);
  std::normal_distribution<double> g;
  const auto inst = RsspInstance::from({3, -1, -2, 4});
  const auto q = build_q(inst, 2.0);
  const Vec c = build_center(inst, 5.5);
  const Vec start = chebyshev_center(build_polytope(inst))->center;
  REQUIRE(h_rho(start, q).value < 0.0);
  for (int t = 0; t < 200; ++t) {
    // walk from an interior point of P to the boundary of Q along a random ray
    Vec d(4);
    for (int i = 0; i < 4; ++i) d[i] = g(rng);
    d.normalize();
    double lo = 0.0, hi = 2.0;
    for (int k = 0; k < 80; ++k) {
      const double mid = 0.5 * (lo + hi);
      (h_rho(start + mid * d, q).value <= 0.0 ? lo : hi) = mid;
    }
    const Vec x = start + lo * d;
    const double r = (x - c).norm();
    const HPolytope p = levelset_polytope(q, c, r);
    const std::size_t binding = h_rho(x, q).argmax;
    CHECK(p[binding].b - p[binding].a.dot(x) == Approx(0.0).margin(1e-8));
    CHECK(p.max_violation(x) <= 1e-8);
  }
}

TEST_CASE("scale_construction examples", "[levelset]") {
  const auto inst = RsspInstance::from({1, -1});
  const ScaledConstruction s = scale_construction(inst, 3.0, 2.0, 2.0);
  const Ball& bs = s.q_hat.balls[4];
  CHECK(bs.center[0] == Approx(0.5 - 6 / std::sqrt(2.0)));
  CHECK(bs.center[1] == Approx(0.5 + 6 / std::sqrt(2.0)));
  CHECK(bs.radius_sq == Approx(36.5));
  CHECK(s.c_hat[0] == Approx(0.5 - std::sqrt(2.0)));
  CHECK(s.c_hat[1] == Approx(0.5 + std::sqrt(2.0)));
  // imprints and feet are unchanged
  const auto q = build_q(inst, 3.0);
  CHECK(s.q_hat.foot_s == q.foot_s);
  CHECK(s.q_hat.imprint_s_sq == q.imprint_s_sq);
  CHECK_THROWS_AS(scale_construction(inst, 3.0, 2.0, 1.0), InvalidArgument);
  CHECK_THROWS_AS(scale_construction(inst, 3.0, 2.0, 0.5), InvalidArgument);
}

TEST_CASE("r_hat examples", "[levelset]") {
  CHECK(r_hat_sq(1.0, 2.0, 2.0, 2) == Approx(3.5));
  CHECK(r_hat(1.0, 2.0, 2.0, 2) == Approx(std::sqrt(3.5)));
  CHECK(r_hat(0.7, 1.0 + 1e-12, 3.0, 5) == Approx(0.7).epsilon(1e-9));
  CHECK(r_hat_sq(0.0, 2.0, 0.0, 4) == Approx(-1.0));
  CHECK_THROWS_AS(r_hat(0.0, 2.0, 0.0, 4), NegativeRadicand);
  CHECK_THROWS_AS(r_hat(1.0, 1.0, 2.0, 2), InvalidArgument);
}

TEST_CASE("scaling identity holds and detects an injected fault", "[levelset]") {
  const auto inst = RsspInstance::from({1, -1});
  CHECK(verify_scaling_identity(inst, 3.0, 2.0, 2.0, 1.0).max() <= 1e-9);

  // alpha just above 1 reproduces the unscaled rows
  const auto s1 = scale_construction(inst, 3.0, 2.0, 1.0 + 1e-12);
  const auto q = build_q(inst, 3.0);
  const Vec c = build_center(inst, 2.0);
  const auto near = compare_scaled_rows(q, c, s1.q_hat, s1.c_hat, 1.0, 1.0, 1.0);
  CHECK(near.max() <= 1e-9);

  ScaledConstruction s = scale_construction(inst, 3.0, 2.0, 2.0);
  s.q_hat.balls[4].radius_sq += 1e-3;
  const auto bad = compare_scaled_rows(q, c, s.q_hat, s.c_hat, 2.0, 1.0, r_hat(1.0, 2.0, 2.0, 2));
  CHECK(bad.max() == Approx(1e-3).epsilon(1e-6));
  CHECK(bad.rhs == Approx(1e-3).epsilon(1e-6));
}

TEST_CASE("scaling identity holds for every R, not only R >= R*", "[levelset]") {
  const auto inst = RsspInstance::from({7, -2, -3, 1});
  for (double r : {0.0, 0.3, 1.0, 2.0, 5.0}) CHECK(verify_scaling_identity(inst, 4.0, 6.0, 1.5, r).max() <= 1e-9);
}

TEST_CASE("level-set property suite passes", "[levelset][props]") {
  for (const auto& r : check_level_sets(5, 100, 41)) CHECK(r.passed());
  CHECK(check_scaling_identity(40, 42).passed());
}
