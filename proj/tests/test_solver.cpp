#include <catch_amalgamated.hpp>

#include <random>

#include "ballcage/oracle.hpp"
#include "ballcage/props.hpp"
#include "ballcage/solver.hpp"

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

BallIntersection four_balls() {
  return BallIntersection::custom({make_ball(v2(1, 0), 4), make_ball(v2(-1, 0), 4), make_ball(v2(0, 1), 4),
                                   make_ball(v2(0, -1), 4)});
}

HPolytope square(double t) {
  HPolytope p(2);
  p.add("x1<=t", v2(1, 0), t);
  p.add("-x1<=t", v2(-1, 0), t);
  p.add("x2<=t", v2(0, 1), t);
  p.add("-x2<=t", v2(0, -1), t);
  return p;
}
}  // namespace

TEST_CASE("config defaults and validation", "[solver]") {
  const auto inst = RsspInstance::from({1, -1});
  const ResolvedConfig r = resolve_config(inst, {});
  CHECK(r.beta == Approx(std::max(2 * rho_bar(inst) + 2, inst.norm())));
  CHECK(r.rho_bar < r.beta / 2);
  CHECK(r.beta / 2 < r.rho);
  SolverConfig bad;
  bad.beta = 0.1;
  CHECK_THROWS_AS(resolve_config(inst, bad), ConfigError);
  bad = {};
  bad.rho = 0.5;
  CHECK_THROWS_AS(resolve_config(inst, bad), ConfigError);
  bad = {};
  bad.alpha = 1.0;
  CHECK_THROWS_AS(resolve_config(inst, bad), ConfigError);
  bad = {};
  bad.eps_bisect = 0.0;
  CHECK_THROWS_AS(resolve_config(inst, bad), ConfigError);
  bad = {};
  bad.eps_feas = -1.0;
  CHECK_THROWS_AS(resolve_config(inst, bad), ConfigError);
}

TEST_CASE("solve: S = (1,-1) is feasible with candidate (1,1)", "[solver]") {
  const auto inst = RsspInstance::from({1, -1});
  const SolveOutcome o = solve(inst);
  CHECK(o.verdict == Verdict::Feasible);
  CHECK((o.candidate - v2(1, 1)).norm() <= 1e-4);
  CHECK(o.candidate_verdict.accepted);
  CHECK(o.distance_check);
  const Vec c = build_center(inst, o.beta);
  CHECK((v2(1, 1) - c).squaredNorm() == Approx(0.5 + o.beta * o.beta / 4));
  CHECK(o.inner_case == "InteriorNegative");
  CHECK(trace_monotone(o.trace));
}

TEST_CASE("solve: S = (1,-0.618) is infeasible", "[solver]") {
  const SolveOutcome o = solve(RsspInstance::from({1, -0.618}));
  CHECK(o.verdict == Verdict::Infeasible);
  CHECK_FALSE(o.candidate_verdict.accepted);
}

TEST_CASE("solve: S = (3,-1,-2) recovers (1,1,1)", "[solver]") {
  const SolveOutcome o = solve(RsspInstance::from({3, -1, -2}));
  CHECK(o.verdict == Verdict::Feasible);
  CHECK((o.candidate - Vec::Ones(3)).norm() <= 1e-4);
}

TEST_CASE("solve: verdict is Feasible iff the candidate is accepted", "[solver]") {
  std::mt19937_64 rng(61);
  for (int t = 0; t < 25; ++t) {
    const RsspInstance inst = random_instance(rng, 2 + t % 6, -9, 9);
    SolverConfig cfg;
    cfg.seed = static_cast<std::uint64_t>(t);
    const SolveOutcome o = solve(inst, cfg);
    CHECK((o.verdict == Verdict::Feasible) == o.candidate_verdict.accepted);
    if (o.verdict == Verdict::Feasible) {
      CHECK(dp_feasible(inst).feasible);
      CHECK(o.distance_check);
    }
    if (!o.trace.empty() && o.has_flag("SeparationPath") == false) {
      CHECK(trace_monotone(o.trace));
      CHECK(static_cast<double>(o.iterations) <= std::ceil(std::log2(o.r_bar / cfg.eps_bisect)) + 2);
    }
  }
}

TEST_CASE("solve: the bisection limit equals |C| for mixed signs", "[solver]") {
  // every facet point of P with S^T x = 0 enters last, so R* = |C| whether or not a solution exists
  for (auto inst : {RsspInstance::from({1, -1}), RsspInstance::from({2, -1}), RsspInstance::from({5, -3, 7, -2})}) {
    const SolveOutcome o = solve(inst);
    CHECK(o.r_star == Approx(build_center(inst, o.beta).norm()).margin(1e-6));
  }
}

TEST_CASE("solve: all-equal weights take the degenerate path", "[solver]") {
  const SolveOutcome o = solve(RsspInstance::from({1, 1}));
  CHECK(o.has_flag("DegenerateHyperplane"));
  CHECK(o.verdict == Verdict::Infeasible);
  CHECK(o.inner_case == "Degenerate");
  CHECK(solve(RsspInstance::from({-3, -3, -3})).verdict == Verdict::Infeasible);
}

TEST_CASE("solve: single positive weight is infeasible", "[solver]") {
  // S = (k): the degenerate branch with no zero entry
  CHECK(solve(RsspInstance::from({4})).verdict == Verdict::Infeasible);
}

TEST_CASE("bisect_r four-ball desk check", "[solver]") {
  const auto q = four_balls();
  const double t = (-1 + std::sqrt(7.0)) / 2;
  const InnerPointResult inner = minimize_h_minus_f(q, v2(0, 0));
  const Bisection b = bisect_r(q, v2(0, 0), square(t), std::sqrt(-inner.value), 1e-7);
  CHECK(b.bracket_valid);
  CHECK(b.r_star == Approx(std::sqrt(4 - std::sqrt(7.0))).margin(1e-6));
  CHECK(trace_monotone(b.trace));
  CHECK(b.iterations == bisection_steps(std::sqrt(3.0), 1e-7));
  // the last failing probe exposes one of the square's corners
  const Candidate c = extract_candidate(b, v2(0, 0), square(t));
  CHECK_FALSE(c.fallback);
  CHECK(std::abs(std::abs(c.x[0]) - t) <= 1e-3);
  CHECK(std::abs(std::abs(c.x[1]) - t) <= 1e-3);
}

TEST_CASE("bisection iteration count", "[solver]") {
  CHECK(bisection_steps(1.0, 1.0) == 0);
  CHECK(bisection_steps(1.0, 0.5) == 1);
  CHECK(bisection_steps(1.0, 0.3) == 2);
  for (int k = 0; k < 20; ++k) CHECK(bisection_steps(1.7, 1e-3 * std::ldexp(1.0, -k)) == bisection_steps(1.7, 1e-3) + k);
  // R_bar = eps returns R_bar with no halving
  const auto q = four_balls();
  const double t = (-1 + std::sqrt(7.0)) / 2;
  const Bisection b = bisect_r(q, v2(0, 0), square(t), std::sqrt(3.0), std::sqrt(3.0));
  CHECK(b.iterations <= 1);
  CHECK(b.r_star == Approx(std::sqrt(3.0)));
}

TEST_CASE("bracket errors are reported", "[solver]") {
  const auto q = four_balls();
  // target contains everything: contained already at R = 0
  const Bisection wide = bisect_r(q, v2(0, 0), square(10.0), std::sqrt(3.0), 1e-6);
  CHECK_FALSE(wide.bracket_valid);
  const Candidate c = extract_candidate(wide, v2(0, 0), square(10.0));
  CHECK(c.fallback);
  CHECK(c.x.norm() <= 1e-9);  // Chebyshev center of the square
  // target too small: not contained at R_bar
  const Bisection tight = bisect_r(q, v2(0, 0), square(0.01), 0.5, 1e-6);
  CHECK_FALSE(tight.bracket_valid);
}

TEST_CASE("separation radius in one dimension", "[solver]") {
  // Q = [-1, 1] as one ball, C = 3: the level-set row is 6x <= 10 - R^2, which misses Q
  // once (10 - R^2)/6 < -1, i.e. R > 4
  const auto q = BallIntersection::custom({make_ball((Vec(1) << 0.0).finished(), 1.0)});
  const Vec c = (Vec(1) << 3.0).finished();
  const Separation s = separation_r(q, c, 5.0, 1e-7);
  CHECK(s.bracket_valid);
  CHECK(s.r_star == Approx(4.0).margin(1e-6));
  CHECK_FALSE(probe_separation(q, c, 0.0).empty);
  CHECK(probe_separation(q, c, 4.5).empty);
}

TEST_CASE("scaling diagnostic agrees with the radius map", "[solver]") {
  SolverConfig cfg;
  cfg.check_scaling = true;
  const SolveOutcome o = solve(RsspInstance::from({3, -1, -2}), cfg);
  CHECK(o.scaling.performed);
  CHECK(o.scaling.ok);
  CHECK(o.scaling.discrepancy <= 1e-4);
  CHECK_FALSE(o.has_flag("ScalingMismatch"));
}

TEST_CASE("solve is deterministic for a fixed seed", "[solver]") {
  const auto inst = RsspInstance::from({5, -3, 7, -2, -4, 1});
  SolverConfig cfg;
  cfg.seed = 99;
  const SolveOutcome a = solve(inst, cfg), b = solve(inst, cfg);
  CHECK(a.candidate == b.candidate);
  CHECK(a.r_star == b.r_star);
  CHECK(a.trace.size() == b.trace.size());
  CHECK(a.flags == b.flags);
}
