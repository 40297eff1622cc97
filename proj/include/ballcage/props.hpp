#pragma once

// Randomized property suites for the geometric construction.  Each check
// returns counts rather than asserting, so the same code drives the CLI
// `props` command, the unit tests and the acceptance runner.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "ballcage/geometry.hpp"
#include "ballcage/innerpoint.hpp"
#include "ballcage/instance.hpp"
#include "ballcage/levelset.hpp"
#include "ballcage/lp.hpp"
#include "ballcage/oracle.hpp"

namespace ballcage {

struct PropertyResult {
  std::string name;
  std::size_t checked = 0;
  std::size_t violations = 0;
  double worst = 0.0;  // largest observed error (meaning depends on the property)
  std::string detail;

  PropertyResult() = default;
  explicit PropertyResult(std::string n) : name(std::move(n)) {}

  bool passed() const { return violations == 0 && checked > 0; }
};

// ---------------------------------------------------------------------------
// instance generators

/// Uniform integer weights in [lo, hi], not all zero and not all equal.
inline RsspInstance random_instance(std::mt19937_64& rng, int n, int lo, int hi) {
  std::uniform_int_distribution<int> u(lo, hi);
  Vec v(n);
  while (true) {
    for (int i = 0; i < n; ++i) v[i] = u(rng);
    if (v.isZero(0.0)) continue;
    if (n > 1 && (v.array() == v[0]).all()) continue;
    if (n == 1) continue;
    return RsspInstance(v);
  }
}

/// Like random_instance but with both signs present, so P is full-dimensional.
inline RsspInstance random_mixed_instance(std::mt19937_64& rng, int n, int lo, int hi) {
  while (true) {
    RsspInstance inst = random_instance(rng, n, lo, hi);
    if (inst.weights().maxCoeff() > 0.0 && inst.weights().minCoeff() < 0.0) return inst;
  }
}

struct PlantedInstance {
  RsspInstance instance;
  Vec planted;  // a binary x with S^T x = 0
};

/// Integer weights in [lo, hi] with a planted zero-sum subset of size >= 2.
inline PlantedInstance planted_instance(std::mt19937_64& rng, int n, int lo, int hi) {
  if (n < 2) throw InvalidArgument("planted_instance: need n >= 2");
  std::uniform_int_distribution<int> u(lo, hi);
  std::uniform_int_distribution<int> pick(0, n - 1);
  while (true) {
    Vec v(n);
    for (int i = 0; i < n; ++i) v[i] = u(rng);
    std::vector<int> support;
    for (int i = 0; i < n; ++i)
      if (rng() & 1U) support.push_back(i);
    if (support.size() < 2) continue;
    double partial = 0.0;
    for (std::size_t j = 0; j + 1 < support.size(); ++j) partial += v[support[j]];
    if (partial == 0.0 || partial < lo || partial > hi || -partial < lo || -partial > hi) continue;
    v[support.back()] = -partial;
    if ((v.array() == v[0]).all()) continue;
    Vec x = Vec::Zero(n);
    for (int i : support) x[i] = 1.0;
    return {RsspInstance(v), x};
  }
}

// ---------------------------------------------------------------------------
// closed-form reference for h

/// h(x) = E(x) + 2 rho d(x) with E = |x - 1/2 1|^2 - n/4 and d the largest
/// signed distance to a facet of P.  Independent of the ball construction.
inline double h_closed_form(const Vec& x, const RsspInstance& inst, double rho) {
  const int n = inst.dim();
  const double e = (x - Vec::Constant(n, 0.5)).squaredNorm() - n / 4.0;
  double d = inst.weights().dot(x) / inst.norm();
  for (int k = 0; k < n; ++k) d = std::max({d, -x[k], x[k] - 1.0});
  d = std::max(d, (0.5 - x.sum()) / std::sqrt(static_cast<double>(n)));
  return e + 2.0 * rho * d;
}

// ---------------------------------------------------------------------------
// suites

/// Every cube corner lies inside every cube ball and on at least one sphere.
inline PropertyResult check_corner_preservation(int n_min = 2, int n_max = 8,
                                                const std::vector<double>& rhos = {0.25, 1.0, 3.0, 17.5}) {
  PropertyResult r{"corner preservation (cube balls)"};
  for (int n = n_min; n <= n_max; ++n) {
    for (double rho : rhos) {
      std::vector<Ball> balls;
      for (int k = 0; k < n; ++k) {
        balls.push_back(cube_ball(k, Side::Upper, rho, n));
        balls.push_back(cube_ball(k, Side::Lower, rho, n));
      }
      const std::uint64_t corners = std::uint64_t{1} << n;
      Vec x(n);
      for (std::uint64_t mask = 0; mask < corners; ++mask) {
        for (int k = 0; k < n; ++k) x[k] = (mask >> k & 1U) ? 1.0 : 0.0;
        double worst = -std::numeric_limits<double>::infinity();
        for (const auto& b : balls) worst = std::max(worst, b.excess(x));
        ++r.checked;
        r.worst = std::max(r.worst, std::abs(worst));
        if (worst > 1e-9 || worst < -1e-9) ++r.violations;
      }
    }
  }
  return r;
}

/// Zero-sum corners lie on the sphere of the S-ball.
inline PropertyResult check_hyperplane_corners(std::size_t instances, std::uint64_t seed) {
  PropertyResult r{"hyperplane corners on the s-sphere"};
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> urho(0.0, 10.0);
  for (std::size_t t = 0; t < instances; ++t) {
    const int n = 2 + static_cast<int>(rng() % 9);
    const PlantedInstance pi = planted_instance(rng, n, -15, 15);
    const double rho = rho_bar(pi.instance) + urho(rng);
    const Ball s = halfspace_ball_s(pi.instance, rho);
    for (const auto& x : brute_force(pi.instance).solutions) {
      const double err = std::abs(s.excess(x));
      ++r.checked;
      r.worst = std::max(r.worst, err);
      if (err > 1e-9) ++r.violations;
    }
  }
  return r;
}

/// P ⊆ Q and Q ⊆ B(1/2 1, sqrt(n)/2), both by hit-and-run sampling.
inline std::vector<PropertyResult> check_inclusions(std::size_t instances, std::size_t samples, std::uint64_t seed,
                                                    int n_max = 6) {
  PropertyResult in_q{"P inside Q (h <= 1e-9 on samples of P)"};
  PropertyResult in_ball{"Q inside the circumscribed ball"};
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> urho(0.0, 10.0);
  for (std::size_t t = 0; t < instances; ++t) {
    const int n = 2 + static_cast<int>(rng() % static_cast<std::uint64_t>(n_max - 1));
    const RsspInstance inst = random_mixed_instance(rng, n, -15, 15);
    const double rho = rho_bar(inst) + urho(rng);
    const BallIntersection q = build_q(inst, rho);
    const HPolytope p = build_polytope(inst);
    for (const auto& x : sample_polytope(p, samples, rng())) {
      const double h = h_rho(x, q).value;
      ++in_q.checked;
      in_q.worst = std::max(in_q.worst, h);
      if (h > 1e-9) ++in_q.violations;
    }
    const Vec start = chebyshev_center(p)->center;
    const double radius = std::sqrt(static_cast<double>(n)) / 2.0;
    for (const auto& x : sample_ball_intersection(q, start, samples, rng())) {
      const double over = (x - Vec::Constant(n, 0.5)).norm() - radius;
      ++in_ball.checked;
      in_ball.worst = std::max(in_ball.worst, over);
      if (over > 1e-9) ++in_ball.violations;
    }
  }
  return {in_q, in_ball};
}

/// The three-disk inclusions on random shared-sphere configurations.
inline PropertyResult check_disk_lemma(std::size_t configs, std::size_t samples, std::uint64_t seed) {
  PropertyResult r{"shared-sphere disk inclusions"};
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (std::size_t t = 0; t < configs; ++t) {
    const int n = 2 + static_cast<int>(rng() % 5);
    const double a = 0.2 + 2.0 * unit(rng);
    const double q2 = 0.1 + 3.0 * unit(rng);
    const double q1 = q2 + 0.05 + 3.0 * unit(rng);
    const double q3 = q2 * (2.0 * unit(rng) - 1.0);
    const auto disks = SharedSphereDisks::from_offsets(q1, q2, q3, a, n);
    r.checked += samples;
    r.violations += disks.count_violations(samples, rng());
  }
  return r;
}

/// Samples of {h <= 0} at rho = rho_delta lie within delta (+1e-4) of P.
inline PropertyResult check_outer_approximation(double delta, std::size_t instances, std::size_t samples_each,
                                                std::uint64_t seed, int n_max = 5) {
  PropertyResult r{"outer approximation within delta = " + std::to_string(delta)};
  std::mt19937_64 rng(seed);
  for (std::size_t t = 0; t < instances; ++t) {
    const int n = 2 + static_cast<int>(rng() % static_cast<std::uint64_t>(n_max - 1));
    const RsspInstance inst = random_mixed_instance(rng, n, -15, 15);
    const double rho = rho_delta(inst, delta);
    const BallIntersection q = build_q(inst, rho);
    const HPolytope p = build_polytope(inst);
    const Vec start = chebyshev_center(p)->center;
    for (const auto& x : sample_ball_intersection(q, start, samples_each, rng())) {
      const Projection pr = project_onto_polytope(x, p, 1e-10);
      ++r.checked;
      r.worst = std::max(r.worst, pr.distance);
      if (pr.distance > delta + 1e-4) ++r.violations;
    }
  }
  return r;
}

/// Scaled level-set rows equal alpha times the unscaled rows, and the implied
/// scaled radius matches the closed form.
inline PropertyResult check_scaling_identity(std::size_t tuples, std::uint64_t seed) {
  PropertyResult r{"scaled rows = alpha * rows"};
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double alphas[] = {1.5, 2.0, 5.0};
  while (r.checked < tuples) {
    const int n = 2 + static_cast<int>(rng() % 5);
    const RsspInstance inst = random_instance(rng, n, -10, 10);
    if (!(hyperplane_imprint_sq(inst) > 0.0)) continue;
    const double rho = rho_bar(inst) + 10.0 * unit(rng);
    const double beta = inst.norm() * (1.0 + unit(rng));
    const double alpha = alphas[rng() % 3];
    const double radius = 5.0 * unit(rng);
    if (r_hat_sq(radius, alpha, beta, n) < 0.0) continue;
    const ScalingDiscrepancy d = verify_scaling_identity(inst, rho, beta, alpha, radius);
    ++r.checked;
    r.worst = std::max(r.worst, d.max());
    if (d.max() > 1e-9) ++r.violations;
  }
  return r;
}

/// Q shrinks with rho: {h_rho2 <= 0} ⊆ {h_rho1 <= 0} for rho2 > rho1, and h
/// matches its closed form E + 2 rho d.
inline std::vector<PropertyResult> check_ball_sets(std::size_t instances, std::size_t samples, std::uint64_t seed) {
  PropertyResult shrink{"Q shrinks as rho grows"};
  PropertyResult closed{"h matches E + 2 rho d"};
  PropertyResult sphere{"Q meets the circumscribed sphere only at corners"};
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (std::size_t t = 0; t < instances; ++t) {
    const int n = 2 + static_cast<int>(rng() % 6);
    const RsspInstance inst = random_mixed_instance(rng, n, -15, 15);
    const double rho1 = rho_bar(inst) + 5.0 * unit(rng);
    const double rho2 = rho1 + 0.1 + 5.0 * unit(rng);
    const BallIntersection q1 = build_q(inst, rho1);
    const BallIntersection q2 = build_q(inst, rho2);
    for (std::size_t s = 0; s < samples; ++s) {
      Vec x(n);
      for (int i = 0; i < n; ++i) x[i] = -0.25 + 1.5 * unit(rng);
      const double h1 = h_rho(x, q1).value, h2 = h_rho(x, q2).value;
      ++shrink.checked;
      if (h2 <= 0.0 && h1 > 1e-9) ++shrink.violations;
      const double err = std::abs(h1 - h_closed_form(x, inst, rho1));
      ++closed.checked;
      closed.worst = std::max(closed.worst, err);
      if (err > 1e-9 * std::max(1.0, std::abs(h1))) ++closed.violations;
      // points on the sphere: h <= 0 only at corners
      Vec dir(n);
      for (int i = 0; i < n; ++i) dir[i] = unit(rng) - 0.5;
      const Vec y = Vec::Constant(n, 0.5) + (std::sqrt(static_cast<double>(n)) / 2.0) * dir.normalized();
      bool corner = true;
      for (int i = 0; i < n; ++i) corner = corner && (std::abs(y[i]) < 1e-9 || std::abs(y[i] - 1.0) < 1e-9);
      ++sphere.checked;
      if (!corner && h_rho(y, q2).value <= 0.0) ++sphere.violations;
    }
  }
  return {shrink, closed, sphere};
}

/// Level-set polytopes: nesting in R, Q ⊆ level set at R = 0, and the
/// max-affine form of h - f agrees with h(x) - |x - C|^2.
inline std::vector<PropertyResult> check_level_sets(std::size_t instances, std::size_t samples, std::uint64_t seed) {
  PropertyResult nesting{"level sets nest in R"};
  PropertyResult at_zero{"Q inside the level set at R = 0"};
  PropertyResult two_ways{"h - f two ways"};
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (std::size_t t = 0; t < instances; ++t) {
    const int n = 2 + static_cast<int>(rng() % 5);
    const RsspInstance inst = random_mixed_instance(rng, n, -15, 15);
    const double beta = std::max(2.0 * rho_bar(inst) + 2.0, inst.norm());
    const double rho = beta / 2.0 + 1.0 + 5.0 * unit(rng);
    const BallIntersection q = build_q(inst, rho);
    const Vec c = build_center(inst, beta);
    const double r_bar = std::sqrt(std::max(0.0, -minimize_h_minus_f(q, c).value));
    const double r1 = r_bar * unit(rng);
    const double r2 = r1 + (r_bar - r1) * unit(rng);
    const ContainmentReport rep = polytope_contains(levelset_polytope(q, c, r1), levelset_polytope(q, c, r2));
    ++nesting.checked;
    if (!rep.contained) ++nesting.violations;
    const HPolytope zero = levelset_polytope(q, c, 0.0);
    const Vec start = chebyshev_center(build_polytope(inst))->center;
    for (const auto& x : sample_ball_intersection(q, start, samples, rng())) {
      ++at_zero.checked;
      at_zero.worst = std::max(at_zero.worst, zero.max_violation(x));
      if (zero.max_violation(x) > 1e-9) ++at_zero.violations;
      Vec y = x + Vec::Constant(n, 2.0 * unit(rng) - 1.0);
      const double direct = h_rho(y, q).value - (y - c).squaredNorm();
      const double err = std::abs(direct - h_minus_f(y, q, c));
      ++two_ways.checked;
      two_ways.worst = std::max(two_ways.worst, err);
      if (err > 1e-10 * std::max(1.0, std::abs(direct))) ++two_ways.violations;
    }
  }
  return {nesting, at_zero, two_ways};
}

inline const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"ballsets", "corners", "outer", "scaling", "levelsets", "all"};
  return names;
}

/// Runs a named suite; `scale` multiplies the default sample counts.
inline std::vector<PropertyResult> run_suite(const std::string& suite, std::uint64_t seed, double scale = 1.0) {
  auto count = [scale](std::size_t base) { return std::max<std::size_t>(1, static_cast<std::size_t>(base * scale)); };
  std::vector<PropertyResult> out;
  auto append = [&out](std::vector<PropertyResult> v) { out.insert(out.end(), v.begin(), v.end()); };
  const bool all = suite == "all";
  bool known = all;
  if (all || suite == "ballsets") {
    known = true;
    append(check_ball_sets(count(10), count(1000), seed));
    append(check_inclusions(count(10), count(1000), seed + 1));
    out.push_back(check_disk_lemma(count(5), count(20000), seed + 2));
  }
  if (all || suite == "corners") {
    known = true;
    out.push_back(check_corner_preservation());
    out.push_back(check_hyperplane_corners(count(50), seed + 3));
  }
  if (all || suite == "outer") {
    known = true;
    out.push_back(check_outer_approximation(0.2, count(5), count(100), seed + 4));
    out.push_back(check_outer_approximation(0.05, count(5), count(100), seed + 5));
  }
  if (all || suite == "scaling") {
    known = true;
    out.push_back(check_scaling_identity(count(100), seed + 6));
  }
  if (all || suite == "levelsets") {
    known = true;
    append(check_level_sets(count(10), count(200), seed + 7));
  }
  if (!known) throw InvalidArgument("unknown property suite '" + suite + "'");
  return out;
}

}  // namespace ballcage
