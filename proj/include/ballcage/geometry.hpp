#pragma once

// Ball-intersection outer approximation of the feasibility polytope.
//
// Every facet hyperplane of P gets one closed ball whose center sits on the
// axis through 1/2*1 parallel to the facet normal, at distance rho from 1/2*1,
// and whose sphere passes through the intersection of that hyperplane with the
// circumscribed sphere S(1/2*1, sqrt(n)/2).  Radii are kept squared throughout.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "ballcage/instance.hpp"

namespace ballcage {

/// The s-hyperplane misses (or only touches) the circumscribed ball, so no
/// ball with a nonempty imprint exists for it.
class DegenerateHyperplane : public Error {
 public:
  using Error::Error;
};

enum class FacetKind { CubeUpper, CubeLower, Hyperplane, Sum, Generic };

struct FacetTag {
  FacetKind kind = FacetKind::Generic;
  int index = 0;  // 1-based coordinate for cube balls, running index for generic balls

  std::string str() const {
    switch (kind) {
      case FacetKind::CubeUpper: return std::to_string(index) + "+";
      case FacetKind::CubeLower: return std::to_string(index) + "-";
      case FacetKind::Hyperplane: return "s";
      case FacetKind::Sum: return "h";
      case FacetKind::Generic: break;
    }
    return "b" + std::to_string(index);
  }
};

struct Ball {
  FacetTag tag;
  Vec center;
  double radius_sq = 0.0;

  double excess(const Vec& x) const { return (x - center).squaredNorm() - radius_sq; }
};

struct BallIntersection {
  std::vector<Ball> balls;
  double rho = 0.0;
  // construction intermediates (empty/zero for hand-built systems)
  Vec foot_s;
  Vec foot_h;
  double imprint_s_sq = 0.0;
  double imprint_h_sq = 0.0;
  bool below_rho_bar = false;

  static BallIntersection custom(std::vector<Ball> balls) {
    if (balls.empty()) throw InvalidArgument("ball intersection needs at least one ball");
    const auto n = balls.front().center.size();
    int i = 0;
    for (auto& b : balls) {
      if (b.center.size() != n) throw InvalidArgument("ball dimensions disagree");
      if (!(b.radius_sq > 0.0) || !b.center.allFinite()) throw InvalidArgument("invalid ball");
      if (b.tag.kind == FacetKind::Generic) b.tag.index = ++i;
    }
    BallIntersection q;
    q.balls = std::move(balls);
    return q;
  }

  int dim() const { return static_cast<int>(balls.front().center.size()); }
  std::size_t size() const { return balls.size(); }
};

enum class Side { Upper, Lower };

/// Ball for the cube facet pair at coordinate k (0-based): center 1/2*1 +- rho*e_k,
/// radius^2 = (1/2 + rho)^2 + (n-1)/4 so that every cube corner is on or inside it.
inline Ball cube_ball(int k, Side side, double rho, int n) {
  if (k < 0 || k >= n) throw InvalidArgument("cube_ball: coordinate out of range");
  if (!(rho > 0.0)) throw InvalidArgument("cube_ball: rho must be positive");
  const double sign = side == Side::Upper ? 1.0 : -1.0;
  Ball b;
  b.tag = {side == Side::Upper ? FacetKind::CubeUpper : FacetKind::CubeLower, k + 1};
  b.center = Vec::Constant(n, 0.5) + sign * rho * Vec::Unit(n, k);
  b.radius_sq = (0.5 + rho) * (0.5 + rho) + (n - 1) / 4.0;
  return b;
}

/// Foot of the perpendicular from 1/2*1 onto {S^T x = 0}.
inline Vec hyperplane_foot(const RsspInstance& inst) {
  return Vec::Constant(inst.dim(), 0.5) - (0.5 * inst.sum() / (inst.norm() * inst.norm())) * inst.weights();
}

/// Squared radius of the (n-1)-sphere where {S^T x = 0} cuts the circumscribed sphere.
/// n/4 - sigma^2/4, computed as sum_{i<j} (s_i - s_j)^2 / (4 |S|^2) so that it is
/// exactly zero when all weights are equal.
inline double hyperplane_imprint_sq(const RsspInstance& inst) {
  const Vec& s = inst.weights();
  double spread = 0.0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    for (Eigen::Index j = i + 1; j < s.size(); ++j) spread += (s[i] - s[j]) * (s[i] - s[j]);
  return spread / (4.0 * inst.norm() * inst.norm());
}

/// Ball for {S^T x <= 0}: center 1/2*1 - rho*S/||S||; the sphere contains the
/// imprint of the hyperplane on the circumscribed sphere.
inline Ball halfspace_ball_s(const RsspInstance& inst, double rho) {
  if (!(rho > 0.0)) throw InvalidArgument("halfspace_ball_s: rho must be positive");
  const double imprint = hyperplane_imprint_sq(inst);
  if (!(imprint > 0.0))
    throw DegenerateHyperplane("S^T x = 0 does not cut the circumscribed ball of the unit cube");
  // |C_s - P_s| = |rho - sigma/2| since both points lie on the S-axis through 1/2*1
  const double offset = rho - 0.5 * inst.sigma();
  Ball b;
  b.tag = {FacetKind::Hyperplane, 0};
  b.center = Vec::Constant(inst.dim(), 0.5) - rho * inst.unit();
  b.radius_sq = offset * offset + imprint;
  return b;
}

inline Vec sum_foot(int n) { return Vec::Constant(n, 0.5 / n); }

inline double sum_imprint_sq(int n) { return 0.5 - 0.25 / n; }

/// Ball for {1^T x >= 1/2}: center 1/2*1 + rho*1/sqrt(n).
inline Ball halfspace_ball_h(int n, double rho) {
  if (n < 1) throw InvalidArgument("halfspace_ball_h: dimension must be positive");
  if (!(rho >= 0.0) || !std::isfinite(rho)) throw InvalidArgument("halfspace_ball_h: rho must be non-negative");
  const double root_n = std::sqrt(static_cast<double>(n));
  const double offset = rho + (n - 1) / (2.0 * root_n);
  Ball b;
  b.tag = {FacetKind::Sum, 0};
  b.center = Vec::Constant(n, 0.5) + (rho / root_n) * Vec::Ones(n);
  b.radius_sq = offset * offset + sum_imprint_sq(n);
  return b;
}

/// Smallest rho (plus a 1e-6 margin) with all radii >= sqrt(n)/2, C_s^T S < 0 and
/// C_h^T 1 > 0.
///
/// Cube and h radii are >= sqrt(n)/2 for any rho >= 0 and C_h^T 1 > 0 always.
/// For the s-ball, r_s^2 = rho^2 - rho*sigma + n/4 with sigma = S^T 1/||S||, so
/// r_s >= sqrt(n)/2 iff rho >= sigma, and C_s^T S = ||S||(sigma/2 - rho) < 0 iff
/// rho > sigma/2.  Hence rho_bar = max(eps0, max(0, sigma)) + eps0.
inline double rho_bar(const RsspInstance& inst) {
  constexpr double eps0 = 1e-6;
  return std::max(eps0, std::max(0.0, inst.sigma())) + eps0;
}

/// rho from which on every point of Q_rho lies within delta of the facet
/// halfspace of its ball.  A ball whose center is at distance q from its
/// hyperplane and whose imprint radius is a overshoots the hyperplane by
/// a^2 / (q + sqrt(q^2 + a^2)); bounding a^2 by n/4 this is <= delta as soon as
/// q >= (n/4 - delta^2) / (2 delta).
inline double rho_delta(const RsspInstance& inst, double delta) {
  if (!(delta > 0.0)) throw InvalidArgument("rho_delta: delta must be positive");
  const int n = inst.dim();
  const double q_req = std::max(0.0, (n / 4.0 - delta * delta) / (2.0 * delta));
  const double cube = q_req - 0.5;
  const double s = q_req + 0.5 * inst.sigma();
  const double h = q_req - (n - 1) / (2.0 * std::sqrt(static_cast<double>(n)));
  return std::max({rho_bar(inst), cube, s, h});
}

/// Q_rho: 2n+2 balls in the order 1+, 1-, ..., n+, n-, s, h.
inline BallIntersection build_q(const RsspInstance& inst, double rho) {
  if (!(rho > 0.0) || !std::isfinite(rho)) throw InvalidArgument("build_q: rho must be positive");
  const int n = inst.dim();
  BallIntersection q;
  q.rho = rho;
  q.balls.reserve(static_cast<std::size_t>(2 * n + 2));
  for (int k = 0; k < n; ++k) {
    q.balls.push_back(cube_ball(k, Side::Upper, rho, n));
    q.balls.push_back(cube_ball(k, Side::Lower, rho, n));
  }
  q.balls.push_back(halfspace_ball_s(inst, rho));
  q.balls.push_back(halfspace_ball_h(n, rho));
  q.foot_s = hyperplane_foot(inst);
  q.foot_h = sum_foot(n);
  q.imprint_s_sq = hyperplane_imprint_sq(inst);
  q.imprint_h_sq = sum_imprint_sq(n);
  q.below_rho_bar = rho < rho_bar(inst);
  return q;
}

struct HValue {
  double value = 0.0;
  std::size_t argmax = 0;
};

/// h(x) = max_p (||x - C_p||^2 - r_p^2); ties go to the first ball in order.
inline HValue h_rho(const Vec& x, const BallIntersection& q) {
  if (x.size() != q.dim()) throw InvalidArgument("h_rho: dimension mismatch");
  HValue out{q.balls.front().excess(x), 0};
  for (std::size_t p = 1; p < q.balls.size(); ++p) {
    const double v = q.balls[p].excess(x);
    if (v > out.value) out = {v, p};
  }
  return out;
}

/// Hit-and-run over {h <= level} from an interior start point.
inline std::vector<Vec> sample_ball_intersection(const BallIntersection& q, const Vec& start,
                                                 std::size_t count, std::uint64_t seed,
                                                 double level = 0.0) {
  if (h_rho(start, q).value >= level) throw InvalidArgument("sampler start point is not interior");
  std::vector<Vec> out;
  out.reserve(count);
  if (count == 0) return out;
  const int n = q.dim();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unit;
  const std::size_t burn_in = 50 + 10 * static_cast<std::size_t>(n);
  const std::size_t thin = static_cast<std::size_t>(n);
  Vec x = start;
  Vec d(n);
  for (std::size_t step = 0; out.size() < count; ++step) {
    for (int i = 0; i < n; ++i) d[i] = normal(rng);
    d.normalize();
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    for (const auto& b : q.balls) {
      // |x + t d - c|^2 <= r^2 + level  <=>  t^2 + 2 t d.(x-c) + |x-c|^2 - r^2 - level <= 0
      const Vec off = x - b.center;
      const double half_b = d.dot(off);
      const double c0 = off.squaredNorm() - b.radius_sq - level;
      const double disc = std::max(0.0, half_b * half_b - c0);
      const double root = std::sqrt(disc);
      lo = std::max(lo, -half_b - root);
      hi = std::min(hi, -half_b + root);
    }
    if (hi > lo) x += (lo + (hi - lo) * unit(rng)) * d;
    if (step >= burn_in && (step - burn_in) % thin == 0) out.push_back(x);
  }
  return out;
}

/// Three n-disks D_i = B(-q_i e_1, r_i) sharing the (n-1)-sphere
/// {e_1^T x = 0, |x| = a}.  Checks, by sampling, the inclusions
///   H∩D3 ⊆ D1∩D3 ⊆ D2∩D3   and   G∩D1 ⊆ G∩D2 ⊆ G∩D3
/// with H = {x_1 <= 0}, G = {x_1 >= 0}.
class SharedSphereDisks {
 public:
  SharedSphereDisks(double q1, double q2, double q3, double r1, double r2, double r3, int n)
      : q_{q1, q2, q3}, r_sq_{r1 * r1, r2 * r2, r3 * r3}, n_(n) {
    if (n < 1) throw InvalidArgument("disk lemma: dimension must be positive");
    if (!(q1 > 0.0) || !(q2 > 0.0)) throw InvalidArgument("disk lemma: q1, q2 must be positive");
    if (!(r1 >= r2 && r2 >= r3 && r3 >= 0.0)) throw InvalidArgument("disk lemma: need r1 >= r2 >= r3 >= 0");
    a_sq_ = r_sq_[0] - q1 * q1;
    if (!(a_sq_ > 0.0)) throw InvalidArgument("disk lemma: shared sphere radius must be positive");
    for (int i = 1; i < 3; ++i) {
      const double ai = r_sq_[i] - q_[i] * q_[i];
      if (std::abs(ai - a_sq_) > 1e-9 * std::max(1.0, r_sq_[0]))
        throw InvalidArgument("disk lemma: disks do not share a common (n-1)-sphere");
    }
  }

  /// Disks from the offsets alone: r_i = sqrt(q_i^2 + a^2).
  static SharedSphereDisks from_offsets(double q1, double q2, double q3, double a, int n) {
    return {q1, q2, q3, std::sqrt(q1 * q1 + a * a), std::sqrt(q2 * q2 + a * a), std::sqrt(q3 * q3 + a * a), n};
  }

  double shared_radius_sq() const { return a_sq_; }

  /// Returns the number of sampled points that break one of the inclusions.
  std::size_t count_violations(std::size_t samples, std::uint64_t seed) const {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    const double r1 = std::sqrt(r_sq_[0]);
    const double a = std::sqrt(a_sq_);
    std::size_t violations = 0;
    Vec x(n_);
    for (std::size_t s = 0; s < samples; ++s) {
      if (s % 2 == 0) {
        // uniform in the bounding box of the largest disk
        x[0] = -q_[0] + r1 * unit(rng);
        for (int i = 1; i < n_; ++i) x[i] = r1 * unit(rng);
      } else {
        // concentrated around the shared sphere, where the disks cross
        Vec v(n_);
        for (int i = 0; i < n_; ++i) v[i] = normal(rng);
        v[0] = 0.0;
        const double vn = v.norm();
        if (vn > 0.0) v *= (a * (1.0 + 0.1 * unit(rng))) / vn;
        v[0] = 0.1 * a * unit(rng);
        x = v;
      }
      violations += violated(x) ? 1 : 0;
    }
    return violations;
  }

  bool violated(const Vec& x) const {
    const bool in_h = x[0] <= 0.0;
    const bool in_g = x[0] >= 0.0;
    const bool d1 = inside(0, x, 0.0), d2 = inside(1, x, 0.0), d3 = inside(2, x, 0.0);
    const bool d1_loose = inside(0, x, slack_), d2_loose = inside(1, x, slack_), d3_loose = inside(2, x, slack_);
    if (in_h && d3 && !d1_loose) return true;
    if (d1 && d3 && !d2_loose) return true;
    if (in_g && d1 && !d2_loose) return true;
    if (in_g && d2 && !d3_loose) return true;
    return false;
  }

 private:
  bool inside(int i, const Vec& x, double slack) const {
    double d = (x[0] + q_[i]) * (x[0] + q_[i]);
    for (int k = 1; k < n_; ++k) d += x[k] * x[k];
    return d <= r_sq_[i] + slack * (1.0 + r_sq_[i]);
  }

  double q_[3];
  double r_sq_[3];
  double a_sq_ = 0.0;
  int n_;
  double slack_ = 1e-9;
};

}  // namespace ballcage
