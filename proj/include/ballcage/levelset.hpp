#pragma once

// Level-set polytopes {x : h(x) - |x - C|^2 <= -R^2}.  Subtracting |x - C|^2
// from every ball constraint cancels the quadratic terms, so the set is cut
// out by one linear row per ball.  Also the alpha-scaled construction whose
// level sets coincide with the unscaled ones after remapping R.

#include <algorithm>
#include <cmath>
#include <string>

#include "ballcage/geometry.hpp"
#include "ballcage/instance.hpp"

namespace ballcage {

class NegativeRadicand : public Error {
 public:
  using Error::Error;
};

/// Row p:  2 (C - C_p)^T x <= |C|^2 - |C_p|^2 + r_p^2 - R^2, labelled with the
/// ball tag.  A ball centered at C gives a constant row, which is kept so tags
/// stay aligned (HPolytope::zero_rows() lists them).
inline HPolytope levelset_polytope(const BallIntersection& q, const Vec& c, double r) {
  if (c.size() != q.dim()) throw InvalidArgument("levelset_polytope: dimension mismatch");
  if (!std::isfinite(r)) throw InvalidArgument("levelset_polytope: R must be finite");
  HPolytope out(q.dim());
  const double c_sq = c.squaredNorm();
  for (const auto& b : q.balls)
    out.add(b.tag.str(), 2.0 * (c - b.center), c_sq - b.center.squaredNorm() + b.radius_sq - r * r);
  return out;
}

struct ScaledConstruction {
  BallIntersection q_hat;
  Vec c_hat;
  double alpha = 1.0;
};

/// Centers pushed out to alpha*rho with the same hyperplane feet and imprints,
/// and C_hat = 1/2*1 - (alpha*beta/2) S/|S|.
inline ScaledConstruction scale_construction(const RsspInstance& inst, double rho, double beta, double alpha) {
  if (!(alpha > 1.0) || !std::isfinite(alpha)) throw InvalidArgument("scale_construction: alpha must be > 1");
  ScaledConstruction out;
  out.q_hat = build_q(inst, alpha * rho);
  out.c_hat = build_center(inst, alpha * beta);
  out.alpha = alpha;
  return out;
}

/// alpha R^2 + alpha(alpha-1) beta^2/4 - (alpha-1) n/4
inline double r_hat_sq(double r, double alpha, double beta, int n) {
  return alpha * r * r + alpha * (alpha - 1.0) * beta * beta / 4.0 - (alpha - 1.0) * n / 4.0;
}

inline double r_hat(double r, double alpha, double beta, int n) {
  if (!(alpha > 1.0)) throw InvalidArgument("r_hat: alpha must be > 1");
  const double sq = r_hat_sq(r, alpha, beta, n);
  if (sq < 0.0) throw NegativeRadicand("scaled level radius is imaginary (R_hat^2 = " + std::to_string(sq) + ")");
  return std::sqrt(sq);
}

struct ScalingDiscrepancy {
  double coefficients = 0.0;  // max |a_hat - alpha a|
  double rhs = 0.0;           // max |b_hat - alpha b|
  double radius_sq = 0.0;     // max |R_hat^2 implied by a row - formula|

  double max() const { return std::max({coefficients, rhs, radius_sq}); }
};

/// Row-by-row comparison of the scaled and unscaled level-set systems.  Rows
/// are matched by tag.
inline ScalingDiscrepancy compare_scaled_rows(const BallIntersection& q, const Vec& c,
                                              const BallIntersection& q_hat, const Vec& c_hat,
                                              double alpha, double r, double r_hat_value) {
  const HPolytope lo = levelset_polytope(q, c, r);
  const HPolytope hi = levelset_polytope(q_hat, c_hat, r_hat_value);
  if (lo.size() != hi.size()) throw InvalidArgument("scaled construction has a different ball count");
  ScalingDiscrepancy d;
  const double c_hat_sq = c_hat.squaredNorm();
  for (std::size_t i = 0; i < lo.size(); ++i) {
    const auto& row = lo[i];
    const auto it = std::find_if(hi.rows().begin(), hi.rows().end(),
                                 [&](const Halfspace& h) { return h.label == row.label; });
    if (it == hi.rows().end()) throw InvalidArgument("scaled construction lacks row '" + row.label + "'");
    d.coefficients = std::max(d.coefficients, (it->a - alpha * row.a).cwiseAbs().maxCoeff());
    d.rhs = std::max(d.rhs, std::abs(it->b - alpha * row.b));
    const Ball& bh = q_hat.balls[static_cast<std::size_t>(it - hi.rows().begin())];
    const double implied = c_hat_sq - bh.center.squaredNorm() + bh.radius_sq - alpha * row.b;
    d.radius_sq = std::max(d.radius_sq, std::abs(implied - r_hat_value * r_hat_value));
  }
  return d;
}

/// Checks that every scaled row is exactly alpha times its unscaled
/// counterpart once R is mapped through r_hat.
inline ScalingDiscrepancy verify_scaling_identity(const RsspInstance& inst, double rho, double beta, double alpha,
                                                  double r) {
  const ScaledConstruction s = scale_construction(inst, rho, beta, alpha);
  const BallIntersection q = build_q(inst, rho);
  const Vec c = build_center(inst, beta);
  return compare_scaled_rows(q, c, s.q_hat, s.c_hat, alpha, r, r_hat(r, alpha, beta, inst.dim()));
}

}  // namespace ballcage
