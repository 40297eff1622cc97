#pragma once

// Kelley cutting planes for small convex programs of the form
//
//   minimize   max( affine pieces, |x - c_q|^2 - r_q^2 pieces ) + d^T x
//   subject to linear rows, |x - c_b|^2 <= r_b^2 + level, box bounds,
//
// and the inner-point problem built on it: minimize (h - |x - C|^2) over
// {h <= 1}.  Subtracting |x - C|^2 from each ball excess leaves an affine
// function, so the objective is a max of 2n+2 affine pieces.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <tuple>
#include <utility>
#include <vector>

#include "ballcage/geometry.hpp"
#include "ballcage/lp.hpp"

namespace ballcage {

struct AffinePiece {
  Vec g;
  double c0 = 0.0;  // piece(x) = g^T x + c0
};

struct QuadraticPiece {
  Vec center;
  double offset = 0.0;  // piece(x) = |x - center|^2 - offset
};

struct CuttingPlaneProblem {
  int dim = 0;
  std::vector<AffinePiece> affine;
  std::vector<QuadraticPiece> quadratic;
  std::vector<Ball> balls;  // constraints |x - center|^2 <= radius_sq + level
  double level = 0.0;
  std::optional<HPolytope> rows;
  Vec lower, upper;  // box; must be finite
  Vec perturbation;  // optional linear term d
  double tol = 1e-8;
  std::size_t max_iterations = 2000;
  // early exits used by emptiness tests
  std::optional<double> stop_if_lower_above;
  std::optional<double> stop_if_upper_below;
};

struct CuttingPlaneResult {
  bool feasible = false;  // the LP relaxation stayed feasible
  Vec x;
  double value = 0.0;        // objective at x (without the perturbation)
  double lower_bound = 0.0;  // LP bound on the perturbed objective
  double max_violation = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
};

namespace detail {

inline double piece_max(const CuttingPlaneProblem& pr, const Vec& x, std::size_t* which_quad = nullptr) {
  double v = -std::numeric_limits<double>::infinity();
  for (const auto& a : pr.affine) v = std::max(v, a.g.dot(x) + a.c0);
  for (std::size_t i = 0; i < pr.quadratic.size(); ++i) {
    const double q = (x - pr.quadratic[i].center).squaredNorm() - pr.quadratic[i].offset;
    if (q > v) {
      v = q;
      if (which_quad) *which_quad = i;
    }
  }
  return v;
}

}  // namespace detail

inline CuttingPlaneResult minimize_cutting_planes(const CuttingPlaneProblem& pr) {
  const int n = pr.dim;
  if (n < 1 || pr.lower.size() != n || pr.upper.size() != n)
    throw InvalidArgument("cutting planes: inconsistent dimensions");
  if (pr.affine.empty() && pr.quadratic.empty()) throw InvalidArgument("cutting planes: empty objective");
  const Vec d = pr.perturbation.size() == n ? pr.perturbation : Vec::Zero(n);

  // LP variables (x, t); objective t + d^T x.
  std::vector<Vec> a_rows;
  std::vector<double> b_rows;
  auto add_row = [&](Vec a, double b) {
    a_rows.push_back(std::move(a));
    b_rows.push_back(b);
  };
  for (int i = 0; i < n; ++i) {
    add_row(Vec::Unit(n + 1, i), pr.upper[i]);
    add_row(-Vec::Unit(n + 1, i), -pr.lower[i]);
  }
  if (pr.rows) {
    for (const auto& r : pr.rows->rows()) {
      Vec a = Vec::Zero(n + 1);
      a.head(n) = r.a;
      add_row(std::move(a), r.b);
    }
  }
  for (const auto& p : pr.affine) {
    Vec a(n + 1);
    a.head(n) = p.g;
    a[n] = -1.0;
    add_row(std::move(a), -p.c0);
  }
  // tangent of a quadratic piece at y:  |y-c|^2 - off + 2(y-c)^T (x-y) <= t
  auto quad_cut = [&](const QuadraticPiece& q, const Vec& y) {
    Vec a(n + 1);
    a.head(n) = 2.0 * (y - q.center);
    a[n] = -1.0;
    add_row(std::move(a), 2.0 * (y - q.center).dot(y) - (y - q.center).squaredNorm() + q.offset);
  };
  const Vec mid = 0.5 * (pr.lower + pr.upper);
  for (const auto& q : pr.quadratic) quad_cut(q, mid);

  Vec obj = Vec::Zero(n + 1);
  obj.head(n) = d;
  obj[n] = 1.0;

  CuttingPlaneResult res;
  for (res.iterations = 1; res.iterations <= pr.max_iterations; ++res.iterations) {
    Mat a(static_cast<Eigen::Index>(a_rows.size()), n + 1);
    Vec b(static_cast<Eigen::Index>(b_rows.size()));
    for (std::size_t i = 0; i < a_rows.size(); ++i) {
      a.row(static_cast<Eigen::Index>(i)) = a_rows[i].transpose();
      b[static_cast<Eigen::Index>(i)] = b_rows[i];
    }
    const LpResult lp = lp_solve(obj, a, b, Sense::Minimize);
    if (lp.status == LpStatus::Infeasible) {
      res.feasible = false;
      res.converged = true;
      return res;
    }
    if (lp.status != LpStatus::Optimal) throw Error("cutting planes: relaxation is unbounded");
    res.feasible = true;
    res.x = lp.x.head(n);
    const double t = lp.x[n];
    res.lower_bound = lp.value;
    res.value = detail::piece_max(pr, res.x);
    const double gap = res.value - t;

    res.max_violation = 0.0;
    bool cut = false;
    for (const auto& ball : pr.balls) {
      const double g = ball.excess(res.x) - pr.level;
      res.max_violation = std::max(res.max_violation, g);
      if (g > pr.tol) {
        // g(y) + 2(y-c)^T (x-y) <= 0
        Vec row = Vec::Zero(n + 1);
        row.head(n) = 2.0 * (res.x - ball.center);
        add_row(std::move(row), 2.0 * (res.x - ball.center).dot(res.x) - g);
        cut = true;
      }
    }
    for (const auto& q : pr.quadratic) {
      if ((res.x - q.center).squaredNorm() - q.offset > t + pr.tol) {
        quad_cut(q, res.x);
        cut = true;
      }
    }
    const double upper = res.value + d.dot(res.x);
    if (pr.stop_if_lower_above && res.lower_bound > *pr.stop_if_lower_above) break;
    if (pr.stop_if_upper_below && res.max_violation <= pr.tol && upper < *pr.stop_if_upper_below) break;
    if (!cut || (gap <= pr.tol && res.max_violation <= pr.tol)) {
      res.converged = true;
      break;
    }
  }
  if (res.iterations > pr.max_iterations) res.iterations = pr.max_iterations;
  return res;
}

/// Bounding box of the intersection of the balls enlarged by level.
inline std::pair<Vec, Vec> ball_box(const BallIntersection& q, double level) {
  const int n = q.dim();
  Vec lo = Vec::Constant(n, -std::numeric_limits<double>::infinity());
  Vec hi = Vec::Constant(n, std::numeric_limits<double>::infinity());
  for (const auto& b : q.balls) {
    const double r = std::sqrt(std::max(0.0, b.radius_sq + level));
    lo = lo.cwiseMax((b.center.array() - r).matrix());
    hi = hi.cwiseMin((b.center.array() + r).matrix());
  }
  return {lo, hi};
}

enum class InnerCase { InteriorNegative, Boundary, ExteriorPositive };
enum class Singleton { Unique, SuspectedFlat };

inline const char* to_string(InnerCase c) {
  switch (c) {
    case InnerCase::InteriorNegative: return "InteriorNegative";
    case InnerCase::Boundary: return "Boundary";
    case InnerCase::ExteriorPositive: return "ExteriorPositive";
  }
  return "?";
}

inline const char* to_string(Singleton s) { return s == Singleton::Unique ? "Unique" : "SuspectedFlat"; }

struct InnerPointOptions {
  std::uint64_t seed = 0;
  double tol_case = 1e-7;
  double flat_tol = 1e-4;
  double perturbation = 1e-6;  // relative to the largest piece gradient
  std::size_t max_iterations = 2000;
  std::optional<HPolytope> polytope;  // P, for the interior test
  double interior_slack = 1e-6;
};

struct InnerPointResult {
  Vec x_star;
  double value = 0.0;  // min of (h - f), i.e. -R_bar^2 when negative
  double h_at_star = 0.0;
  InnerCase inner_case = InnerCase::InteriorNegative;
  bool in_int_p = false;
  Singleton singleton_confidence = Singleton::Unique;
  std::size_t iterations = 0;
  bool converged = false;
  double flat_spread = 0.0;  // distance between the two perturbed minimizers
};

/// l_p(x) = 2 (C - C_p)^T x + |C_p|^2 - |C|^2 - r_p^2, so h - |x - C|^2 = max_p l_p.
inline std::vector<AffinePiece> levelset_pieces(const BallIntersection& q, const Vec& c) {
  std::vector<AffinePiece> out;
  out.reserve(q.size());
  const double c_sq = c.squaredNorm();
  for (const auto& b : q.balls) out.push_back({2.0 * (c - b.center), b.center.squaredNorm() - c_sq - b.radius_sq});
  return out;
}

inline double h_minus_f(const Vec& x, const BallIntersection& q, const Vec& c) {
  double v = -std::numeric_limits<double>::infinity();
  for (const auto& p : levelset_pieces(q, c)) v = std::max(v, p.g.dot(x) + p.c0);
  return v;
}

inline InnerCase classify_case(double h_at_star, double tol_case) {
  if (h_at_star < -tol_case) return InnerCase::InteriorNegative;
  if (h_at_star <= tol_case) return InnerCase::Boundary;
  return InnerCase::ExteriorPositive;
}

inline InnerCase classify_case(const InnerPointResult& r, double tol_case) { return classify_case(r.h_at_star, tol_case); }

/// Minimizer of (h - f) over {h <= 1}.  Flatness is probed by re-solving with
/// a tiny random tilt d and with -d: a unique minimizer stays put under both,
/// a flat optimal face sends them to opposite ends.
inline InnerPointResult minimize_h_minus_f(const BallIntersection& q, const Vec& c, const InnerPointOptions& opts = {}) {
  if (c.size() != q.dim()) throw InvalidArgument("minimize_h_minus_f: dimension mismatch");
  const int n = q.dim();
  CuttingPlaneProblem pr;
  pr.dim = n;
  pr.affine = levelset_pieces(q, c);
  pr.balls = q.balls;
  pr.level = 1.0;
  std::tie(pr.lower, pr.upper) = ball_box(q, 1.0);
  if (!((pr.upper - pr.lower).minCoeff() >= 0.0)) throw Error("ball system {h <= 1} is empty");
  pr.max_iterations = opts.max_iterations;

  const CuttingPlaneResult base = minimize_cutting_planes(pr);
  if (!base.feasible) throw Error("ball system {h <= 1} is empty");

  double grad_scale = 0.0;
  for (const auto& p : pr.affine) grad_scale = std::max(grad_scale, p.g.norm());
  std::mt19937_64 rng(opts.seed);
  std::normal_distribution<double> normal;
  Vec dir(n);
  for (int i = 0; i < n; ++i) dir[i] = normal(rng);
  dir *= opts.perturbation * std::max(1.0, grad_scale) / dir.norm();

  pr.perturbation = dir;
  const CuttingPlaneResult plus = minimize_cutting_planes(pr);
  pr.perturbation = -dir;
  const CuttingPlaneResult minus = minimize_cutting_planes(pr);

  InnerPointResult out;
  out.flat_spread = (plus.x - minus.x).norm();
  out.singleton_confidence = out.flat_spread > opts.flat_tol ? Singleton::SuspectedFlat : Singleton::Unique;
  out.x_star = out.singleton_confidence == Singleton::Unique ? base.x : plus.x;
  out.value = h_minus_f(out.x_star, q, c);
  out.h_at_star = h_rho(out.x_star, q).value;
  out.inner_case = classify_case(out.h_at_star, opts.tol_case);
  out.iterations = base.iterations + plus.iterations + minus.iterations;
  out.converged = base.converged && plus.converged && minus.converged;
  if (opts.polytope) {
    out.in_int_p = true;
    for (const auto& row : opts.polytope->rows())
      if (!(row.b - row.a.dot(out.x_star) > opts.interior_slack)) out.in_int_p = false;
  }
  return out;
}

}  // namespace ballcage
