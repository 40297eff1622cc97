#pragma once

// Dense linear programming over {A x <= b} with free variables, plus the
// polytope predicates built on it: feasibility, containment by per-facet LPs,
// Euclidean projection and hit-and-run sampling.
//
// The simplex is a textbook two-phase tableau method with Bland's rule.  It is
// meant for the small systems of this library (tens of rows), where a dense
// tableau is both fast enough and easy to keep deterministic.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "ballcage/instance.hpp"

namespace ballcage {

class LpIterationLimit : public Error {
 public:
  using Error::Error;
};

class InfeasiblePolytope : public Error {
 public:
  using Error::Error;
};

class UnboundedPolytope : public Error {
 public:
  using Error::Error;
};

enum class LpStatus { Optimal, Infeasible, Unbounded };
enum class Sense { Maximize, Minimize };

inline const char* to_string(LpStatus s) {
  switch (s) {
    case LpStatus::Optimal: return "Optimal";
    case LpStatus::Infeasible: return "Infeasible";
    case LpStatus::Unbounded: return "Unbounded";
  }
  return "?";
}

struct LpResult {
  LpStatus status = LpStatus::Infeasible;
  Vec x;  // empty unless Optimal
  double value = 0.0;
};

namespace detail {

constexpr double kPivotTol = 1e-11;
constexpr double kCostTol = 1e-9;
constexpr int kPivotCap = 200000;

// Standard form: min d^T z, T z = rhs, z >= 0, with z = (x+, x-, slack, artificial).
// Only the constraint part is kept here; objectives are priced on demand so
// that one phase-1 solve can serve many phase-2 objectives.
class Tableau {
 public:
  Tableau(const Mat& a, const Vec& b) : n_(static_cast<int>(a.cols())) {
    // drop constant rows after checking them; scale the rest by their largest entry
    std::vector<Eigen::Index> keep;
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      const double scale = a.row(i).cwiseAbs().maxCoeff();
      if (scale == 0.0) {
        if (b[i] < -1e-12) trivially_infeasible_ = true;
        continue;
      }
      keep.push_back(i);
    }
    m_ = static_cast<int>(keep.size());
    int artificials = 0;
    for (auto i : keep) artificials += b[i] < 0.0 ? 1 : 0;
    slack0_ = 2 * n_;
    art0_ = slack0_ + m_;
    cols_ = art0_ + artificials;
    t_ = Mat::Zero(m_ + 1, cols_ + 1);
    basis_.assign(static_cast<std::size_t>(m_), 0);
    int next_art = art0_;
    for (int r = 0; r < m_; ++r) {
      const auto i = keep[static_cast<std::size_t>(r)];
      const double scale = a.row(i).cwiseAbs().maxCoeff();
      const double sign = b[i] < 0.0 ? -1.0 : 1.0;
      for (int j = 0; j < n_; ++j) {
        t_(r, j) = sign * a(i, j) / scale;
        t_(r, n_ + j) = -sign * a(i, j) / scale;
      }
      t_(r, slack0_ + r) = sign;
      t_(r, cols_) = sign * b[i] / scale;
      if (sign < 0.0) {
        t_(r, next_art) = 1.0;
        basis_[static_cast<std::size_t>(r)] = next_art++;
      } else {
        basis_[static_cast<std::size_t>(r)] = slack0_ + r;
      }
    }
  }

  /// Phase 1.  Returns false when the system has no solution.
  bool make_feasible() {
    if (trivially_infeasible_) return false;
    if (cols_ == art0_) return true;
    std::vector<double> cost(static_cast<std::size_t>(cols_), 0.0);
    for (int j = art0_; j < cols_; ++j) cost[static_cast<std::size_t>(j)] = 1.0;
    price(cost);
    if (run(cols_) != LpStatus::Optimal) return false;  // phase 1 is bounded below by 0
    double rhs_scale = 1.0;
    for (int r = 0; r < m_; ++r) rhs_scale = std::max(rhs_scale, std::abs(t_(r, cols_)));
    if (-t_(m_, cols_) > 1e-9 * rhs_scale) return false;
    // drive zero-level artificials out of the basis where possible
    for (int r = 0; r < m_; ++r) {
      if (basis_[static_cast<std::size_t>(r)] < art0_) continue;
      for (int j = 0; j < art0_; ++j) {
        if (std::abs(t_(r, j)) > 1e-9) {
          pivot(r, j);
          break;
        }
      }
    }
    return true;
  }

  /// Phase 2 on a feasible tableau: minimize cost^T x over the original variables.
  LpStatus minimize(const Vec& c) {
    std::vector<double> cost(static_cast<std::size_t>(cols_), 0.0);
    for (int j = 0; j < n_; ++j) {
      cost[static_cast<std::size_t>(j)] = c[j];
      cost[static_cast<std::size_t>(n_ + j)] = -c[j];
    }
    price(cost);
    return run(art0_);
  }

  Vec solution() const {
    Vec z = Vec::Zero(cols_);
    for (int r = 0; r < m_; ++r) z[basis_[static_cast<std::size_t>(r)]] = t_(r, cols_);
    return z.head(n_) - z.segment(n_, n_);
  }

  int dim() const { return n_; }

 private:
  void price(const std::vector<double>& cost) {
    t_.row(m_).setZero();
    for (int j = 0; j < cols_; ++j) t_(m_, j) = cost[static_cast<std::size_t>(j)];
    for (int r = 0; r < m_; ++r) {
      const double cb = cost[static_cast<std::size_t>(basis_[static_cast<std::size_t>(r)])];
      if (cb != 0.0) t_.row(m_) -= cb * t_.row(r);
    }
  }

  // Bland's rule: entering = lowest column with negative reduced cost,
  // leaving = minimum ratio with ties to the lowest basic variable index.
  LpStatus run(int allowed_cols) {
    for (int it = 0; it < kPivotCap; ++it) {
      int enter = -1;
      for (int j = 0; j < allowed_cols; ++j) {
        if (t_(m_, j) < -kCostTol) {
          enter = j;
          break;
        }
      }
      if (enter < 0) return LpStatus::Optimal;
      int leave = -1;
      double best = std::numeric_limits<double>::infinity();
      for (int r = 0; r < m_; ++r) {
        const double coef = t_(r, enter);
        if (coef <= kPivotTol) continue;
        const double ratio = std::max(0.0, t_(r, cols_)) / coef;
        if (leave < 0 || ratio < best - 1e-12) {
          best = ratio;
          leave = r;
        } else if (ratio <= best + 1e-12 &&
                   basis_[static_cast<std::size_t>(r)] < basis_[static_cast<std::size_t>(leave)]) {
          leave = r;
        }
      }
      if (leave < 0) return LpStatus::Unbounded;
      pivot(leave, enter);
    }
    throw LpIterationLimit("simplex pivot limit exceeded");
  }

  void pivot(int r, int j) {
    t_.row(r) /= t_(r, j);
    for (int i = 0; i <= m_; ++i) {
      if (i == r) continue;
      const double f = t_(i, j);
      if (f != 0.0) t_.row(i) -= f * t_.row(r);
    }
    basis_[static_cast<std::size_t>(r)] = j;
  }

  int n_ = 0, m_ = 0, slack0_ = 0, art0_ = 0, cols_ = 0;
  bool trivially_infeasible_ = false;
  Mat t_;
  std::vector<int> basis_;
};

}  // namespace detail

/// One feasible region, many objectives: phase 1 runs once on construction.
class LpSession {
 public:
  LpSession(const Mat& a, const Vec& b) : tab_(a, b), a_(a), b_(b) {
    if (a.rows() != b.size()) throw InvalidArgument("LP: row count of A and b differ");
    feasible_ = tab_.make_feasible();
  }
  explicit LpSession(const HPolytope& p) : LpSession(p.matrix(), p.rhs()) {}

  bool feasible() const { return feasible_; }

  /// A feasible point (the phase-1 basic solution).
  Vec point() const { return feasible_ ? tab_.solution() : Vec(); }

  LpResult solve(const Vec& c, Sense sense) const {
    if (c.size() != tab_.dim()) throw InvalidArgument("LP: objective has wrong length");
    LpResult out;
    if (!feasible_) return out;
    detail::Tableau work = tab_;
    const Vec cost = sense == Sense::Maximize ? Vec(-c) : c;
    out.status = work.minimize(cost);
    if (out.status == LpStatus::Optimal) {
      out.x = to_vertex(work.solution(), cost);
      out.value = c.dot(out.x);
    } else {
      out.value = sense == Sense::Maximize ? std::numeric_limits<double>::infinity()
                                           : -std::numeric_limits<double>::infinity();
    }
    return out;
  }

  /// Moves an optimal point to a vertex of its optimal face.  Splitting free
  /// variables lets the simplex stop at basic solutions that are not vertices
  /// of {Ax <= b} (x_j+ = x_j- = 0 on an edge); at an optimum the cost lies in
  /// the span of the active rows, so stepping along their null space keeps the
  /// objective.  Finishes by solving the active rows exactly.
  Vec to_vertex(Vec x, const Vec& cost) const {
    const int n = tab_.dim();
    const auto m = a_.rows();
    if (m == 0) return x;
    Vec norms(m);
    for (Eigen::Index i = 0; i < m; ++i) norms[i] = std::max(a_.row(i).norm(), 1e-300);
    auto active_rows = [&](const Vec& y) {
      std::vector<Eigen::Index> act;
      for (Eigen::Index i = 0; i < m; ++i)
        if (a_.row(i).norm() > 0.0 && (b_[i] - a_.row(i).dot(y)) / norms[i] <= 1e-9 * (1.0 + std::abs(b_[i]) / norms[i]))
          act.push_back(i);
      return act;
    };
    auto rows_of = [&](const std::vector<Eigen::Index>& act) {
      Mat m_act(static_cast<Eigen::Index>(act.size()), n);
      for (std::size_t k = 0; k < act.size(); ++k) m_act.row(static_cast<Eigen::Index>(k)) = a_.row(act[k]) / norms[act[k]];
      return m_act;
    };
    const double cost_scale = std::max(1.0, cost.norm());
    for (int step = 0; step <= n; ++step) {
      const auto act = active_rows(x);
      Vec d;
      if (act.empty()) {
        d = Vec::Unit(n, 0);
      } else {
        const Mat m_act = rows_of(act);
        Eigen::FullPivLU<Mat> lu(m_act);
        lu.setThreshold(1e-10);
        if (lu.rank() >= n) {
          // snap onto the vertex defined by the active rows
          Vec rhs(static_cast<Eigen::Index>(act.size()));
          for (std::size_t k = 0; k < act.size(); ++k) rhs[static_cast<Eigen::Index>(k)] = b_[act[k]] / norms[act[k]];
          const Vec v = m_act.colPivHouseholderQr().solve(rhs);
          if (v.allFinite() && (v - x).norm() <= 1e-6 * (1.0 + x.norm()) &&
              max_violation(v) <= std::max(max_violation(x), 1e-12))
            x = v;
          return x;
        }
        d = lu.kernel().col(0);
        d.normalize();
      }
      if (std::abs(cost.dot(d)) > 1e-9 * cost_scale) return x;  // not an optimal face direction
      // prefer the direction along which the face ends
      double t = step_length(x, d);
      if (!std::isfinite(t)) {
        d = -d;
        t = step_length(x, d);
      }
      if (!std::isfinite(t)) return x;  // the face contains a line: no vertex
      x += t * d;
    }
    return x;
  }

 private:
  double step_length(const Vec& x, const Vec& d) const {
    double t = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < a_.rows(); ++i) {
      const double ad = a_.row(i).dot(d);
      if (ad > 1e-12 * std::max(1.0, a_.row(i).norm())) t = std::min(t, std::max(0.0, b_[i] - a_.row(i).dot(x)) / ad);
    }
    return t;
  }

  double max_violation(const Vec& x) const {
    double v = 0.0;
    for (Eigen::Index i = 0; i < a_.rows(); ++i) v = std::max(v, a_.row(i).dot(x) - b_[i]);
    return v;
  }

  detail::Tableau tab_;
  Mat a_;
  Vec b_;
  bool feasible_ = false;
};

inline LpResult lp_solve(const Vec& c, const Mat& a, const Vec& b, Sense sense) {
  if (a.cols() != c.size()) throw InvalidArgument("LP: objective has wrong length");
  return LpSession(a, b).solve(c, sense);
}

inline LpResult lp_solve(const Vec& c, const HPolytope& p, Sense sense) {
  return lp_solve(c, p.matrix(), p.rhs(), sense);
}

struct Feasibility {
  bool feasible = false;
  Vec point;
};

inline Feasibility polytope_feasible(const HPolytope& p) {
  if (p.empty()) return {true, Vec::Zero(p.dim())};
  LpSession s(p);
  return {s.feasible(), s.point()};
}

struct ChebyshevBall {
  Vec center;
  double radius = 0.0;
};

/// Largest inscribed ball, or nothing when P is empty or unbounded in the
/// radius direction.
inline std::optional<ChebyshevBall> chebyshev_center(const HPolytope& p) {
  const int n = p.dim();
  Mat a(static_cast<Eigen::Index>(p.size()) + 1, n + 1);
  Vec b(static_cast<Eigen::Index>(p.size()) + 1);
  for (std::size_t i = 0; i < p.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    a.row(r).head(n) = p[i].a.transpose();
    a(r, n) = p[i].a.norm();
    b[r] = p[i].b;
  }
  a.row(a.rows() - 1).setZero();
  a(a.rows() - 1, n) = -1.0;  // radius >= 0
  b[b.size() - 1] = 0.0;
  const LpResult res = lp_solve(Vec::Unit(n + 1, n), a, b, Sense::Maximize);
  if (res.status != LpStatus::Optimal) return std::nullopt;
  return ChebyshevBall{res.x.head(n), res.x[n]};
}

struct FacetCheck {
  std::string label;
  double max_value = 0.0;  // max a^T x over the inner polytope
  double bound = 0.0;      // b of the outer row
  double slack = 0.0;      // bound - max_value
  Vec witness;             // maximizer (empty when unbounded)
};

struct ContainmentReport {
  bool contained = false;
  bool vacuous = false;    // inner polytope is empty
  bool unbounded = false;  // some outer row is unbounded over inner
  std::vector<FacetCheck> per_facet;
  std::size_t worst = 0;   // index of the most violated (smallest slack) outer row
  Vec witness;             // maximizer of the worst row

  double min_slack() const {
    return per_facet.empty() ? std::numeric_limits<double>::infinity() : per_facet[worst].slack;
  }
};

/// inner ⊆ outer iff max a^T x over inner is <= b for every outer row.
inline ContainmentReport polytope_contains(const HPolytope& outer, const HPolytope& inner, double tol = 1e-8) {
  if (outer.dim() != inner.dim()) throw InvalidArgument("polytope_contains: dimension mismatch");
  ContainmentReport rep;
  LpSession session(inner);
  if (!inner.empty() && !session.feasible()) {
    rep.contained = true;
    rep.vacuous = true;
    return rep;
  }
  rep.contained = true;
  double worst_slack = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < outer.size(); ++i) {
    const auto& row = outer[i];
    FacetCheck fc{row.label, 0.0, row.b, 0.0, Vec()};
    LpResult res;
    if (inner.empty()) {
      res.status = row.a.isZero(0.0) ? LpStatus::Optimal : LpStatus::Unbounded;
      res.x = Vec::Zero(inner.dim());
    } else {
      res = session.solve(row.a, Sense::Maximize);
    }
    if (res.status == LpStatus::Optimal) {
      fc.max_value = row.a.dot(res.x);
      fc.witness = res.x;
    } else {
      fc.max_value = std::numeric_limits<double>::infinity();
      rep.unbounded = true;
    }
    fc.slack = fc.bound - fc.max_value;
    if (fc.slack < -tol) rep.contained = false;
    if (fc.slack < worst_slack) {
      worst_slack = fc.slack;
      rep.worst = i;
    }
    rep.per_facet.push_back(std::move(fc));
  }
  if (!rep.per_facet.empty()) rep.witness = rep.per_facet[rep.worst].witness;
  return rep;
}

struct Projection {
  Vec point;
  double distance = 0.0;
  std::size_t sweeps = 0;
  bool converged = false;
  double achieved_tol = 0.0;  // last sweep's increment change
};

/// Euclidean projection onto P with Dykstra's alternating projections over the
/// rows, visited in row order.
inline Projection project_onto_polytope(const Vec& x, const HPolytope& p, double tol = 1e-8,
                                        std::size_t max_sweeps = 100000) {
  if (x.size() != p.dim()) throw InvalidArgument("project_onto_polytope: dimension mismatch");
  if (!polytope_feasible(p).feasible) throw InfeasiblePolytope("cannot project onto an empty polytope");
  Projection out;
  if (p.contains(x, 0.0)) {
    out.point = x;
    out.converged = true;
    return out;
  }
  const std::size_t m = p.size();
  std::vector<Vec> incr(m, Vec::Zero(x.size()));
  std::vector<double> norm_sq(m);
  for (std::size_t i = 0; i < m; ++i) norm_sq[i] = p[i].a.squaredNorm();
  Vec y = x;
  for (out.sweeps = 1; out.sweeps <= max_sweeps; ++out.sweeps) {
    double change = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      const auto& row = p[i];
      const Vec z = y + incr[i];
      Vec proj = z;
      if (norm_sq[i] > 0.0) {
        const double v = row.a.dot(z) - row.b;
        if (v > 0.0) proj -= (v / norm_sq[i]) * row.a;
      }
      const Vec next_incr = z - proj;
      change += (next_incr - incr[i]).squaredNorm();
      incr[i] = next_incr;
      y = proj;
    }
    out.achieved_tol = std::sqrt(change);
    if (out.achieved_tol <= tol && p.max_violation(y) <= tol) {
      out.converged = true;
      break;
    }
  }
  if (out.sweeps > max_sweeps) out.sweeps = max_sweeps;
  out.point = y;
  out.distance = (y - x).norm();
  return out;
}

/// Hit-and-run over a bounded, full-dimensional P started at its Chebyshev center.
inline std::vector<Vec> sample_polytope(const HPolytope& p, std::size_t count, std::uint64_t seed) {
  std::vector<Vec> out;
  if (count == 0) return out;
  if (!polytope_feasible(p).feasible) throw InfeasiblePolytope("cannot sample an empty polytope");
  const auto cheb = chebyshev_center(p);
  if (!cheb) throw UnboundedPolytope("polytope is unbounded");
  const int n = p.dim();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unit;
  const std::size_t burn_in = 50 + 10 * static_cast<std::size_t>(n);
  const std::size_t thin = static_cast<std::size_t>(n);
  out.reserve(count);
  Vec x = cheb->center;
  Vec d(n);
  for (std::size_t step = 0; out.size() < count; ++step) {
    for (int i = 0; i < n; ++i) d[i] = normal(rng);
    d.normalize();
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    for (const auto& row : p.rows()) {
      const double ad = row.a.dot(d);
      const double gap = std::max(0.0, row.b - row.a.dot(x));
      if (ad > 1e-15) hi = std::min(hi, gap / ad);
      else if (ad < -1e-15) lo = std::max(lo, gap / ad);
    }
    if (!std::isfinite(lo) || !std::isfinite(hi)) throw UnboundedPolytope("polytope is unbounded along a sampled direction");
    if (hi > lo) x += (lo + (hi - lo) * unit(rng)) * d;
    if (step >= burn_in && (step - burn_in) % thin == 0) out.push_back(x);
  }
  return out;
}

}  // namespace ballcage
