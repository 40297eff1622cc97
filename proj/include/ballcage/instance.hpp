#pragma once

// Problem definition for the real subset sum problem: does a nonzero binary x
// exist with S^T x = 0?  Houses the feasibility polytope P, the target point C
// and the candidate verification used as the final decision rule.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <limits>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace ballcage {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// S = 0 (or an empty S); every corner solves it trivially.
class DegenerateInstance : public Error {
 public:
  using Error::Error;
};

class RsspInstance {
 public:
  explicit RsspInstance(Vec weights) : s_(std::move(weights)) {
    if (s_.size() < 1) throw DegenerateInstance("instance needs at least one weight");
    if (!s_.allFinite()) throw InvalidArgument("instance weights must be finite");
    norm_ = s_.norm();
    if (!(norm_ > 0.0)) throw DegenerateInstance("all-zero weight vector is degenerate");
    sum_ = s_.sum();
  }

  static RsspInstance from(std::initializer_list<double> w) {
    Vec v(static_cast<Eigen::Index>(w.size()));
    Eigen::Index i = 0;
    for (double x : w) v[i++] = x;
    return RsspInstance(std::move(v));
  }

  const Vec& weights() const { return s_; }
  int dim() const { return static_cast<int>(s_.size()); }
  double norm() const { return norm_; }
  /// S^T 1
  double sum() const { return sum_; }
  /// S^T 1 / ||S||, the signed offset of the hyperplane direction along 1.
  double sigma() const { return sum_ / norm_; }
  Vec unit() const { return s_ / norm_; }

  bool is_integral() const {
    for (Eigen::Index k = 0; k < s_.size(); ++k)
      if (s_[k] != std::round(s_[k])) return false;
    return true;
  }

 private:
  Vec s_;
  double norm_ = 0.0;
  double sum_ = 0.0;
};

struct Halfspace {
  std::string label;
  Vec a;
  double b = 0.0;
};

/// Labeled inequality system a^T x <= b.  Row order is significant: it fixes
/// witness reporting and the row-by-row comparisons of the level-set systems.
class HPolytope {
 public:
  explicit HPolytope(int dim) : dim_(dim) {
    if (dim < 1) throw InvalidArgument("polytope dimension must be positive");
  }

  void add(std::string label, Vec a, double b) {
    if (a.size() != dim_) throw InvalidArgument("row '" + label + "' has wrong length");
    if (!a.allFinite() || !std::isfinite(b))
      throw InvalidArgument("row '" + label + "' has non-finite entries");
    if (!labels_.insert(label).second)
      throw InvalidArgument("duplicate row label '" + label + "'");
    rows_.push_back(Halfspace{std::move(label), std::move(a), b});
  }

  int dim() const { return dim_; }
  std::size_t size() const { return rows_.size(); }
  bool empty() const { return rows_.empty(); }
  const std::vector<Halfspace>& rows() const { return rows_; }
  const Halfspace& operator[](std::size_t i) const { return rows_[i]; }

  Mat matrix() const {
    Mat a(static_cast<Eigen::Index>(rows_.size()), dim_);
    for (std::size_t i = 0; i < rows_.size(); ++i) a.row(static_cast<Eigen::Index>(i)) = rows_[i].a.transpose();
    return a;
  }

  Vec rhs() const {
    Vec b(static_cast<Eigen::Index>(rows_.size()));
    for (std::size_t i = 0; i < rows_.size(); ++i) b[static_cast<Eigen::Index>(i)] = rows_[i].b;
    return b;
  }

  /// max_i (a_i^T x - b_i); negative means strictly inside every row.
  double max_violation(const Vec& x) const {
    double worst = -std::numeric_limits<double>::infinity();
    for (const auto& r : rows_) worst = std::max(worst, r.a.dot(x) - r.b);
    return worst;
  }

  bool contains(const Vec& x, double tol) const { return rows_.empty() || max_violation(x) <= tol; }

  /// Labels of rows whose coefficient vector is exactly zero (constant rows).
  std::vector<std::string> zero_rows() const {
    std::vector<std::string> out;
    for (const auto& r : rows_)
      if (r.a.isZero(0.0)) out.push_back(r.label);
    return out;
  }

 private:
  int dim_;
  std::vector<Halfspace> rows_;
  std::unordered_set<std::string> labels_;
};

/// P = { S^T x <= 0, 0 <= x_k <= 1, 1^T x >= 1/2 } as 2n+2 rows in the fixed
/// order s, lo_1..lo_n, hi_1..hi_n, h.
inline HPolytope build_polytope(const RsspInstance& inst) {
  const int n = inst.dim();
  HPolytope p(n);
  p.add("s", inst.weights(), 0.0);
  for (int k = 0; k < n; ++k) p.add("lo_" + std::to_string(k + 1), -Vec::Unit(n, k), 0.0);
  for (int k = 0; k < n; ++k) p.add("hi_" + std::to_string(k + 1), Vec::Unit(n, k), 1.0);
  p.add("h", -Vec::Ones(n), -0.5);
  return p;
}

/// C = 1/2 * 1 - (beta/2) * S/||S||.
inline Vec build_center(const RsspInstance& inst, double beta) {
  return Vec::Constant(inst.dim(), 0.5) - 0.5 * beta * inst.unit();
}

/// sum_k x_k (x_k - 1) + beta_hat * S^T x
inline double objective_value(const Vec& x, const RsspInstance& inst, double beta_hat) {
  if (x.size() != inst.dim()) throw InvalidArgument("objective_value: dimension mismatch");
  return x.dot(x - Vec::Ones(x.size())) + beta_hat * inst.weights().dot(x);
}

struct CandidateVerdict {
  Vec rounded;
  bool is_binary = false;
  double max_binary_deviation = 0.0;
  /// |S^T x_rounded| / ||S||
  double residual = 0.0;
  /// |S^T x| / ||S|| on the unrounded point
  double raw_residual = 0.0;
  bool nonzero = false;
  bool accepted = false;
};

/// Rounds x to the nearest binary vector and tests it against the problem
/// definition.  S^T is evaluated on the rounded point so integer instances get
/// an exact answer.
inline CandidateVerdict verify_candidate(const Vec& x, const RsspInstance& inst, double eps_feas) {
  if (x.size() != inst.dim()) throw InvalidArgument("verify_candidate: dimension mismatch");
  if (!(eps_feas > 0.0)) throw InvalidArgument("verify_candidate: eps_feas must be positive");
  CandidateVerdict v;
  v.rounded = Vec::Zero(x.size());
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    v.rounded[k] = x[k] >= 0.5 ? 1.0 : 0.0;
    v.max_binary_deviation = std::max(v.max_binary_deviation, std::abs(x[k] - v.rounded[k]));
  }
  if (!x.allFinite()) v.max_binary_deviation = std::numeric_limits<double>::infinity();
  v.is_binary = v.max_binary_deviation <= eps_feas;
  v.residual = std::abs(inst.weights().dot(v.rounded)) / inst.norm();
  v.raw_residual = std::abs(inst.weights().dot(x)) / inst.norm();
  v.nonzero = v.rounded.sum() > 0.0;
  v.accepted = v.is_binary && v.residual <= eps_feas && v.nonzero;
  return v;
}

/// The farthest-distance test: |‖x* - C‖ - ‖C‖| <= tol.
inline bool check_farthest_distance(const Vec& x_star, const Vec& c, double tol) {
  if (x_star.size() != c.size()) throw InvalidArgument("check_farthest_distance: dimension mismatch");
  return std::abs((x_star - c).norm() - c.norm()) <= tol;
}

}  // namespace ballcage
