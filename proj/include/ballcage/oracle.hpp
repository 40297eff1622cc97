#pragma once

// Ground truth for small instances: exhaustive corner enumeration, the
// achievable-sum table for integer weights, and the farthest vertex of a
// polytope by brute-force vertex enumeration.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "ballcage/instance.hpp"

namespace ballcage {

class OracleLimit : public Error {
 public:
  using Error::Error;
};

struct BruteForceResult {
  bool feasible = false;
  std::vector<Vec> solutions;  // in increasing bitmask order, x_1 is the low bit
  bool truncated = false;
};

/// Every nonzero corner x with |S^T x| <= tol (tol = 0 makes sense for integer S).
inline BruteForceResult brute_force(const RsspInstance& inst, double tol = 0.0, std::size_t max_solutions = 4096) {
  const int n = inst.dim();
  if (n > 24) throw OracleLimit("brute force is capped at n = 24");
  BruteForceResult out;
  const Vec& s = inst.weights();
  const std::uint64_t total = std::uint64_t{1} << n;
  // Gray-code walk: one weight changes per step
  double sum = 0.0;
  std::uint64_t prev = 0;
  std::vector<std::uint64_t> hits;
  const double drift = 1e-9 * (1.0 + s.cwiseAbs().sum());
  for (std::uint64_t i = 1; i < total; ++i) {
    const std::uint64_t gray = i ^ (i >> 1);
    const std::uint64_t flip = gray ^ prev;
    const int k = __builtin_ctzll(flip);
    sum += (gray & flip) ? s[k] : -s[k];
    prev = gray;
    if (std::abs(sum) <= tol + drift) {
      // recompute exactly to avoid drift from the running sum
      double exact = 0.0;
      for (int j = 0; j < n; ++j)
        if (gray >> j & 1U) exact += s[j];
      if (std::abs(exact) <= tol) hits.push_back(gray);
    }
  }
  std::sort(hits.begin(), hits.end());
  out.feasible = !hits.empty();
  for (auto mask : hits) {
    if (out.solutions.size() >= max_solutions) {
      out.truncated = true;
      break;
    }
    Vec x = Vec::Zero(n);
    for (int j = 0; j < n; ++j) x[j] = (mask >> j & 1U) ? 1.0 : 0.0;
    out.solutions.push_back(std::move(x));
  }
  return out;
}

struct DpTable {
  std::int64_t offset = 0;  // sum v lives at column v + offset
  std::int64_t width = 0;
  std::vector<std::vector<bool>> rows;  // rows[k][v + offset]: some nonempty subset of the first k+1 items sums to v

  bool reachable(std::size_t k, std::int64_t v) const {
    const std::int64_t col = v + offset;
    return col >= 0 && col < width && rows[k][static_cast<std::size_t>(col)];
  }
};

struct DpResult {
  bool feasible = false;
  DpTable table;
};

/// Achievable nonempty subset sums over the range [-M-, M+].
inline DpResult dp_feasible(const std::vector<std::int64_t>& s) {
  if (s.empty()) throw InvalidArgument("dp_feasible: empty instance");
  std::int64_t neg = 0, pos = 0;
  bool any = false;
  for (auto v : s) {
    if (v < 0) neg -= v;
    else pos += v;
    any = any || v != 0;
  }
  if (!any) throw DegenerateInstance("dp_feasible: all-zero instance");
  if (pos + neg + 1 > 10'000'000) throw OracleLimit("dp_feasible: sum range exceeds 1e7 cells");
  DpResult out;
  out.table.offset = neg;
  out.table.width = pos + neg + 1;
  const auto w = static_cast<std::size_t>(out.table.width);
  std::vector<bool> prev(w, false);
  for (auto sk : s) {
    std::vector<bool> cur = prev;
    cur[static_cast<std::size_t>(sk + neg)] = true;
    for (std::size_t col = 0; col < w; ++col) {
      if (!prev[col]) continue;
      const auto to = static_cast<std::int64_t>(col) + sk;
      if (to >= 0 && to < out.table.width) cur[static_cast<std::size_t>(to)] = true;
    }
    out.table.rows.push_back(cur);
    prev = std::move(cur);
  }
  out.feasible = prev[static_cast<std::size_t>(neg)];
  return out;
}

inline DpResult dp_feasible(const RsspInstance& inst) {
  if (!inst.is_integral()) throw InvalidArgument("dp_feasible: weights must be integers");
  std::vector<std::int64_t> s;
  for (Eigen::Index k = 0; k < inst.weights().size(); ++k) {
    const double v = inst.weights()[k];
    if (std::abs(v) > 1e15) throw OracleLimit("dp_feasible: weight out of 64-bit range");
    s.push_back(static_cast<std::int64_t>(v));
  }
  return dp_feasible(s);
}

struct FarthestVertex {
  Vec vertex;
  double distance = 0.0;
  std::vector<Vec> vertices;  // all distinct vertices, lexicographic order
};

/// Enumerates vertices as nonsingular n-row subsystems that are feasible;
/// the farthest from c wins, ties to the lexicographically smallest vertex.
inline FarthestVertex farthest_vertex(const HPolytope& p, const Vec& c, int n_cap = 8, double tol = 1e-9) {
  const int n = p.dim();
  if (n > n_cap) throw OracleLimit("farthest_vertex: dimension above cap");
  if (c.size() != n) throw InvalidArgument("farthest_vertex: dimension mismatch");
  const int m = static_cast<int>(p.size());
  std::vector<Vec> verts;
  if (m >= n) {
    const Mat a = p.matrix();
    const Vec b = p.rhs();
    std::vector<int> idx(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) idx[static_cast<std::size_t>(i)] = i;
    while (true) {
      Mat sub(n, n);
      Vec rhs(n);
      for (int i = 0; i < n; ++i) {
        sub.row(i) = a.row(idx[static_cast<std::size_t>(i)]);
        rhs[i] = b[idx[static_cast<std::size_t>(i)]];
      }
      Eigen::FullPivLU<Mat> lu(sub);
      if (lu.rank() == n) {
        const Vec v = lu.solve(rhs);
        if (p.max_violation(v) <= tol * std::max(1.0, v.cwiseAbs().maxCoeff())) {
          bool dup = false;
          for (const auto& u : verts)
            if ((u - v).cwiseAbs().maxCoeff() <= 1e-9) dup = true;
          if (!dup) verts.push_back(v);
        }
      }
      // next n-subset in lexicographic order
      int i = n - 1;
      while (i >= 0 && idx[static_cast<std::size_t>(i)] == m - n + i) --i;
      if (i < 0) break;
      ++idx[static_cast<std::size_t>(i)];
      for (int j = i + 1; j < n; ++j) idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
    }
  }
  if (verts.empty()) throw OracleLimit("farthest_vertex: polytope has no vertices");
  std::sort(verts.begin(), verts.end(), [](const Vec& x, const Vec& y) {
    return std::lexicographical_compare(x.data(), x.data() + x.size(), y.data(), y.data() + y.size());
  });
  FarthestVertex out;
  out.distance = -1.0;
  for (const auto& v : verts) {
    const double d = (v - c).norm();
    if (d > out.distance + 1e-12) {
      out.distance = d;
      out.vertex = v;
    }
  }
  out.vertices = std::move(verts);
  return out;
}

}  // namespace ballcage
