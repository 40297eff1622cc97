#pragma once

// End-to-end decision procedure: choose beta and rho, find the inner point,
// bisect on the level radius R until the level-set polytope fits inside P,
// read off the last point to enter and test it against the problem definition.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ballcage/geometry.hpp"
#include "ballcage/innerpoint.hpp"
#include "ballcage/instance.hpp"
#include "ballcage/levelset.hpp"
#include "ballcage/lp.hpp"

namespace ballcage {

class ConfigError : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

enum class Verdict { Feasible, Infeasible, Inconclusive };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Feasible: return "Feasible";
    case Verdict::Infeasible: return "Infeasible";
    case Verdict::Inconclusive: return "Inconclusive";
  }
  return "?";
}

struct SolverConfig {
  std::optional<double> beta;  // default max(2 rho_bar + 2, |S|)
  std::optional<double> rho;   // default max(rho_delta(delta), beta/2 + 1)
  double alpha = 2.0;
  double eps_bisect = 1e-7;
  double eps_feas = 1e-6;
  std::uint64_t seed = 0;
  int max_rho_retries = 3;
  double delta = 0.01;
  bool check_scaling = false;
};

struct ResolvedConfig {
  double beta = 0.0;
  double rho = 0.0;
  double rho_bar = 0.0;
  double alpha = 2.0;
  double eps_bisect = 1e-7;
  double eps_feas = 1e-6;
  std::uint64_t seed = 0;
  int max_rho_retries = 3;
  bool check_scaling = false;
};

/// Fills in defaults and enforces beta >= |S|, rho_bar < beta/2 < rho,
/// alpha > 1 and positive tolerances.
inline ResolvedConfig resolve_config(const RsspInstance& inst, const SolverConfig& cfg) {
  ResolvedConfig r;
  r.rho_bar = rho_bar(inst);
  r.beta = cfg.beta.value_or(std::max(2.0 * r.rho_bar + 2.0, inst.norm()));
  auto finite_positive = [](double v) { return std::isfinite(v) && v > 0.0; };
  if (!std::isfinite(r.beta)) throw ConfigError("beta must be finite");
  if (r.beta < inst.norm()) throw ConfigError("beta must be at least |S| = " + std::to_string(inst.norm()));
  if (!(r.rho_bar < r.beta / 2.0)) throw ConfigError("beta/2 must exceed rho_bar = " + std::to_string(r.rho_bar));
  r.rho = cfg.rho.value_or(std::max(rho_delta(inst, cfg.delta), r.beta / 2.0 + 1.0));
  if (!std::isfinite(r.rho)) throw ConfigError("rho must be finite");
  if (!(r.beta / 2.0 < r.rho)) throw ConfigError("rho must exceed beta/2 = " + std::to_string(r.beta / 2.0));
  if (!(cfg.alpha > 1.0) || !std::isfinite(cfg.alpha)) throw ConfigError("alpha must be > 1");
  if (!finite_positive(cfg.eps_bisect)) throw ConfigError("eps must be positive");
  if (!finite_positive(cfg.eps_feas)) throw ConfigError("eps-feas must be positive");
  if (cfg.max_rho_retries < 0) throw ConfigError("retry count must be non-negative");
  r.alpha = cfg.alpha;
  r.eps_bisect = cfg.eps_bisect;
  r.eps_feas = cfg.eps_feas;
  r.seed = cfg.seed;
  r.max_rho_retries = cfg.max_rho_retries;
  r.check_scaling = cfg.check_scaling;
  return r;
}

struct Probe {
  double r = 0.0;
  bool contained = false;
  std::string worst_facet;
  double worst_slack = 0.0;
  Vec witness;
  bool vacuous = false;
  // every violated outer row with its LP maximizer, in row order
  std::vector<std::pair<std::size_t, Vec>> violated;
  // slack and LP maximizer of every outer row
  std::vector<double> slacks;
  std::vector<Vec> maximizers;
};

struct Bisection {
  double r_star = 0.0;
  std::vector<Probe> trace;
  std::size_t iterations = 0;
  bool bracket_valid = true;
  std::string bracket_error;
};

/// Number of halvings of [0, r_bar] needed to get the width down to eps.
inline std::size_t bisection_steps(double r_bar, double eps) {
  std::size_t k = 0;
  while (std::ldexp(r_bar, -static_cast<int>(k)) > eps) ++k;
  return k;
}

inline Probe probe_containment(const BallIntersection& q, const Vec& c, const HPolytope& target, double r,
                               double tol = 1e-8) {
  const HPolytope inner = levelset_polytope(q, c, r);
  const ContainmentReport rep = polytope_contains(target, inner, tol);
  Probe p;
  p.r = r;
  p.contained = rep.contained;
  p.vacuous = rep.vacuous;
  if (!rep.per_facet.empty()) {
    p.worst_facet = rep.per_facet[rep.worst].label;
    p.worst_slack = rep.per_facet[rep.worst].slack;
    p.witness = rep.witness;
    for (std::size_t i = 0; i < rep.per_facet.size(); ++i) {
      if (rep.per_facet[i].slack < -tol && rep.per_facet[i].witness.size() > 0)
        p.violated.emplace_back(i, rep.per_facet[i].witness);
      p.slacks.push_back(rep.per_facet[i].slack);
      p.maximizers.push_back(rep.per_facet[i].witness);
    }
  }
  return p;
}

/// Smallest R (to within eps) whose level-set polytope lies inside target.
inline Bisection bisect_r(const BallIntersection& q, const Vec& c, const HPolytope& target, double r_bar, double eps) {
  if (!(eps > 0.0)) throw InvalidArgument("bisect_r: eps must be positive");
  if (!(r_bar >= 0.0) || !std::isfinite(r_bar)) throw InvalidArgument("bisect_r: R_bar must be finite and >= 0");
  Bisection out;
  out.trace.push_back(probe_containment(q, c, target, 0.0));
  if (out.trace.back().contained) {
    out.bracket_valid = false;
    out.bracket_error = "level set already inside the target at R = 0";
    out.r_star = 0.0;
    return out;
  }
  out.trace.push_back(probe_containment(q, c, target, r_bar));
  if (!out.trace.back().contained) {
    out.bracket_valid = false;
    out.bracket_error = "level set not inside the target at R_bar";
    out.r_star = r_bar;
    return out;
  }
  double lo = 0.0, hi = r_bar;
  const std::size_t steps = bisection_steps(r_bar, eps);
  for (std::size_t i = 0; i < steps; ++i) {
    const double mid = 0.5 * (lo + hi);
    out.trace.push_back(probe_containment(q, c, target, mid));
    (out.trace.back().contained ? hi : lo) = mid;
    ++out.iterations;
  }
  out.r_star = hi;
  return out;
}

/// contained(R) must switch from false to true exactly once along R.
inline bool trace_monotone(const std::vector<Probe>& trace) {
  std::vector<std::pair<double, bool>> pts;
  for (const auto& p : trace) pts.emplace_back(p.r, p.contained);
  std::sort(pts.begin(), pts.end());
  for (std::size_t i = 1; i < pts.size(); ++i)
    if (pts[i - 1].second && !pts[i].second) return false;
  return true;
}

struct Candidate {
  Vec x;
  std::string facet;
  bool fallback = false;
};

/// Looks at the failing probe closest below R*: each row of the target has an
/// LP maximizer over that level-set polytope, and the maximizer farthest from
/// C is taken (ties go to the first row).
inline Candidate extract_candidate(const Bisection& b, const Vec& c, const HPolytope& target) {
  const Probe* last = nullptr;
  for (const auto& p : b.trace)
    if (!p.contained && p.r <= b.r_star && (!last || p.r > last->r)) last = &p;
  Candidate out;
  if (last) {
    double best = -1.0;
    for (std::size_t row = 0; row < last->maximizers.size(); ++row) {
      const Vec& w = last->maximizers[row];
      if (w.size() != c.size()) continue;
      const double d = (w - c).squaredNorm();
      if (d > best) {
        best = d;
        out.x = w;
        out.facet = target[row].label;
      }
    }
    if (best >= 0.0) return out;
  }
  out.fallback = true;
  if (const auto cheb = chebyshev_center(target)) out.x = cheb->center;
  else out.x = Vec::Zero(target.dim());
  return out;
}

struct SeparationProbe {
  double r = 0.0;
  bool empty = false;
  Vec point;  // a point of the level set inside Q when nonempty
  std::string worst_ball;
  double h_value = 0.0;
};

struct Separation {
  double r_star = 0.0;
  std::vector<SeparationProbe> trace;
  std::size_t iterations = 0;
  bool bracket_valid = true;
  Vec last_point;
};

/// Is the level-set polytope at R disjoint from {h <= 0}?
inline SeparationProbe probe_separation(const BallIntersection& q, const Vec& c, double r) {
  CuttingPlaneProblem pr;
  pr.dim = q.dim();
  for (const auto& b : q.balls) pr.quadratic.push_back({b.center, b.radius_sq});
  pr.rows = levelset_polytope(q, c, r);
  std::tie(pr.lower, pr.upper) = ball_box(q, 0.0);
  pr.stop_if_lower_above = 0.0;
  pr.stop_if_upper_below = 1e-9;
  pr.max_iterations = 500;
  const CuttingPlaneResult res = minimize_cutting_planes(pr);
  SeparationProbe p;
  p.r = r;
  if (!res.feasible) {
    p.empty = true;
    return p;
  }
  const HValue h = h_rho(res.x, q);
  p.point = res.x;
  p.h_value = h.value;
  p.worst_ball = q.balls[h.argmax].tag.str();
  p.empty = !(h.value <= 1e-9) && res.lower_bound > 0.0;
  if (!p.empty && !(h.value <= 1e-9)) p.empty = res.value > pr.tol;
  return p;
}

/// Smallest R at which the level set no longer meets Q.
inline Separation separation_r(const BallIntersection& q, const Vec& c, double r_bar, double eps) {
  if (!(eps > 0.0)) throw InvalidArgument("separation_r: eps must be positive");
  Separation out;
  out.trace.push_back(probe_separation(q, c, 0.0));
  if (out.trace.back().empty) {
    out.bracket_valid = false;
    return out;
  }
  out.last_point = out.trace.back().point;
  double lo = 0.0, hi = r_bar;
  const std::size_t steps = bisection_steps(r_bar, eps);
  for (std::size_t i = 0; i < steps; ++i) {
    const double mid = 0.5 * (lo + hi);
    out.trace.push_back(probe_separation(q, c, mid));
    if (out.trace.back().empty) {
      hi = mid;
    } else {
      lo = mid;
      out.last_point = out.trace.back().point;
    }
    ++out.iterations;
  }
  out.r_star = hi;
  return out;
}

struct ScalingCheck {
  bool performed = false;
  double r_hat_star = 0.0;    // bisected on the scaled construction
  double expected_sq = 0.0;   // r_hat(R*)^2
  double discrepancy = 0.0;   // |r_hat_star^2 - expected_sq|
  bool ok = false;
  std::string error;
};

struct SolveOutcome {
  Verdict verdict = Verdict::Infeasible;
  Vec candidate;
  CandidateVerdict candidate_verdict;
  double r_star = 0.0;
  double r_bar = 0.0;
  std::string inner_case;  // InteriorNegative / Boundary / ExteriorPositive / Degenerate
  bool distance_check = false;
  std::size_t iterations = 0;
  std::vector<Probe> trace;
  std::vector<std::string> flags;
  // diagnostics
  double beta = 0.0;
  double rho = 0.0;
  std::string tight_facet;
  Vec x_star;
  double h_at_star = 0.0;
  bool in_int_p = false;
  std::string singleton = "Unique";
  ScalingCheck scaling;

  bool has_flag(const std::string& f) const { return std::find(flags.begin(), flags.end(), f) != flags.end(); }
};

namespace detail {

// One-signed weights (S proportional to 1 included): S^T x = 0 on a corner
// forces x onto zero weights, so the answer comes from the signs alone.  P is
// then a single face of the cube or the whole cube, and the ball system can be
// numerically empty.
inline SolveOutcome solve_degenerate(const RsspInstance& inst, const ResolvedConfig& cfg) {
  SolveOutcome out;
  out.inner_case = "Degenerate";
  out.flags.push_back("DegenerateHyperplane");
  out.beta = cfg.beta;
  out.rho = cfg.rho;
  const int n = inst.dim();
  out.candidate = Vec::Zero(n);
  for (int k = 0; k < n; ++k) {
    if (inst.weights()[k] == 0.0) {
      out.candidate = Vec::Unit(n, k);
      break;
    }
  }
  out.candidate_verdict = verify_candidate(out.candidate, inst, cfg.eps_feas);
  const Vec c = build_center(inst, cfg.beta);
  out.distance_check = check_farthest_distance(out.candidate, c, 1e-5);
  out.verdict = out.candidate_verdict.accepted ? Verdict::Feasible : Verdict::Infeasible;
  return out;
}

}  // namespace detail

inline SolveOutcome solve(const RsspInstance& inst, const SolverConfig& config = {}) {
  const ResolvedConfig cfg = resolve_config(inst, config);
  const bool mixed = inst.weights().maxCoeff() > 0.0 && inst.weights().minCoeff() < 0.0;
  if (!mixed || !(hyperplane_imprint_sq(inst) > 0.0)) return detail::solve_degenerate(inst, cfg);

  SolveOutcome out;
  out.beta = cfg.beta;
  const HPolytope p = build_polytope(inst);
  const Vec c = build_center(inst, cfg.beta);
  bool abort = false;

  double rho = cfg.rho;
  BallIntersection q;
  InnerPointResult inner;
  InnerPointOptions opts;
  opts.seed = cfg.seed;
  opts.polytope = p;
  for (int attempt = 0;; ++attempt) {
    q = build_q(inst, rho);
    inner = minimize_h_minus_f(q, c, opts);
    if (inner.inner_case != InnerCase::InteriorNegative || inner.in_int_p) break;
    if (attempt >= cfg.max_rho_retries) {
      out.flags.push_back("RetriesExhausted");
      abort = true;
      break;
    }
    if (attempt == 0) out.flags.push_back("RhoRetried");
    rho *= 2.0;
  }
  out.rho = rho;
  out.x_star = inner.x_star;
  out.h_at_star = inner.h_at_star;
  out.in_int_p = inner.in_int_p;
  out.inner_case = to_string(inner.inner_case);
  out.singleton = to_string(inner.singleton_confidence);
  if (inner.singleton_confidence == Singleton::SuspectedFlat) out.flags.push_back("SuspectedFlat");
  if (!inner.converged) out.flags.push_back("InnerPointNotConverged");
  out.r_bar = inner.value < 0.0 ? std::sqrt(-inner.value) : 0.0;

  if (abort) {
    out.candidate = inner.x_star;
  } else if (inner.inner_case == InnerCase::InteriorNegative) {
    const Bisection b = bisect_r(q, c, p, out.r_bar, cfg.eps_bisect);
    out.trace = b.trace;
    out.iterations = b.iterations;
    out.r_star = b.r_star;
    if (!b.bracket_valid) {
      out.flags.push_back("BracketInvalid");
      abort = true;
    }
    if (!trace_monotone(b.trace)) out.flags.push_back("NonMonotoneTrace");
    const Candidate cand = extract_candidate(b, c, p);
    out.candidate = cand.x;
    out.tight_facet = cand.facet;
    if (cand.fallback) out.flags.push_back("CandidateFallback");

    if (cfg.check_scaling && b.bracket_valid) {
      out.scaling.performed = true;
      try {
        const ScaledConstruction s = scale_construction(inst, rho, cfg.beta, cfg.alpha);
        const double hat_bar = r_hat(out.r_bar, cfg.alpha, cfg.beta, inst.dim());
        const Bisection hb = bisect_r(s.q_hat, s.c_hat, p, hat_bar, cfg.eps_bisect);
        out.scaling.r_hat_star = hb.r_star;
        out.scaling.expected_sq = r_hat_sq(b.r_star, cfg.alpha, cfg.beta, inst.dim());
        out.scaling.discrepancy = std::abs(hb.r_star * hb.r_star - out.scaling.expected_sq);
        out.scaling.ok = hb.bracket_valid && out.scaling.discrepancy <= 1e-4;
      } catch (const NegativeRadicand& e) {
        out.scaling.error = e.what();
      }
      if (!out.scaling.ok) out.flags.push_back("ScalingMismatch");
    }
  } else if (inner.inner_case == InnerCase::Boundary) {
    out.r_star = (inner.x_star - c).norm();
    out.candidate = inner.x_star;
  } else {
    out.flags.push_back("SeparationPath");
    const Separation s = separation_r(q, c, out.r_bar, cfg.eps_bisect);
    out.iterations = s.iterations;
    out.r_star = s.r_star;
    for (const auto& sp : s.trace) {
      Probe pr;
      pr.r = sp.r;
      pr.contained = sp.empty;
      pr.worst_facet = sp.worst_ball;
      pr.worst_slack = -sp.h_value;
      pr.witness = sp.point;
      out.trace.push_back(std::move(pr));
    }
    if (!s.bracket_valid) {
      out.flags.push_back("BracketInvalid");
      abort = true;
    }
    out.candidate = s.last_point.size() == inst.dim() ? s.last_point : inner.x_star;
  }

  out.candidate_verdict = verify_candidate(out.candidate, inst, cfg.eps_feas);
  out.distance_check = check_farthest_distance(out.candidate, c, 1e-5);
  if (out.candidate_verdict.accepted) out.verdict = Verdict::Feasible;
  else if (abort || out.has_flag("SuspectedFlat")) out.verdict = Verdict::Inconclusive;
  else out.verdict = Verdict::Infeasible;
  return out;
}

}  // namespace ballcage
