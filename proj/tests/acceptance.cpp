// Acceptance runner: one PASS/FAIL line per criterion.
//
//   acceptance            run every criterion
//   acceptance 3          run criterion 3 only
//   acceptance 8a | 8b    run one half of criterion 8
//
// Exit status is 0 iff every selected criterion passed.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "ballcage/ballcage.hpp"
#include "ballcage/io.hpp"

using namespace ballcage;

namespace {

struct Verdict8 {
  bool computed = false;
  bool a_pass = false;
  bool b_pass = false;
  std::string a_detail, b_detail;
};

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string summary(const PropertyResult& r) {
  return r.name + ": " + std::to_string(r.violations) + "/" + std::to_string(r.checked) + " violations, worst " +
         fmt(r.worst);
}

Outcome from_props(const std::vector<PropertyResult>& rs) {
  Outcome o{true, ""};
  for (const auto& r : rs) {
    o.pass = o.pass && r.passed();
    if (!o.detail.empty()) o.detail += "; ";
    o.detail += summary(r);
  }
  return o;
}

// 1. every corner satisfies all cube balls, at least one tightly; n = 2..8, under 5 s
Outcome criterion1() {
  const auto t0 = std::chrono::steady_clock::now();
  const PropertyResult r = check_corner_preservation(2, 8);
  const double t = seconds_since(t0);
  Outcome o = from_props({r});
  o.pass = o.pass && t < 5.0;
  o.detail += ", " + fmt(t) + " s";
  return o;
}

// 2. zero-sum corners of 200 planted instances lie on the s-sphere
Outcome criterion2() { return from_props({check_hyperplane_corners(200, 2002)}); }

// 3. P ⊆ Q and Q ⊆ circumscribed ball, 50 instances x 1e4 samples
Outcome criterion3() { return from_props(check_inclusions(50, 10000, 3003, 6)); }

// 4. disk lemma, 20 configurations x 1e5 points
Outcome criterion4() { return from_props({check_disk_lemma(20, 100000, 4004)}); }

// 5. samples of Q at rho_delta are within delta + 1e-4 of P
Outcome criterion5() {
  return from_props({check_outer_approximation(0.2, 10, 100, 5005), check_outer_approximation(0.05, 10, 100, 5006)});
}

// 6. scaled rows = alpha * rows on 100 random tuples
Outcome criterion6() { return from_props({check_scaling_identity(100, 6006)}); }

// 7. four-ball desk check
Outcome criterion7() {
  std::vector<Ball> balls;
  const double centers[4][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
  for (const auto& c : centers) {
    Ball b;
    b.center = Vec(2);
    b.center << c[0], c[1];
    b.radius_sq = 4.0;
    balls.push_back(b);
  }
  const BallIntersection q = BallIntersection::custom(balls);
  const Vec origin = Vec::Zero(2);
  // target: the square |x_i| <= t whose corners are the farthest points of Q
  const double t = (-1.0 + std::sqrt(7.0)) / 2.0;
  HPolytope square(2);
  square.add("x1<=t", Vec::Unit(2, 0), t);
  square.add("-x1<=t", -Vec::Unit(2, 0), t);
  square.add("x2<=t", Vec::Unit(2, 1), t);
  square.add("-x2<=t", -Vec::Unit(2, 1), t);
  const InnerPointResult inner = minimize_h_minus_f(q, origin);
  const double r_bar = std::sqrt(-inner.value);
  const Bisection b = bisect_r(q, origin, square, r_bar, 1e-7);
  const double closed = std::sqrt(4.0 - std::sqrt(7.0));
  // dense boundary sampling: largest radius along each ray that stays in Q
  double sampled = 0.0;
  const int rays = 200000;
  for (int i = 0; i < rays; ++i) {
    const double th = 2.0 * M_PI * i / rays;
    const Vec d = (Vec(2) << std::cos(th), std::sin(th)).finished();
    double lo = 0.0, hi = 3.0;
    for (int k = 0; k < 60; ++k) {
      const double mid = 0.5 * (lo + hi);
      (h_rho(mid * d, q).value <= 0.0 ? lo : hi) = mid;
    }
    sampled = std::max(sampled, lo);
  }
  const bool ok = std::abs(b.r_star - closed) <= 1e-4 && std::abs(b.r_star - sampled) <= 1e-3 && b.bracket_valid;
  return {ok, "R* = " + fmt(b.r_star) + ", closed form " + fmt(closed) + ", sampled max |x| " + fmt(sampled) +
                  ", " + std::to_string(b.iterations) + " iterations"};
}

// 8. end-to-end agreement with the DP oracle
Verdict8 criterion8() {
  Verdict8 v;
  v.computed = true;
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(8008);
  std::size_t feasible_claims = 0, sound = 0;
  std::size_t planted_eligible = 0, recovered = 0, planted_flagged = 0;
  std::vector<std::string> misses;
  std::uniform_int_distribution<int> dim(2, 10);
  for (int i = 0; i < 300; ++i) {
    const bool planted = i % 2 == 1;
    const int n = dim(rng);
    const RsspInstance inst =
        planted ? planted_instance(rng, n, -15, 15).instance : random_instance(rng, n, -15, 15);
    SolverConfig cfg;
    cfg.seed = static_cast<std::uint64_t>(i);
    const SolveOutcome out = solve(inst, cfg);
    const bool oracle = dp_feasible(inst).feasible;
    if (out.verdict == Verdict::Feasible) {
      ++feasible_claims;
      const CandidateVerdict cv = verify_candidate(out.candidate, inst, cfg.eps_feas);
      const double exact = inst.weights().dot(cv.rounded);
      if (oracle && cv.accepted && exact == 0.0) ++sound;
    }
    if (planted) {
      if (out.has_flag("SuspectedFlat") || out.has_flag("RhoRetried") || out.has_flag("RetriesExhausted")) {
        ++planted_flagged;
        continue;
      }
      ++planted_eligible;
      if (out.verdict == Verdict::Feasible) ++recovered;
      else if (misses.size() < 5) misses.push_back("#" + std::to_string(i) + " " + instance_json(inst).dump());
    }
  }
  const double t = seconds_since(t0);
  v.a_pass = sound == feasible_claims && t < 600.0;
  v.a_detail = std::to_string(sound) + "/" + std::to_string(feasible_claims) +
               " Feasible verdicts verified exactly and confirmed by DP, " + fmt(t) + " s";
  const double rate = planted_eligible ? static_cast<double>(recovered) / planted_eligible : 0.0;
  v.b_pass = planted_eligible > 0 && rate >= 0.95;
  std::ostringstream ss;
  ss << "recovered " << recovered << "/" << planted_eligible << " planted instances (" << fmt(100.0 * rate)
     << "%, need 95%), " << planted_flagged << " excluded by flags";
  if (!misses.empty()) {
    ss << "; first misses (seed = index):";
    for (const auto& m : misses) ss << ' ' << m;
  }
  v.b_detail = ss.str();
  return v;
}

// 9. iteration bound and +1 iteration per halving of eps
Outcome criterion9() {
  std::mt19937_64 rng(9009);
  std::size_t traces = 0, bound_violations = 0, step_violations = 0;
  for (int i = 0; i < 20; ++i) {
    const RsspInstance inst = planted_instance(rng, 2 + i % 5, -10, 10).instance;
    std::size_t prev = 0;
    for (int k = 0; k < 6; ++k) {
      SolverConfig cfg;
      cfg.eps_bisect = 1e-3 * std::ldexp(1.0, -k);
      const SolveOutcome out = solve(inst, cfg);
      if (out.trace.empty()) continue;
      ++traces;
      const double bound = std::ceil(std::log2(out.r_bar / cfg.eps_bisect));
      if (static_cast<double>(out.iterations) > std::max(0.0, bound)) ++bound_violations;
      if (k > 0 && out.iterations != prev + 1) ++step_violations;
      prev = out.iterations;
    }
  }
  return {traces > 0 && bound_violations == 0 && step_violations == 0,
          std::to_string(traces) + " traces, " + std::to_string(bound_violations) + " over the bound, " +
              std::to_string(step_violations) + " halvings not adding exactly one iteration"};
}

// 10. identical input, config and seed give byte-identical JSON
Outcome criterion10() {
  std::mt19937_64 rng(10010);
  std::size_t runs = 0, diffs = 0;
  for (int i = 0; i < 10; ++i) {
    const RsspInstance inst = random_instance(rng, 2 + i % 7, -15, 15);
    SolverConfig cfg;
    cfg.seed = 1234 + static_cast<std::uint64_t>(i);
    cfg.check_scaling = i % 2 == 0;
    const std::string a = outcome_json(solve(inst, cfg)).dump();
    const std::string b = outcome_json(solve(inst, cfg)).dump();
    ++runs;
    if (a != b) ++diffs;
  }
  return {diffs == 0, std::to_string(runs - diffs) + "/" + std::to_string(runs) + " repeated runs byte-identical"};
}

void report(const std::string& id, const Outcome& o) {
  std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << id << ": " << o.detail << std::endl;
}

}  // namespace

int main(int argc, char** argv) {
  const std::string only = argc > 1 ? argv[1] : "";
  const std::map<std::string, std::function<Outcome()>> simple{
      {"1", criterion1}, {"2", criterion2}, {"3", criterion3}, {"4", criterion4}, {"5", criterion5},
      {"6", criterion6}, {"7", criterion7}, {"9", criterion9}, {"10", criterion10}};
  const std::vector<std::string> order{"1", "2", "3", "4", "5", "6", "7", "8", "9", "10"};
  bool all_pass = true;
  bool matched = false;
  for (const auto& id : order) {
    if (id == "8") {
      if (!only.empty() && only != "8" && only != "8a" && only != "8b") continue;
      matched = true;
      const Verdict8 v = criterion8();
      if (only == "8a") {
        report("8a", {v.a_pass, v.a_detail});
        all_pass = all_pass && v.a_pass;
      } else if (only == "8b") {
        report("8b", {v.b_pass, v.b_detail});
        all_pass = all_pass && v.b_pass;
      } else {
        report("8", {v.a_pass && v.b_pass, "(a) " + std::string(v.a_pass ? "PASS " : "FAIL ") + v.a_detail +
                                               "; (b) " + (v.b_pass ? "PASS " : "FAIL ") + v.b_detail});
        all_pass = all_pass && v.a_pass && v.b_pass;
      }
      continue;
    }
    if (!only.empty() && only != id) continue;
    matched = true;
    const Outcome o = simple.at(id)();
    report(id, o);
    all_pass = all_pass && o.pass;
  }
  if (!matched) {
    std::cerr << "unknown criterion '" << only << "'\n";
    return 2;
  }
  return all_pass ? 0 : 1;
}
