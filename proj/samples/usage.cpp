// Minimal library usage: solve one instance and cross-check with the DP oracle.

#include <iostream>

#include "ballcage/ballcage.hpp"

int main() {
  using namespace ballcage;
  const RsspInstance inst = RsspInstance::from({3, -1, -2});
  SolverConfig cfg;
  cfg.seed = 7;
  const SolveOutcome out = solve(inst, cfg);
  std::cout << "verdict:   " << to_string(out.verdict) << '\n'
            << "candidate: " << out.candidate.transpose() << '\n'
            << "R*:        " << out.r_star << " (|C| = " << build_center(inst, out.beta).norm() << ")\n"
            << "oracle:    " << (dp_feasible(inst).feasible ? "feasible" : "infeasible") << '\n';
  return out.verdict == Verdict::Feasible ? 0 : 1;
}
