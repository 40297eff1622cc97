// ballcage command-line front end.
//
// Exit codes: solve 0/1/2 = Feasible/Infeasible/Inconclusive, other commands
// 0 on success and 1 on a reported failure; 3 = usage or configuration
// error, 4 = IO or parse error.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "ballcage/ballcage.hpp"
#include "ballcage/io.hpp"

namespace fs = std::filesystem;
using namespace ballcage;

namespace {

constexpr int kExitUsage = 3;
constexpr int kExitIo = 4;

struct UsageError : Error {
  using Error::Error;
};

struct CommonFlags {
  std::optional<double> beta;
  std::optional<double> rho;
  double alpha = 2.0;
  double eps = 1e-7;
  double eps_feas = 1e-6;
  std::optional<std::uint64_t> seed;
  bool check_scaling = false;
  bool json = false;
  bool quiet = false;
};

void add_common(CLI::App* app, CommonFlags& f) {
  app->add_option("--beta", f.beta, "target offset beta (default max(2 rho_bar + 2, |S|))");
  app->add_option("--rho", f.rho, "ball offset rho (default max(rho_delta, beta/2 + 1))");
  app->add_option("--alpha", f.alpha, "scaling factor for --check-scaling (> 1)");
  app->add_option("--eps", f.eps, "bisection tolerance on R");
  app->add_option("--eps-feas", f.eps_feas, "tolerance for accepting a candidate");
  app->add_option("--seed", f.seed, "random seed (falls back to $BALLCAGE_SEED, then 0)");
  app->add_flag("--check-scaling", f.check_scaling, "re-run bisection on the alpha-scaled construction");
  app->add_flag("--json", f.json, "JSON output");
  app->add_flag("--quiet", f.quiet, "suppress standard output");
}

std::uint64_t resolve_seed(const CommonFlags& f) {
  if (f.seed) return *f.seed;
  if (const char* env = std::getenv("BALLCAGE_SEED")) {
    try {
      std::size_t used = 0;
      const unsigned long long v = std::stoull(env, &used);
      if (used == std::string(env).size()) return v;
    } catch (const std::exception&) {
    }
    throw UsageError(std::string("BALLCAGE_SEED is not an unsigned integer: '") + env + "'");
  }
  return 0;
}

SolverConfig make_config(const CommonFlags& f) {
  SolverConfig c;
  c.beta = f.beta;
  c.rho = f.rho;
  c.alpha = f.alpha;
  c.eps_bisect = f.eps;
  c.eps_feas = f.eps_feas;
  c.seed = resolve_seed(f);
  c.check_scaling = f.check_scaling;
  return c;
}

int exit_code(Verdict v) {
  switch (v) {
    case Verdict::Feasible: return 0;
    case Verdict::Infeasible: return 1;
    case Verdict::Inconclusive: return 2;
  }
  return 2;
}

// --- solve -----------------------------------------------------------------

int cmd_solve(const std::string& path, const CommonFlags& f) {
  const RsspInstance inst = load_instance(path);
  const SolverConfig cfg = make_config(f);
  const SolveOutcome out = solve(inst, cfg);
  if (!f.quiet) std::cout << outcome_json(out).dump(2) << '\n';
  return exit_code(out.verdict);
}

// --- oracle ----------------------------------------------------------------

struct OracleAnswer {
  bool available = false;
  bool feasible = false;
  std::string method;
  std::vector<Vec> solutions;
};

OracleAnswer run_oracle(const RsspInstance& inst, const std::string& method) {
  OracleAnswer a;
  const bool dp_ok = inst.is_integral();
  if (method == "dp" || (method == "auto" && dp_ok)) {
    try {
      a.feasible = dp_feasible(inst).feasible;
      a.method = "dp";
      a.available = true;
      if (inst.dim() <= 24) a.solutions = brute_force(inst).solutions;
      return a;
    } catch (const OracleLimit&) {
      if (method == "dp") throw;
    }
  }
  if (method == "brute" || method == "auto") {
    const BruteForceResult b = brute_force(inst, dp_ok ? 0.0 : 1e-9);
    a.feasible = b.feasible;
    a.solutions = b.solutions;
    a.method = "brute";
    a.available = true;
    return a;
  }
  throw UsageError("unknown oracle method '" + method + "' (dp, brute, auto)");
}

int cmd_oracle(const std::string& path, const std::string& method, const CommonFlags& f) {
  const RsspInstance inst = load_instance(path);
  const OracleAnswer a = run_oracle(inst, method);
  if (!f.quiet) {
    Json sols = Json::array();
    for (const auto& x : a.solutions) sols.push_back(detail::vec_json(x));
    std::cout << Json{{"feasible", a.feasible}, {"method", a.method}, {"solutions", sols}}.dump(2) << '\n';
  }
  return a.feasible ? 0 : 1;
}

// --- compare ---------------------------------------------------------------

std::vector<std::string> collect_inputs(const std::string& path) {
  std::error_code ec;
  if (fs::is_directory(path, ec)) {
    std::vector<std::string> files;
    for (const auto& e : fs::directory_iterator(path))
      if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path().string());
    std::sort(files.begin(), files.end());
    return files;
  }
  if (!fs::exists(path, ec)) throw IoError("no such file or directory: '" + path + "'");
  return {path};
}

const std::vector<std::string> kCompareHeader{"file", "n", "verdict", "oracle", "oracle_method", "agree",
                                              "flags", "R_star", "iterations", "wall_ms", "error"};

std::vector<std::string> compare_one(const std::string& file, const SolverConfig& cfg, const std::string& method,
                                     int& agree, int& decided) {
  const auto t0 = std::chrono::steady_clock::now();
  try {
    const RsspInstance inst = load_instance(file);
    const SolveOutcome out = solve(inst, cfg);
    const OracleAnswer a = run_oracle(inst, method);
    const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    std::string ag = "n/a";
    if (out.verdict != Verdict::Inconclusive) {
      const bool same = (out.verdict == Verdict::Feasible) == a.feasible;
      ag = same ? "yes" : "no";
      decided = 1;
      agree = same ? 1 : 0;
    }
    return {file,
            std::to_string(inst.dim()),
            to_string(out.verdict),
            a.feasible ? "Feasible" : "Infeasible",
            a.method,
            ag,
            join(out.flags, ";"),
            fmt_double(out.r_star),
            std::to_string(out.iterations),
            fmt_double(ms),
            ""};
  } catch (const std::exception& e) {
    return {file, "", "ERROR", "", "", "n/a", "", "", "", "", e.what()};
  }
}

int cmd_compare(const std::string& path, const std::string& method, unsigned jobs, const CommonFlags& f) {
  if (method != "dp" && method != "brute" && method != "auto")
    throw UsageError("unknown oracle method '" + method + "' (dp, brute, auto)");
  const std::vector<std::string> files = collect_inputs(path);
  const SolverConfig cfg = make_config(f);
  std::vector<std::vector<std::string>> rows(files.size());
  std::vector<int> agree(files.size(), 0), decided(files.size(), 0);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < files.size(); i = next++)
      rows[i] = compare_one(files[i], cfg, method, agree[i], decided[i]);
  };
  const unsigned workers = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(files.size())));
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  int n_agree = 0, n_decided = 0, n_error = 0;
  for (std::size_t i = 0; i < files.size(); ++i) {
    n_agree += agree[i];
    n_decided += decided[i];
    if (rows[i][2] == "ERROR") ++n_error;
  }
  if (!f.quiet) {
    std::cout << csv_row(kCompareHeader) << '\n';
    for (const auto& r : rows) std::cout << csv_row(r) << '\n';
    if (!files.empty()) {
      const double rate = n_decided ? static_cast<double>(n_agree) / n_decided : 0.0;
      std::cout << csv_row({"SUMMARY", std::to_string(files.size()), "", "", "", fmt_double(rate),
                            "agree=" + std::to_string(n_agree) + ";decided=" + std::to_string(n_decided) +
                                ";errors=" + std::to_string(n_error),
                            "", "", "", ""})
                << '\n';
    }
  }
  return n_error == 0 && n_agree == n_decided ? 0 : 1;
}

// --- props -----------------------------------------------------------------

int cmd_props(const std::string& suite, double scale, const CommonFlags& f) {
  if (std::find(suite_names().begin(), suite_names().end(), suite) == suite_names().end())
    throw UsageError("unknown suite '" + suite + "'");
  if (!(scale > 0.0)) throw UsageError("--scale must be positive");
  const std::vector<PropertyResult> results = run_suite(suite, resolve_seed(f), scale);
  bool ok = true;
  Json arr = Json::array();
  for (const auto& r : results) {
    ok = ok && r.passed();
    arr.push_back(Json{{"property", r.name},
                       {"checked", r.checked},
                       {"violations", r.violations},
                       {"worst", detail::number(r.worst)},
                       {"passed", r.passed()}});
  }
  if (!f.quiet) {
    if (f.json) {
      std::cout << Json{{"suite", suite}, {"passed", ok}, {"properties", arr}}.dump(2) << '\n';
    } else {
      for (const auto& r : results)
        std::cout << (r.passed() ? "PASS " : "FAIL ") << r.name << ": " << r.violations << '/' << r.checked
                  << " violations, worst " << fmt_double(r.worst) << '\n';
    }
  }
  return ok ? 0 : 1;
}

// --- sweep -----------------------------------------------------------------

std::vector<double> parse_values(const std::string& list) {
  std::vector<double> out;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != item.size()) throw UsageError("not a number: '" + item + "'");
    out.push_back(v);
  }
  return out;
}

/// "lo:hi:count", evenly spaced (or geometrically with log = true).
std::vector<double> parse_range(const std::string& spec, bool log) {
  std::string s = spec;
  std::replace(s.begin(), s.end(), ':', ',');
  const std::vector<double> p = parse_values(s);
  if (p.size() != 3) throw UsageError("range must be lo:hi:count");
  const double lo = p[0], hi = p[1];
  const auto count = static_cast<long>(p[2]);
  if (count < 1 || static_cast<double>(count) != p[2]) throw UsageError("range count must be a positive integer");
  if (log && !(lo > 0.0 && hi > 0.0)) throw UsageError("log range needs positive endpoints");
  std::vector<double> out;
  for (long i = 0; i < count; ++i) {
    const double t = count == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(count - 1);
    out.push_back(log ? lo * std::pow(hi / lo, t) : lo + (hi - lo) * t);
  }
  return out;
}

int cmd_sweep(const std::string& path, const std::string& param, const std::vector<double>& values,
              const CommonFlags& f) {
  if (param != "rho" && param != "beta" && param != "eps") throw UsageError("--param must be rho, beta or eps");
  if (values.empty()) throw UsageError("empty sweep range");
  const RsspInstance inst = load_instance(path);
  const SolverConfig base = make_config(f);
  if (!f.quiet) std::cout << csv_row({param, "verdict", "R_star", "R_bar", "iterations", "flags", "error"}) << '\n';
  for (double v : values) {
    SolverConfig cfg = base;
    if (param == "rho") cfg.rho = v;
    else if (param == "beta") cfg.beta = v;
    else cfg.eps_bisect = v;
    std::vector<std::string> row;
    try {
      const SolveOutcome out = solve(inst, cfg);
      row = {fmt_double(v),       to_string(out.verdict),         fmt_double(out.r_star),
             fmt_double(out.r_bar), std::to_string(out.iterations), join(out.flags, ";"), ""};
    } catch (const ConfigError& e) {
      row = {fmt_double(v), "INVALID", "", "", "", "InvalidConfig", e.what()};
    }
    if (!f.quiet) std::cout << csv_row(row) << '\n';
  }
  return 0;
}

// --- gen -------------------------------------------------------------------

int cmd_gen(const std::string& dir, int count, int n, int lo, int hi, bool planted, const CommonFlags& f) {
  if (count < 0 || n < 2 || lo > hi) throw UsageError("gen needs count >= 0, n >= 2 and lo <= hi");
  if (planted && (lo > -1 || hi < 1)) throw UsageError("planted instances need lo < 0 < hi");
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create '" + dir + "': " + ec.message());
  std::mt19937_64 rng(resolve_seed(f));
  const int width = std::max(3, static_cast<int>(std::to_string(count).size()));
  for (int i = 0; i < count; ++i) {
    const RsspInstance inst = planted ? planted_instance(rng, n, lo, hi).instance : random_instance(rng, n, lo, hi);
    std::string id = std::to_string(i);
    id.insert(0, static_cast<std::size_t>(width) - std::min<std::size_t>(id.size(), width), '0');
    const fs::path file = fs::path(dir) / ("inst_" + id + ".json");
    std::ofstream out(file);
    if (!(out << instance_json(inst).dump() << '\n')) throw IoError("cannot write '" + file.string() + "'");
  }
  if (!f.quiet) std::cout << "wrote " << count << " instances to " << dir << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ballcage: ball-intersection relaxation for real subset sum"};
  app.require_subcommand(1);
  CommonFlags flags;

  std::string path;
  auto* solve_cmd = app.add_subcommand("solve", "solve one instance, print the outcome as JSON");
  solve_cmd->add_option("instance", path, "instance JSON {\"S\": [...]}")->required();
  add_common(solve_cmd, flags);

  std::string method = "auto";
  unsigned jobs = 1;
  auto* compare_cmd = app.add_subcommand("compare", "solver vs oracle on a file or a directory of .json files");
  compare_cmd->add_option("path", path, "instance file or directory")->required();
  compare_cmd->add_option("--oracle", method, "dp, brute or auto");
  compare_cmd->add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);
  add_common(compare_cmd, flags);

  std::string suite;
  double scale = 1.0;
  auto* props_cmd = app.add_subcommand("props", "run a property suite");
  props_cmd->add_option("suite", suite, "ballsets, corners, outer, scaling, levelsets or all")->required();
  props_cmd->add_option("--scale", scale, "multiplier on the default sample counts");
  add_common(props_cmd, flags);

  std::string param, values, range;
  bool log_range = false;
  auto* sweep_cmd = app.add_subcommand("sweep", "solve over a grid of one parameter, CSV output");
  sweep_cmd->add_option("instance", path, "instance JSON")->required();
  sweep_cmd->add_option("--param", param, "rho, beta or eps")->required();
  auto* values_opt = sweep_cmd->add_option("--values", values, "comma-separated values");
  auto* range_opt = sweep_cmd->add_option("--range", range, "lo:hi:count");
  sweep_cmd->add_flag("--log", log_range, "geometric spacing for --range");
  values_opt->excludes(range_opt);
  add_common(sweep_cmd, flags);

  auto* oracle_cmd = app.add_subcommand("oracle", "exact feasibility by DP or enumeration");
  oracle_cmd->add_option("instance", path, "instance JSON")->required();
  oracle_cmd->add_option("--method", method, "dp, brute or auto");
  add_common(oracle_cmd, flags);

  std::string out_dir;
  int count = 10, dim = 8, lo = -15, hi = 15;
  bool planted = false;
  auto* gen_cmd = app.add_subcommand("gen", "write random integer instances");
  gen_cmd->add_option("dir", out_dir, "output directory")->required();
  gen_cmd->add_option("--count", count, "number of instances");
  gen_cmd->add_option("--n", dim, "dimension");
  gen_cmd->add_option("--lo", lo, "smallest entry");
  gen_cmd->add_option("--hi", hi, "largest entry");
  gen_cmd->add_flag("--planted", planted, "plant a zero-sum subset");
  add_common(gen_cmd, flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*solve_cmd) return cmd_solve(path, flags);
    if (*compare_cmd) return cmd_compare(path, method, jobs, flags);
    if (*props_cmd) return cmd_props(suite, scale, flags);
    if (*sweep_cmd) {
      const std::vector<double> grid = range.empty() ? parse_values(values) : parse_range(range, log_range);
      return cmd_sweep(path, param, grid, flags);
    }
    if (*oracle_cmd) return cmd_oracle(path, method, flags);
    if (*gen_cmd) return cmd_gen(out_dir, count, dim, lo, hi, planted, flags);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << '\n';
    return kExitIo;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return kExitIo;
  } catch (const InvalidArgument& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  }
  return kExitUsage;
}
