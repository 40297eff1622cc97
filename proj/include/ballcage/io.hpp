#pragma once

// Instance files, SolveOutcome <-> JSON, and small CSV helpers.
// Depends on the single-header nlohmann/json.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "ballcage/instance.hpp"
#include "ballcage/solver.hpp"

namespace ballcage {

using Json = nlohmann::ordered_json;

class ParseError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

inline RsspInstance parse_instance(const Json& j) {
  if (!j.is_object() || !j.contains("S")) throw ParseError("instance must be an object with key \"S\"");
  const Json& s = j.at("S");
  if (!s.is_array()) throw ParseError("\"S\" must be an array");
  Vec v(static_cast<Eigen::Index>(s.size()));
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!s[i].is_number()) throw ParseError("\"S\" entries must be numbers");
    v[static_cast<Eigen::Index>(i)] = s[i].get<double>();
  }
  return RsspInstance(std::move(v));
}

inline RsspInstance parse_instance_text(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what());
  }
  return parse_instance(j);
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline RsspInstance load_instance(const std::string& path) { return parse_instance_text(read_file(path)); }

inline Json instance_json(const RsspInstance& inst) {
  Json s = Json::array();
  for (Eigen::Index k = 0; k < inst.weights().size(); ++k) s.push_back(inst.weights()[k]);
  return Json{{"S", s}};
}

namespace detail {

inline Json number(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

inline double number_from(const Json& j) {
  return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>();
}

inline Json vec_json(const Vec& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(number(v[i]));
  return a;
}

inline Vec vec_from(const Json& j) {
  Vec v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = number_from(j[i]);
  return v;
}

}  // namespace detail

inline Json outcome_json(const SolveOutcome& o) {
  using detail::number;
  using detail::vec_json;
  Json cv{{"rounded", vec_json(o.candidate_verdict.rounded)},
          {"is_binary", o.candidate_verdict.is_binary},
          {"max_binary_deviation", number(o.candidate_verdict.max_binary_deviation)},
          {"residual", number(o.candidate_verdict.residual)},
          {"raw_residual", number(o.candidate_verdict.raw_residual)},
          {"nonzero", o.candidate_verdict.nonzero},
          {"accepted", o.candidate_verdict.accepted}};
  Json trace = Json::array();
  for (const auto& p : o.trace)
    trace.push_back(Json{{"R", number(p.r)},
                         {"contained", p.contained},
                         {"worst_facet", p.worst_facet},
                         {"worst_slack", number(p.worst_slack)},
                         {"witness", vec_json(p.witness)}});
  Json scaling{{"performed", o.scaling.performed},
               {"R_hat_star", number(o.scaling.r_hat_star)},
               {"expected_sq", number(o.scaling.expected_sq)},
               {"discrepancy", number(o.scaling.discrepancy)},
               {"ok", o.scaling.ok},
               {"error", o.scaling.error}};
  return Json{{"verdict", to_string(o.verdict)},
              {"candidate", vec_json(o.candidate)},
              {"candidate_verdict", cv},
              {"R_star", number(o.r_star)},
              {"R_bar", number(o.r_bar)},
              {"case", o.inner_case},
              {"distance_check", o.distance_check},
              {"iterations", o.iterations},
              {"trace", trace},
              {"flags", o.flags},
              {"diagnostics",
               Json{{"beta", number(o.beta)},
                    {"rho", number(o.rho)},
                    {"tight_facet", o.tight_facet},
                    {"x_star", vec_json(o.x_star)},
                    {"h_at_star", number(o.h_at_star)},
                    {"in_int_P", o.in_int_p},
                    {"singleton", o.singleton},
                    {"scaling", scaling}}}};
}

inline Verdict verdict_from(const std::string& s) {
  if (s == "Feasible") return Verdict::Feasible;
  if (s == "Infeasible") return Verdict::Infeasible;
  if (s == "Inconclusive") return Verdict::Inconclusive;
  throw ParseError("unknown verdict '" + s + "'");
}

/// Inverse of outcome_json (the per-row maximizers kept in memory are not serialized).
inline SolveOutcome outcome_from_json(const Json& j) {
  using detail::number_from;
  using detail::vec_from;
  try {
    SolveOutcome o;
    o.verdict = verdict_from(j.at("verdict").get<std::string>());
    o.candidate = vec_from(j.at("candidate"));
    const Json& cv = j.at("candidate_verdict");
    o.candidate_verdict.rounded = vec_from(cv.at("rounded"));
    o.candidate_verdict.is_binary = cv.at("is_binary").get<bool>();
    o.candidate_verdict.max_binary_deviation = number_from(cv.at("max_binary_deviation"));
    o.candidate_verdict.residual = number_from(cv.at("residual"));
    o.candidate_verdict.raw_residual = number_from(cv.at("raw_residual"));
    o.candidate_verdict.nonzero = cv.at("nonzero").get<bool>();
    o.candidate_verdict.accepted = cv.at("accepted").get<bool>();
    o.r_star = number_from(j.at("R_star"));
    o.r_bar = number_from(j.at("R_bar"));
    o.inner_case = j.at("case").get<std::string>();
    o.distance_check = j.at("distance_check").get<bool>();
    o.iterations = j.at("iterations").get<std::size_t>();
    for (const auto& t : j.at("trace")) {
      Probe p;
      p.r = number_from(t.at("R"));
      p.contained = t.at("contained").get<bool>();
      p.worst_facet = t.at("worst_facet").get<std::string>();
      p.worst_slack = number_from(t.at("worst_slack"));
      p.witness = vec_from(t.at("witness"));
      o.trace.push_back(std::move(p));
    }
    o.flags = j.at("flags").get<std::vector<std::string>>();
    const Json& d = j.at("diagnostics");
    o.beta = number_from(d.at("beta"));
    o.rho = number_from(d.at("rho"));
    o.tight_facet = d.at("tight_facet").get<std::string>();
    o.x_star = vec_from(d.at("x_star"));
    o.h_at_star = number_from(d.at("h_at_star"));
    o.in_int_p = d.at("in_int_P").get<bool>();
    o.singleton = d.at("singleton").get<std::string>();
    const Json& s = d.at("scaling");
    o.scaling.performed = s.at("performed").get<bool>();
    o.scaling.r_hat_star = number_from(s.at("R_hat_star"));
    o.scaling.expected_sq = number_from(s.at("expected_sq"));
    o.scaling.discrepancy = number_from(s.at("discrepancy"));
    o.scaling.ok = s.at("ok").get<bool>();
    o.scaling.error = s.at("error").get<std::string>();
    return o;
  } catch (const Json::exception& e) {
    throw ParseError(std::string("bad outcome JSON: ") + e.what());
  }
}

/// %.17g, with nan/inf spelled out.
inline std::string fmt_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// RFC 4180 field quoting.
inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  out += '"';
  return out;
}

inline std::string csv_row(const std::vector<std::string>& fields) {
  std::string line;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) line += ',';
    line += csv_field(fields[i]);
  }
  return line;
}

inline std::string join(const std::vector<std::string>& items, const std::string& sep) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += sep;
    out += items[i];
  }
  return out;
}

}  // namespace ballcage
