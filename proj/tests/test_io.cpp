#include <catch_amalgamated.hpp>

#include "ballcage/io.hpp"

using namespace ballcage;

TEST_CASE("instance JSON parsing", "[io]") {
  const auto inst = parse_instance_text(R"({"S": [1, -0.5, 3]})");
  CHECK(inst.dim() == 3);
  CHECK(inst.weights()[1] == -0.5);
  CHECK_THROWS_AS(parse_instance_text("{"), ParseError);
  CHECK_THROWS_AS(parse_instance_text(R"({"T": [1]})"), ParseError);
  CHECK_THROWS_AS(parse_instance_text(R"({"S": 3})"), ParseError);
  CHECK_THROWS_AS(parse_instance_text(R"({"S": [1, "x"]})"), ParseError);
  CHECK_THROWS_AS(parse_instance_text(R"({"S": [0, 0]})"), DegenerateInstance);
  CHECK_THROWS_AS(load_instance("/nonexistent/file.json"), IoError);
  CHECK(parse_instance(instance_json(inst)).weights() == inst.weights());
}

TEST_CASE("outcome JSON round-trips field for field", "[io]") {
  for (auto inst : {RsspInstance::from({1, -1}), RsspInstance::from({1, -0.618}), RsspInstance::from({1, 1}),
                    RsspInstance::from({5, -3, 7, -2, -4, 1})}) {
    SolverConfig cfg;
    cfg.check_scaling = true;
    const SolveOutcome o = solve(inst, cfg);
    const Json j = outcome_json(o);
    const SolveOutcome back = outcome_from_json(Json::parse(j.dump()));
    CHECK(back.verdict == o.verdict);
    CHECK(back.candidate == o.candidate);
    CHECK(back.candidate_verdict.rounded == o.candidate_verdict.rounded);
    CHECK(back.candidate_verdict.accepted == o.candidate_verdict.accepted);
    CHECK(back.candidate_verdict.residual == o.candidate_verdict.residual);
    CHECK(back.r_star == o.r_star);
    CHECK(back.r_bar == o.r_bar);
    CHECK(back.inner_case == o.inner_case);
    CHECK(back.distance_check == o.distance_check);
    CHECK(back.iterations == o.iterations);
    REQUIRE(back.trace.size() == o.trace.size());
    for (std::size_t i = 0; i < o.trace.size(); ++i) {
      CHECK(back.trace[i].r == o.trace[i].r);
      CHECK(back.trace[i].contained == o.trace[i].contained);
      CHECK(back.trace[i].worst_facet == o.trace[i].worst_facet);
      CHECK(back.trace[i].witness == o.trace[i].witness);
    }
    CHECK(back.flags == o.flags);
    CHECK(back.beta == o.beta);
    CHECK(back.rho == o.rho);
    CHECK(back.x_star == o.x_star);
    CHECK(back.singleton == o.singleton);
    CHECK(back.scaling.performed == o.scaling.performed);
    CHECK(back.scaling.r_hat_star == o.scaling.r_hat_star);
    // re-serialising gives the same bytes
    CHECK(outcome_json(back).dump() == j.dump());
  }
}

TEST_CASE("non-finite numbers become null and come back as NaN", "[io]") {
  SolveOutcome o = solve(RsspInstance::from({1, -1}));
  o.r_bar = std::numeric_limits<double>::infinity();
  const Json j = outcome_json(o);
  CHECK(j["R_bar"].is_null());
  CHECK(std::isnan(outcome_from_json(j).r_bar));
  CHECK_THROWS_AS(outcome_from_json(Json{{"verdict", "Maybe"}}), ParseError);
}

TEST_CASE("CSV helpers", "[io]") {
  CHECK(csv_field("plain") == "plain");
  CHECK(csv_field("a,b") == "\"a,b\"");
  CHECK(csv_field("say \"hi\"") == "\"say \"\"hi\"\"\"");
  CHECK(csv_row({"a", "b,c", ""}) == "a,\"b,c\",");
  CHECK(fmt_double(0.1) == "0.10000000000000001");
  CHECK(fmt_double(std::nan("")) == "nan");
  CHECK(join({"x", "y"}, ";") == "x;y");
}
