#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "allpay/config.hpp"
#include "allpay/errors.hpp"

using namespace allpay;

namespace {

const char* kCaseStudy = R"({
  "agents": [
    {"family": "uniform", "params": {}},
    {"family": "atom_uniform", "params": {"atom": 0.5}}
  ],
  "payment": {"family": "monomial", "c": 1, "a": 2, "d": 0},
  "value_scale": {"gamma": 1},
  "lambda": 0.3,
  "numerics": {"steps": 2048, "abs_tol": 1e-12, "rel_tol": 1e-10}
})";

}  // namespace

TEST_CASE("the case study written out equals the preset") {
  const ContestSpec spec = parse_config(kCaseStudy);
  const ContestSpec preset = paper_case_study(0.3);
  CHECK(spec.agents == preset.agents);
  CHECK(spec.lambda == 0.3);
  CHECK(spec.payment.a() == 2.0);
  CHECK(spec.value_scale.gamma() == 1.0);
  CHECK(spec.numerics.ode_steps == 2048);
}

TEST_CASE("every family and general supports parse") {
  const ContestSpec spec = parse_config(R"({
    "agents": [
      {"family": "power", "params": {"alpha": 2, "support": [1, 3]}},
      {"family": "piecewise_polynomial",
       "params": {"breakpoints": [0, 0.5, 1], "coefficients": [[0, 0, 2], [-1, 4, -2]], "support": [1, 3]}},
      {"family": "uniform", "params": {"atom": 0.2, "support": [1, 3]}}
    ],
    "payment": {"family": "monomial", "c": 2, "a": 3, "d": 0.5},
    "value_scale": {"gamma": 1.5},
    "lambda": 1.2
  })");
  CHECK(spec.n() == 3);
  CHECK(spec.support().lo() == 1.0);
  CHECK(spec.agents[0].cdf(2.0) == doctest::Approx(0.25));
  CHECK(spec.agents[1].cdf(2.0) == doctest::Approx(0.5));
  CHECK(spec.agents[2].cdf(1.0) == doctest::Approx(0.2));
  CHECK(spec.payment.d() == 0.5);
  CHECK(spec.numerics.ode_steps == 4096);
  // Round trip through the writer.
  const ContestSpec back = parse_config(dump_config(spec));
  CHECK(back.agents == spec.agents);
  CHECK(back.payment.c() == 2.0);
  CHECK(back.value_scale.gamma() == 1.5);
}

TEST_CASE("malformed configs are rejected") {
  const char* bad[] = {
      "not json",
      R"({"agents": [{"family": "uniform"}, {"family": "uniform"}], "payment": {"c": 1, "a": 2}, "lambda": 0.1, "extra": 1})",
      R"({"agents": [{"family": "uniform", "params": {"alpha": 2}}, {"family": "uniform"}], "payment": {"c": 1, "a": 2}, "lambda": 0.1})",
      R"({"agents": [{"family": "cauchy"}, {"family": "uniform"}], "payment": {"c": 1, "a": 2}, "lambda": 0.1})",
      R"({"agents": [{"family": "uniform"}, {"family": "uniform"}], "payment": {"family": "exp", "c": 1, "a": 2}, "lambda": 0.1})",
      R"({"agents": [{"family": "uniform"}, {"family": "uniform"}], "payment": {"c": 1, "a": 1}, "lambda": 0.1})",
      R"({"agents": [{"family": "uniform"}, {"family": "uniform"}], "payment": {"c": 1, "a": 2}, "lambda": -1})",
      R"({"agents": [{"family": "uniform"}], "payment": {"c": 1, "a": 2}, "lambda": 0.1})",
      R"({"agents": [{"family": "uniform"}, {"family": "power", "params": {"alpha": 2, "support": [0, 2]}}], "payment": {"c": 1, "a": 2}, "lambda": 0.1})",
      R"({"agents": [{"family": "uniform"}, {"family": "atom_uniform", "params": {"atom": 1.5}}], "payment": {"c": 1, "a": 2}, "lambda": 0.1})",
      R"({"agents": [{"family": "uniform"}, {"family": "uniform"}], "payment": {"c": 1, "a": 2}, "lambda": 0.1, "numerics": {"steps": 10.5}})",
      R"({"agents": [{"family": "uniform"}, {"family": "uniform"}], "payment": {"c": 1, "a": 2}, "lambda": "high"})",
      R"({"agents": [{"family": "uniform"}, {"family": "uniform"}], "payment": {"c": 1, "a": 2}})",
  };
  for (const char* text : bad) {
    CAPTURE(text);
    CHECK_THROWS_AS(parse_config(text), ConfigError);
  }
}

TEST_CASE("files and the preset") {
  const ContestSpec preset = load_config("paper-case-study");
  CHECK(preset.lambda == 0.1);
  CHECK(preset.agents == paper_case_study(0.1).agents);
  const auto path = std::filesystem::temp_directory_path() / "allpay_config_test.json";
  {
    std::ofstream f(path);
    f << kCaseStudy;
  }
  CHECK(load_config(path.string()).lambda == 0.3);
  std::filesystem::remove(path);
  CHECK_THROWS_AS(load_config(path.string()), ConfigError);
}
