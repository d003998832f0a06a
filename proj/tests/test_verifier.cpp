#include <doctest.h>

#include <cmath>

#include <json.hpp>

#include "allpay/errors.hpp"
#include "allpay/verifier.hpp"

using namespace allpay;
using numerics::linspace;

namespace {

std::vector<EquilibriumProfile> case_study_profiles(double lambda) {
  const ContestSpec spec = paper_case_study(lambda);
  return {opt_profile(spec), fixed_prize_profile("fix", fix_mechanism(spec, 1.0)),
          fixed_prize_profile("sym1", sym_mechanism(spec, 0, 2, 1.0)),
          fixed_prize_profile("sym2", sym_mechanism(spec, 1, 2, 1.0))};
}

}  // namespace

TEST_CASE("expected utility examples") {
  const double lambda = 0.1;
  const EquilibriumProfile opt = opt_profile(paper_case_study(lambda));
  CHECK(expected_utility(opt, 0, 1.0, 5.0) == doctest::Approx(100.0 / 3.0 - 25.0).epsilon(1e-9));
  CHECK(expected_utility(opt, 1, 0.0, opt.strategies[1](0.0)) == 0.0);
  for (double v : {0.0, 0.4, 1.0}) CHECK(expected_utility(opt, 0, v, 0.0) == 0.0);
  // Overbidding the common top effort only adds cost.
  CHECK(expected_utility(opt, 0, 1.0, 6.0) == doctest::Approx(100.0 / 3.0 - 36.0).epsilon(1e-9));
}

TEST_CASE("equilibrium utility of the optimal mechanism is v^4 / (12 lambda^2)") {
  for (double lambda : {0.1, 0.3}) {
    const EquilibriumProfile opt = opt_profile(paper_case_study(lambda));
    for (double v : linspace(0.0, 1.0, 201)) {
      const double u = expected_utility(opt, 0, v, opt.strategies[0](v));
      CHECK(std::abs(u - std::pow(v, 4) / (12 * lambda * lambda)) <= 1e-6);
    }
  }
}

TEST_CASE("case-study equilibria pass the deviation check") {
  for (const auto& p : case_study_profiles(0.1)) {
    CAPTURE(p.mechanism);
    const DeviationResult d = best_response_check(p);
    CHECK(d.passed);
    CHECK(d.max_gain <= 1e-3);
    CHECK(d.max_abs_gap >= std::abs(d.max_gain));
  }
}

TEST_CASE("the deviation gap shrinks at least fourfold when both grids double") {
  for (const auto& p : case_study_profiles(0.3)) {
    CAPTURE(p.mechanism);
    const double coarse = best_response_check(p, 101, 2001).max_abs_gap;
    const double fine = best_response_check(p, 201, 4001).max_abs_gap;
    CHECK(fine * 4 <= coarse);
  }
}

TEST_CASE("perturbed profiles fail") {
  for (auto p : case_study_profiles(0.1)) {
    CAPTURE(p.mechanism);
    for (auto& s : p.strategies) s = s.perturbed(0.1);
    const DeviationResult d = best_response_check(p);
    CHECK_FALSE(d.passed);
    CHECK(d.max_gain > 1e-3);
    CHECK_FALSE(check_ir(p).passed);
  }
}

TEST_CASE("individual rationality and monotonicity") {
  for (double lambda : {0.1, 0.5}) {
    for (const auto& p : case_study_profiles(lambda)) {
      CAPTURE(p.mechanism);
      const IrResult ir = check_ir(p);
      CHECK(ir.passed);
      CHECK(ir.min_utility >= -1e-9);
      CHECK(ir.strictly_positive);
      CHECK(check_monotonicity(p).passed);
    }
  }
}

TEST_CASE("strategy autonomy holds for opt and fails for fix") {
  const ContestSpec spec = paper_case_study(0.1);
  const SaResult sa = check_sa(spec, 0, default_sa_replacements(spec.support()));
  CHECK(sa.passed);
  CHECK(sa.replacements.size() >= 3);
  for (const auto& r : sa.replacements) {
    CAPTURE(r.description);
    CHECK(r.opt_max_diff <= 1e-12);
    REQUIRE(r.fix_max_diff.has_value());
    CHECK(*r.fix_max_diff > 1e-3);
  }
  CHECK(check_sa(spec, 1, default_sa_replacements(spec.support())).passed);
  const SaResult empty = check_sa(spec, 0, {});
  CHECK(empty.passed);
  CHECK(empty.replacements.empty());
}

TEST_CASE("reports") {
  const VerificationReport r = verify_profile(opt_profile(paper_case_study(0.1)));
  CHECK(r.passed());
  CHECK(r.to_text().find("verification passed") != std::string::npos);
  const auto j = nlohmann::json::parse(r.to_json());
  CHECK(j.at("passed").get<bool>());
  CHECK(j.at("best_response").at("max_deviation_gain").get<double>() <= 1e-3);
  CHECK(j.at("strategy_autonomy").at("replacements").size() == 4);
  CHECK(j.at("individual_rationality").at("min_utility").get<double>() >= -1e-9);

  EquilibriumProfile broken = opt_profile(paper_case_study(0.1));
  broken.prizes.pop_back();
  CHECK_THROWS_AS(broken.validate(), InvariantError);
}
