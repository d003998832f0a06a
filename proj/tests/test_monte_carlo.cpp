#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "allpay/errors.hpp"
#include "allpay/monte_carlo.hpp"

using namespace allpay;

TEST_CASE("counter generator") {
  const CounterRng a(42), b(42), c(43);
  CHECK(a.bits(7, 1) == b.bits(7, 1));
  CHECK(a.bits(7, 1) != c.bits(7, 1));
  CHECK(a.bits(7, 1) != a.bits(7, 2));
  CHECK(a.bits(7, 1) != a.bits(8, 1));
  double sum = 0.0, sum_sq = 0.0, lo = 1.0, hi = 0.0;
  const int n = 200000;
  for (int t = 0; t < n; ++t) {
    const double u = a.uniform(t, 0);
    lo = std::min(lo, u);
    hi = std::max(hi, u);
    sum += u;
    sum_sq += u * u;
  }
  CHECK(lo >= 0.0);
  CHECK(hi < 1.0);
  CHECK(std::abs(sum / n - 0.5) <= 4 * std::sqrt(1.0 / 12 / n));
  CHECK(std::abs(sum_sq / n - 1.0 / 3.0) <= 0.005);
  CHECK(std::string(CounterRng::kName) == "splitmix64-counter");
}

TEST_CASE("campaigns are reproducible and independent of the worker count") {
  const EquilibriumProfile p = opt_profile(paper_case_study(0.1));
  const MonteCarloResult one = monte_carlo_campaign(p, 1, 9);
  const MonteCarloResult again = monte_carlo_campaign(p, 1, 9);
  CHECK(one.mean_profit == again.mean_profit);
  CHECK(one.std_error == 0.0);
  const MonteCarloResult serial = monte_carlo_campaign(p, 50000, 5, 1);
  const MonteCarloResult pooled = monte_carlo_campaign(p, 50000, 5, 3);
  CHECK(serial.mean_profit == pooled.mean_profit);
  CHECK(serial.std_error == pooled.std_error);
  CHECK(serial.mean_effort == pooled.mean_effort);
  CHECK(serial.generator == "splitmix64-counter");
  CHECK(serial.seed == 5);
  CHECK(monte_carlo_campaign(p, 50000, 6, 1).mean_profit != serial.mean_profit);
  CHECK_THROWS_AS(monte_carlo_campaign(p, 0, 1), DomainError);
}

TEST_CASE("simulated profits agree with the analytic values within 3 standard errors") {
  for (double lambda : {0.1, 0.3, 0.5}) {
    const ContestSpec spec = paper_case_study(lambda);
    const struct {
      EquilibriumProfile profile;
      double exact;
    } cases[] = {
        {opt_profile(spec), 1 / (8 * lambda)},
        {fixed_prize_profile("fix", fix_mechanism(spec, 1.0)), 24 / (35 * std::sqrt(3.0)) - lambda},
        {fixed_prize_profile("sym1", sym_mechanism(spec, 0, 2, 1.0)), 1 / std::sqrt(2.0) - lambda},
        {fixed_prize_profile("sym2", sym_mechanism(spec, 1, 2, 1.0)), 0.25 - lambda},
    };
    for (const auto& c : cases) {
      CAPTURE(lambda);
      CAPTURE(c.profile.mechanism);
      const MonteCarloResult r = monte_carlo_campaign(c.profile, 200000, 2024);
      CHECK(std::abs(r.mean_profit - c.exact) <= 3 * r.std_error);
    }
  }
}

TEST_CASE("mean efforts") {
  const double lambda = 0.2;
  const MonteCarloResult r = monte_carlo_campaign(opt_profile(paper_case_study(lambda)), 200000, 77);
  // E[v^2] / (2 lambda) for agent 1, half of it for agent 2 (atom at zero).
  const double e1 = 1 / (6 * lambda);
  CHECK(r.mean_effort[0] == doctest::Approx(e1).epsilon(0.02));
  CHECK(r.mean_effort[1] == doctest::Approx(e1 / 2).epsilon(0.02));
}
