#include <doctest.h>

#include <cmath>

#include "allpay/benchmarks.hpp"
#include "allpay/errors.hpp"
#include "allpay/opt_mechanism.hpp"

using namespace allpay;
using numerics::linspace;

namespace {

const double kSqrt3 = std::sqrt(3.0);

double fixn_profit(double n, double lambda) { return 2 * std::sqrt(n * (n - 1)) / (n + 2) - lambda; }

}  // namespace

TEST_CASE("link function of the case study is v^2") {
  const ContestSpec spec = paper_case_study(0.1);
  const LinkFunction k = solve_fix_link(spec.agents[0], spec.agents[1], spec.value_scale, 4096);
  CHECK(k(1.0) == 1.0);
  CHECK(k(0.5) == doctest::Approx(0.25).epsilon(1e-10));
  double err = 0.0;
  for (double v : linspace(0.0, 1.0, 10001)) err = std::max(err, std::abs(k(v) - v * v));
  CHECK(err <= 1e-6);
  CHECK(k.inverse(0.25) == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(k.derivative(0.5) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("identical distributions give the identity link") {
  const LinkFunction k = solve_fix_link(TypeDistribution::uniform(), TypeDistribution::uniform(), ValueScale(1.0), 4096);
  for (double v : linspace(0.0, 1.0, 101)) CHECK(k(v) == doctest::Approx(v).epsilon(1e-10));
}

TEST_CASE("a vanishing opponent density is handled through the inverse link") {
  // F2 = v^3: k k' = 1/(3v), so k = sqrt(1 + (2/3) ln v), which reaches 0 at exp(-3/2).
  const LinkFunction k = solve_fix_link(TypeDistribution::uniform(), TypeDistribution::power(3.0), ValueScale(1.0), 4096);
  CHECK(k.zero_type() == doctest::Approx(std::exp(-1.5)).epsilon(1e-6));
  for (double v : {0.3, 0.5, 0.8}) CHECK(k(v) == doctest::Approx(std::sqrt(1 + 2.0 / 3.0 * std::log(v))).epsilon(1e-6));
  CHECK(k(1.0) == 1.0);
}

TEST_CASE("asymmetric fixed-prize strategies") {
  const FixedPrizeOutcome fix = fix_mechanism(paper_case_study(0.1), 1.0);
  const Strategy& b1 = fix.strategies[0];
  const Strategy& b2 = fix.strategies[1];
  CHECK(b1(1.0) == doctest::Approx(1 / kSqrt3).epsilon(1e-10));
  CHECK(b2(0.5) == doctest::Approx(std::pow(0.5, 0.75) / kSqrt3).epsilon(1e-10));
  CHECK(std::abs(b1.max_bid() - b2.max_bid()) <= 1e-6);
  CHECK(b1(0.0) == 0.0);
  for (double v : linspace(0.001, 1.0, 500)) {
    CHECK(b1(v) == doctest::Approx(std::pow(v, 1.5) / kSqrt3).epsilon(1e-5));
    CHECK(b2(v) == doctest::Approx(std::pow(v, 0.75) / kSqrt3).epsilon(1e-5));
  }
  // Scaling the prize scales p(b) = b^2 by Z.
  const FixedPrizeOutcome big = fix_mechanism(paper_case_study(0.1), 4.0);
  CHECK(big.strategies[0](0.7) == doctest::Approx(2 * b1(0.7)).epsilon(1e-10));
}

TEST_CASE("fixed-prize mechanisms reject unsupported specs") {
  ContestSpec three = symmetric_uniform(3, 0.1);
  CHECK_THROWS_AS(fix_mechanism(three, 1.0), ConfigError);
  ContestSpec typed = paper_case_study(0.1);
  typed.payment = PaymentFunction(1.0, 2.0, 0.5);
  CHECK_THROWS_AS(fix_mechanism(typed, 1.0), ConfigError);
  CHECK_THROWS_AS(sym_mechanism(typed, 0, 2, 1.0), ConfigError);
}

TEST_CASE("symmetric strategies") {
  const ContestSpec spec = paper_case_study(0.1);
  const Strategy sym1 = sym_mechanism(spec, 0, 2, 1.0).strategies[0];
  const Strategy sym2 = sym_mechanism(spec, 1, 2, 1.0).strategies[0];
  for (double v : linspace(0.0, 1.0, 101)) {
    CHECK(sym1(v) == doctest::Approx(v / std::sqrt(2.0)).epsilon(1e-10));
    CHECK(sym2(v) == doctest::Approx(v / 2).epsilon(1e-10));
  }
  for (std::size_t n : {2u, 5u, 16u}) {
    const Strategy s = sym_mechanism(spec, 0, n, 1.0).strategies[0];
    const double c = std::sqrt((n - 1.0) / n);
    for (double v : linspace(0.0, 1.0, 51)) CHECK(s(v) == doctest::Approx(c * std::pow(v, n / 2.0)).epsilon(1e-9));
  }
  // With a general value scale h = v^g and p = b^2: b^2 = v^(g+1) / (g+1).
  const Strategy g = sym_strategy(TypeDistribution::uniform(), 2, PaymentFunction(1.0, 2.0, 0.0), ValueScale(2.5), 1.0, {});
  for (double v : {0.2, 0.6, 1.0}) CHECK(g(v) == doctest::Approx(std::sqrt(std::pow(v, 3.5) / 3.5)).epsilon(1e-9));
}

TEST_CASE("symmetric and asymmetric solvers agree when the distributions coincide") {
  ContestSpec spec = paper_case_study(0.1);
  spec.agents[1] = spec.agents[0] = TypeDistribution::power(2.0);
  const Strategy fix = fix_mechanism(spec, 1.0).strategies[1];
  const Strategy sym = sym_mechanism(spec, 0, 2, 1.0).strategies[0];
  for (double v : linspace(0.0, 1.0, 201)) CHECK(std::abs(fix(v) - sym(v)) <= 1e-6);
}

TEST_CASE("fixed-prize profits") {
  const ContestSpec spec = paper_case_study(0.1);
  CHECK(fixed_prize_profit(fix_mechanism(spec, 1.0)) == doctest::Approx(24 / (35 * kSqrt3) - 0.1).epsilon(1e-9));
  CHECK(fixed_prize_profit(sym_mechanism(spec, 0, 2, 1.0)) == doctest::Approx(1 / std::sqrt(2.0) - 0.1).epsilon(1e-10));
  CHECK(std::abs(fixed_prize_profit(sym_mechanism(paper_case_study(0.25), 1, 2, 1.0))) <= 1e-10);
  CHECK(fixed_prize_profit(sym_mechanism(spec, 0, 16, 1.0)) == doctest::Approx(fixn_profit(16, 0.1)).epsilon(1e-10));
}

TEST_CASE("FIX-n profit is concave in n and saturates at 2 - lambda") {
  const ContestSpec spec = paper_case_study(0.1);
  std::vector<double> p;
  for (std::size_t n = 2; n <= 50; ++n) {
    p.push_back(fixed_prize_profit(sym_mechanism(spec, 0, n, 1.0)));
    CHECK(p.back() == doctest::Approx(fixn_profit(n, 0.1)).epsilon(1e-9));
  }
  for (std::size_t k = 1; k + 1 < p.size(); ++k) CHECK(p[k + 1] - 2 * p[k] + p[k - 1] <= 0.0);
  CHECK(std::abs(fixed_prize_profit(sym_mechanism(spec, 0, 10000, 1.0)) - 1.9) <= 1e-3);
}

TEST_CASE("profit ranking sym2 < fix < sym1 <= opt") {
  for (double lambda : linspace(0.02, 0.70, 18)) {
    const ContestSpec spec = paper_case_study(lambda);
    const double fix = fixed_prize_profit(fix_mechanism(spec, 1.0));
    const double sym1 = fixed_prize_profit(sym_mechanism(spec, 0, 2, 1.0));
    const double sym2 = fixed_prize_profit(sym_mechanism(spec, 1, 2, 1.0));
    const double opt = opt_profit(spec).total;
    CHECK(sym2 < fix);
    CHECK(fix < sym1);
    CHECK(sym1 <= opt + 1e-12);
  }
}

TEST_CASE("optimal fixed prizes") {
  const ContestSpec spec = paper_case_study(0.1);
  const PrizeOptimum fix = optimal_fixed_prize([&](double z) { return fixed_prize_profit(fix_mechanism(spec, z)); });
  const PrizeOptimum sym1 = optimal_fixed_prize([&](double z) { return fixed_prize_profit(sym_mechanism(spec, 0, 2, z)); });
  const PrizeOptimum sym2 = optimal_fixed_prize([&](double z) { return fixed_prize_profit(sym_mechanism(spec, 1, 2, z)); });
  CHECK(fix.profit == doctest::Approx(48 / 122.5).epsilon(1e-8));
  CHECK(sym1.profit == doctest::Approx(1.25).epsilon(1e-8));
  CHECK(sym2.profit == doctest::Approx(1 / 6.4).epsilon(1e-8));
  // Revenue grows like sqrt(Z): Z* = (revenue at Z=1 / (2 lambda))^2.
  CHECK(sym1.prize == doctest::Approx(std::pow(1 / std::sqrt(2.0) / 0.2, 2)).epsilon(1e-6));
  CHECK_THROWS_AS(optimal_fixed_prize([](double z) { return z; }), SolverError);
}
