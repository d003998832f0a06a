#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "allpay/errors.hpp"
#include "allpay/numerics.hpp"
#include "allpay/payment.hpp"

using namespace allpay;

namespace {

bool assumption_passed(const PaymentReport& r, const std::string& name) {
  for (const auto& a : r.assumptions) {
    if (a.name == name) return a.passed;
  }
  FAIL("no assumption named " << name);
  return false;
}

}  // namespace

TEST_CASE("quadratic payment satisfies every assumption") {
  const PaymentFunction p(1.0, 2.0, 0.0);
  const PaymentReport r = validate_payment(p, 10.0, 0.0, 1.0);
  CHECK(r.ok());
  CHECK(r.summary().find("FAIL") == std::string::npos);
  CHECK(p(3.0, 0.7) == 9.0);
  CHECK(p.type_independent());
}

TEST_CASE("violations are reported") {
  const PaymentReport linear = validate_payment(PaymentFunction(1.0, 1.0, 0.0), 10.0, 0.0, 1.0);
  CHECK_FALSE(linear.ok());
  CHECK_FALSE(assumption_passed(linear, "p''_bb > 0"));
  CHECK(assumption_passed(linear, "p'_b > 0"));
  // p = b^2 v increases with the type.
  const PaymentReport increasing = validate_payment(PaymentFunction(1.0, 2.0, -1.0), 10.0, 0.0, 1.0);
  CHECK_FALSE(assumption_passed(increasing, "p'_v <= 0"));
  CHECK(increasing.summary().find("FAIL") != std::string::npos);
}

TEST_CASE("normalized payment of the case study") {
  const PaymentFunction hat = normalize_payment(PaymentFunction(1.0, 2.0, 0.0), ValueScale(1.0));
  CHECK(hat(2.0, 0.5) == doctest::Approx(8.0).epsilon(1e-15));
  CHECK(hat.d_v(2.0, 1.0) == doctest::Approx(-4.0).epsilon(1e-15));
  CHECK(hat.d_b(5.0, 1.0) == doctest::Approx(10.0).epsilon(1e-15));
  CHECK(hat.d_bv(5.0, 1.0) == doctest::Approx(-10.0).epsilon(1e-15));
  CHECK(hat.d_bbv(5.0, 2.0) == doctest::Approx(-0.5).epsilon(1e-15));
  CHECK_THROWS_AS(hat(1.0, 0.0), DomainError);
}

TEST_CASE("analytic partials match finite differences on random points") {
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> u(0.05, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const PaymentFunction p(0.5 + u(gen), 1.2 + 2 * u(gen), 2 * u(gen) - 0.2);
    for (const PaymentFunction& f : {p, normalize_payment(p, ValueScale(0.5 + u(gen)))}) {
      std::vector<double> bs(15), vs(15);
      for (auto& b : bs) b = 5 * u(gen);
      for (auto& v : vs) v = u(gen);
      std::sort(bs.begin(), bs.end());
      std::sort(vs.begin(), vs.end());
      const PaymentReport r = validate_payment(f, bs, vs);
      for (const auto& d : r.derivatives) {
        CAPTURE(d.name);
        CHECK(d.passed);
        CHECK(d.max_rel_error <= 1e-5);
      }
    }
  }
  // An independent spot check of the mixed third derivative.
  const PaymentFunction p(1.5, 2.5, 0.7);
  const double b = 0.8, v = 0.6, hb = 1e-4, hv = 1e-4;
  auto pbb = [&](double vv) { return (p(b + hb, vv) - 2 * p(b, vv) + p(b - hb, vv)) / (hb * hb); };
  CHECK(p.d_bbv(b, v) == doctest::Approx((pbb(v + hv) - pbb(v - hv)) / (2 * hv)).epsilon(1e-4));
}

TEST_CASE("effort_for_cost inverts the payment") {
  const PaymentFunction p(2.0, 3.0, 0.5);
  for (double v : {0.1, 0.5, 1.0}) {
    for (double b : {0.0, 0.01, 0.7, 3.0}) CHECK(p.effort_for_cost(p(b, v), v) == doctest::Approx(b).epsilon(1e-13));
  }
  CHECK(PaymentFunction(1.0, 2.0, 0.0).effort_for_cost(1.0 / 3.0, 0.2) == doctest::Approx(1 / std::sqrt(3.0)));
}

TEST_CASE("value scale") {
  const ValueScale h(2.0);
  CHECK(h(0.0) == 0.0);
  CHECK(h(0.5) == 0.25);
  CHECK(h.derivative(0.5) == 1.0);
  CHECK_THROWS_AS(ValueScale(0.0), ConfigError);
  CHECK_THROWS_AS(PaymentFunction(1.0, NAN, 0.0), ConfigError);
}
