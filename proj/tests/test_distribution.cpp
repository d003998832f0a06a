#include <doctest.h>

#include <cmath>

#include "allpay/distribution.hpp"
#include "allpay/errors.hpp"
#include "allpay/numerics.hpp"

using namespace allpay;
using numerics::linspace;

namespace {

// The case-study opponent: half the mass at type 0, the rest uniform.
TypeDistribution half_atom() { return TypeDistribution::atom_uniform(0.5); }

std::vector<TypeDistribution> catalog() {
  return {TypeDistribution::uniform(),
          half_atom(),
          TypeDistribution::power(3.0),
          TypeDistribution::power(0.5),
          TypeDistribution::piecewise_polynomial({0.0, 0.5, 1.0}, {{0.0, 0.0, 2.0}, {-1.0, 4.0, -2.0}}),
          TypeDistribution::uniform({2.0, 5.0}),
          TypeDistribution::power(2.0, {1.0, 3.0}).with_atom(0.2)};
}

}  // namespace

TEST_CASE("cdf examples") {
  CHECK(TypeDistribution::uniform().cdf(0.5) == 0.5);
  CHECK(half_atom().cdf(0.0) == 0.5);
  CHECK(half_atom().cdf(1.0) == 1.0);
  CHECK(half_atom().cdf(0.4) == doctest::Approx(0.7).epsilon(1e-15));
  CHECK(half_atom().cdf(-0.1) == 0.0);
  CHECK(half_atom().cdf(1.5) == 1.0);
  const TypeDistribution shifted = TypeDistribution::uniform({2.0, 4.0});
  CHECK(shifted.cdf(3.0) == 0.5);
  CHECK(shifted.density(3.0) == 0.5);
  CHECK(TypeDistribution::power(3.0).cdf(0.5) == doctest::Approx(0.125).epsilon(1e-15));
}

TEST_CASE("hazard complement examples") {
  CHECK(TypeDistribution::uniform().hazard_complement(0.3) == doctest::Approx(0.7).epsilon(1e-15));
  CHECK(half_atom().hazard_complement(0.3) == doctest::Approx(0.7).epsilon(1e-15));
  for (const auto& d : catalog()) CHECK(d.hazard_complement(d.support().hi()) == 0.0);
  CHECK_THROWS_AS(half_atom().hazard_complement(0.0), DomainError);
  CHECK_THROWS_AS(TypeDistribution::uniform().hazard_complement(-1.0), DomainError);
}

TEST_CASE("the case-study distributions share the hazard complement") {
  const TypeDistribution f1 = TypeDistribution::uniform(), f2 = half_atom();
  for (double v : linspace(1e-3, 1.0, 1000)) {
    CHECK(std::abs(f1.hazard_complement(v) - f2.hazard_complement(v)) <= 1e-12);
  }
}

TEST_CASE("catalog invariants: monotone cdf, unit mass, quantile round trip") {
  for (const auto& d : catalog()) {
    CAPTURE(d.describe());
    CHECK_NOTHROW(d.validate());
    const auto& s = d.support();
    double prev = 0.0;
    for (double v : linspace(s.lo() - 0.1, s.hi() + 0.1, 1000)) {
      CHECK(d.cdf(v) >= prev);
      prev = d.cdf(v);
    }
    CHECK(d.cdf(s.lo() - 1e-9) == 0.0);
    CHECK(d.cdf(s.lo()) == doctest::Approx(d.atom()));
    CHECK(d.cdf(s.hi()) == doctest::Approx(1.0).epsilon(1e-14));
    const double mass = d.atom() + numerics::integrate([&](double v) { return d.density(v); }, s, {1e-13, 1e-12, 4000});
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-9));
    for (double u : linspace(0.0, 0.999, 37)) {
      const double v = d.quantile(u);
      CHECK(s.contains(v));
      if (u >= d.atom()) CHECK(d.cdf(v) == doctest::Approx(u).epsilon(1e-9));
    }
    for (double v : linspace(s.lo(), s.hi(), 50)) {
      if (v > s.lo() && v < s.hi()) CHECK(d.density(v) > 0.0);
    }
  }
}

TEST_CASE("quantile handles the lower atom") {
  CHECK(half_atom().quantile(0.25) == 0.0);
  CHECK(half_atom().quantile(0.75) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(TypeDistribution::power(3.0).quantile(0.125) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("power-law and piecewise densities") {
  CHECK(TypeDistribution::power(0.5).density(0.25) == doctest::Approx(1.0).epsilon(1e-14));
  const TypeDistribution tri =
      TypeDistribution::piecewise_polynomial({0.0, 0.5, 1.0}, {{0.0, 0.0, 2.0}, {-1.0, 4.0, -2.0}});
  CHECK(tri.cdf(0.5) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(tri.density(0.25) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(tri.density(0.75) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("invalid catalog members are rejected") {
  CHECK_THROWS_AS(TypeDistribution::atom_uniform(1.0), ConfigError);
  CHECK_THROWS_AS(TypeDistribution::atom_uniform(-0.1), ConfigError);
  CHECK_THROWS_AS(TypeDistribution::power(0.0), ConfigError);
  CHECK_THROWS_AS(TypeDistribution::uniform({-1.0, 1.0}), ConfigError);
  CHECK_THROWS_AS(TypeDistribution::piecewise_polynomial({0.0, 1.0}, {{0.0, 0.5}}).validate(), ConfigError);
  CHECK_THROWS_AS(TypeDistribution::piecewise_polynomial({0.0, 1.0}, {{0.0, 2.0, -1.5, 0.5}, {}}), ConfigError);
  // Decreasing somewhere: G(t) = 3t - 2t^... with negative density near 1.
  CHECK_THROWS_AS(TypeDistribution::piecewise_polynomial({0.0, 1.0}, {{0.0, 3.0, -2.0}}).validate(), ConfigError);
}
