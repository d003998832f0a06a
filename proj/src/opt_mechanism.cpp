#include "allpay/opt_mechanism.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "allpay/errors.hpp"

namespace allpay {

using numerics::Interval;

namespace {

constexpr int kBracketDoublings = 200;
const numerics::Tolerance kRootTol{1e-300, 0.0, 300};

}  // namespace

double opt_foc_residual(const ContestSpec& spec, std::size_t i, double b, double v) {
  const PaymentFunction ph = spec.normalized_payment();
  const double hazard = spec.agents.at(i).hazard_complement(v);
  return ph.d_b(b, v) - 1.0 / spec.principal_scale() - ph.d_bv(b, v) * hazard;
}

double solve_opt_effort(const ContestSpec& spec, std::size_t i, double v) {
  const TypeDistribution& dist = spec.agents.at(i);
  if (v <= dist.support().lo()) return 0.0;
  v = std::min(v, dist.support().hi());

  const PaymentFunction ph = spec.normalized_payment();
  const double inv_scale = 1.0 / spec.principal_scale();
  const double hazard = dist.hazard_complement(v);
  auto g = [&](double b) { return ph.d_b(b, v) - inv_scale - ph.d_bv(b, v) * hazard; };

  double lo = 0.0, g_lo = g(lo);
  if (g_lo >= 0.0) return 0.0;
  double hi = 1.0, g_hi = g(hi);
  for (int k = 0; g_hi < 0.0; ++k) {
    if (k == kBracketDoublings) {
      std::ostringstream msg;
      msg << "solve_opt_effort: no sign change below b = " << hi << " at v = " << v
          << " (payment family outside the model assumptions?)";
      throw SolverError(msg.str());
    }
    lo = hi;
    g_lo = g_hi;
    hi *= 2.0;
    g_hi = g(hi);
  }
  return numerics::find_root(g, Interval(lo, hi), g_lo, g_hi, kRootTol);
}

Strategy build_opt_strategy(const ContestSpec& spec, std::size_t i) {
  const ContestSpec copy = spec;
  auto effort = [copy, i](double v) { return solve_opt_effort(copy, i, v); };
  return tabulate_strategy(spec.support(), spec.numerics.grid_points, effort);
}

PrizeSchedule build_opt_prize(const ContestSpec& spec, std::size_t i,
                              const std::vector<Strategy>& strategies) {
  const PaymentFunction ph = spec.normalized_payment();
  const Strategy& own = strategies.at(i);
  const numerics::Tolerance tol = spec.numerics.tolerance();
  const std::vector<double> types(own.types().begin(), own.types().end());

  auto dv_term = [ph, own](double t) {
    const double b = own(t);
    return b > 0.0 ? ph.d_v(b, t) : 0.0;
  };
  auto p_hat = [ph](double b, double v) { return b > 0.0 ? ph(b, v) : 0.0; };

  // Cumulative int_{v_lo}^{types[k]} p_hat'_v(b(t), t) dt. Types below the
  // first node bid zero and contribute nothing.
  std::vector<double> cumulative(types.size(), 0.0);
  for (std::size_t k = 1; k < types.size(); ++k) {
    cumulative[k] = cumulative[k - 1] + numerics::integrate(dv_term, Interval(types[k - 1], types[k]), tol);
  }

  const ContestSpec spec_copy = spec;
  auto exact = [spec_copy, strategies, i, types, cumulative, dv_term, p_hat, tol](double b) {
    const Strategy& s = strategies[i];
    const double v = s.inverse(b);
    std::size_t k = static_cast<std::size_t>(std::upper_bound(types.begin(), types.end(), v) - types.begin());
    k = std::clamp<std::size_t>(k, 1, types.size()) - 1;
    double integral = cumulative[k];
    if (v > types[k]) integral += numerics::integrate(dv_term, Interval(types[k], v), tol);
    const double numerator = p_hat(b, v) - integral;
    const double q = win_probability(spec_copy, strategies, i, b);
    if (!(q > 0.0)) {
      std::ostringstream msg;
      msg << "optimal prize undefined at b = " << b << ": zero win probability";
      throw DomainError(msg.str());
    }
    return numerator / q;
  };

  const double b_max = own.max_bid();
  const double b_min = b_max * 1e-6;
  std::vector<double> node_types, node_bids, node_values;
  for (std::size_t k = 0; k < types.size(); ++k) {
    const double b = own.bids()[k];
    if (b < b_min) continue;
    const double q = win_probability(spec, strategies, i, b);
    if (!(q > 0.0)) continue;
    node_types.push_back(types[k]);
    node_bids.push_back(b);
    node_values.push_back(std::max(0.0, (p_hat(b, types[k]) - cumulative[k]) / q));
  }
  if (node_types.size() < 2) throw SolverError("build_opt_prize: prize table has fewer than two nodes");
  return PrizeSchedule(exact, std::move(node_types), std::move(node_bids), std::move(node_values), b_max, 0.0);
}

OptSolution solve_opt(const ContestSpec& spec) {
  OptSolution out;
  for (std::size_t i = 0; i < spec.n(); ++i) out.strategies.push_back(build_opt_strategy(spec, i));
  for (std::size_t i = 0; i < spec.n(); ++i) out.prizes.push_back(build_opt_prize(spec, i, out.strategies));
  return out;
}

ProfitBreakdown opt_profit(const ContestSpec& spec, const std::vector<Strategy>& strategies) {
  const PaymentFunction ph = spec.normalized_payment();
  const double scale = spec.principal_scale();
  const numerics::Tolerance tol = spec.numerics.tolerance();
  ProfitBreakdown out;
  for (std::size_t i = 0; i < spec.n(); ++i) {
    const TypeDistribution& dist = spec.agents[i];
    const Strategy& s = strategies[i];
    auto integrand = [&](double v) {
      const double b = s(v);
      if (b <= 0.0) return 0.0;
      const double virtual_effort =
          b - scale * ph(b, v) + scale * ph.d_v(b, v) * dist.hazard_complement(v);
      return virtual_effort * dist.density(v);
    };
    const double value = numerics::integrate(integrand, Interval(s.zero_type(), dist.support().hi()), tol);
    out.per_agent.push_back(value);
    out.total += value;
  }
  return out;
}

ProfitBreakdown opt_profit(const ContestSpec& spec) {
  std::vector<Strategy> strategies;
  for (std::size_t i = 0; i < spec.n(); ++i) strategies.push_back(build_opt_strategy(spec, i));
  return opt_profit(spec, strategies);
}

double expected_total_effort(const ContestSpec& spec, const std::vector<Strategy>& strategies) {
  double total = 0.0;
  for (std::size_t i = 0; i < spec.n(); ++i) {
    total += expected_effort(spec.agents[i], strategies[i], spec.numerics.tolerance());
  }
  return total;
}

double expected_prize_cost(const ContestSpec& spec, const std::vector<Strategy>& strategies,
                           const std::vector<PrizeSchedule>& prizes) {
  const numerics::Tolerance tol = spec.numerics.tolerance();
  double total = 0.0;
  for (std::size_t i = 0; i < spec.n(); ++i) {
    const TypeDistribution& dist = spec.agents[i];
    const Strategy& s = strategies[i];
    auto paid = [&](double b) {
      const double q = win_probability(spec, strategies, i, b);
      return q > 0.0 ? prizes[i](b) * q : 0.0;
    };
    total += paid(s.min_bid()) * dist.cdf(s.zero_type());
    total += numerics::integrate([&](double v) { return paid(s(v)) * dist.density(v); },
                                 Interval(s.zero_type(), dist.support().hi()), tol);
  }
  return spec.principal_scale() * total;
}

}  // namespace allpay
