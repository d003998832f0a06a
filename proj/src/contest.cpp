#include "allpay/contest.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "allpay/errors.hpp"

namespace allpay {

using numerics::Interval;

void NumericsConfig::validate() const {
  if (ode_steps < 16) throw ConfigError("numerics: steps must be at least 16");
  if (grid_points < 17) throw ConfigError("numerics: grid_points must be at least 17");
  if (!(abs_tol > 0.0) || !(rel_tol >= 0.0)) {
    throw ConfigError("numerics: abs_tol must be > 0 and rel_tol >= 0");
  }
}

void ContestSpec::validate() const {
  if (agents.size() < 2) throw ConfigError("contest needs at least two agents");
  const Interval& s = support();
  for (std::size_t i = 1; i < agents.size(); ++i) {
    if (agents[i].support().lo() != s.lo() || agents[i].support().hi() != s.hi()) {
      throw ConfigError("all agents must share the same type support");
    }
  }
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw ConfigError("lambda must be > 0");
  numerics.validate();
  for (const auto& a : agents) a.validate();
  const PaymentReport report = validate_payment(payment, 10.0, s.lo(), s.hi());
  if (!report.ok()) {
    throw ConfigError("payment violates the model assumptions:\n" + report.summary());
  }
}

ContestSpec paper_case_study(double lambda) {
  ContestSpec spec;
  spec.agents = {TypeDistribution::uniform(), TypeDistribution::atom_uniform(0.5)};
  spec.payment = PaymentFunction(1.0, 2.0, 0.0);
  spec.value_scale = ValueScale(1.0);
  spec.lambda = lambda;
  return spec;
}

ContestSpec symmetric_uniform(std::size_t n, double lambda) {
  ContestSpec spec;
  spec.agents.assign(n, TypeDistribution::uniform());
  spec.payment = PaymentFunction(1.0, 2.0, 0.0);
  spec.value_scale = ValueScale(1.0);
  spec.lambda = lambda;
  return spec;
}

Strategy::Strategy(Interval support, std::vector<double> types, std::vector<double> bids,
                   std::vector<double> slopes, Evaluator exact)
    : support_(support) {
  if (types.size() != bids.size() || types.size() < 2) {
    throw InvariantError("Strategy: need matching type and bid tables of length >= 2");
  }
  if (!slopes.empty() && slopes.size() != types.size()) {
    throw InvariantError("Strategy: slope table length mismatch");
  }
  auto data = std::make_shared<Data>();
  data->exact = std::move(exact);
  // Collapse the zero-bid region into its last node.
  std::size_t first = 0;
  while (first + 2 < bids.size() && bids[first + 1] <= 0.0) ++first;
  const auto offset = static_cast<std::ptrdiff_t>(first);
  data->types.assign(types.begin() + offset, types.end());
  data->bids.assign(bids.begin() + offset, bids.end());
  if (!slopes.empty()) slopes.erase(slopes.begin(), slopes.begin() + offset);

  const auto& t = data->types;
  const auto& b = data->bids;
  for (std::size_t k = 0; k + 1 < b.size(); ++k) {
    if (!(b[k] < b[k + 1]) || !(t[k] < t[k + 1])) {
      std::ostringstream msg;
      msg << "Strategy: bids must increase strictly in type; violated at v = " << t[k + 1];
      throw InvariantError(msg.str());
    }
  }
  data->table = slopes.empty() ? numerics::MonotoneCubic(t, b)
                               : numerics::MonotoneCubic(t, b, std::move(slopes));
  data_ = std::move(data);
}

double Strategy::operator()(double v) const {
  const Data& d = *data_;
  if (v <= d.types.front()) return d.bids.front();
  if (v >= d.types.back()) return d.bids.back();
  return d.exact ? d.exact(v) : d.table(v);
}

double Strategy::interpolated(double v) const { return data_->table(v); }

double Strategy::inverse(double b) const {
  const Data& d = *data_;
  if (b <= d.bids.front()) return d.types.front();
  if (b >= d.bids.back()) return d.types.back();
  if (!d.exact) return d.table.inverse(b, {1e-300, 0.0, 200}).x;
  const auto it = std::upper_bound(d.bids.begin(), d.bids.end(), b);
  const std::size_t k = static_cast<std::size_t>(it - d.bids.begin()) - 1;
  if (b == d.bids[k]) return d.types[k];
  const Interval bracket(d.types[k], d.types[k + 1]);
  auto g = [&](double v) { return d.exact(v) - b; };
  return numerics::find_root(g, bracket, d.bids[k] - b, d.bids[k + 1] - b, {1e-300, 0.0, 200});
}

Strategy Strategy::perturbed(double delta) const {
  std::vector<double> bids = data_->bids;
  for (double& b : bids) b += delta;
  Evaluator exact;
  if (data_->exact) {
    exact = [base = data_->exact, delta](double v) { return base(v) + delta; };
  }
  // The zero region keeps bidding the (now shifted) first tabulated bid.
  return Strategy(support_, data_->types, std::move(bids), {}, std::move(exact));
}

Strategy tabulate_strategy(const Interval& support, int grid, const Strategy::Evaluator& fn,
                           const Strategy::Evaluator& slope) {
  std::vector<double> types = numerics::linspace(support.lo(), support.hi(),
                                                 static_cast<std::size_t>(grid));
  std::vector<double> bids(types.size()), slopes;
  for (std::size_t k = 0; k < types.size(); ++k) bids[k] = fn(types[k]);
  if (slope) {
    slopes.resize(types.size());
    for (std::size_t k = 0; k < types.size(); ++k) slopes[k] = slope(types[k]);
  }
  return Strategy(support, std::move(types), std::move(bids), std::move(slopes), fn);
}

PrizeSchedule PrizeSchedule::constant(double z) {
  if (!(z >= 0.0) || !std::isfinite(z)) throw DomainError("prize must be finite and >= 0");
  PrizeSchedule s;
  s.constant_ = z;
  s.zero_value_ = z;
  return s;
}

PrizeSchedule::PrizeSchedule(Evaluator exact, std::vector<double> types, std::vector<double> bids,
                             std::vector<double> values, double max_bid, double zero_value)
    : exact_(std::move(exact)),
      types_(std::move(types)),
      bids_(std::move(bids)),
      values_(std::move(values)),
      max_bid_(max_bid),
      zero_value_(zero_value) {
  if (!exact_) throw InvariantError("PrizeSchedule: exact evaluator required");
  if (types_.size() != values_.size() || bids_.size() != values_.size() || types_.size() < 2) {
    throw InvariantError("PrizeSchedule: table length mismatch");
  }
  for (double z : values_) {
    if (!(z >= 0.0)) throw InvariantError("PrizeSchedule: prizes must be nonnegative");
  }
  by_type_ = numerics::MonotoneCubic(types_, values_);
  constant_ = values_.back();
}

double PrizeSchedule::operator()(double b) const {
  if (!exact_) return constant_;
  if (b <= 0.0) return zero_value_;
  if (b >= max_bid_) return constant_;
  return exact_(b);
}

double PrizeSchedule::at_type(double v) const {
  if (!exact_) return constant_;
  return by_type_(v);
}

double win_probability(const ContestSpec& spec, std::span<const Strategy> strategies,
                       std::size_t i, double b) {
  double q = 1.0;
  for (std::size_t j = 0; j < strategies.size(); ++j) {
    if (j == i) continue;
    const Strategy& s = strategies[j];
    if (b > s.max_bid()) continue;
    if (b <= s.min_bid()) {
      if (s.min_bid() > 0.0) return 0.0;
      q *= spec.agents[j].cdf(s.zero_type());
      continue;
    }
    q *= spec.agents[j].cdf(s.inverse(b));
  }
  return q;
}

double expected_effort(const TypeDistribution& dist, const Strategy& strategy,
                       const numerics::Tolerance& tol) {
  const double v0 = strategy.zero_type();
  double total = strategy.min_bid() * dist.cdf(v0);
  const double hi = dist.support().hi();
  if (v0 < hi) {
    total += numerics::integrate([&](double v) { return strategy(v) * dist.density(v); },
                                 Interval(v0, hi), tol);
  }
  return total;
}

}  // namespace allpay
