#include "allpay/benchmarks.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <optional>
#include <sstream>

#include "allpay/errors.hpp"

namespace allpay {

using numerics::Interval;

namespace {

std::vector<double> reciprocal(const std::vector<double>& xs) {
  std::vector<double> out(xs.size());
  for (std::size_t k = 0; k < xs.size(); ++k) out[k] = 1.0 / xs[k];
  return out;
}

// Keeps nodes whose coordinates both increase strictly, scanning from the top
// so that any collapsed nodes at the lower end are the ones dropped.
void drop_flat_nodes(std::vector<double>& x, std::vector<double>& y, std::vector<double>& s) {
  std::vector<double> kx, ky, ks;
  for (std::size_t k = x.size(); k-- > 0;) {
    if (!kx.empty() && !(x[k] < kx.back() && y[k] < ky.back())) continue;
    kx.push_back(x[k]);
    ky.push_back(y[k]);
    ks.push_back(s[k]);
  }
  std::reverse(kx.begin(), kx.end());
  std::reverse(ky.begin(), ky.end());
  std::reverse(ks.begin(), ks.end());
  x = std::move(kx);
  y = std::move(ky);
  s = std::move(ks);
}

struct LogTable {
  std::vector<double> x, y, slope;
};

// Integrates d ln(k - lo) / d ln(v - lo) = (v - lo)/(k - lo) * h(k) a(v) / (h(v) b(k))
// from the top of the support, with k(hi) = hi.
std::optional<LogTable> integrate_log_link(const TypeDistribution& a, const TypeDistribution& b,
                                           const ValueScale& h, int steps, std::string& failure) {
  const Interval& s = a.support();
  const double lo = s.lo(), hi = s.hi(), width = s.width();
  auto ratio = [&](double v, double k) {
    k = std::min(k, hi);
    return h(k) * a.density(v) / (h(v) * b.density(k));
  };
  auto rhs = [&](double sv, double sk) {
    const double v = lo + std::exp(sv);
    const double k = lo + std::exp(sk);
    return std::exp(sv - sk) * ratio(v, k);
  };

  const double eps = 1e-8 * width;
  double top_slope = ratio(hi, hi);
  if (!(top_slope > 0.0) || !std::isfinite(top_slope)) top_slope = 1.0;
  const double s_end = std::log(width - eps);
  const double k_end = std::log(width - eps * top_slope);
  const double s_start = std::log(1e-12 * width);

  numerics::OdeTable t;
  try {
    t = numerics::solve_ode_backward(rhs, s_end, k_end, s_start, steps);
  } catch (const numerics::OdeError& e) {
    std::ostringstream msg;
    msg << "link equation not finite at v = " << lo + std::exp(e.at());
    failure = msg.str();
    return std::nullopt;
  }
  // A blow-up of the log slope at the lower end means k reaches lo in the
  // interior; the caller then integrates the inverse link instead.
  if (!std::isfinite(t.k.front()) || !(t.slope.front() < 1e3)) {
    std::ostringstream msg;
    msg << "link collapses to the lower support bound near v = " << lo + std::exp(t.v.front());
    failure = msg.str();
    return std::nullopt;
  }
  LogTable out{std::move(t.v), std::move(t.k), std::move(t.slope)};
  // Pin the boundary condition k(hi) = hi.
  out.x.push_back(std::log(width));
  out.y.push_back(std::log(width));
  out.slope.push_back(top_slope);
  return out;
}

}  // namespace

LinkFunction::LinkFunction(Interval support, std::vector<double> log_x, std::vector<double> log_y,
                           std::vector<double> log_slope)
    : support_(support), zero_type_(support.lo()) {
  drop_flat_nodes(log_x, log_y, log_slope);
  if (log_x.size() < 2) throw SolverError("LinkFunction: degenerate table");
  // A near-vertical start means k^{-1}(lo) lies inside the support.
  if (!(log_slope.front() < 1e3)) zero_type_ = support.lo() + std::exp(log_x.front());
  backward_ = numerics::MonotoneCubic(log_y, log_x, reciprocal(log_slope));
  forward_ = numerics::MonotoneCubic(std::move(log_x), std::move(log_y), std::move(log_slope));
}

double LinkFunction::operator()(double v) const {
  const double lo = support_.lo();
  if (v <= zero_type_) return lo;
  if (v >= support_.hi()) return support_.hi();
  const double x = std::log(v - lo);
  const auto xs = forward_.xs();
  double y;
  if (x < xs.front()) {
    y = forward_.ys().front() + forward_.slopes().front() * (x - xs.front());
  } else {
    y = forward_(x);
  }
  return lo + std::exp(y);
}

double LinkFunction::inverse(double w) const {
  const double lo = support_.lo();
  if (w <= lo) return zero_type_;
  if (w >= support_.hi()) return support_.hi();
  const double y = std::log(w - lo);
  const auto ys = backward_.xs();
  double x;
  if (y < ys.front()) {
    x = backward_.ys().front() + backward_.slopes().front() * (y - ys.front());
  } else {
    x = backward_(y);
  }
  return std::max(lo + std::exp(x), zero_type_);
}

double LinkFunction::derivative(double v) const {
  const double lo = support_.lo();
  if (v <= zero_type_ || v > support_.hi()) return 0.0;
  const double x = std::log(v - lo);
  const double slope = x < forward_.xs().front() ? forward_.slopes().front() : forward_.derivative(x);
  return ((*this)(v) - lo) / (v - lo) * slope;
}

LinkFunction solve_fix_link(const TypeDistribution& f1, const TypeDistribution& f2,
                            const ValueScale& h, int steps) {
  if (!(f1.support() == f2.support())) throw ConfigError("solve_fix_link: supports differ");
  std::string forward_failure, inverse_failure;
  if (auto t = integrate_log_link(f1, f2, h, steps, forward_failure)) {
    return LinkFunction(f1.support(), std::move(t->x), std::move(t->y), std::move(t->slope));
  }
  // Inverse link m = k^{-1}: the roles of the two agents swap.
  if (auto t = integrate_log_link(f2, f1, h, steps, inverse_failure)) {
    return LinkFunction(f1.support(), std::move(t->y), std::move(t->x), reciprocal(t->slope));
  }
  throw SolverError("solve_fix_link: " + forward_failure + "; inverse: " + inverse_failure);
}

namespace {

void require_type_independent(const ContestSpec& spec) {
  if (!spec.payment.type_independent()) {
    throw ConfigError("fixed-prize benchmarks need a type-independent payment p(b) (d = 0)");
  }
}

// int_{lo}^{v} g over a uniform node grid: cumulative sums plus one partial
// quadrature on the cell containing v.
class CumulativeIntegral {
 public:
  CumulativeIntegral(numerics::ScalarFn g, Interval domain, int nodes, numerics::Tolerance tol)
      : g_(std::move(g)), nodes_(numerics::linspace(domain.lo(), domain.hi(), static_cast<std::size_t>(nodes))),
        sums_(nodes_.size(), 0.0), tol_(tol) {
    for (std::size_t k = 1; k < nodes_.size(); ++k) {
      sums_[k] = sums_[k - 1] + numerics::integrate(g_, Interval(nodes_[k - 1], nodes_[k]), tol_);
    }
  }

  double operator()(double v) const {
    if (v <= nodes_.front()) return 0.0;
    if (v >= nodes_.back()) return sums_.back();
    std::size_t k = static_cast<std::size_t>(std::upper_bound(nodes_.begin(), nodes_.end(), v) - nodes_.begin()) - 1;
    double total = sums_[k];
    if (v > nodes_[k]) total += numerics::integrate(g_, Interval(nodes_[k], v), tol_);
    return total;
  }

  double lower() const { return nodes_.front(); }

 private:
  numerics::ScalarFn g_;
  std::vector<double> nodes_;
  std::vector<double> sums_;
  numerics::Tolerance tol_;
};

}  // namespace

FixedPrizeOutcome fix_mechanism(const ContestSpec& spec, double z) {
  if (spec.n() != 2) throw ConfigError("the asymmetric fixed-prize mechanism needs exactly two agents");
  require_type_independent(spec);
  if (!(z > 0.0)) throw DomainError("fixed prize must be > 0");

  const Interval support = spec.support();
  const int grid = spec.numerics.grid_points;
  const TypeDistribution f1 = spec.agents[0];
  const ValueScale h = spec.value_scale;
  const PaymentFunction p = spec.payment;
  auto link = std::make_shared<const LinkFunction>(
      solve_fix_link(spec.agents[0], spec.agents[1], h, spec.numerics.ode_steps));

  auto cost_rate = [link, f1, h](double t) { return h((*link)(t)) * f1.density(t); };
  const double v0 = link->zero_type();
  std::shared_ptr<const CumulativeIntegral> cumulative;
  if (v0 < support.hi()) {
    cumulative = std::make_shared<const CumulativeIntegral>(cost_rate, Interval(v0, support.hi()), grid,
                                                            spec.numerics.tolerance());
  }

  auto b1 = [cumulative, p, z](double v) {
    return cumulative ? p.effort_for_cost(z * (*cumulative)(v), v) : 0.0;
  };
  auto slope1 = [b1, cost_rate, p, z](double v) { return z * cost_rate(v) / p.d_b(b1(v), v); };
  auto b2 = [b1, link](double w) { return b1(link->inverse(w)); };
  auto slope2 = [slope1, link](double w) {
    const double m = link->inverse(w);
    return slope1(m) / link->derivative(m);
  };

  FixedPrizeOutcome out;
  out.spec = spec;
  out.prize = z;
  out.strategies.push_back(tabulate_strategy(support, grid, b1, slope1));
  out.strategies.push_back(tabulate_strategy(support, grid, b2, slope2));
  return out;
}

Strategy sym_strategy(const TypeDistribution& dist, std::size_t n, const PaymentFunction& payment,
                      const ValueScale& h, double z, const NumericsConfig& numerics) {
  if (n < 2) throw ConfigError("symmetric contest needs n >= 2");
  if (!payment.type_independent()) {
    throw ConfigError("fixed-prize benchmarks need a type-independent payment p(b) (d = 0)");
  }
  if (!(z > 0.0)) throw DomainError("fixed prize must be > 0");
  const double m = static_cast<double>(n - 1);
  // h(t) d[F^{n-1}](t) over the continuous part.
  auto rate = [dist, h, m](double t) {
    const double f = dist.density(t);
    if (f == 0.0) return 0.0;
    return h(t) * m * std::pow(dist.cdf(t), m - 1.0) * f;
  };
  auto cumulative = std::make_shared<const CumulativeIntegral>(rate, dist.support(), numerics.grid_points,
                                                               numerics.tolerance());
  auto b = [cumulative, payment, z](double v) { return payment.effort_for_cost(z * (*cumulative)(v), v); };
  auto slope = [b, rate, payment, z](double v) { return z * rate(v) / payment.d_b(b(v), v); };
  return tabulate_strategy(dist.support(), numerics.grid_points, b, slope);
}

FixedPrizeOutcome sym_mechanism(const ContestSpec& spec, std::size_t agent, std::size_t n, double z) {
  require_type_independent(spec);
  const TypeDistribution& dist = spec.agents.at(agent);
  FixedPrizeOutcome out;
  out.spec = spec;
  out.spec.agents.assign(n, dist);
  out.prize = z;
  const Strategy s = sym_strategy(dist, n, spec.payment, spec.value_scale, z, spec.numerics);
  out.strategies.assign(n, s);
  return out;
}

double fixed_prize_profit(const FixedPrizeOutcome& outcome) {
  const ContestSpec& spec = outcome.spec;
  double effort = 0.0;
  double last = 0.0;
  for (std::size_t i = 0; i < spec.n(); ++i) {
    // Identical agents playing the same schedule need only one integral.
    if (i > 0 && outcome.strategies[i].same_schedule(outcome.strategies[i - 1]) &&
        spec.agents[i] == spec.agents[i - 1]) {
      effort += last;
      continue;
    }
    last = expected_effort(spec.agents[i], outcome.strategies[i], spec.numerics.tolerance());
    effort += last;
  }
  return effort - spec.principal_scale() * outcome.prize;
}

PrizeOptimum optimal_fixed_prize(const std::function<double(double)>& profit) {
  constexpr int kMaxSteps = 200;
  constexpr double kInvPhi = 0.6180339887498949;
  double a = 0.0, fa = 0.0;
  double b = 1.0, fb = profit(b);
  // Shrink towards 0 until the middle point beats z = 0 (profit(0) = 0).
  for (int k = 0; !(fb > fa); ++k) {
    if (k == kMaxSteps) throw SolverError("optimal_fixed_prize: no positive profit near z = 0");
    b *= 0.5;
    fb = profit(b);
  }
  double c = 2.0 * b, fc = profit(c);
  for (int k = 0; fc >= fb; ++k) {
    if (k == kMaxSteps) throw SolverError("optimal_fixed_prize: profit does not turn down (not unimodal)");
    a = b;
    fa = fb;
    b = c;
    fb = fc;
    c *= 2.0;
    fc = profit(c);
  }
  (void)fa;
  // Golden section on [a, c].
  double x1 = c - kInvPhi * (c - a), x2 = a + kInvPhi * (c - a);
  double f1 = profit(x1), f2 = profit(x2);
  while (c - a > 1e-10 * std::max(1.0, c)) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + kInvPhi * (c - a);
      f2 = profit(x2);
    } else {
      c = x2;
      x2 = x1;
      f2 = f1;
      x1 = c - kInvPhi * (c - a);
      f1 = profit(x1);
    }
  }
  const double z = 0.5 * (a + c);
  return {z, profit(z)};
}

}  // namespace allpay
