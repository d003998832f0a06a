#pragma once

// Fixed-prize comparison mechanisms: the two-agent asymmetric contest (FIX),
// the symmetric n-agent contest (SYM, and FIX-n for uniform types), and the
// choice of the best fixed prize.

#include <cstddef>
#include <functional>
#include <vector>

#include "allpay/contest.hpp"

namespace allpay {

/// Type correspondence k with b_2(k(v)) = b_1(v) in the two-agent fixed-prize
/// equilibrium, solving
///   k'(v) = h(k) f_1(v) / (h(v) f_2(k)),   k(v_hi) = v_hi.
/// The table is held in log coordinates ln(v - v_lo) -> ln(k - v_lo), where
/// power-law behaviour near the lower end is resolved to full relative accuracy.
class LinkFunction {
 public:
  LinkFunction(numerics::Interval support, std::vector<double> log_x, std::vector<double> log_y,
               std::vector<double> log_slope);

  double operator()(double v) const;
  double inverse(double w) const;
  /// dk/dv.
  double derivative(double v) const;
  /// k^{-1}(v_lo): agent 1 types at or below this bid zero.
  double zero_type() const { return zero_type_; }
  const numerics::Interval& support() const { return support_; }

 private:
  numerics::Interval support_;
  numerics::MonotoneCubic forward_;
  numerics::MonotoneCubic backward_;
  double zero_type_;
};

/// Integrates the link equation backward from v_hi in `steps` RK4 steps. When
/// k reaches v_lo at an interior type (f_2 vanishing there), the inverse link
/// is integrated instead. Throws SolverError if neither direction stays finite.
LinkFunction solve_fix_link(const TypeDistribution& f1, const TypeDistribution& f2,
                            const ValueScale& h, int steps);

/// Equilibrium of a fixed-prize mechanism, ready for profit evaluation and
/// verification. `spec.agents` lists the agents actually competing.
struct FixedPrizeOutcome {
  ContestSpec spec;
  std::vector<Strategy> strategies;
  double prize = 1.0;
};

/// Two-agent asymmetric contest with prize z:
///   p(b_1(v)) = z int_{k^{-1}(v_lo)}^{v} h(k(t)) f_1(t) dt,   b_2 = b_1 o k^{-1}.
/// Requires n == 2 and a type-independent payment (ConfigError otherwise).
FixedPrizeOutcome fix_mechanism(const ContestSpec& spec, double z);

/// n agents all drawn from spec.agents[agent]:
///   p(b(v)) = z int_{v_lo}^{v} h(t) d[F^{n-1}](t)  over the continuous part.
FixedPrizeOutcome sym_mechanism(const ContestSpec& spec, std::size_t agent, std::size_t n, double z);

/// The symmetric strategy for n agents of distribution `dist`.
Strategy sym_strategy(const TypeDistribution& dist, std::size_t n, const PaymentFunction& payment,
                      const ValueScale& h, double z, const NumericsConfig& numerics);

/// Expected total effort minus h(lambda) * z.
double fixed_prize_profit(const FixedPrizeOutcome& outcome);

struct PrizeOptimum {
  double prize = 0.0;
  double profit = 0.0;
};

/// Maximises profit(z) over z > 0 by golden-section search on a bracket grown
/// geometrically from [0, 1]. Throws SolverError if no interior maximum is
/// bracketed.
PrizeOptimum optimal_fixed_prize(const std::function<double(double)>& profit);

}  // namespace allpay
