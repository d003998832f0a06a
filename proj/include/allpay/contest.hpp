#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "allpay/distribution.hpp"
#include "allpay/numerics.hpp"
#include "allpay/payment.hpp"

namespace allpay {

struct NumericsConfig {
  int ode_steps = 4096;
  double abs_tol = 1e-12;
  double rel_tol = 1e-10;
  /// Number of uniformly spaced types (end points included) in strategy tables.
  int grid_points = 2049;

  void validate() const;
  numerics::Tolerance tolerance() const { return {abs_tol, rel_tol, 4000}; }
};

struct ContestSpec {
  std::vector<TypeDistribution> agents;
  PaymentFunction payment;
  ValueScale value_scale;
  double lambda = 0.1;
  NumericsConfig numerics;

  std::size_t n() const { return agents.size(); }
  const numerics::Interval& support() const { return agents.front().support(); }
  /// p / h as a payment of the same family.
  PaymentFunction normalized_payment() const { return normalize_payment(payment, value_scale); }
  /// h(lambda): the principal's worth of one unit of prize.
  double principal_scale() const { return value_scale(lambda); }

  /// Throws ConfigError unless n >= 2, all supports coincide, lambda > 0 and
  /// the payment satisfies the modelling assumptions on the support.
  void validate() const;
};

/// Two agents, F1 uniform on [0, 1], F2 = (v + 1)/2 (half the mass at type 0),
/// p = b^2, h = v.
ContestSpec paper_case_study(double lambda);
/// n agents with uniform types on [0, 1], p = b^2, h = v.
ContestSpec symmetric_uniform(std::size_t n, double lambda);

/// Strictly increasing effort schedule v -> b on the common support.
///
/// The schedule is tabulated on a type grid. An optional exact evaluator (for
/// instance a per-type solver) takes precedence over interpolation; the table
/// then only brackets the inverse. Types at or below zero_type() bid exactly
/// the first tabulated bid, which is 0 for every equilibrium strategy.
class Strategy {
 public:
  using Evaluator = std::function<double(double)>;

  Strategy() = default;
  /// `types` ascending with types.front() == support.lo and types.back() ==
  /// support.hi. Leading zero bids are collapsed into the zero region; the
  /// remaining bids must increase strictly (InvariantError otherwise).
  /// `slopes` (db/dv at the nodes) may be empty.
  Strategy(numerics::Interval support, std::vector<double> types, std::vector<double> bids,
           std::vector<double> slopes = {}, Evaluator exact = {});

  double operator()(double v) const;
  /// Type that bids b. Bids at or below min_bid() map to zero_type(), bids
  /// above max_bid() to the top of the support.
  double inverse(double b) const;
  /// Table interpolant only, ignoring the exact evaluator.
  double interpolated(double v) const;

  double max_bid() const { return data_->bids.back(); }
  double min_bid() const { return data_->bids.front(); }
  /// Largest type that still bids min_bid().
  double zero_type() const { return data_->types.front(); }
  const numerics::Interval& support() const { return support_; }
  std::span<const double> types() const { return data_->types; }
  std::span<const double> bids() const { return data_->bids; }
  bool has_exact() const { return static_cast<bool>(data_->exact); }
  /// True when both handles share the same underlying schedule.
  bool same_schedule(const Strategy& other) const { return data_ == other.data_; }

  /// The same schedule shifted up by delta everywhere, including the lowest
  /// types. Used to build deliberately non-equilibrium profiles.
  Strategy perturbed(double delta) const;

 private:
  struct Data {
    std::vector<double> types;
    std::vector<double> bids;
    numerics::MonotoneCubic table;
    Evaluator exact;
  };

  numerics::Interval support_{0.0, 1.0};
  // Copies share the immutable tables.
  std::shared_ptr<const Data> data_;
};

/// Tabulate `fn` on `grid` uniformly spaced types and wrap it, with `fn` kept as
/// the exact evaluator.
Strategy tabulate_strategy(const numerics::Interval& support, int grid,
                           const Strategy::Evaluator& fn,
                           const Strategy::Evaluator& slope = {});

/// Prize paid to one agent as a function of its winning effort.
///
/// Either a constant (fixed-prize mechanisms) or a schedule on (0, max_bid]
/// evaluated exactly through a callback, with a table on [min_bid, max_bid]
/// and a type-indexed table used for fast Monte Carlo lookups. Efforts above
/// max_bid() are paid the prize at max_bid(); effort 0 is paid zero_value().
class PrizeSchedule {
 public:
  using Evaluator = std::function<double(double)>;

  static PrizeSchedule constant(double z);

  PrizeSchedule(Evaluator exact, std::vector<double> types, std::vector<double> bids,
                std::vector<double> values, double max_bid, double zero_value = 0.0);

  double operator()(double b) const;
  /// Prize at the bid type v makes, interpolated on the type table.
  double at_type(double v) const;

  bool is_constant() const { return !exact_; }
  double max_bid() const { return max_bid_; }
  double min_bid() const { return bids_.empty() ? 0.0 : bids_.front(); }
  std::span<const double> bids() const { return bids_; }
  std::span<const double> values() const { return values_; }
  std::span<const double> types() const { return types_; }

 private:
  PrizeSchedule() = default;

  Evaluator exact_;
  std::vector<double> types_;
  std::vector<double> bids_;
  std::vector<double> values_;
  numerics::MonotoneCubic by_type_;
  double max_bid_ = 0.0;
  double zero_value_ = 0.0;
  double constant_ = 0.0;
};

/// Probability that effort b beats every opponent of agent i:
///   prod_{j != i} F_j(v_j(b)).
/// A factor is 1 once b exceeds the opponent's top bid and 0 while b is below a
/// strictly positive lowest bid. At or below a zero lowest bid the factor is
/// the right limit F_j(v_j(0+)), so atoms and zero-bid regions count as beaten.
double win_probability(const ContestSpec& spec, std::span<const Strategy> strategies,
                       std::size_t i, double b);

/// E[b_i(v)] under F_i, with the atom and the zero-bid region included.
double expected_effort(const TypeDistribution& dist, const Strategy& strategy,
                       const numerics::Tolerance& tol);

}  // namespace allpay
