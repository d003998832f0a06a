#pragma once

// Independent checks of a claimed equilibrium: unilateral deviations on a bid
// grid, individual rationality, monotonicity and (for the optimal mechanism)
// independence of each agent's strategy from the opponents' distributions.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "allpay/benchmarks.hpp"
#include "allpay/contest.hpp"
#include "allpay/opt_mechanism.hpp"

namespace allpay {

struct EquilibriumProfile {
  std::string mechanism;
  ContestSpec spec;
  std::vector<Strategy> strategies;
  std::vector<PrizeSchedule> prizes;

  /// Throws InvariantError when the agent counts disagree.
  void validate() const;
};

EquilibriumProfile opt_profile(const ContestSpec& spec);
EquilibriumProfile fixed_prize_profile(std::string mechanism, const FixedPrizeOutcome& outcome);

/// Win probability of agent i bidding b against the other strategies.
double win_probability(const EquilibriumProfile& profile, std::size_t i, double b);

/// h(v) Z_i(b) q_i(b) - p(b, v); zero for b <= 0 (ties at zero are losses).
double expected_utility(const EquilibriumProfile& profile, std::size_t i, double v, double b);

struct DeviationResult {
  /// max over agents and grid types of [best grid utility - equilibrium utility].
  double max_gain = 0.0;
  /// max |best candidate utility - equilibrium utility|; for an exact
  /// equilibrium this is the resolution of the search and shrinks with the grid.
  double max_abs_gap = 0.0;
  std::size_t worst_agent = 0;
  double worst_type = 0.0;
  double worst_bid = 0.0;
  double tol = 1e-3;
  bool passed = true;
};

/// Deviation bids cover [0, 1.5 * max_bid] with `bids` points spaced uniformly
/// in sqrt(b); types cover the support with `types` points. Candidates are the
/// grid bids, every agent's top bid, and the vertex of a parabola through the
/// best grid bid and its neighbours (its interpolated value is used).
DeviationResult best_response_check(const EquilibriumProfile& profile, std::size_t types = 101,
                                    std::size_t bids = 2001, double tol = 1e-3);

struct IrResult {
  double min_utility = 0.0;
  std::size_t worst_agent = 0;
  double worst_type = 0.0;
  /// Utility strictly positive wherever the equilibrium effort is.
  bool strictly_positive = true;
  bool passed = true;
};

IrResult check_ir(const EquilibriumProfile& profile, std::size_t types = 1001);

struct MonotonicityResult {
  bool passed = true;
  std::size_t worst_agent = 0;
  double worst_type = 0.0;
};

/// Strategies must be nondecreasing everywhere and strictly increasing above
/// the zero-bid region, checked on `types` points.
MonotonicityResult check_monotonicity(const EquilibriumProfile& profile, std::size_t types = 4097);

struct SaReplacement {
  std::string description;
  double opt_max_diff = 0.0;
  /// Change of the fixed-prize strategy of the same agent (contrast only).
  std::optional<double> fix_max_diff;
};

struct SaResult {
  std::size_t agent = 0;
  std::vector<SaReplacement> replacements;
  bool passed = true;
};

/// Rebuilds agent i's optimal strategy with every opponent distribution
/// replaced by each candidate; passes iff every difference is <= 1e-12.
/// For two agents with a type-independent payment it also reports how the
/// fixed-prize (Z = 1) strategy of agent i moves.
SaResult check_sa(const ContestSpec& spec, std::size_t i,
                  const std::vector<TypeDistribution>& replacements);

/// The default replacement list used by the CLI.
std::vector<TypeDistribution> default_sa_replacements(const numerics::Interval& support);

struct VerificationReport {
  std::string mechanism;
  DeviationResult deviation;
  IrResult ir;
  MonotonicityResult monotonicity;
  std::optional<SaResult> sa;
  bool passed() const;
  std::string to_text() const;
  std::string to_json() const;
};

VerificationReport verify_profile(const EquilibriumProfile& profile, double tol = 1e-3,
                                  bool include_sa = true);

}  // namespace allpay
