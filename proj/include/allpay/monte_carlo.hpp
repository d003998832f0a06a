#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "allpay/verifier.hpp"

namespace allpay {

/// Counter-based generator: every (seed, trial, slot) triple maps to one
/// SplitMix64 output, so any trial can be replayed without the others and the
/// result does not depend on how trials are split across threads.
class CounterRng {
 public:
  static constexpr const char* kName = "splitmix64-counter";

  explicit CounterRng(std::uint64_t seed);
  std::uint64_t bits(std::uint64_t trial, std::uint64_t slot) const;
  /// Uniform on [0, 1) with 53 random bits.
  double uniform(std::uint64_t trial, std::uint64_t slot) const;

 private:
  std::uint64_t key_;
};

struct MonteCarloResult {
  std::size_t trials = 0;
  std::uint64_t seed = 0;
  std::string generator;
  double mean_profit = 0.0;
  double std_error = 0.0;
  std::vector<double> mean_effort;
};

/// Simulates `trials` independent contests: types by inverse c.d.f. (atoms
/// included), efforts from the strategies, highest effort wins (ties split
/// uniformly), profit = sum of efforts - h(lambda) Z_w(b_w). Trials are cut
/// into fixed chunks whose partial sums are combined in order, so the output
/// is bit-identical for any `workers` (0 = hardware concurrency).
MonteCarloResult monte_carlo_campaign(const EquilibriumProfile& profile, std::size_t trials,
                                      std::uint64_t seed, unsigned workers = 0);

}  // namespace allpay
