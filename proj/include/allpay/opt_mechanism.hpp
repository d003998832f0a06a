#pragma once

// Revenue-optimal prize tuple. Each agent's effort solves a pointwise
// first-order condition that involves only its own distribution:
//   p_hat'_b(b, v) = 1/h(lambda) + p_hat''_bv(b, v) * (1 - F_i(v)) / f_i(v),
// and the prize schedules are then chosen so that those efforts form an
// equilibrium.

#include <cstddef>
#include <vector>

#include "allpay/contest.hpp"

namespace allpay {

/// Optimal effort of agent i at type v; 0 at or below the lowest type.
/// Throws SolverError if no sign change is found before the bracket cap.
double solve_opt_effort(const ContestSpec& spec, std::size_t i, double v);

/// First-order-condition residual at (b, v); zero at the optimal effort.
double opt_foc_residual(const ContestSpec& spec, std::size_t i, double b, double v);

Strategy build_opt_strategy(const ContestSpec& spec, std::size_t i);

/// Z_i(b) = [p_hat(b, v_i(b)) - int_{v_lo}^{v_i(b)} p_hat'_v(b_i(t), t) dt]
///          / prod_{j != i} F_j(v_j(b)).
/// The table starts at b_min = max_bid * 1e-6; the exact evaluator accepts any
/// b in (0, max_bid] where the denominator is positive (DomainError otherwise).
PrizeSchedule build_opt_prize(const ContestSpec& spec, std::size_t i,
                              const std::vector<Strategy>& strategies);

struct OptSolution {
  std::vector<Strategy> strategies;
  std::vector<PrizeSchedule> prizes;
};

OptSolution solve_opt(const ContestSpec& spec);

struct ProfitBreakdown {
  double total = 0.0;
  std::vector<double> per_agent;
};

/// Maximised profit,
///   sum_i int [b_i - h(lambda) p_hat + h(lambda) p_hat'_v (1 - F_i)/f_i] dF_i,
/// integrated over the continuous part; atoms bid zero and contribute nothing.
ProfitBreakdown opt_profit(const ContestSpec& spec);
ProfitBreakdown opt_profit(const ContestSpec& spec, const std::vector<Strategy>& strategies);

/// Total expected effort sum_i E[b_i].
double expected_total_effort(const ContestSpec& spec, const std::vector<Strategy>& strategies);

/// h(lambda) * E[Z_w(b_w)], computed from the prize schedules and the win
/// probabilities (independently of the profit formula above).
double expected_prize_cost(const ContestSpec& spec, const std::vector<Strategy>& strategies,
                           const std::vector<PrizeSchedule>& prizes);

}  // namespace allpay
