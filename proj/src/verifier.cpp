#include "allpay/verifier.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <json.hpp>

#include "allpay/errors.hpp"

namespace allpay {

void EquilibriumProfile::validate() const {
  if (strategies.size() != spec.n() || prizes.size() != spec.n()) {
    throw InvariantError("EquilibriumProfile: strategies, prizes and agents disagree in number");
  }
}

EquilibriumProfile opt_profile(const ContestSpec& spec) {
  OptSolution sol = solve_opt(spec);
  return {"opt", spec, std::move(sol.strategies), std::move(sol.prizes)};
}

EquilibriumProfile fixed_prize_profile(std::string mechanism, const FixedPrizeOutcome& outcome) {
  EquilibriumProfile p{std::move(mechanism), outcome.spec, outcome.strategies, {}};
  p.prizes.assign(outcome.spec.n(), PrizeSchedule::constant(outcome.prize));
  return p;
}

double win_probability(const EquilibriumProfile& profile, std::size_t i, double b) {
  return win_probability(profile.spec, profile.strategies, i, b);
}

double expected_utility(const EquilibriumProfile& profile, std::size_t i, double v, double b) {
  if (b <= 0.0) return 0.0;
  const ContestSpec& spec = profile.spec;
  if (!spec.payment.type_independent() && v <= 0.0) return -HUGE_VAL;
  const double q = win_probability(profile, i, b);
  const double prize = q > 0.0 ? profile.prizes[i](b) : 0.0;
  return spec.value_scale(v) * prize * q - spec.payment(b, v);
}

DeviationResult best_response_check(const EquilibriumProfile& profile, std::size_t types,
                                    std::size_t bids, double tol) {
  profile.validate();
  if (bids < 3 || types < 2) throw DomainError("best_response_check: grids too small");
  const ContestSpec& spec = profile.spec;
  double top = 0.0;
  std::vector<double> kinks;  // top bids, where the expected prize has a kink
  for (const auto& s : profile.strategies) {
    top = std::max(top, s.max_bid());
    kinks.push_back(s.max_bid());
  }
  // Uniform in sqrt(b): expected prizes behave like powers of b near zero, so
  // low types need the finer spacing there.
  const double cap = 1.5 * top;
  const std::vector<double> root_grid = numerics::linspace(0.0, 1.0, bids);
  std::vector<double> bid_grid(bids);
  for (std::size_t m = 0; m < bids; ++m) bid_grid[m] = cap * root_grid[m] * root_grid[m];
  const double step = root_grid[1] - root_grid[0];
  const std::vector<double> type_grid = numerics::linspace(spec.support().lo(), spec.support().hi(), types);

  DeviationResult out;
  out.tol = tol;
  out.max_gain = -HUGE_VAL;
  std::vector<double> award(bids), kink_award(kinks.size()), u(bids);
  for (std::size_t i = 0; i < spec.n(); ++i) {
    // Expected prize Z_i(b) q_i(b) depends on the bid only.
    auto expected_prize = [&](double b) {
      const double q = b > 0.0 ? win_probability(profile, i, b) : 0.0;
      return q > 0.0 ? profile.prizes[i](b) * q : 0.0;
    };
    for (std::size_t m = 0; m < bids; ++m) award[m] = expected_prize(bid_grid[m]);
    for (std::size_t k = 0; k < kinks.size(); ++k) kink_award[k] = expected_prize(kinks[k]);

    for (double v : type_grid) {
      const double eq = expected_utility(profile, i, v, profile.strategies[i](v));
      double best = 0.0, best_bid = 0.0;  // bidding zero is always available
      if (spec.payment.type_independent() || v > 0.0) {
        const double h = spec.value_scale(v);
        std::size_t arg = 0;
        u[0] = 0.0;
        for (std::size_t m = 1; m < bids; ++m) {
          u[m] = h * award[m] - spec.payment(bid_grid[m], v);
          if (u[m] > u[arg]) arg = m;
        }
        best = u[arg];
        best_bid = bid_grid[arg];
        for (std::size_t k = 0; k < kinks.size(); ++k) {
          const double uk = h * kink_award[k] - spec.payment(kinks[k], v);
          if (uk > best) {
            best = uk;
            best_bid = kinks[k];
          }
        }
        // Parabola through the grid maximum and its neighbours (in sqrt(b)),
        // unless a kink lies inside the stencil.
        if (arg > 0 && arg + 1 < bids) {
          const bool smooth = std::none_of(kinks.begin(), kinks.end(), [&](double b) {
            return b > bid_grid[arg - 1] && b < bid_grid[arg + 1];
          });
          const double y0 = u[arg - 1], y1 = u[arg], y2 = u[arg + 1];
          const double curvature = y0 - 2.0 * y1 + y2;
          if (smooth && curvature < 0.0) {
            const double t = 0.5 * (y0 - y2) / curvature;
            const double peak = y1 - 0.25 * (y0 - y2) * t;
            if (peak > best) {
              best = peak;
              const double r = root_grid[arg] + t * step;
              best_bid = cap * r * r;
            }
          }
        }
      }
      const double gain = best - eq;
      if (gain > out.max_gain) {
        out.max_gain = gain;
        out.worst_agent = i;
        out.worst_type = v;
        out.worst_bid = best_bid;
      }
      out.max_abs_gap = std::max(out.max_abs_gap, std::abs(gain));
    }
  }
  out.passed = out.max_gain <= tol;
  return out;
}

IrResult check_ir(const EquilibriumProfile& profile, std::size_t types) {
  profile.validate();
  const ContestSpec& spec = profile.spec;
  IrResult out;
  out.min_utility = HUGE_VAL;
  for (std::size_t i = 0; i < spec.n(); ++i) {
    for (double v : numerics::linspace(spec.support().lo(), spec.support().hi(), types)) {
      const double b = profile.strategies[i](v);
      const double u = expected_utility(profile, i, v, b);
      if (u < out.min_utility) {
        out.min_utility = u;
        out.worst_agent = i;
        out.worst_type = v;
      }
      if (b > 0.0 && !(u > 0.0)) out.strictly_positive = false;
    }
  }
  out.passed = out.min_utility >= -1e-9 && out.strictly_positive;
  return out;
}

MonotonicityResult check_monotonicity(const EquilibriumProfile& profile, std::size_t types) {
  const ContestSpec& spec = profile.spec;
  MonotonicityResult out;
  const std::vector<double> grid = numerics::linspace(spec.support().lo(), spec.support().hi(), types);
  for (std::size_t i = 0; i < profile.strategies.size() && out.passed; ++i) {
    const Strategy& s = profile.strategies[i];
    double prev = s(grid.front());
    for (std::size_t k = 1; k < grid.size(); ++k) {
      const double b = s(grid[k]);
      const bool ok = prev > s.min_bid() ? b > prev : b >= prev;
      if (!ok) {
        out.passed = false;
        out.worst_agent = i;
        out.worst_type = grid[k];
        break;
      }
      prev = b;
    }
  }
  return out;
}

namespace {

double max_difference(const Strategy& a, const Strategy& b, const numerics::Interval& support) {
  double diff = 0.0;
  for (double v : numerics::linspace(support.lo(), support.hi(), 4097)) {
    diff = std::max(diff, std::abs(a(v) - b(v)));
  }
  return diff;
}

}  // namespace

SaResult check_sa(const ContestSpec& spec, std::size_t i,
                  const std::vector<TypeDistribution>& replacements) {
  SaResult out;
  out.agent = i;
  const Strategy base = build_opt_strategy(spec, i);
  const bool contrast = spec.n() == 2 && spec.payment.type_independent();
  std::optional<Strategy> fix_base;
  if (contrast) fix_base = fix_mechanism(spec, 1.0).strategies[i];

  for (const auto& r : replacements) {
    ContestSpec alt = spec;
    for (std::size_t j = 0; j < alt.n(); ++j) {
      if (j != i) alt.agents[j] = r;
    }
    SaReplacement rep;
    rep.description = r.describe();
    rep.opt_max_diff = max_difference(base, build_opt_strategy(alt, i), spec.support());
    if (contrast) {
      try {
        rep.fix_max_diff = max_difference(*fix_base, fix_mechanism(alt, 1.0).strategies[i], spec.support());
      } catch (const SolverError&) {
        rep.fix_max_diff.reset();
      }
    }
    if (!(rep.opt_max_diff <= 1e-12)) out.passed = false;
    out.replacements.push_back(rep);
  }
  return out;
}

std::vector<TypeDistribution> default_sa_replacements(const numerics::Interval& support) {
  return {
      TypeDistribution::power(3.0, support),
      TypeDistribution::power(0.5, support),
      TypeDistribution::atom_uniform(0.25, support),
      TypeDistribution::piecewise_polynomial({0.0, 0.5, 1.0}, {{0.0, 0.0, 2.0}, {-1.0, 4.0, -2.0}}, support),
  };
}

bool VerificationReport::passed() const {
  return deviation.passed && ir.passed && monotonicity.passed && (!sa || sa->passed);
}

std::string VerificationReport::to_text() const {
  std::ostringstream out;
  out.precision(6);
  out << "mechanism: " << mechanism << '\n';
  out << (deviation.passed ? "PASS" : "FAIL") << " best response: max deviation gain " << deviation.max_gain
      << " (tol " << deviation.tol << "; agent " << deviation.worst_agent + 1 << ", v = " << deviation.worst_type
      << ", deviant bid " << deviation.worst_bid << ")\n";
  out << (ir.passed ? "PASS" : "FAIL") << " individual rationality: min utility " << ir.min_utility
      << (ir.strictly_positive ? "" : " (non-positive utility at a positive effort)") << '\n';
  out << (monotonicity.passed ? "PASS" : "FAIL") << " monotonicity\n";
  if (sa) {
    out << (sa->passed ? "PASS" : "FAIL") << " strategy autonomy (agent " << sa->agent + 1 << ")\n";
    for (const auto& r : sa->replacements) {
      out << "  opponents -> " << r.description << ": opt change " << r.opt_max_diff;
      if (r.fix_max_diff) out << ", fixed-prize change " << *r.fix_max_diff;
      out << '\n';
    }
  }
  out << (passed() ? "verification passed" : "verification FAILED") << '\n';
  return out.str();
}

std::string VerificationReport::to_json() const {
  nlohmann::json j;
  j["mechanism"] = mechanism;
  j["passed"] = passed();
  j["best_response"] = {{"passed", deviation.passed},
                        {"max_deviation_gain", deviation.max_gain},
                        {"max_abs_gap", deviation.max_abs_gap},
                        {"tol", deviation.tol},
                        {"worst_agent", deviation.worst_agent + 1},
                        {"worst_type", deviation.worst_type},
                        {"worst_bid", deviation.worst_bid}};
  j["individual_rationality"] = {{"passed", ir.passed},
                                 {"min_utility", ir.min_utility},
                                 {"strictly_positive", ir.strictly_positive},
                                 {"worst_agent", ir.worst_agent + 1},
                                 {"worst_type", ir.worst_type}};
  j["monotonicity"] = {{"passed", monotonicity.passed}};
  if (sa) {
    nlohmann::json reps = nlohmann::json::array();
    for (const auto& r : sa->replacements) {
      nlohmann::json e = {{"opponents", r.description}, {"opt_max_diff", r.opt_max_diff}};
      e["fix_max_diff"] = r.fix_max_diff ? nlohmann::json(*r.fix_max_diff) : nlohmann::json(nullptr);
      reps.push_back(e);
    }
    j["strategy_autonomy"] = {{"passed", sa->passed}, {"agent", sa->agent + 1}, {"replacements", reps}};
  }
  return j.dump(2);
}

VerificationReport verify_profile(const EquilibriumProfile& profile, double tol, bool include_sa) {
  VerificationReport r;
  r.mechanism = profile.mechanism;
  r.deviation = best_response_check(profile, 101, 2001, tol);
  r.ir = check_ir(profile);
  r.monotonicity = check_monotonicity(profile);
  if (include_sa && profile.mechanism == "opt") {
    r.sa = check_sa(profile.spec, 0, default_sa_replacements(profile.spec.support()));
  }
  return r;
}

}  // namespace allpay
