#include "allpay/monte_carlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "allpay/errors.hpp"

namespace allpay {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
constexpr std::size_t kChunk = 4096;

std::uint64_t mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

struct ChunkSums {
  double profit = 0.0;
  double profit_sq = 0.0;
  std::vector<double> effort;
};

}  // namespace

CounterRng::CounterRng(std::uint64_t seed) : key_(mix(seed + kGolden)) {}

std::uint64_t CounterRng::bits(std::uint64_t trial, std::uint64_t slot) const {
  // Two rounds: the first decorrelates trials, the second the slots within one.
  return mix(mix(key_ ^ (trial * kGolden)) + (slot + 1) * kGolden);
}

double CounterRng::uniform(std::uint64_t trial, std::uint64_t slot) const {
  return static_cast<double>(bits(trial, slot) >> 11) * 0x1.0p-53;
}

MonteCarloResult monte_carlo_campaign(const EquilibriumProfile& profile, std::size_t trials,
                                      std::uint64_t seed, unsigned workers) {
  if (trials == 0) throw DomainError("monte_carlo_campaign: trials must be >= 1");
  profile.validate();
  const ContestSpec& spec = profile.spec;
  const std::size_t n = spec.n();
  const double scale = spec.principal_scale();
  const CounterRng rng(seed);

  const std::size_t chunks = (trials + kChunk - 1) / kChunk;
  std::vector<ChunkSums> sums(chunks);

  auto run_chunk = [&](std::size_t c) {
    ChunkSums& out = sums[c];
    out.effort.assign(n, 0.0);
    std::vector<double> types(n), bids(n);
    std::vector<std::size_t> leaders;
    const std::size_t end = std::min(trials, (c + 1) * kChunk);
    for (std::size_t t = c * kChunk; t < end; ++t) {
      double total = 0.0, top = -HUGE_VAL;
      for (std::size_t i = 0; i < n; ++i) {
        types[i] = spec.agents[i].quantile(rng.uniform(t, i));
        bids[i] = profile.strategies[i](types[i]);
        total += bids[i];
        out.effort[i] += bids[i];
        top = std::max(top, bids[i]);
      }
      leaders.clear();
      for (std::size_t i = 0; i < n; ++i) {
        if (bids[i] == top) leaders.push_back(i);
      }
      std::size_t w = leaders.front();
      if (leaders.size() > 1) {
        const double u = rng.uniform(t, n);
        w = leaders[std::min(leaders.size() - 1, static_cast<std::size_t>(u * static_cast<double>(leaders.size())))];
      }
      const PrizeSchedule& z = profile.prizes[w];
      const double prize = z.is_constant() || bids[w] <= 0.0 ? z(bids[w]) : z.at_type(types[w]);
      const double profit = total - scale * prize;
      out.profit += profit;
      out.profit_sq += profit * profit;
    }
  };

  unsigned pool = workers == 0 ? std::max(1u, std::thread::hardware_concurrency()) : workers;
  pool = static_cast<unsigned>(std::min<std::size_t>(pool, chunks));
  if (pool <= 1) {
    for (std::size_t c = 0; c < chunks; ++c) run_chunk(c);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> threads;
    for (unsigned k = 0; k < pool; ++k) {
      threads.emplace_back([&] {
        for (std::size_t c = next++; c < chunks; c = next++) run_chunk(c);
      });
    }
    for (auto& th : threads) th.join();
  }

  MonteCarloResult r;
  r.trials = trials;
  r.seed = seed;
  r.generator = CounterRng::kName;
  r.mean_effort.assign(n, 0.0);
  double sum = 0.0, sum_sq = 0.0;
  for (const auto& s : sums) {
    sum += s.profit;
    sum_sq += s.profit_sq;
    for (std::size_t i = 0; i < n; ++i) r.mean_effort[i] += s.effort[i];
  }
  const double count = static_cast<double>(trials);
  r.mean_profit = sum / count;
  for (double& e : r.mean_effort) e /= count;
  if (trials > 1) {
    const double var = std::max(0.0, (sum_sq - sum * sum / count) / (count - 1.0));
    r.std_error = std::sqrt(var / count);
  }
  return r;
}

}  // namespace allpay
