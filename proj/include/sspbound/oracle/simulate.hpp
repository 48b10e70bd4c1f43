#pragma once

// Monte Carlo estimate of the expected total reward under a memoryless
// policy. Trial t only uses draws keyed by (seed, t, step, ·) and the sums
// use a fixed pairwise tree, so the estimate is the same for any thread count.

#include "sspbound/oracle/numeric.hpp"
#include "sspbound/oracle/policy.hpp"
#include "sspbound/oracle/rng.hpp"

#include <cmath>
#include <cstdint>
#include <optional>
#include <thread>
#include <vector>

namespace sspbound::oracle {

struct SimOptions {
  std::size_t trials = 100000;
  std::uint64_t seed = 0;
  std::uint64_t step_cap = 1000000;
  std::size_t threads = 1;
  std::optional<std::vector<Rational>> init;  ///< defaults to the model's init
};

struct SimEstimate {
  double mean = 0;
  std::optional<double> stderr_;  ///< none for a single trial
  std::size_t trials = 0;
  double truncated_fraction = 0;
  double mean_steps = 0;
  std::uint64_t seed = 0;
  bool unreliable = false;  ///< truncated fraction above 1%
  friend bool operator==(const SimEstimate&, const SimEstimate&) = default;
};

inline constexpr double kUnreliableTruncation = 0.01;

/// Sum in a fixed pairwise order.
inline double tree_sum(const double* v, std::size_t n) {
  if (n == 0) return 0;
  if (n == 1) return v[0];
  const std::size_t h = n / 2;
  return tree_sum(v, h) + tree_sum(v + h, n - h);
}

struct TrialResult {
  double reward = 0;
  std::uint64_t steps = 0;
  bool truncated = false;
};

inline TrialResult run_trial(const NumericModel& n, const Policy& policy, std::vector<double> x, std::uint64_t seed,
                             std::uint64_t trial, std::uint64_t step_cap) {
  TrialResult r;
  std::vector<double> u(n.nu, 0.0), scratch;
  const std::size_t k = n.blocks.size();
  while (n.in_guard(x)) {
    if (r.steps >= step_cap) {
      r.truncated = true;
      break;
    }
    const std::size_t l = policy.choose(x, counter_uniform(seed, trial, r.steps, 0), k);
    for (auto d : n.blocks[l].reads) n.dists[d].sample(counter_uniform(seed, trial, r.steps, 1 + d), u);
    r.reward += n.step(l, x, u, scratch);
    ++r.steps;
  }
  return r;
}

inline SimEstimate simulate(const Model& m, const Policy& policy, const SimOptions& opt = {}) {
  if (opt.trials == 0) throw std::invalid_argument("trials must be at least 1");
  if (opt.step_cap == 0) throw std::invalid_argument("step cap must be at least 1");
  policy.check(m.k());
  const NumericModel n = to_numeric(m);
  std::vector<double> x0(m.nx(), 0.0);
  const auto init = opt.init ? opt.init : m.init;
  if (init)
    for (std::size_t i = 0; i < m.nx(); ++i) x0[i] = to_double((*init)[i]);

  std::vector<double> rewards(opt.trials), steps(opt.trials), truncated(opt.trials);
  auto work = [&](std::size_t from, std::size_t to) {
    for (std::size_t t = from; t < to; ++t) {
      const auto r = run_trial(n, policy, x0, opt.seed, t, opt.step_cap);
      rewards[t] = r.reward;
      steps[t] = static_cast<double>(r.steps);
      truncated[t] = r.truncated ? 1.0 : 0.0;
    }
  };
  const std::size_t threads = std::max<std::size_t>(1, std::min(opt.threads, opt.trials));
  if (threads == 1) {
    work(0, opt.trials);
  } else {
    std::vector<std::thread> pool;
    const std::size_t chunk = (opt.trials + threads - 1) / threads;
    for (std::size_t i = 0; i < threads; ++i)
      pool.emplace_back(work, std::min(opt.trials, i * chunk), std::min(opt.trials, (i + 1) * chunk));
    for (auto& t : pool) t.join();
  }

  SimEstimate e;
  e.trials = opt.trials;
  e.seed = opt.seed;
  const double nt = static_cast<double>(opt.trials);
  e.mean = tree_sum(rewards.data(), rewards.size()) / nt;
  e.mean_steps = tree_sum(steps.data(), steps.size()) / nt;
  e.truncated_fraction = tree_sum(truncated.data(), truncated.size()) / nt;
  e.unreliable = e.truncated_fraction > kUnreliableTruncation;
  if (opt.trials > 1) {
    for (auto& r : rewards) r = (r - e.mean) * (r - e.mean);
    const double var = tree_sum(rewards.data(), rewards.size()) / (nt - 1);
    e.stderr_ = std::sqrt(var / nt);
  }
  return e;
}

}  // namespace sspbound::oracle
