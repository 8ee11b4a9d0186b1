#pragma once

#include <cstdint>
#include <random>
#include <thread>
#include <vector>

#include "diffsim/estimation/optimize.hpp"

namespace diffsim {

struct BasinHoppingConfig {
  int worker_count = 8;
  int evolutions = 10;
  int local_steps = 50;
  double mutation_scale = 0.1;  // sigma, relative to the bound width
  std::uint64_t seed = 0;

  void validate() const {
    if (worker_count < 1)
      throw ArgumentError("basin hopping: worker_count must be >= 1");
    if (evolutions < 1)
      throw ArgumentError("basin hopping: evolutions must be >= 1");
    if (mutation_scale < 0.0)
      throw ArgumentError("basin hopping: mutation_scale must be >= 0");
  }
};

struct BasinHopResult {
  ParameterBlock best;
  double objective = std::numeric_limits<double>::infinity();
  std::vector<double> evolution_objectives;  // incumbent after each evolution
  int diverged_workers = 0;
};

namespace detail {

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t evolution,
                              std::uint64_t worker) {
  // splitmix64 over a simple combination; gives independent per-worker streams
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (evolution * 8192 + worker + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace detail

// Parallel basin hopping: each evolution restarts worker_count local
// optimizers from Gaussian mutations of the incumbent (sigma relative to the
// bound widths, projected back inside). The incumbent after an evolution is
// the best of all workers and the previous incumbent, so its objective never
// increases. Deterministic for a fixed seed and worker count: every worker
// draws from its own (seed, evolution, worker) stream, and the reduction
// scans workers in index order.
//
// The objective must be safe to call concurrently (RolloutObjective builds
// all state per call, so it qualifies).
inline BasinHopResult parallel_basin_hop(const ValueAndGrad& f,
                                         const ParameterBlock& init,
                                         const BasinHoppingConfig& config,
                                         LocalOptions local = {}) {
  config.validate();
  init.validate();
  local.steps = config.local_steps;

  BasinHopResult result;
  result.best = init;
  {
    std::vector<double> g(init.size(), 0.0);
    result.objective = f(init.values, g);
  }

  const std::size_t n = init.size();
  for (int e = 0; e < config.evolutions; ++e) {
    std::vector<LocalResult> worker_results(
        static_cast<std::size_t>(config.worker_count));
    std::vector<std::thread> threads;
    threads.reserve(static_cast<std::size_t>(config.worker_count));
    for (int w = 0; w < config.worker_count; ++w) {
      threads.emplace_back([&, w, e]() {
        std::mt19937_64 rng(detail::mix_seed(config.seed,
                                             static_cast<std::uint64_t>(e),
                                             static_cast<std::uint64_t>(w)));
        std::normal_distribution<double> gauss(0.0, 1.0);
        ParameterBlock start = result.best;
        for (std::size_t i = 0; i < n; ++i) {
          const double width = start.upper[i] - start.lower[i];
          start.values[i] += config.mutation_scale * width * gauss(rng);
          start.values[i] =
              std::clamp(start.values[i], start.lower[i], start.upper[i]);
        }
        try {
          worker_results[static_cast<std::size_t>(w)] =
              local_minimize(f, start, local);
        } catch (const OptimizerError&) {
          worker_results[static_cast<std::size_t>(w)].objective =
              std::numeric_limits<double>::infinity();
        }
      });
    }
    for (auto& t : threads) t.join();

    int finite = 0;
    for (int w = 0; w < config.worker_count; ++w) {
      const auto& wr = worker_results[static_cast<std::size_t>(w)];
      if (std::isfinite(wr.objective)) ++finite;
      if (wr.objective < result.objective) {
        result.objective = wr.objective;
        result.best.values = wr.block.values;
      }
    }
    if (finite == 0) ++result.diverged_workers;
    result.evolution_objectives.push_back(result.objective);
  }
  return result;
}

}  // namespace diffsim
