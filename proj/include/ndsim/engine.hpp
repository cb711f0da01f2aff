#ifndef NDSIM_ENGINE_HPP
#define NDSIM_ENGINE_HPP

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "ndsim/config.hpp"
#include "ndsim/protocol.hpp"

namespace ndsim {

struct ThresholdHit {
  double threshold = 0.0;
  int slot = 0;          // first slot with fraction >= threshold (valid when reached)
  bool reached = false;

  bool operator==(const ThresholdHit&) const = default;
};

// Per-run results. fraction_curve[t-1] is the fraction of discovered directed
// neighbor pairs after slot t; nondecreasing, final value 1.0 exactly when
// every ordered pair is discovered.
struct Metrics {
  std::vector<double> fraction_curve;
  std::vector<ThresholdHit> slots_to_threshold;
  std::size_t total_directed_pairs = 0;
  std::uint64_t seed = 0;
  int slots_run = 0;

  bool operator==(const Metrics&) const = default;

  // slot of the threshold hit, or the run's slot budget when unreached
  // (value-or-budget convention used by sweeps and comparisons).
  int slots_to(double threshold, int budget) const;
};

// Runs the slot loop on a prebuilt topology. Deterministic in (config, seed):
// all draws derive from RngStream(seed) by (purpose, slot, node) path.
Metrics run_on_topology(const SimConfig& config, const Topology& topo, std::uint64_t seed);

// Places nodes (seeded), builds the topology, and runs the slot loop.
Metrics run(const SimConfig& config, std::uint64_t seed);

// Seed-averaged results. Aggregation happens in canonical (sorted-by-seed)
// order, so permuting the seed list cannot change any output bit.
struct AggregateMetrics {
  std::vector<double> fraction_mean;
  std::vector<double> fraction_std;   // sample stddev; 0 for a single seed
  struct ThresholdStat {
    double threshold = 0.0;
    double mean_slots = 0.0;   // over the seeds that reached it
    double stddev_slots = 0.0;
    int reached = 0;
    int total = 0;
  };
  std::vector<ThresholdStat> thresholds;
  std::vector<std::uint64_t> seeds;  // as supplied
  std::vector<Metrics> runs;         // aligned with `seeds`
};

AggregateMetrics aggregate(std::vector<Metrics> runs, std::span<const double> thresholds);

// Independent runs, optionally spread over `jobs` threads.
AggregateMetrics run_many(const SimConfig& config, std::span<const std::uint64_t> seeds,
                          int jobs = 1);

// Shared-nothing parallel loop used by run_many, sweeps, and the acceptance
// driver: invokes fn(i) for i in [0, count) on up to `jobs` threads.
void parallel_for(std::size_t count, int jobs, const std::function<void(std::size_t)>& fn);

}  // namespace ndsim

#endif  // NDSIM_ENGINE_HPP
