#include "ndsim/engine.hpp"

#include <algorithm>
#include <atomic>
#include <cassert>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace ndsim {

int Metrics::slots_to(double threshold, int budget) const {
  for (const ThresholdHit& hit : slots_to_threshold)
    if (hit.threshold == threshold) return hit.reached ? hit.slot : budget;
  // Threshold not tracked: recover it from the curve.
  for (int t = 0; t < static_cast<int>(fraction_curve.size()); ++t)
    if (fraction_curve[static_cast<std::size_t>(t)] >= threshold) return t + 1;
  return budget;
}

Metrics run_on_topology(const SimConfig& config, const Topology& topo, std::uint64_t seed) {
  config.validate();
  const Variant& variant = config.variant;
  const PhyConfig phy = config.phy_config();
  const int n = static_cast<int>(topo.nodes.size());

  Metrics metrics;
  metrics.seed = seed;
  metrics.total_directed_pairs = topo.directed_pairs;
  if (config.slot_budget == 0) return metrics;
  if (topo.directed_pairs == 0) {
    // Nothing to discover; report immediate completion.
    for (double t : config.thresholds) metrics.slots_to_threshold.push_back({t, 0, true});
    return metrics;
  }

  for (double t : config.thresholds) metrics.slots_to_threshold.push_back({t, 0, false});

  RngStream run_stream(seed);
  const RngStream decision_root = run_stream.child(stream_purpose::kDecisions);
  DiscoveryState state(n, topo.geom.beam_count);
  std::vector<SlotDecision> decisions(static_cast<std::size_t>(n));
  metrics.fraction_curve.reserve(static_cast<std::size_t>(config.slot_budget));

  const double total = static_cast<double>(topo.directed_pairs);
  for (int slot = 1; slot <= config.slot_budget; ++slot) {
    const RngStream slot_stream = decision_root.child(static_cast<std::uint64_t>(slot));
    for (int id = 0; id < n; ++id)
      decisions[static_cast<std::size_t>(id)] =
          choose_slot_decision(variant, id, slot, config.p_t, topo.geom, slot_stream);

    const HelloPhaseResult hello = hello_phase(topo, decisions, variant, phy, state);
    ack_phase(topo, decisions, hello, variant, phy, state);

    // Pair accounting: the running total must equal the sum of per-node counts.
    std::size_t recount = 0;
    for (int id = 0; id < n; ++id) recount += static_cast<std::size_t>(state.discovered_count(id));
    assert(recount == state.total_discovered());
    (void)recount;

    const double fraction = static_cast<double>(state.total_discovered()) / total;
    metrics.fraction_curve.push_back(fraction);
    metrics.slots_run = slot;
    for (ThresholdHit& hit : metrics.slots_to_threshold)
      if (!hit.reached && fraction >= hit.threshold) {
        hit.reached = true;
        hit.slot = slot;
      }
    if (state.total_discovered() == topo.directed_pairs) break;
  }
  return metrics;
}

Metrics run(const SimConfig& config, std::uint64_t seed) {
  config.validate();
  RngStream run_stream(seed);
  std::vector<Node> nodes = place_nodes(config.arena_spec(), run_stream.child(stream_purpose::kPlacement),
                                        near_field_radius(config.phy.lambda0));
  Topology topo = Topology::build(std::move(nodes), config.comm_radius, config.geometry());
  return run_on_topology(config, topo, seed);
}

void parallel_for(std::size_t count, int jobs, const std::function<void(std::size_t)>& fn) {
  jobs = std::max(1, jobs);
  if (jobs == 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      fn(i);
    }
  };
  std::vector<std::thread> pool;
  const std::size_t thread_count = std::min<std::size_t>(static_cast<std::size_t>(jobs), count);
  pool.reserve(thread_count);
  for (std::size_t t = 0; t < thread_count; ++t) pool.emplace_back(worker);
  for (std::thread& t : pool) t.join();
}

AggregateMetrics aggregate(std::vector<Metrics> runs, std::span<const double> thresholds) {
  AggregateMetrics agg;
  agg.seeds.reserve(runs.size());
  for (const Metrics& m : runs) agg.seeds.push_back(m.seed);

  // Canonical order: sorting by seed makes the floating-point reductions
  // independent of the supplied seed order.
  std::vector<const Metrics*> ordered;
  ordered.reserve(runs.size());
  for (const Metrics& m : runs) ordered.push_back(&m);
  std::sort(ordered.begin(), ordered.end(),
            [](const Metrics* a, const Metrics* b) { return a->seed < b->seed; });

  std::size_t max_len = 0;
  for (const Metrics* m : ordered) max_len = std::max(max_len, m->fraction_curve.size());

  const double count = static_cast<double>(ordered.size());
  agg.fraction_mean.assign(max_len, 0.0);
  agg.fraction_std.assign(max_len, 0.0);
  // Early-exited runs hold their final value (1.0) for the padded slots.
  auto value_at = [](const Metrics& m, std::size_t t) {
    if (t < m.fraction_curve.size()) return m.fraction_curve[t];
    return m.fraction_curve.empty() ? 0.0 : m.fraction_curve.back();
  };
  for (std::size_t t = 0; t < max_len; ++t) {
    double sum = 0.0;
    for (const Metrics* m : ordered) sum += value_at(*m, t);
    const double mean = sum / count;
    double sq = 0.0;
    for (const Metrics* m : ordered) {
      const double d = value_at(*m, t) - mean;
      sq += d * d;
    }
    agg.fraction_mean[t] = mean;
    agg.fraction_std[t] = ordered.size() > 1 ? std::sqrt(sq / (count - 1.0)) : 0.0;
  }

  for (double threshold : thresholds) {
    AggregateMetrics::ThresholdStat stat;
    stat.threshold = threshold;
    stat.total = static_cast<int>(ordered.size());
    double sum = 0.0;
    for (const Metrics* m : ordered)
      for (const ThresholdHit& hit : m->slots_to_threshold)
        if (hit.threshold == threshold && hit.reached) {
          ++stat.reached;
          sum += hit.slot;
        }
    if (stat.reached > 0) {
      stat.mean_slots = sum / stat.reached;
      double sq = 0.0;
      for (const Metrics* m : ordered)
        for (const ThresholdHit& hit : m->slots_to_threshold)
          if (hit.threshold == threshold && hit.reached) {
            const double d = hit.slot - stat.mean_slots;
            sq += d * d;
          }
      stat.stddev_slots = stat.reached > 1 ? std::sqrt(sq / (stat.reached - 1.0)) : 0.0;
    }
    agg.thresholds.push_back(stat);
  }

  agg.runs = std::move(runs);
  return agg;
}

AggregateMetrics run_many(const SimConfig& config, std::span<const std::uint64_t> seeds,
                          int jobs) {
  if (seeds.empty()) throw std::invalid_argument("run_many: at least one seed is required");
  std::vector<Metrics> runs(seeds.size());
  parallel_for(seeds.size(), jobs,
               [&](std::size_t i) { runs[i] = run(config, seeds[i]); });
  return aggregate(std::move(runs), config.thresholds);
}

}  // namespace ndsim
