// Experiment runner: seeded simulations, closed-form theory curves, parameter
// sweeps, and theory-vs-simulation comparisons, emitted as CSV/JSON.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ndsim/analysis.hpp"
#include "ndsim/config.hpp"
#include "ndsim/engine.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace ndsim;

namespace {

constexpr const char* kToolVersion = "0.1.0";

constexpr int kExitParse = 2;
constexpr int kExitInvariant = 3;
constexpr int kExitCap = 4;

std::string format_number(double v) {
  char buf[40];
  if (v == static_cast<long long>(v) && std::abs(v) < 1e15) {
    std::snprintf(buf, sizeof buf, "%lld", static_cast<long long>(v));
  } else {
    std::snprintf(buf, sizeof buf, "%.10g", v);
  }
  return buf;
}

std::string iso_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::ofstream open_output(const fs::path& dir, const std::string& name) {
  fs::create_directories(dir);
  std::ofstream out(dir / name, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write output file: " + (dir / name).string());
  return out;
}

json json_or_string(double v) {
  if (std::isfinite(v)) return v;
  return v > 0 ? "infinity" : "-infinity";
}

struct CommonArgs {
  std::string config_path;
  std::string out_dir;
  int seeds_override = 0;  // 0 = keep config seeds
  int jobs = 1;
};

void apply_seed_override(SimConfig& cfg, int seeds_override) {
  if (seeds_override > 0)
    cfg.seeds = make_seed_range(cfg.seeds.empty() ? 1 : cfg.seeds.front(), seeds_override);
}

json threshold_stats_json(const AggregateMetrics& agg, int budget) {
  json stats = json::array();
  for (const auto& stat : agg.thresholds) {
    json per_seed = json::array();
    for (const Metrics& m : agg.runs) {
      for (const ThresholdHit& hit : m.slots_to_threshold)
        if (hit.threshold == stat.threshold)
          per_seed.push_back({{"seed", m.seed},
                              {"slot", hit.reached ? hit.slot : budget},
                              {"reached", hit.reached}});
    }
    stats.push_back({{"threshold", stat.threshold},
                     {"mean_slots", stat.reached > 0 ? json(stat.mean_slots) : json()},
                     {"stddev_slots", stat.reached > 0 ? json(stat.stddev_slots) : json()},
                     {"reached", stat.reached},
                     {"total", stat.total},
                     {"per_seed", per_seed}});
  }
  return stats;
}

int cmd_sim(const CommonArgs& args) {
  SimConfig cfg = load_sim_config(args.config_path);
  apply_seed_override(cfg, args.seeds_override);
  cfg.validate();

  const AggregateMetrics agg = run_many(cfg, cfg.seeds, args.jobs);

  auto curve = open_output(args.out_dir, "curve.csv");
  curve << "slot,fraction_mean,fraction_std,seeds\n";
  for (std::size_t t = 0; t < agg.fraction_mean.size(); ++t)
    curve << (t + 1) << ',' << format_number(agg.fraction_mean[t]) << ','
          << format_number(agg.fraction_std[t]) << ',' << agg.seeds.size() << '\n';

  json summary;
  summary["version"] = kToolVersion;
  summary["generated_at"] = iso_timestamp();  // metadata only; excluded from reproducibility checks
  summary["config"] = json::parse(sim_config_to_json(cfg));
  summary["seeds"] = cfg.seeds;
  summary["slots_to_threshold"] = threshold_stats_json(agg, cfg.slot_budget);
  summary["final_fraction_mean"] =
      agg.fraction_mean.empty() ? 0.0 : agg.fraction_mean.back();
  summary["slots_simulated"] = agg.fraction_mean.size();
  open_output(args.out_dir, "summary.json") << summary.dump(2) << '\n';
  return 0;
}

int cmd_theory(const CommonArgs& args) {
  SimConfig cfg = load_sim_config(args.config_path);
  apply_seed_override(cfg, args.seeds_override);
  cfg.validate();

  const double n_bar = mean_neighbor_count(cfg.arena_spec());
  const double k_mean = per_beam_neighbor_count(n_bar, cfg.theta());
  if (std::llround(k_mean) < 1)
    throw std::invalid_argument(
        "theory: per-beam neighbor count K = " + std::to_string(k_mean) +
        " rounds to zero; increase node_count, r, or beam width");

  const AnalysisParams params = make_analysis_params(cfg);
  std::vector<double> curve;
  if (cfg.slot_budget >= 1) curve = theory_curve(params, cfg.slot_budget);

  auto csv = open_output(args.out_dir, "theory.csv");
  csv << "slot,expected_fraction\n";
  for (std::size_t t = 0; t < curve.size(); ++t)
    csv << (t + 1) << ',' << format_number(curve[t]) << '\n';

  json out;
  out["version"] = kToolVersion;
  out["generated_at"] = iso_timestamp();
  out["config"] = json::parse(sim_config_to_json(cfg));
  out["variant"] = cfg.variant.label();
  out["N_bar"] = n_bar;
  out["K"] = params.k_mean;
  out["K_int"] = params.k_int();
  out["n0"] = params.n0;
  out["pbar"] = params.pbar;
  out["E_T_all"] = json_or_string(expected_total_slots(params));
  out["clamped_evaluations"] = analysis_clamp_count();
  open_output(args.out_dir, "theory.json") << out.dump(2) << '\n';
  return 0;
}

int cmd_sweep(const CommonArgs& args) {
  SweepSpec spec = load_sweep_spec(args.config_path);
  apply_seed_override(spec.base, args.seeds_override);
  if (spec.grid_size() > spec.cap)
    throw SweepCapError("sweep grid has " + std::to_string(spec.grid_size()) +
                        " points, cap is " + std::to_string(spec.cap));

  auto csv = open_output(args.out_dir, "results.csv");
  for (const auto& [name, values] : spec.axes) csv << name << ',';
  csv << "metric,value,stddev,seeds\n";

  std::vector<std::size_t> index(spec.axes.size(), 0);
  const std::size_t points = spec.grid_size();
  for (std::size_t point = 0; point < points; ++point) {
    SimConfig cfg = spec.base;
    std::string prefix;
    for (std::size_t a = 0; a < spec.axes.size(); ++a) {
      const double value = spec.axes[a].second[index[a]];
      apply_axis(cfg, spec.axes[a].first, value);
      prefix += format_number(value);
      prefix += ',';
    }
    cfg.validate();
    const AggregateMetrics agg = run_many(cfg, cfg.seeds, args.jobs);

    for (double threshold : cfg.thresholds) {
      // value-or-budget per seed keeps unreached runs comparable
      double sum = 0.0, sq = 0.0;
      for (const Metrics& m : agg.runs) sum += m.slots_to(threshold, cfg.slot_budget);
      const double mean = sum / agg.runs.size();
      for (const Metrics& m : agg.runs) {
        const double d = m.slots_to(threshold, cfg.slot_budget) - mean;
        sq += d * d;
      }
      const double stddev = agg.runs.size() > 1 ? std::sqrt(sq / (agg.runs.size() - 1.0)) : 0.0;
      csv << prefix << "slots_to_" << format_number(threshold) << ',' << format_number(mean)
          << ',' << format_number(stddev) << ',' << agg.runs.size() << '\n';
    }
    for (int at : spec.fraction_at) {
      double sum = 0.0, sq = 0.0;
      auto at_slot = [&](const Metrics& m) {
        if (m.fraction_curve.empty()) return m.total_directed_pairs == 0 ? 1.0 : 0.0;
        const std::size_t idx =
            std::min(m.fraction_curve.size(), static_cast<std::size_t>(std::max(1, at)));
        return m.fraction_curve[idx - 1];
      };
      for (const Metrics& m : agg.runs) sum += at_slot(m);
      const double mean = sum / agg.runs.size();
      for (const Metrics& m : agg.runs) {
        const double d = at_slot(m) - mean;
        sq += d * d;
      }
      const double stddev = agg.runs.size() > 1 ? std::sqrt(sq / (agg.runs.size() - 1.0)) : 0.0;
      csv << prefix << "fraction_at_" << at << ',' << format_number(mean) << ','
          << format_number(stddev) << ',' << agg.runs.size() << '\n';
    }

    for (std::size_t a = spec.axes.size(); a-- > 0;) {
      if (++index[a] < spec.axes[a].second.size()) break;
      index[a] = 0;
    }
  }
  return 0;
}

int cmd_compare(const CommonArgs& args) {
  CompareSpec spec = load_compare_spec(args.config_path);
  apply_seed_override(spec.base, args.seeds_override);
  spec.base.validate();

  json out;
  out["version"] = kToolVersion;
  out["generated_at"] = iso_timestamp();
  out["config"] = json::parse(sim_config_to_json(spec.base));

  // Theory-vs-simulation overlay for the configured variant.
  const AggregateMetrics agg = run_many(spec.base, spec.base.seeds, args.jobs);
  const AnalysisParams params = make_analysis_params(spec.base);
  const int slots = static_cast<int>(agg.fraction_mean.size());
  const std::vector<double> theory = slots >= 1 ? theory_curve(params, slots)
                                                : std::vector<double>{};
  double max_gap = 0.0;
  auto overlay = open_output(args.out_dir, "overlay.csv");
  overlay << "slot,sim_fraction_mean,theory_fraction,abs_gap\n";
  for (int t = 0; t < slots; ++t) {
    const double gap = std::abs(agg.fraction_mean[static_cast<std::size_t>(t)] -
                                theory[static_cast<std::size_t>(t)]);
    max_gap = std::max(max_gap, gap);
    overlay << (t + 1) << ',' << format_number(agg.fraction_mean[static_cast<std::size_t>(t)])
            << ',' << format_number(theory[static_cast<std::size_t>(t)]) << ','
            << format_number(gap) << '\n';
  }
  out["variant"] = spec.base.variant.label();
  out["max_theory_sim_gap"] = max_gap;
  out["E_T_all"] = json_or_string(expected_total_slots(params));

  // Paired-seed improvement scan: plain vs SIC vs SIC+MPR at each node count.
  if (!spec.node_counts.empty()) {
    auto reductions = open_output(args.out_dir, "reductions.csv");
    reductions << "node_count,plain_slots,sic_slots,sic_reduction_pct,"
                  "mpr_slots,mpr_reduction_pct\n";
    json scan = json::array();
    double sic_sum = 0.0, mpr_sum = 0.0;
    for (int n : spec.node_counts) {
      SimConfig base_cfg = spec.base;
      base_cfg.node_count = n;
      base_cfg.variant.sic = SicMode::none;
      base_cfg.variant.modulation_count = 1;
      SimConfig sic_cfg = base_cfg;
      sic_cfg.variant.sic = SicMode::perfect;
      SimConfig mpr_cfg = sic_cfg;
      mpr_cfg.variant.modulation_count = spec.mpr_modulations;

      auto mean_slots95 = [&](const SimConfig& cfg) {
        const AggregateMetrics a = run_many(cfg, cfg.seeds, args.jobs);
        double sum = 0.0;
        for (const Metrics& m : a.runs) sum += m.slots_to(0.95, cfg.slot_budget);
        return sum / a.runs.size();
      };
      const double plain = mean_slots95(base_cfg);
      const double sic = mean_slots95(sic_cfg);
      const double mpr = mean_slots95(mpr_cfg);
      const double sic_red = plain > 0.0 ? 100.0 * (1.0 - sic / plain) : 0.0;
      const double mpr_red = plain > 0.0 ? 100.0 * (1.0 - mpr / plain) : 0.0;
      sic_sum += sic_red;
      mpr_sum += mpr_red;
      reductions << n << ',' << format_number(plain) << ',' << format_number(sic) << ','
                 << format_number(sic_red) << ',' << format_number(mpr) << ','
                 << format_number(mpr_red) << '\n';
      scan.push_back({{"node_count", n},
                      {"plain_slots", plain},
                      {"sic_slots", sic},
                      {"sic_reduction_pct", sic_red},
                      {"mpr_slots", mpr},
                      {"mpr_reduction_pct", mpr_red}});
    }
    out["reductions"] = scan;
    out["mean_sic_reduction_pct"] = sic_sum / spec.node_counts.size();
    out["mean_mpr_reduction_pct"] = mpr_sum / spec.node_counts.size();
    out["mpr_modulations"] = spec.mpr_modulations;
  }

  open_output(args.out_dir, "compare.json") << out.dump(2) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Directional neighbor-discovery simulator and analysis runner"};
  app.require_subcommand(1);

  CommonArgs args;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", args.config_path, "input JSON file")->required();
    sub->add_option("--out", args.out_dir, "output directory")->required();
    sub->add_option("--seeds", args.seeds_override, "override the number of seeds");
    sub->add_option("--jobs", args.jobs, "worker threads for independent runs");
  };

  CLI::App* sim = app.add_subcommand("sim", "run seeded simulations, write curve.csv + summary.json");
  CLI::App* theory = app.add_subcommand("theory", "evaluate the closed-form model, write theory.csv + theory.json");
  CLI::App* sweep = app.add_subcommand("sweep", "run a parameter grid, write results.csv");
  CLI::App* compare = app.add_subcommand("compare", "overlay theory vs simulation and scan improvements");
  for (CLI::App* sub : {sim, theory, sweep, compare}) add_common(sub);

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed()) return cmd_sim(args);
    if (theory->parsed()) return cmd_theory(args);
    if (sweep->parsed()) return cmd_sweep(args);
    if (compare->parsed()) return cmd_compare(args);
  } catch (const ConfigParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return kExitParse;
  } catch (const SweepCapError& e) {
    std::cerr << "sweep cap exceeded: " << e.what() << '\n';
    return kExitCap;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInvariant;
  }
  return 0;
}
