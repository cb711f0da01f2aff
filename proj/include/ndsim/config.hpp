#ifndef NDSIM_CONFIG_HPP
#define NDSIM_CONFIG_HPP

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "ndsim/deployment.hpp"
#include "ndsim/phy.hpp"
#include "ndsim/protocol.hpp"

namespace ndsim {

// Raised on malformed input files (missing/unknown/ill-typed keys). Maps to
// exit code 2 at the CLI; semantic invariant violations throw
// std::invalid_argument / std::domain_error and map to exit code 3.
class ConfigParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SweepCapError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Full experiment parameterization. Defaults are the standard setup:
// 3000 m x 3000 m arena, 800 m range, 2.4 GHz wavelength, threshold 4.
struct SimConfig {
  double arena_length = 3000.0;  // JSON: arena.a
  double arena_width = 3000.0;   // JSON: arena.b
  int node_count = 300;
  double comm_radius = 800.0;    // JSON: r
  int beam_count = 12;           // sector width theta = 2*pi / beam_count
  double p_t = 0.5;
  Variant variant;
  struct Phy {
    double beta = 4.0;
    double lambda0 = 0.125;
    double tx_power = 1.0;
    double gain_tx = 1.0;
    double gain_rx = 1.0;
    double noise_floor = 0.0;
    double xi = 0.0;
  } phy;
  int slot_budget = 5000;
  std::vector<std::uint64_t> seeds;  // defaults to 1..20
  std::vector<double> thresholds{0.95};
  int pbar_samples = 100000;

  SimConfig();

  ArenaSpec arena_spec() const {
    return {arena_length, arena_width, node_count, comm_radius};
  }
  BeamGeometry geometry() const { return BeamGeometry(beam_count); }
  PhyConfig phy_config() const;
  double theta() const { return 2.0 * kPi / beam_count; }

  void validate() const;  // throws std::invalid_argument on any broken invariant
};

// Cartesian parameter sweep over a base config. Axis names are config keys:
// node_count, p_t, beam_count, xi, h, beta, slot_budget.
struct SweepSpec {
  SimConfig base;
  std::vector<std::pair<std::string, std::vector<double>>> axes;  // declaration order
  std::size_t cap = 4096;
  std::vector<int> fraction_at;  // slots at which the mean fraction is reported

  std::size_t grid_size() const;
};

// Theory/simulation comparison request: the base config plus an optional
// node-count scan for SIC / SIC+MPR improvement reporting.
struct CompareSpec {
  SimConfig base;
  std::vector<int> node_counts;
  int mpr_modulations = 2;  // h used for the SIC+MPR arm of the scan
};

SimConfig load_sim_config(const std::string& path);
SweepSpec load_sweep_spec(const std::string& path);
CompareSpec load_compare_spec(const std::string& path);

// In-memory variants used by the loaders and tests.
SimConfig parse_sim_config(const std::string& json_text);
SweepSpec parse_sweep_spec(const std::string& json_text);
CompareSpec parse_compare_spec(const std::string& json_text);

// JSON echo of a config, key-compatible with the loader.
std::string sim_config_to_json(const SimConfig& config);

// Applies one sweep-axis value to a config copy.
void apply_axis(SimConfig& config, const std::string& axis, double value);

// Seed helpers: "seeds": [..] or {"count": n, "base": b} expand to a list;
// the ND_SEED_BASE environment variable rebases the list.
std::vector<std::uint64_t> make_seed_range(std::uint64_t base, int count);

}  // namespace ndsim

#endif  // NDSIM_CONFIG_HPP
