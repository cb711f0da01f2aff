#ifndef NDSIM_ANALYSIS_HPP
#define NDSIM_ANALYSIS_HPP

#include <cstdint>
#include <vector>

#include "ndsim/config.hpp"
#include "ndsim/phy.hpp"
#include "ndsim/protocol.hpp"

namespace ndsim {

// Inputs of the closed-form discovery model. k_mean (neighbors per beam) is
// real-valued; combinatorial structure is evaluated at k_int = max(1,
// round(k_mean)) while pure exponents and count ratios keep the real value.
struct AnalysisParams {
  Variant variant;
  double k_mean = 1.0;
  double p_t = 0.5;
  double theta = kPi / 6.0;
  int beam_count = 12;
  int n0 = 1;                 // joint-unpack bound of the decode chain
  std::vector<double> pbar;   // pbar[m-1] = expected unpack probability for m arrivals

  int k_int() const;
  double pbar_at(int m) const;  // 0 beyond n0
  void validate() const;
};

// Derives the analytic inputs (mean degree, per-beam count, unpack bound,
// pbar table) from a simulation config. The pbar Monte Carlo draws from
// RngStream(config.seeds.front()).child(kUnpackProb), so theory outputs are
// reproducible alongside the matching simulation.
AnalysisParams make_analysis_params(const SimConfig& config);

// Per-slot probability that a node discovers a specific still-unknown
// neighbor, given j of the neighbors in that beam already discovered the
// node. Evaluates the variant's handshake-success formula (plain, SIC, or
// SIC+MPR decode terms) in the additive form P_R + P_T1 * P_T2, clamped to
// [0, 1]. For SBA-based variants the value is per serving cycle of the beam
// schedule. j must lie in [0, k_int - 1].
double discovery_prob(const AnalysisParams& params, int j);

// Expected slots for a node to discover all neighbors in all beams:
//   beam_count * sum_j 1 / ((k_int - j) * discovery_prob(j)).
// +infinity when any per-j probability is zero.
double expected_total_slots(const AnalysisParams& params);

// Mean-field expected-fraction curve: the expected per-beam discovered count
// advances each slot by (k_mean - D) * p_slot(round(D)), where p_slot is
// discovery_prob converted to a per-slot hazard (identity for CRA; for SBA a
// pair's beam is served once per beam_count slots, so 1-(1-p)^(1/beam_count)).
std::vector<double> theory_curve(const AnalysisParams& params, int slots);

// Number of values clamped into [0, 1] by discovery_prob since process start
// (the printed formulas can exceed 1 at extreme parameters).
std::uint64_t analysis_clamp_count();

}  // namespace ndsim

#endif  // NDSIM_ANALYSIS_HPP
