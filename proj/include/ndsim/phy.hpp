#ifndef NDSIM_PHY_HPP
#define NDSIM_PHY_HPP

#include <span>
#include <vector>

#include "ndsim/rng.hpp"

namespace ndsim {

enum class SicMode { none, perfect, imperfect };

enum class PacketKind { hello, ack };

// Receiver-side physical-layer parameters. Powers in watts, wavelength in
// meters, thresholds and gains unitless.
struct PhyConfig {
  double sir_threshold = 4.0;   // decode threshold (SIR for perfect, SINR for imperfect)
  double wavelength = 0.125;
  double tx_power = 1.0;
  double gain_tx = 1.0;
  double gain_rx = 1.0;
  double noise_floor = 0.0;     // ambient noise power; ignored in perfect mode
  double residual_factor = 0.0; // fraction of a cancelled packet's power left as interference
  SicMode sic = SicMode::none;
  int modulation_count = 1;     // 1 disables multi-packet reception

  void validate() const;
};

struct ArrivingPacket {
  int sender = 0;
  double power = 0.0;           // at the receiver
  int modulation = 1;           // in [1, modulation_count]
  PacketKind kind = PacketKind::hello;
  std::vector<int> addressees;  // ACK only; empty for HELLO
};

struct ReceptionOutcome {
  std::vector<int> decoded;  // sender ids in decode order
  std::vector<int> dropped;  // sender ids, ascending
};

// Free-space received power (lambda / 4*pi*d)^2 * P_T * G_T * G_R.
// Distances below the near-field bound lambda/(4*pi) are a domain error.
double received_power(double distance, const PhyConfig& phy);

// Decode a set of simultaneous arrivals of one modulation.
//   none:      a lone packet decodes; two or more are all dropped.
//   perfect:   strongest-first chain, packet i decodes iff
//              S_i / sum(weaker) >= threshold; the chain stops at the first
//              failure; a lone remaining packet decodes (SIR = infinity).
//   imperfect: as perfect but the denominator adds residual_factor * S_j for
//              every already-cancelled packet j plus noise_floor.
// Ties in power are broken by ascending sender id.
ReceptionOutcome sic_decode(std::span<const ArrivingPacket> packets, const PhyConfig& phy);

// Modulation-aware decode: packets are partitioned by modulation index;
// a packet alone in its group decodes unconditionally, groups of two or more
// go through sic_decode in isolation (different modulations do not interfere).
ReceptionOutcome mpr_sic_decode(std::span<const ArrivingPacket> packets, const PhyConfig& phy);

// Largest number of packets jointly decodable by a perfect chain given the
// communication radius:  floor(2 + log_{1+beta}(16*pi^2*r^2 / (lambda^2*beta))).
// Never less than 1.
int max_unpack_count(const PhyConfig& phy, double comm_radius);

// Value of the expected-decode construction for one draw of sorted sender
// distances d_1 <= ... <= d_m:
//   (1/m) * sum_i i * prod_{j<=i} P_j,  P_j = 1 / (beta r^2 sum_{k<m-j} d_{m-k}^-2),
// with the lone-survivor factor P_m = 1. Unclamped.
double unpack_prob_sample(std::span<const double> sorted_distances, double beta, double comm_radius);

// Monte Carlo expectation of the clamped sample value over m senders placed
// area-uniformly in a sector of radius comm_radius (distance density
// proportional to d on [lambda/4pi, r]). Returns 1 exactly for m == 1 and 0
// for m above the unpack bound.
double expected_unpack_prob(int m, const PhyConfig& phy, double comm_radius, RngStream rng,
                            int samples = 100000);

// Eagerly computed table of expected_unpack_prob for m = 1..n0; immutable
// afterwards, safe to share across threads.
class PbarTable {
 public:
  static PbarTable compute(const PhyConfig& phy, double comm_radius, RngStream rng,
                           int samples = 100000);

  // 1 <= m <= n0 -> table value; m > n0 -> 0.
  double at(int m) const;
  int n0() const { return static_cast<int>(values_.size()); }
  const std::vector<double>& values() const { return values_; }

 private:
  std::vector<double> values_;
};

}  // namespace ndsim

#endif  // NDSIM_PHY_HPP
