#include "ndsim/phy.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "ndsim/deployment.hpp"

namespace ndsim {

void PhyConfig::validate() const {
  if (sir_threshold <= 0.0) throw std::invalid_argument("phy: sir_threshold must be positive");
  if (wavelength <= 0.0) throw std::invalid_argument("phy: wavelength must be positive");
  if (tx_power <= 0.0) throw std::invalid_argument("phy: tx_power must be positive");
  if (gain_tx <= 0.0 || gain_rx <= 0.0) throw std::invalid_argument("phy: gains must be positive");
  if (noise_floor < 0.0) throw std::invalid_argument("phy: noise_floor must be nonnegative");
  if (residual_factor < 0.0 || residual_factor > 1.0)
    throw std::invalid_argument("phy: residual_factor must lie in [0, 1]");
  if (modulation_count < 1) throw std::invalid_argument("phy: modulation_count must be at least 1");
}

double received_power(double distance, const PhyConfig& phy) {
  const double near_field = near_field_radius(phy.wavelength);
  if (distance < near_field)
    throw std::domain_error("received_power: distance below the far-field bound lambda/(4*pi)");
  const double amplitude = phy.wavelength / (4.0 * kPi * distance);
  return amplitude * amplitude * phy.tx_power * phy.gain_tx * phy.gain_rx;
}

namespace {

// Indices of `packets` sorted strongest first, sender id breaking ties.
std::vector<int> decode_order(std::span<const ArrivingPacket> packets) {
  std::vector<int> order(packets.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (packets[static_cast<std::size_t>(a)].power != packets[static_cast<std::size_t>(b)].power)
      return packets[static_cast<std::size_t>(a)].power > packets[static_cast<std::size_t>(b)].power;
    return packets[static_cast<std::size_t>(a)].sender < packets[static_cast<std::size_t>(b)].sender;
  });
  return order;
}

void finish_outcome(ReceptionOutcome& out) { std::sort(out.dropped.begin(), out.dropped.end()); }

}  // namespace

ReceptionOutcome sic_decode(std::span<const ArrivingPacket> packets, const PhyConfig& phy) {
  ReceptionOutcome out;
  if (packets.empty()) return out;

  if (phy.sic == SicMode::none) {
    if (packets.size() == 1) {
      out.decoded.push_back(packets[0].sender);
    } else {
      for (const ArrivingPacket& p : packets) out.dropped.push_back(p.sender);
      finish_outcome(out);
    }
    return out;
  }

  const bool imperfect = phy.sic == SicMode::imperfect;
  const double residual = imperfect ? phy.residual_factor : 0.0;
  const double noise = imperfect ? phy.noise_floor : 0.0;

  const std::vector<int> order = decode_order(packets);
  double remaining = 0.0;  // total power of packets not yet decoded
  for (int idx : order) remaining += packets[static_cast<std::size_t>(idx)].power;

  double cancelled = 0.0;  // total power already subtracted by the chain
  std::size_t pos = 0;
  for (; pos < order.size(); ++pos) {
    const ArrivingPacket& p = packets[static_cast<std::size_t>(order[pos])];
    const double interference = (remaining - p.power) + residual * cancelled + noise;
    const bool decodes =
        interference <= 0.0 ? true : p.power / interference >= phy.sir_threshold;
    if (!decodes) break;  // chain cannot remove this packet; everything weaker is lost
    out.decoded.push_back(p.sender);
    remaining -= p.power;
    cancelled += p.power;
  }
  for (; pos < order.size(); ++pos)
    out.dropped.push_back(packets[static_cast<std::size_t>(order[pos])].sender);
  finish_outcome(out);
  return out;
}

ReceptionOutcome mpr_sic_decode(std::span<const ArrivingPacket> packets, const PhyConfig& phy) {
  if (phy.modulation_count == 1) return sic_decode(packets, phy);

  ReceptionOutcome out;
  std::vector<ArrivingPacket> group;
  for (int mod = 1; mod <= phy.modulation_count; ++mod) {
    group.clear();
    for (const ArrivingPacket& p : packets)
      if (p.modulation == mod) group.push_back(p);
    if (group.empty()) continue;
    if (group.size() == 1) {
      out.decoded.push_back(group[0].sender);  // separable by modulation alone
      continue;
    }
    ReceptionOutcome sub = sic_decode(group, phy);
    out.decoded.insert(out.decoded.end(), sub.decoded.begin(), sub.decoded.end());
    out.dropped.insert(out.dropped.end(), sub.dropped.begin(), sub.dropped.end());
  }
  finish_outcome(out);
  return out;
}

int max_unpack_count(const PhyConfig& phy, double comm_radius) {
  const double beta = phy.sir_threshold;
  const double lambda = phy.wavelength;
  if (comm_radius < near_field_radius(lambda))
    throw std::domain_error("max_unpack_count: comm_radius below the far-field bound");
  const double ratio = 16.0 * kPi * kPi * comm_radius * comm_radius / (lambda * lambda * beta);
  if (ratio <= 0.0) return 1;
  const double n = 2.0 + std::log(ratio) / std::log1p(beta);
  const int n0 = static_cast<int>(std::floor(n));
  return std::max(1, n0);
}

double unpack_prob_sample(std::span<const double> sorted_distances, double beta,
                          double comm_radius) {
  const std::size_t m = sorted_distances.size();
  if (m == 0) throw std::invalid_argument("unpack_prob_sample: empty distance set");
  const double r_sq = comm_radius * comm_radius;

  // decode_prob[j] for packets ordered strongest (nearest) first; the last
  // one decodes for free once everything stronger is cancelled.
  std::vector<double> decode_prob(m, 1.0);
  double inv_sq_tail = 0.0;  // sum over the k weakest of d^-2
  for (std::size_t j = m - 1; j >= 1; --j) {
    inv_sq_tail += 1.0 / (sorted_distances[j] * sorted_distances[j]);
    decode_prob[j - 1] = 1.0 / (beta * r_sq * inv_sq_tail);
  }

  double total = 0.0;
  double prefix_product = 1.0;
  for (std::size_t i = 1; i <= m; ++i) {
    prefix_product *= decode_prob[i - 1];
    total += static_cast<double>(i) * prefix_product;
  }
  return total / static_cast<double>(m);
}

double expected_unpack_prob(int m, const PhyConfig& phy, double comm_radius, RngStream rng,
                            int samples) {
  if (m < 1) throw std::domain_error("expected_unpack_prob: m must be at least 1");
  if (samples < 1) throw std::invalid_argument("expected_unpack_prob: samples must be positive");
  if (m > max_unpack_count(phy, comm_radius)) return 0.0;  // beyond the chain bound
  if (m == 1) return 1.0;

  const double d_min = near_field_radius(phy.wavelength);
  const double lo_sq = d_min * d_min;
  const double span_sq = comm_radius * comm_radius - lo_sq;

  std::vector<double> distances(static_cast<std::size_t>(m));
  double sum = 0.0;
  for (int s = 0; s < samples; ++s) {
    for (double& d : distances) d = std::sqrt(lo_sq + rng.next_u01() * span_sq);
    std::sort(distances.begin(), distances.end());
    const double value = unpack_prob_sample(distances, phy.sir_threshold, comm_radius);
    sum += std::clamp(value, 0.0, 1.0);
  }
  return sum / samples;
}

PbarTable PbarTable::compute(const PhyConfig& phy, double comm_radius, RngStream rng,
                             int samples) {
  PbarTable table;
  const int n0 = max_unpack_count(phy, comm_radius);
  table.values_.reserve(static_cast<std::size_t>(n0));
  for (int m = 1; m <= n0; ++m)
    table.values_.push_back(
        expected_unpack_prob(m, phy, comm_radius, rng.child(static_cast<std::uint64_t>(m)), samples));
  return table;
}

double PbarTable::at(int m) const {
  if (m < 1) throw std::domain_error("PbarTable::at: m must be at least 1");
  if (m > n0()) return 0.0;
  return values_[static_cast<std::size_t>(m - 1)];
}

}  // namespace ndsim
