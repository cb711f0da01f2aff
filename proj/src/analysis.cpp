#include "ndsim/analysis.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace ndsim {

namespace {

std::atomic<std::uint64_t> g_clamp_count{0};

double clamp01(double v) {
  if (v < 0.0 || v > 1.0) {
    g_clamp_count.fetch_add(1, std::memory_order_relaxed);
    return std::clamp(v, 0.0, 1.0);
  }
  return v;
}

// Binomial(n, p) pmf at k, stable at the p = 0 / 1 edges.
double binom_pmf(int n, int k, double p) {
  if (k < 0 || k > n) return 0.0;
  if (p <= 0.0) return k == 0 ? 1.0 : 0.0;
  if (p >= 1.0) return k == n ? 1.0 : 0.0;
  const double log_choose =
      std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
  return std::exp(log_choose + k * std::log(p) + (n - k) * std::log1p(-p));
}

// sum_{m=0}^{min(n, n0-shift)} Binom(n, m; q) * pbar(m + shift)
double decode_weighted_sum(const AnalysisParams& params, int n, double q, int shift) {
  const int upper = std::min(n, params.n0 - shift);
  double sum = 0.0;
  for (int m = 0; m <= upper; ++m) sum += binom_pmf(n, m, q) * params.pbar_at(m + shift);
  return sum;
}

struct HandshakeTerms {
  double receive_side = 0.0;  // node in receive state hears the neighbor
  double transmit_side = 0.0; // node's own HELLO is heard
  double reply = 0.0;         // a competing neighbor replies toward the node
};

// Plain single-packet reception (collisions destroy everything).
HandshakeTerms plain_terms(const AnalysisParams& params, double align) {
  const double p = params.p_t;
  const double k = params.k_mean;
  const double others_silent = std::pow(1.0 - align * p, std::max(k - 1.0, 0.0));
  HandshakeTerms t;
  t.receive_side = align * (1.0 - p) * align * p * others_silent;
  t.transmit_side = t.receive_side;
  t.reply = align * (1.0 - p) * others_silent;
  return t;
}

// SIC / SIC+MPR reception: a binomial number of in-beam competitors collide
// with the wanted packet and the chain resolves m+1 arrivals with
// probability pbar(m+1). MPR thins the competitor stream by 1/h.
HandshakeTerms sic_terms(const AnalysisParams& params, double align, int j) {
  const double p = params.p_t;
  const double k = params.k_mean;
  const int k_int = params.k_int();
  const int h = params.variant.mpr() ? params.variant.modulation_count : 1;
  const double q = align * p / h;  // a given in-beam neighbor lands in the same decode group

  HandshakeTerms t;
  const double pair_factor = align * (1.0 - p) * align * p;
  t.receive_side = pair_factor * decode_weighted_sum(params, k_int - 1, q, 1);
  t.transmit_side = t.receive_side;

  // Reply pressure from the K-1 competitors: either a neighbor that already
  // knows this node discovers some third node (it must decode among n+2
  // arrivals including this node's own HELLO), or a neighbor that does not
  // yet know this node decodes this node's HELLO among n+1 arrivals.
  const double known_ratio = j / k;
  const double unknown_ratio = (k - j) / k;
  double known_term = 0.0;
  if (k_int >= 2) {
    if (h == 1) {
      known_term = known_ratio * align * (1.0 - p) * (k - j) * align * p *
                   decode_weighted_sum(params, k_int - 2, q, 2);
    } else {
      // Same modulation as the wanted packet with probability 1/h (then it
      // occupies a chain slot), otherwise it is separated by modulation.
      const double same = decode_weighted_sum(params, k_int - 2, q, 2) / h;
      int upper = std::min(k_int - 2, params.n0 - 1);
      double diff = 0.0;
      for (int m = 0; m <= upper; ++m) diff += binom_pmf(k_int - 2, m, q) * params.pbar_at(m + 1);
      known_term = known_ratio * align * (1.0 - p) * (k - j) * align * p *
                   (same + (1.0 - 1.0 / h) * diff);
    }
  }
  const double unknown_term =
      unknown_ratio * align * (1.0 - p) * decode_weighted_sum(params, k_int - 1, q, 1);
  t.reply = known_term + unknown_term;
  return t;
}

}  // namespace

int AnalysisParams::k_int() const {
  return std::max(1, static_cast<int>(std::llround(k_mean)));
}

double AnalysisParams::pbar_at(int m) const {
  if (m < 1) throw std::domain_error("AnalysisParams: pbar index must be at least 1");
  if (m > n0 || m > static_cast<int>(pbar.size())) return 0.0;
  return pbar[static_cast<std::size_t>(m - 1)];
}

void AnalysisParams::validate() const {
  if (k_mean <= 0.0) throw std::invalid_argument("analysis: k_mean must be positive");
  if (p_t < 0.0 || p_t > 1.0) throw std::invalid_argument("analysis: p_t must lie in [0, 1]");
  if (theta <= 0.0 || theta > 2.0 * kPi)
    throw std::invalid_argument("analysis: theta must lie in (0, 2*pi]");
  if (beam_count < 1) throw std::invalid_argument("analysis: beam_count must be positive");
  if (n0 < 1) throw std::invalid_argument("analysis: n0 must be at least 1");
  variant.validate();
  for (double v : pbar)
    if (v < 0.0 || v > 1.0) throw std::invalid_argument("analysis: pbar entries must lie in [0, 1]");
}

AnalysisParams make_analysis_params(const SimConfig& config) {
  config.validate();
  AnalysisParams params;
  params.variant = config.variant;
  params.p_t = config.p_t;
  params.theta = config.theta();
  params.beam_count = config.beam_count;
  const double n_bar = mean_neighbor_count(config.arena_spec());
  params.k_mean = per_beam_neighbor_count(n_bar, params.theta);
  const PhyConfig phy = config.phy_config();
  params.n0 = max_unpack_count(phy, config.comm_radius);
  const std::uint64_t seed = config.seeds.front();
  params.pbar = PbarTable::compute(phy, config.comm_radius,
                                   RngStream(seed).child(stream_purpose::kUnpackProb),
                                   config.pbar_samples)
                    .values();
  return params;
}

double discovery_prob(const AnalysisParams& params, int j) {
  const int k_int = params.k_int();
  if (j < 0 || j >= k_int)
    throw std::domain_error("discovery_prob: j must lie in [0, k_int - 1]");

  const double align =
      params.variant.base == BaseAlgorithm::cra ? params.theta / (2.0 * kPi) : 1.0;

  HandshakeTerms t = params.variant.sic == SicMode::none ? plain_terms(params, align)
                                                         : sic_terms(params, align, j);
  const double reply = clamp01(t.reply);

  double ack_success;  // the node hears the wanted reply through competing ACKs
  if (params.variant.sic == SicMode::none) {
    ack_success = std::pow(1.0 - reply, std::max(params.k_mean - 1.0 - j, 0.0));
  } else {
    const int h = params.variant.mpr() ? params.variant.modulation_count : 1;
    ack_success = decode_weighted_sum(params, k_int - 1, reply / h, 1);
  }
  return clamp01(t.receive_side + t.transmit_side * ack_success);
}

double expected_total_slots(const AnalysisParams& params) {
  const int k_int = params.k_int();
  double per_beam = 0.0;
  for (int j = 0; j < k_int; ++j) {
    const double p = discovery_prob(params, j);
    if (p <= 0.0) return std::numeric_limits<double>::infinity();
    per_beam += 1.0 / ((k_int - j) * p);
  }
  return params.beam_count * per_beam;
}

std::vector<double> theory_curve(const AnalysisParams& params, int slots) {
  if (slots < 1) throw std::invalid_argument("theory_curve: slots must be at least 1");
  const int k_int = params.k_int();
  const bool scheduled = params.variant.base == BaseAlgorithm::sba;

  // Cache the per-j hazards; j only takes k_int values.
  std::vector<double> hazard(static_cast<std::size_t>(k_int));
  for (int j = 0; j < k_int; ++j) {
    const double p = discovery_prob(params, j);
    hazard[static_cast<std::size_t>(j)] =
        scheduled ? 1.0 - std::pow(1.0 - p, 1.0 / params.beam_count) : p;
  }

  std::vector<double> curve(static_cast<std::size_t>(slots));
  double discovered = 0.0;
  for (int t = 0; t < slots; ++t) {
    const int j = std::min(static_cast<int>(std::llround(discovered)), k_int - 1);
    discovered += (params.k_mean - discovered) * hazard[static_cast<std::size_t>(j)];
    curve[static_cast<std::size_t>(t)] = std::min(discovered / params.k_mean, 1.0);
  }
  return curve;
}

std::uint64_t analysis_clamp_count() { return g_clamp_count.load(std::memory_order_relaxed); }

}  // namespace ndsim
