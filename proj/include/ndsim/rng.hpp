#ifndef NDSIM_RNG_HPP
#define NDSIM_RNG_HPP

#include <cstdint>

namespace ndsim {

// Counter-based stream built on the splitmix64 finalizer. Streams are
// identified by (seed, derivation path): child(id) derives an independent
// substream, so the draw sequence of any consumer is fixed by its path and
// cannot be perturbed by unrelated code drawing in a different order.
class RngStream {
 public:
  RngStream() = default;
  explicit RngStream(std::uint64_t seed) : state_(mix(seed + kGamma)) {}

  // Independent substream for (this path, id). Does not advance this stream.
  [[nodiscard]] RngStream child(std::uint64_t id) const {
    RngStream s;
    s.state_ = mix(state_ + kGamma * (2 * id + 1));
    return s;
  }

  std::uint64_t next_u64() {
    state_ += kGamma;
    return mix(state_);
  }

  // Uniform in [0, 1), 53-bit resolution.
  double next_u01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, n). n must be positive.
  std::uint64_t next_below(std::uint64_t n) { return next_u64() % n; }

  bool next_bernoulli(double p) { return next_u01() < p; }

 private:
  static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;

  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  std::uint64_t state_ = 0;
};

// Fixed purpose ids for top-level stream derivation within a run.
namespace stream_purpose {
inline constexpr std::uint64_t kPlacement = 1;
inline constexpr std::uint64_t kDecisions = 2;
inline constexpr std::uint64_t kUnpackProb = 3;
}  // namespace stream_purpose

}  // namespace ndsim

#endif  // NDSIM_RNG_HPP
