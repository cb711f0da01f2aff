#ifndef NDSIM_PROTOCOL_HPP
#define NDSIM_PROTOCOL_HPP

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "ndsim/deployment.hpp"
#include "ndsim/phy.hpp"
#include "ndsim/rng.hpp"

namespace ndsim {

enum class BaseAlgorithm { cra, sba };

// One of the six protocol flavors: {CRA, SBA} x {plain, SIC, SIC+MPR}.
struct Variant {
  BaseAlgorithm base = BaseAlgorithm::sba;
  SicMode sic = SicMode::none;
  int modulation_count = 1;  // >= 2 enables multi-packet reception

  bool mpr() const { return modulation_count > 1; }
  std::string label() const;

  // MPR without SIC is not a defined flavor.
  void validate() const;
};

enum class Role { transmit, receive };

// Per-node, per-slot choices. tx_beam is the sector used when sending
// (HELLO in mini-slot 1 for transmitters, ACK in mini-slot 2 for receivers);
// rx_beam is the sector listened on. Both refer to the same physical sector
// for a given node and slot.
struct SlotDecision {
  Role role = Role::receive;
  int tx_beam = 1;
  int rx_beam = 1;
  int hello_modulation = 1;
  int ack_modulation = 1;
};

// Placed nodes plus the r-disk graph with per-link sector indices, fixed for
// a whole run.
struct Topology {
  std::vector<Node> nodes;
  BeamGeometry geom{12};
  struct Link {
    int to = 0;
    double dist = 0.0;
    int beam_from_self = 1;  // sector of this node containing `to`
    int beam_from_peer = 1;  // sector of `to` containing this node
  };
  std::vector<std::vector<Link>> links;
  std::size_t directed_pairs = 0;

  static Topology build(std::vector<Node> nodes, double comm_radius, const BeamGeometry& geom);
};

// Monotone per-node discovery sets plus, per node, the count of neighbors
// that have discovered it, bucketed by the sector they occupy.
class DiscoveryState {
 public:
  DiscoveryState(int node_count, int beam_count);

  bool knows(int node, int neighbor) const {
    return discovered_[static_cast<std::size_t>(node) * node_count_ + neighbor] != 0;
  }
  // `node` discovers `neighbor`; beam_at_neighbor is the sector of `neighbor`
  // containing `node`. No-op if already known.
  void mark(int node, int neighbor, int beam_at_neighbor);

  int discovered_count(int node) const { return counts_[static_cast<std::size_t>(node)]; }
  int discovered_by_in_beam(int node, int beam) const {
    return discovered_by_beam_[static_cast<std::size_t>(node) * beam_count_ + (beam - 1)];
  }
  std::size_t total_discovered() const { return total_; }
  int node_count() const { return node_count_; }

 private:
  int node_count_;
  int beam_count_;
  std::vector<unsigned char> discovered_;
  std::vector<int> counts_;
  std::vector<int> discovered_by_beam_;
  std::size_t total_ = 0;
};

// Role and sector selection for one node and slot. CRA draws the sector
// uniformly per node per slot; SBA transmits on the schedule sector
// ((slot-1) mod beam_count + 1) and receives on its opposite. Modulations are
// drawn uniformly when MPR is on, else pinned to 1. Draws come from
// slot_stream.child(node_id), so results do not depend on evaluation order.
SlotDecision choose_slot_decision(const Variant& variant, int node_id, int slot, double p_t,
                                  const BeamGeometry& geom, const RngStream& slot_stream);

// One ACK per replier, carrying every sender it newly discovered this slot.
struct PendingAck {
  int replier = 0;
  std::vector<int> addressees;
};

struct HelloPhaseResult {
  std::vector<PendingAck> pending;  // receivers that will reply in mini-slot 2
  std::vector<std::pair<int, ReceptionOutcome>> receptions;  // receiver id -> outcome
  int new_discoveries = 0;
};

// Mini-slot 1: transmitters send HELLOs on tx_beam; a HELLO arrives at a
// receiver iff both sectors cover each other's bearing. Each receiver decodes
// its arrivals (SIC/MPR per variant); decoded HELLOs from unknown senders are
// marked discovered and queued for one ACK. Known senders get no reply.
HelloPhaseResult hello_phase(const Topology& topo, const std::vector<SlotDecision>& decisions,
                             const Variant& variant, const PhyConfig& phy, DiscoveryState& state);

struct AckPhaseResult {
  std::vector<std::pair<int, ReceptionOutcome>> receptions;  // listener id -> outcome
  int new_discoveries = 0;
};

// Mini-slot 2: pending receivers transmit their ACK on rx_beam; every
// mini-slot-1 transmitter listens on tx_beam. A listener that decodes an ACK
// discovers the replier only if it is among the addressees; other decoded
// ACKs are cancelled interference.
AckPhaseResult ack_phase(const Topology& topo, const std::vector<SlotDecision>& decisions,
                         const HelloPhaseResult& hello, const Variant& variant,
                         const PhyConfig& phy, DiscoveryState& state);

}  // namespace ndsim

#endif  // NDSIM_PROTOCOL_HPP
