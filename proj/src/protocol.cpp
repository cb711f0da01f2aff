#include "ndsim/protocol.hpp"

#include <algorithm>
#include <stdexcept>

namespace ndsim {

std::string Variant::label() const {
  std::string name = base == BaseAlgorithm::cra ? "CRA" : "SBA";
  if (sic != SicMode::none) name += "-SIC";
  if (mpr()) name += "-MPR";
  return name;
}

void Variant::validate() const {
  if (modulation_count < 1) throw std::invalid_argument("variant: modulation_count must be at least 1");
  if (mpr() && sic == SicMode::none)
    throw std::invalid_argument("variant: MPR requires a SIC mode (no plain-MPR flavor exists)");
}

Topology Topology::build(std::vector<Node> nodes, double comm_radius, const BeamGeometry& geom) {
  Topology topo;
  topo.geom = geom;
  const NeighborGraph graph = build_neighbor_graph(nodes, comm_radius);
  topo.links.resize(nodes.size());
  for (const Node& n : nodes) {
    auto& out = topo.links[static_cast<std::size_t>(n.id)];
    const auto& adj = graph.neighbors(n.id);
    out.reserve(adj.size());
    for (const NeighborGraph::Edge& e : adj) {
      const Node& peer = nodes[static_cast<std::size_t>(e.to)];
      out.push_back({e.to, e.dist, beam_of(n, peer, geom), beam_of(peer, n, geom)});
    }
  }
  topo.directed_pairs = graph.directed_pair_count();
  topo.nodes = std::move(nodes);
  return topo;
}

DiscoveryState::DiscoveryState(int node_count, int beam_count)
    : node_count_(node_count),
      beam_count_(beam_count),
      discovered_(static_cast<std::size_t>(node_count) * node_count, 0),
      counts_(static_cast<std::size_t>(node_count), 0),
      discovered_by_beam_(static_cast<std::size_t>(node_count) * beam_count, 0) {}

void DiscoveryState::mark(int node, int neighbor, int beam_at_neighbor) {
  auto& cell = discovered_[static_cast<std::size_t>(node) * node_count_ + neighbor];
  if (cell != 0) return;
  cell = 1;
  ++counts_[static_cast<std::size_t>(node)];
  ++discovered_by_beam_[static_cast<std::size_t>(neighbor) * beam_count_ + (beam_at_neighbor - 1)];
  ++total_;
}

SlotDecision choose_slot_decision(const Variant& variant, int node_id, int slot, double p_t,
                                  const BeamGeometry& geom, const RngStream& slot_stream) {
  RngStream rng = slot_stream.child(static_cast<std::uint64_t>(node_id));
  SlotDecision d;
  d.role = rng.next_bernoulli(p_t) ? Role::transmit : Role::receive;

  int beam;
  if (variant.base == BaseAlgorithm::cra) {
    beam = 1 + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(geom.beam_count)));
  } else {
    const int schedule_beam = (slot - 1) % geom.beam_count + 1;
    beam = d.role == Role::transmit ? schedule_beam : geom.opposite(schedule_beam);
  }
  d.tx_beam = beam;
  d.rx_beam = beam;

  if (variant.mpr()) {
    d.hello_modulation = 1 + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(variant.modulation_count)));
    d.ack_modulation = 1 + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(variant.modulation_count)));
  }
  return d;
}

namespace {

ReceptionOutcome decode(std::span<const ArrivingPacket> packets, const Variant& variant,
                        const PhyConfig& phy) {
  return variant.mpr() ? mpr_sic_decode(packets, phy) : sic_decode(packets, phy);
}

}  // namespace

HelloPhaseResult hello_phase(const Topology& topo, const std::vector<SlotDecision>& decisions,
                             const Variant& variant, const PhyConfig& phy, DiscoveryState& state) {
  HelloPhaseResult result;
  const int n = static_cast<int>(topo.nodes.size());
  std::vector<ArrivingPacket> arrivals;
  std::vector<int> sender_beam_at_sender;  // parallel to arrivals

  for (int receiver = 0; receiver < n; ++receiver) {
    if (decisions[static_cast<std::size_t>(receiver)].role != Role::receive) continue;
    const int rx_beam = decisions[static_cast<std::size_t>(receiver)].rx_beam;
    arrivals.clear();
    sender_beam_at_sender.clear();
    for (const Topology::Link& link : topo.links[static_cast<std::size_t>(receiver)]) {
      const SlotDecision& peer = decisions[static_cast<std::size_t>(link.to)];
      if (peer.role != Role::transmit) continue;
      if (link.beam_from_self != rx_beam) continue;       // receiver pointed elsewhere
      if (link.beam_from_peer != peer.tx_beam) continue;  // sender pointed elsewhere
      arrivals.push_back({link.to, received_power(link.dist, phy), peer.hello_modulation,
                          PacketKind::hello, {}});
      sender_beam_at_sender.push_back(link.beam_from_peer);
    }
    if (arrivals.empty()) continue;

    ReceptionOutcome outcome = decode(arrivals, variant, phy);
    std::vector<int> newly;
    for (int sender : outcome.decoded) {
      if (state.knows(receiver, sender)) continue;  // handshake done: stay silent
      std::size_t k = 0;
      while (arrivals[k].sender != sender) ++k;
      state.mark(receiver, sender, sender_beam_at_sender[k]);
      newly.push_back(sender);
      ++result.new_discoveries;
    }
    if (!newly.empty()) result.pending.push_back({receiver, std::move(newly)});
    result.receptions.emplace_back(receiver, std::move(outcome));
  }
  return result;
}

AckPhaseResult ack_phase(const Topology& topo, const std::vector<SlotDecision>& decisions,
                         const HelloPhaseResult& hello, const Variant& variant,
                         const PhyConfig& phy, DiscoveryState& state) {
  AckPhaseResult result;
  const int n = static_cast<int>(topo.nodes.size());

  std::vector<int> replier_index(static_cast<std::size_t>(n), -1);
  for (std::size_t i = 0; i < hello.pending.size(); ++i)
    replier_index[static_cast<std::size_t>(hello.pending[i].replier)] = static_cast<int>(i);

  std::vector<ArrivingPacket> arrivals;
  std::vector<int> replier_beam_at_replier;

  for (int listener = 0; listener < n; ++listener) {
    if (decisions[static_cast<std::size_t>(listener)].role != Role::transmit) continue;
    const int listen_beam = decisions[static_cast<std::size_t>(listener)].tx_beam;
    arrivals.clear();
    replier_beam_at_replier.clear();
    for (const Topology::Link& link : topo.links[static_cast<std::size_t>(listener)]) {
      const int idx = replier_index[static_cast<std::size_t>(link.to)];
      if (idx < 0) continue;  // neighbor is not replying this slot
      const SlotDecision& peer = decisions[static_cast<std::size_t>(link.to)];
      if (link.beam_from_self != listen_beam) continue;
      if (link.beam_from_peer != peer.rx_beam) continue;  // ACK goes out on the receive sector
      arrivals.push_back({link.to, received_power(link.dist, phy), peer.ack_modulation,
                          PacketKind::ack, hello.pending[static_cast<std::size_t>(idx)].addressees});
      replier_beam_at_replier.push_back(link.beam_from_peer);
    }
    if (arrivals.empty()) continue;

    ReceptionOutcome outcome = decode(arrivals, variant, phy);
    for (int replier : outcome.decoded) {
      std::size_t k = 0;
      while (arrivals[k].sender != replier) ++k;
      const auto& addressees = arrivals[k].addressees;
      if (std::find(addressees.begin(), addressees.end(), listener) == addressees.end())
        continue;  // decoded but meant for someone else
      if (!state.knows(listener, replier)) {
        state.mark(listener, replier, replier_beam_at_replier[k]);
        ++result.new_discoveries;
      }
    }
    result.receptions.emplace_back(listener, std::move(outcome));
  }
  return result;
}

}  // namespace ndsim
