#ifndef NDSIM_DEPLOYMENT_HPP
#define NDSIM_DEPLOYMENT_HPP

#include <cstddef>
#include <vector>

#include "ndsim/rng.hpp"

namespace ndsim {

inline constexpr double kPi = 3.14159265358979323846;

// Far-field validity bound of the free-space power law for wavelength
// `wavelength`; placements never put two nodes closer than this.
constexpr double near_field_radius(double wavelength) {
  return wavelength / (4.0 * kPi);
}

inline constexpr double kDefaultMinSeparation = near_field_radius(0.125);

// Rectangular arena with uniformly placed nodes and a disk communication
// radius. Lengths in meters.
struct ArenaSpec {
  double length = 3000.0;       // x extent
  double width = 3000.0;        // y extent
  int node_count = 300;
  double comm_radius = 800.0;

  double density() const { return node_count / (length * width); }

  // Throws std::invalid_argument unless the arena admits the boundary
  // decomposition (length, width >= 2 * comm_radius) and holds at least one
  // node.
  void validate() const;
};

struct Node {
  int id = 0;
  double x = 0.0;
  double y = 0.0;
};

// Exact r-disk adjacency with cached Euclidean distances. Symmetric, no
// self-loops; neighbor lists sorted by id.
class NeighborGraph {
 public:
  struct Edge {
    int to = 0;
    double dist = 0.0;
  };

  NeighborGraph() = default;
  explicit NeighborGraph(std::size_t node_count) : adjacency_(node_count) {}

  const std::vector<Edge>& neighbors(int id) const { return adjacency_[static_cast<std::size_t>(id)]; }
  int degree(int id) const { return static_cast<int>(adjacency_[static_cast<std::size_t>(id)].size()); }
  std::size_t node_count() const { return adjacency_.size(); }
  std::size_t directed_pair_count() const;
  bool adjacent(int u, int v) const;

  void add_edge(int u, int v, double dist);  // inserts both directions
  void sort_adjacency();                     // restores the sorted-by-id invariant

 private:
  std::vector<std::vector<Edge>> adjacency_;
};

// Sector antenna layout: beam k (1-based) spans [(k-1)*theta, k*theta),
// counterclockwise from the positive x axis, in a frame shared by all nodes.
// beam_count must be even so every beam has an opposite.
struct BeamGeometry {
  int beam_count = 12;
  double theta = 2.0 * kPi / 12.0;

  explicit BeamGeometry(int beams);

  int opposite(int beam) const { return (beam - 1 + beam_count / 2) % beam_count + 1; }
};

// Uniform i.i.d. placement over the arena rectangle; any draw landing within
// min_separation of an already-placed node is re-drawn. Deterministic given
// the stream. Throws std::runtime_error if the rejection loop exhausts its
// retry budget (pathological density).
std::vector<Node> place_nodes(const ArenaSpec& arena, RngStream rng,
                              double min_separation = kDefaultMinSeparation);

// Exact r-disk graph over the placed nodes (grid-bucketed pair search).
NeighborGraph build_neighbor_graph(const std::vector<Node>& nodes, double comm_radius);

// Boundary-corrected mean neighbor count over the whole arena:
//   (3*pi*lambda*r^4 - 8*(a+b)*lambda*r^3 + 6*pi*lambda*a*b*r^2) / (6*a*b)
// with lambda = N/(a*b). Requires length, width >= 2r.
double mean_neighbor_count(const ArenaSpec& arena);

// Mean neighbors falling in one beam of width theta: (theta / 2*pi) * n_bar.
double per_beam_neighbor_count(double n_bar, double theta);

// 1-based index of the sector of `source` containing the bearing to `target`.
// Coincident positions are a domain error.
int beam_of(const Node& source, const Node& target, const BeamGeometry& geom);

}  // namespace ndsim

#endif  // NDSIM_DEPLOYMENT_HPP
