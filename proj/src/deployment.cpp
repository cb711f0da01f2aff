#include "ndsim/deployment.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace ndsim {

void ArenaSpec::validate() const {
  if (length <= 0.0 || width <= 0.0) throw std::invalid_argument("arena: length and width must be positive");
  if (comm_radius <= 0.0) throw std::invalid_argument("arena: comm_radius must be positive");
  if (length < 2.0 * comm_radius || width < 2.0 * comm_radius)
    throw std::invalid_argument("arena: length and width must be at least 2 * comm_radius");
  if (node_count < 1) throw std::invalid_argument("arena: node_count must be at least 1");
}

std::size_t NeighborGraph::directed_pair_count() const {
  std::size_t n = 0;
  for (const auto& adj : adjacency_) n += adj.size();
  return n;
}

bool NeighborGraph::adjacent(int u, int v) const {
  const auto& adj = adjacency_[static_cast<std::size_t>(u)];
  auto it = std::lower_bound(adj.begin(), adj.end(), v,
                             [](const Edge& e, int id) { return e.to < id; });
  return it != adj.end() && it->to == v;
}

void NeighborGraph::add_edge(int u, int v, double dist) {
  adjacency_[static_cast<std::size_t>(u)].push_back({v, dist});
  adjacency_[static_cast<std::size_t>(v)].push_back({u, dist});
}

void NeighborGraph::sort_adjacency() {
  for (auto& adj : adjacency_)
    std::sort(adj.begin(), adj.end(), [](const Edge& a, const Edge& b) { return a.to < b.to; });
}

BeamGeometry::BeamGeometry(int beams) : beam_count(beams), theta(2.0 * kPi / beams) {
  if (beams < 2 || beams % 2 != 0)
    throw std::invalid_argument("beam_count must be even and at least 2, got " + std::to_string(beams));
}

std::vector<Node> place_nodes(const ArenaSpec& arena, RngStream rng, double min_separation) {
  arena.validate();
  constexpr int kRetryLimit = 1000;
  const double min_sep_sq = min_separation * min_separation;

  std::vector<Node> nodes;
  nodes.reserve(static_cast<std::size_t>(arena.node_count));
  for (int i = 0; i < arena.node_count; ++i) {
    int attempts = 0;
    for (;;) {
      if (++attempts > kRetryLimit)
        throw std::runtime_error("place_nodes: minimum-separation rejection loop exceeded " +
                                 std::to_string(kRetryLimit) + " retries; arena too dense");
      const double x = rng.next_u01() * arena.length;
      const double y = rng.next_u01() * arena.width;
      bool clear = true;
      for (const Node& other : nodes) {
        const double dx = other.x - x;
        const double dy = other.y - y;
        if (dx * dx + dy * dy < min_sep_sq) {
          clear = false;
          break;
        }
      }
      if (clear) {
        nodes.push_back({i, x, y});
        break;
      }
    }
  }
  return nodes;
}

NeighborGraph build_neighbor_graph(const std::vector<Node>& nodes, double comm_radius) {
  NeighborGraph graph(nodes.size());
  if (nodes.empty()) return graph;

  // Bucket nodes into cells of side comm_radius; neighbors live in the
  // 3x3 cell block around each node.
  double min_x = nodes[0].x, min_y = nodes[0].y, max_x = nodes[0].x, max_y = nodes[0].y;
  for (const Node& n : nodes) {
    min_x = std::min(min_x, n.x);
    min_y = std::min(min_y, n.y);
    max_x = std::max(max_x, n.x);
    max_y = std::max(max_y, n.y);
  }
  const double cell = comm_radius;
  const int nx = std::max(1, static_cast<int>((max_x - min_x) / cell) + 1);
  const int ny = std::max(1, static_cast<int>((max_y - min_y) / cell) + 1);
  std::vector<std::vector<int>> cells(static_cast<std::size_t>(nx) * ny);
  auto cell_of = [&](double x, double y) {
    int cx = std::min(nx - 1, static_cast<int>((x - min_x) / cell));
    int cy = std::min(ny - 1, static_cast<int>((y - min_y) / cell));
    return static_cast<std::size_t>(cy) * nx + cx;
  };
  for (const Node& n : nodes) cells[cell_of(n.x, n.y)].push_back(n.id);

  const double r_sq = comm_radius * comm_radius;
  for (const Node& n : nodes) {
    const int cx = std::min(nx - 1, static_cast<int>((n.x - min_x) / cell));
    const int cy = std::min(ny - 1, static_cast<int>((n.y - min_y) / cell));
    for (int dy = -1; dy <= 1; ++dy) {
      for (int dx = -1; dx <= 1; ++dx) {
        const int bx = cx + dx, by = cy + dy;
        if (bx < 0 || bx >= nx || by < 0 || by >= ny) continue;
        for (int other : cells[static_cast<std::size_t>(by) * nx + bx]) {
          if (other <= n.id) continue;  // each unordered pair once
          const Node& m = nodes[static_cast<std::size_t>(other)];
          const double ddx = m.x - n.x;
          const double ddy = m.y - n.y;
          const double d_sq = ddx * ddx + ddy * ddy;
          if (d_sq <= r_sq) graph.add_edge(n.id, other, std::sqrt(d_sq));
        }
      }
    }
  }

  graph.sort_adjacency();
  return graph;
}

double mean_neighbor_count(const ArenaSpec& arena) {
  arena.validate();
  const double a = arena.length;
  const double b = arena.width;
  const double r = arena.comm_radius;
  const double lambda = arena.density();
  const double r2 = r * r;
  const double numerator = 3.0 * kPi * lambda * r2 * r2 - 8.0 * (a + b) * lambda * r2 * r +
                           6.0 * kPi * lambda * a * b * r2;
  return numerator / (6.0 * a * b);
}

double per_beam_neighbor_count(double n_bar, double theta) {
  if (n_bar < 0.0) throw std::invalid_argument("per_beam_neighbor_count: n_bar must be nonnegative");
  if (theta <= 0.0 || theta > 2.0 * kPi)
    throw std::invalid_argument("per_beam_neighbor_count: theta must lie in (0, 2*pi]");
  return theta / (2.0 * kPi) * n_bar;
}

int beam_of(const Node& source, const Node& target, const BeamGeometry& geom) {
  const double dx = target.x - source.x;
  const double dy = target.y - source.y;
  if (dx == 0.0 && dy == 0.0) throw std::domain_error("beam_of: coincident positions have no bearing");
  double bearing = std::atan2(dy, dx);
  if (bearing < 0.0) bearing += 2.0 * kPi;
  int beam = static_cast<int>(bearing / geom.theta) + 1;
  if (beam > geom.beam_count) beam = geom.beam_count;  // bearing == 2*pi after rounding
  return beam;
}

}  // namespace ndsim
