#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "sofent/group.hpp"
#include "sofent/sofic.hpp"
#include "sofent/types.hpp"

namespace sofent {

struct PathPartition;

struct WeightedEdge {
  Vertex to;
  double weight;
};

// The weighted graph H_sigma and its path metric rho_sigma.
//
// Edges join v and sigma^g . v for g in B_rho(1_G, R_edge) \ {1_G}; the weight
// is the least rho(g, 1_G) over all witnesses in either direction. Distances
// are computed on demand by Dijkstra. Vertices in distinct components sit at
// the sentinel distance M.
class ModelMetric {
 public:
  ModelMetric(std::size_t n, double r_edge, std::vector<std::vector<WeightedEdge>> adjacency);

  std::size_t size() const { return adjacency_.size(); }
  double r_edge() const { return r_edge_; }
  // M = 1 + 2 D where D bounds every intra-component distance from above.
  double sentinel() const { return sentinel_; }
  double diameter_bound() const { return diameter_bound_; }

  std::span<const WeightedEdge> neighbors(Vertex v) const { return adjacency_[v]; }
  std::size_t component(Vertex v) const { return component_[v]; }
  std::size_t component_count() const { return component_sizes_.size(); }
  const std::vector<std::size_t>& component_sizes() const { return component_sizes_; }
  std::size_t edge_count() const;

  double distance(Vertex a, Vertex b) const;
  // Distances to every vertex; other components get M.
  std::vector<double> distances_from(Vertex source) const;
  // Closed ball {w : rho_sigma(center, w) <= radius}, sorted by vertex.
  std::vector<std::pair<Vertex, double>> ball(Vertex center, double radius) const;
  // Open ball {w : rho_sigma(center, w) < radius}.
  std::vector<Vertex> open_ball(Vertex center, double radius) const;
  std::size_t ball_size(Vertex center, double radius) const;

  // (v, w, W) with v < w, sorted.
  std::vector<std::tuple<Vertex, Vertex, double>> edges() const;

 private:
  // Unreachable vertices get +infinity.
  std::vector<double> shortest_paths(Vertex source) const;
  template <typename Accept>
  std::vector<std::pair<Vertex, double>> truncated(Vertex center, Accept accept) const;

  double r_edge_;
  std::vector<std::vector<WeightedEdge>> adjacency_;
  std::vector<std::size_t> component_;
  std::vector<std::size_t> component_sizes_;
  double diameter_bound_ = 0.0;
  double sentinel_ = 1.0;
};

// Builds H_sigma from the words of B_rho(1_G, R_edge). R_edge must be within
// sigma's radius budget.
ModelMetric build_metric(const SoficMap& sigma, double r_edge, std::size_t ball_cap = 1'000'000);

struct SeparatedSet {
  double r = 0.0;
  std::vector<Vertex> members;  // in acceptance order
  // Every candidate lies within distance < r of a member (the covering
  // Y subset of the union of B(s, r)), which is also inclusion-maximality.
  bool covers = false;
  std::size_t candidates = 0;
};

// Greedy inclusion-maximal r-separated subset of W, scanning `order` (vertices
// outside W are skipped; an empty order means ascending W).
SeparatedSet separated_set_greedy(const ModelMetric& metric, std::span<const Vertex> W, double r,
                                  std::span<const Vertex> order = {});

// Independent rechecks, computed from the metric alone.
bool is_r_separated(const ModelMetric& metric, std::span<const Vertex> S, double r);
bool is_maximal_separated(const ModelMetric& metric, std::span<const Vertex> W,
                          std::span<const Vertex> S, double r);

// Vertices where g -> sigma^g . v maps B_rho(1_G, r) isometrically into
// (V, rho_sigma), checked pairwise.
bool is_isometric_at(const SoficMap& sigma, const ModelMetric& metric, Vertex v, double r);

// The good set W_n: vertices satisfying (i) injectivity on F', (ii)
// sigma^{h^i t_k} v = (sigma^h)^i sigma^{t_k} v, (iii) images of g, g' share a
// path iff g, g' share a right coset of <h>, every image lying on a path.
std::vector<Vertex> good_vertices(const SoficMap& sigma, const CosetDecomposition& decomposition,
                                  const PathPartition& paths);

// Vertices with g -> sigma^g . v injective on F.
std::vector<Vertex> injective_vertices(const SoficMap& sigma, std::span<const GroupWord> F);

std::string metric_edges_csv(const ModelMetric& metric);

}  // namespace sofent
