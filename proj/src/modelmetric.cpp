#include "sofent/modelmetric.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <queue>
#include <sstream>
#include <tuple>
#include <unordered_map>

#include "sofent/construction.hpp"
#include "sofent/error.hpp"
#include "sofent/kernels.hpp"

namespace sofent {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

using QueueItem = std::pair<double, Vertex>;
using MinQueue = std::priority_queue<QueueItem, std::vector<QueueItem>, std::greater<>>;

}  // namespace

ModelMetric::ModelMetric(std::size_t n, double r_edge,
                         std::vector<std::vector<WeightedEdge>> adjacency)
    : r_edge_(r_edge), adjacency_(std::move(adjacency)) {
  if (adjacency_.size() != n) throw InvalidArgument("adjacency size != n");
  for (std::size_t v = 0; v < n; ++v)
    for (const auto& e : adjacency_[v]) {
      if (e.to >= n) throw InvalidArgument("edge endpoint out of range");
      if (!(e.weight > 0.0)) throw InvalidArgument("edge weights must be positive");
    }
  component_.assign(n, std::numeric_limits<std::size_t>::max());
  std::vector<Vertex> stack;
  for (std::size_t root = 0; root < n; ++root) {
    if (component_[root] != std::numeric_limits<std::size_t>::max()) continue;
    std::size_t id = component_sizes_.size();
    component_sizes_.push_back(0);
    component_[root] = id;
    stack.push_back(static_cast<Vertex>(root));
    while (!stack.empty()) {
      Vertex v = stack.back();
      stack.pop_back();
      ++component_sizes_[id];
      for (const auto& e : adjacency_[v])
        if (component_[e.to] == std::numeric_limits<std::size_t>::max()) {
          component_[e.to] = id;
          stack.push_back(e.to);
        }
    }
    // The diameter of a component is at most twice the eccentricity of any
    // of its vertices.
    double ecc = 0.0;
    for (double d : shortest_paths(static_cast<Vertex>(root)))
      if (d < kInf) ecc = std::max(ecc, d);
    diameter_bound_ = std::max(diameter_bound_, 2.0 * ecc);
  }
  sentinel_ = 1.0 + 2.0 * diameter_bound_;
}

std::size_t ModelMetric::edge_count() const {
  std::size_t total = 0;
  for (const auto& adj : adjacency_) total += adj.size();
  return total / 2;
}

std::vector<double> ModelMetric::shortest_paths(Vertex source) const {
  const std::size_t n = adjacency_.size();
  std::vector<double> dist(n, kInf);
  MinQueue queue;
  dist[source] = 0.0;
  queue.push({0.0, source});
  while (!queue.empty()) {
    auto [d, v] = queue.top();
    queue.pop();
    if (d > dist[v]) continue;
    for (const auto& e : adjacency_[v]) {
      double nd = d + e.weight;
      if (nd < dist[e.to]) {
        dist[e.to] = nd;
        queue.push({nd, e.to});
      }
    }
  }
  return dist;
}

std::vector<double> ModelMetric::distances_from(Vertex source) const {
  if (source >= size()) throw InvalidArgument("vertex out of range");
  auto dist = shortest_paths(source);
  for (auto& d : dist)
    if (d == kInf) d = sentinel_;
  return dist;
}

double ModelMetric::distance(Vertex a, Vertex b) const {
  if (a >= size() || b >= size()) throw InvalidArgument("vertex out of range");
  if (a == b) return 0.0;
  if (component_[a] != component_[b]) return sentinel_;
  std::unordered_map<Vertex, double> dist;
  MinQueue queue;
  dist[a] = 0.0;
  queue.push({0.0, a});
  while (!queue.empty()) {
    auto [d, v] = queue.top();
    queue.pop();
    if (v == b) return d;
    if (d > dist[v]) continue;
    for (const auto& e : adjacency_[v]) {
      double nd = d + e.weight;
      auto it = dist.find(e.to);
      if (it == dist.end() || nd < it->second) {
        dist[e.to] = nd;
        queue.push({nd, e.to});
      }
    }
  }
  return sentinel_;
}

template <typename Accept>
std::vector<std::pair<Vertex, double>> ModelMetric::truncated(Vertex center, Accept accept) const {
  if (center >= size()) throw InvalidArgument("vertex out of range");
  std::unordered_map<Vertex, double> dist;
  std::vector<std::pair<Vertex, double>> out;
  MinQueue queue;
  dist[center] = 0.0;
  queue.push({0.0, center});
  while (!queue.empty()) {
    auto [d, v] = queue.top();
    queue.pop();
    if (d > dist[v]) continue;
    out.emplace_back(v, d);
    for (const auto& e : adjacency_[v]) {
      double nd = d + e.weight;
      if (!accept(nd)) continue;
      auto it = dist.find(e.to);
      if (it == dist.end() || nd < it->second) {
        dist[e.to] = nd;
        queue.push({nd, e.to});
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::pair<Vertex, double>> ModelMetric::ball(Vertex center, double radius) const {
  auto out = truncated(center, [radius](double d) { return d <= radius + kMetricTol; });
  // Vertices in other components sit at M, which may itself fall inside a
  // very large radius.
  if (sentinel_ <= radius + kMetricTol) {
    for (std::size_t w = 0; w < size(); ++w)
      if (component_[w] != component_[center]) out.emplace_back(static_cast<Vertex>(w), sentinel_);
    std::sort(out.begin(), out.end());
  }
  return out;
}

std::vector<Vertex> ModelMetric::open_ball(Vertex center, double radius) const {
  auto within = truncated(center, [radius](double d) { return d < radius - kMetricTol; });
  std::vector<Vertex> out;
  out.reserve(within.size());
  for (const auto& [v, d] : within) out.push_back(v);
  if (sentinel_ < radius - kMetricTol)
    for (std::size_t w = 0; w < size(); ++w)
      if (component_[w] != component_[center]) out.push_back(static_cast<Vertex>(w));
  std::sort(out.begin(), out.end());
  return out;
}

std::size_t ModelMetric::ball_size(Vertex center, double radius) const {
  return ball(center, radius).size();
}

std::vector<std::tuple<Vertex, Vertex, double>> ModelMetric::edges() const {
  std::vector<std::tuple<Vertex, Vertex, double>> out;
  for (std::size_t v = 0; v < size(); ++v)
    for (const auto& e : adjacency_[v])
      if (v < e.to) out.emplace_back(static_cast<Vertex>(v), e.to, e.weight);
  std::sort(out.begin(), out.end());
  return out;
}

ModelMetric build_metric(const SoficMap& sigma, double r_edge, std::size_t ball_cap) {
  if (!(r_edge > 0.0)) throw InvalidArgument("R_edge must be positive");
  if (r_edge > sigma.budget() + kMetricTol)
    throw BudgetExceeded("R_edge " + std::to_string(r_edge) + " exceeds sofic budget " +
                         std::to_string(sigma.budget()));
  const std::size_t n = sigma.size();
  const auto& group = sigma.group();
  std::vector<std::map<Vertex, double>> weight(n);
  for (const auto& g : group.ball(r_edge, ball_cap)) {
    if (g.is_identity()) continue;
    double w = group.word_metric(g);
    Permutation p = sigma.permutation(g);
    for (std::size_t v = 0; v < n; ++v) {
      Vertex u = p(static_cast<Vertex>(v));
      if (u == v) continue;
      for (auto [a, b] : {std::pair{static_cast<Vertex>(v), u}, std::pair{u, static_cast<Vertex>(v)}}) {
        auto [it, inserted] = weight[a].emplace(b, w);
        if (!inserted) it->second = std::min(it->second, w);
      }
    }
  }
  std::vector<std::vector<WeightedEdge>> adjacency(n);
  for (std::size_t v = 0; v < n; ++v) {
    adjacency[v].reserve(weight[v].size());
    for (const auto& [u, w] : weight[v]) adjacency[v].push_back({u, w});
  }
  return ModelMetric(n, r_edge, std::move(adjacency));
}

SeparatedSet separated_set_greedy(const ModelMetric& metric, std::span<const Vertex> W, double r,
                                  std::span<const Vertex> order) {
  if (!(r > 0.0)) throw InvalidArgument("separation radius must be positive");
  const std::size_t n = metric.size();
  std::vector<char> in_w(n, 0);
  for (Vertex v : W) {
    if (v >= n) throw InvalidArgument("vertex out of range");
    in_w[v] = 1;
  }
  std::vector<Vertex> scan;
  if (order.empty()) {
    scan.assign(W.begin(), W.end());
    std::sort(scan.begin(), scan.end());
  } else {
    scan.assign(order.begin(), order.end());
  }
  SeparatedSet out;
  out.r = r;
  std::vector<char> blocked(n, 0);
  std::vector<char> seen(n, 0);
  for (Vertex v : scan) {
    if (v >= n || !in_w[v] || seen[v]) continue;
    seen[v] = 1;
    ++out.candidates;
    if (blocked[v]) continue;
    out.members.push_back(v);
    for (Vertex u : metric.open_ball(v, r)) blocked[u] = 1;
  }
  out.covers = true;
  for (Vertex v : W)
    if (!blocked[v]) out.covers = false;
  return out;
}

bool is_r_separated(const ModelMetric& metric, std::span<const Vertex> S, double r) {
  std::vector<char> member(metric.size(), 0);
  for (Vertex s : S) {
    if (member[s]) return false;  // duplicates are at distance 0
    member[s] = 1;
  }
  for (Vertex s : S)
    for (Vertex u : metric.open_ball(s, r))
      if (u != s && member[u]) return false;
  return true;
}

bool is_maximal_separated(const ModelMetric& metric, std::span<const Vertex> W,
                          std::span<const Vertex> S, double r) {
  std::vector<char> covered(metric.size(), 0);
  for (Vertex s : S)
    for (Vertex u : metric.open_ball(s, r)) covered[u] = 1;
  for (Vertex w : W)
    if (!covered[w]) return false;
  return true;
}

bool is_isometric_at(const SoficMap& sigma, const ModelMetric& metric, Vertex v, double r) {
  const auto& group = sigma.group();
  auto words = group.ball(r);
  std::vector<Vertex> image;
  image.reserve(words.size());
  for (const auto& g : words) image.push_back(sigma.act(g, v));
  for (std::size_t i = 0; i < words.size(); ++i) {
    auto dist = metric.distances_from(image[i]);
    for (std::size_t j = i + 1; j < words.size(); ++j)
      if (std::abs(dist[image[j]] - group.distance(words[i], words[j])) > kMetricTol) return false;
  }
  return true;
}

std::vector<Vertex> good_vertices(const SoficMap& sigma, const CosetDecomposition& decomposition,
                                  const PathPartition& paths) {
  if (paths.vertex_count != sigma.size())
    throw InvalidArgument("path partition and sofic map disagree on |V|");
  std::vector<Permutation> transversal = sigma.permutations(decomposition.transversal);
  std::vector<Permutation> enlarged = sigma.permutations(decomposition.enlarged);
  Permutation h = sigma.permutation(decomposition.h);
  auto mask = kernels::good_vertex_mask(enlarged, transversal, h, decomposition.lo,
                                        decomposition.hi, paths.path_index());
  return kernels::mask_members(mask);
}

std::vector<Vertex> injective_vertices(const SoficMap& sigma, std::span<const GroupWord> F) {
  return kernels::mask_members(kernels::injective_mask(sigma.permutations(F), sigma.size()));
}

std::string metric_edges_csv(const ModelMetric& metric) {
  std::ostringstream os;
  os.precision(17);
  os << "v,w,weight\n";
  for (const auto& [v, w, weight] : metric.edges()) os << v << ',' << w << ',' << weight << '\n';
  return os.str();
}

}  // namespace sofent
