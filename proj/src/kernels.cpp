#include "sofent/kernels.hpp"

#include <omp.h>

#include <algorithm>
#include <exception>
#include <map>
#include <set>

#include "sofent/error.hpp"
#include "sofent/measures.hpp"
#include "sofent/modelmetric.hpp"

namespace sofent::kernels {

namespace {

void require_sizes(std::span<const Permutation> perms, std::size_t n) {
  for (const auto& p : perms)
    if (p.size() != n) throw InvalidArgument("permutation size mismatch");
}

bool distinct_images(std::span<const Permutation> perms, Vertex v, std::vector<Vertex>& scratch) {
  scratch.clear();
  for (const auto& p : perms) scratch.push_back(p(v));
  std::sort(scratch.begin(), scratch.end());
  return std::adjacent_find(scratch.begin(), scratch.end()) == scratch.end();
}

double law_entropy_sum(const BlockProductMeasure& mu, const std::vector<double>& law_entropy) {
  std::vector<std::size_t> uses(law_entropy.size(), 0);
  for (const auto& b : mu.blocks()) ++uses[b.law];
  double h = 0.0;
  for (std::size_t l = 0; l < uses.size(); ++l) h += static_cast<double>(uses[l]) * law_entropy[l];
  return h;
}

}  // namespace

Mask injective_mask(std::span<const Permutation> perms, std::size_t n) {
  require_sizes(perms, n);
  Mask mask(n, 0);
#pragma omp parallel
  {
    std::vector<Vertex> scratch;
    scratch.reserve(perms.size());
#pragma omp for schedule(static)
    for (std::int64_t v = 0; v < static_cast<std::int64_t>(n); ++v)
      mask[v] = distinct_images(perms, static_cast<Vertex>(v), scratch) ? 1 : 0;
  }
  return mask;
}

Config push_observable(std::span<const Permutation> perms, const LocalObservable& phi,
                       std::span<const Symbol> config) {
  const std::size_t n = config.size();
  require_sizes(perms, n);
  if (perms.size() != phi.window().size()) throw InvalidArgument("window size mismatch");
  const std::size_t q = phi.input_alphabet();
  for (Symbol s : config)
    if (s >= q) throw InvalidArgument("configuration symbol outside the observable's alphabet");
  Config out(n);
  parallel_for(n, [&](std::size_t v) {
    std::size_t index = 0;
    for (std::size_t j = perms.size(); j-- > 0;) index = index * q + config[perms[j](static_cast<Vertex>(v))];
    out[v] = phi.at_index(index);
  });
  return out;
}

Mask coset_collision_mask(const Permutation& g, const Permutation& g_prime, const Permutation& h,
                          std::int64_t p_lo, std::int64_t p_hi) {
  const std::size_t n = g.size();
  if (g_prime.size() != n || h.size() != n) throw InvalidArgument("permutation size mismatch");
  if (p_lo > p_hi) throw InvalidArgument("empty p-range");
  const Permutation start = h.pow(p_lo);
  Mask mask(n, 0);
#pragma omp parallel for schedule(static)
  for (std::int64_t v = 0; v < static_cast<std::int64_t>(n); ++v) {
    const Vertex target = g(static_cast<Vertex>(v));
    Vertex u = start(g_prime(static_cast<Vertex>(v)));
    for (std::int64_t p = p_lo;; ++p) {
      if (u == target) {
        mask[v] = 1;
        break;
      }
      if (p == p_hi) break;
      u = h(u);
    }
  }
  return mask;
}

Mask good_vertex_mask(std::span<const Permutation> enlarged,
                      std::span<const Permutation> transversal, const Permutation& h,
                      std::int64_t lo, std::int64_t hi, std::span<const std::int64_t> path_index) {
  const std::size_t n = h.size();
  const std::size_t width = static_cast<std::size_t>(hi - lo + 1);
  const std::size_t m = transversal.size();
  if (hi < lo || enlarged.size() != m * width) throw InvalidArgument("F' layout mismatch");
  if (path_index.size() != n) throw InvalidArgument("path index size mismatch");
  require_sizes(enlarged, n);
  require_sizes(transversal, n);
  const Permutation h_lo = h.pow(lo);
  Mask mask(n, 0);
#pragma omp parallel
  {
    std::vector<Vertex> scratch;
    std::vector<std::int64_t> coset_path(m);
#pragma omp for schedule(static)
    for (std::int64_t vi = 0; vi < static_cast<std::int64_t>(n); ++vi) {
      const auto v = static_cast<Vertex>(vi);
      bool good = distinct_images(enlarged, v, scratch);
      for (std::size_t k = 0; good && k < m; ++k) {
        Vertex walk = h_lo(transversal[k](v));
        coset_path[k] = path_index[walk];
        for (std::size_t i = 0; i < width; ++i) {
          Vertex image = enlarged[k * width + i](v);
          if (image != walk || path_index[image] < 0 || path_index[image] != coset_path[k]) {
            good = false;
            break;
          }
          walk = h(walk);
        }
      }
      for (std::size_t k = 0; good && k < m; ++k)
        for (std::size_t k2 = k + 1; k2 < m; ++k2)
          if (coset_path[k] == coset_path[k2]) {
            good = false;
            break;
          }
      mask[vi] = good ? 1 : 0;
    }
  }
  return mask;
}

std::vector<std::size_t> ball_sizes(const ModelMetric& metric, std::span<const Vertex> vertices,
                                    double r) {
  std::vector<std::size_t> out(vertices.size());
  parallel_for(vertices.size(), [&](std::size_t i) { out[i] = metric.ball_size(vertices[i], r); });
  return out;
}

double block_entropy(const BlockProductMeasure& mu) {
  std::vector<double> law_entropy(mu.laws().size());
  parallel_for(law_entropy.size(), [&](std::size_t l) { law_entropy[l] = entropy(mu.laws()[l]); });
  return law_entropy_sum(mu, law_entropy);
}

double mask_fraction(const Mask& mask) {
  if (mask.empty()) return 0.0;
  std::size_t count = 0;
  for (char c : mask) count += c ? 1 : 0;
  return static_cast<double>(count) / static_cast<double>(mask.size());
}

std::vector<Vertex> mask_members(const Mask& mask) {
  std::vector<Vertex> out;
  for (std::size_t v = 0; v < mask.size(); ++v)
    if (mask[v]) out.push_back(static_cast<Vertex>(v));
  return out;
}

int thread_count() { return omp_get_max_threads(); }

void set_thread_count(int threads) {
  if (threads < 1) throw InvalidArgument("thread count must be positive");
  omp_set_num_threads(threads);
}

namespace serial {

Mask injective_mask(std::span<const Permutation> perms, std::size_t n) {
  require_sizes(perms, n);
  Mask mask(n, 1);
  for (std::size_t v = 0; v < n; ++v) {
    std::set<Vertex> seen;
    for (const auto& p : perms)
      if (!seen.insert(p(static_cast<Vertex>(v))).second) mask[v] = 0;
  }
  return mask;
}

Config push_observable(std::span<const Permutation> perms, const LocalObservable& phi,
                       std::span<const Symbol> config) {
  require_sizes(perms, config.size());
  Config out(config.size());
  std::vector<Symbol> pattern(perms.size());
  for (std::size_t v = 0; v < config.size(); ++v) {
    for (std::size_t j = 0; j < perms.size(); ++j) pattern[j] = config[perms[j](static_cast<Vertex>(v))];
    out[v] = phi(pattern);
  }
  return out;
}

Mask coset_collision_mask(const Permutation& g, const Permutation& g_prime, const Permutation& h,
                          std::int64_t p_lo, std::int64_t p_hi) {
  const std::size_t n = g.size();
  Mask mask(n, 0);
  const Permutation g_inv = g.inverse();
  for (std::int64_t p = p_lo; p <= p_hi; ++p) {
    const Permutation loop = compose(g_inv, compose(h.pow(p), g_prime));
    for (std::size_t v = 0; v < n; ++v)
      if (loop(static_cast<Vertex>(v)) == v) mask[v] = 1;
  }
  return mask;
}

Mask good_vertex_mask(std::span<const Permutation> enlarged,
                      std::span<const Permutation> transversal, const Permutation& h,
                      std::int64_t lo, std::int64_t hi, std::span<const std::int64_t> path_index) {
  const std::size_t n = h.size();
  const std::size_t width = static_cast<std::size_t>(hi - lo + 1);
  const std::size_t m = transversal.size();
  Mask mask = serial::injective_mask(enlarged, n);
  for (std::size_t v = 0; v < n; ++v) {
    if (!mask[v]) continue;
    for (std::size_t k = 0; k < m && mask[v]; ++k)
      for (std::int64_t i = lo; i <= hi; ++i) {
        Vertex image = enlarged[k * width + static_cast<std::size_t>(i - lo)](static_cast<Vertex>(v));
        if (image != h.pow(i)(transversal[k](static_cast<Vertex>(v))) || path_index[image] < 0) {
          mask[v] = 0;
          break;
        }
      }
    // Images of g, g' share a path iff they share a coset.
    for (std::size_t a = 0; a < enlarged.size() && mask[v]; ++a)
      for (std::size_t b = a + 1; b < enlarged.size(); ++b) {
        bool same_path = path_index[enlarged[a](static_cast<Vertex>(v))] ==
                         path_index[enlarged[b](static_cast<Vertex>(v))];
        if (same_path != (a / width == b / width)) {
          mask[v] = 0;
          break;
        }
      }
  }
  return mask;
}

std::vector<std::size_t> ball_sizes(const ModelMetric& metric, std::span<const Vertex> vertices,
                                    double r) {
  std::vector<std::size_t> out;
  out.reserve(vertices.size());
  for (Vertex v : vertices) {
    std::size_t count = 0;
    for (double d : metric.distances_from(v))
      if (d <= r + kMetricTol) ++count;
    out.push_back(count);
  }
  return out;
}

double block_entropy(const BlockProductMeasure& mu) {
  double h = 0.0;
  for (const auto& b : mu.blocks()) h += entropy(mu.laws()[b.law]);
  return h;
}

}  // namespace serial

}  // namespace sofent::kernels
