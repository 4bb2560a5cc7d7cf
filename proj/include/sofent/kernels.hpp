#pragma once

#include <cstdint>
#include <exception>
#include <span>
#include <vector>

#include "sofent/observable.hpp"
#include "sofent/permutation.hpp"
#include "sofent/types.hpp"

namespace sofent {

class BlockProductMeasure;
class ModelMetric;

// Vertexwise loops. The top-level functions run under OpenMP; the versions in
// `serial` are straightforward single-threaded references used by the tests
// and the benchmark. Both take materialized permutations, so budget checks
// happen before any parallel region.
namespace kernels {

using Mask = std::vector<char>;

// Runs body(i) for i in [0, count) in parallel, rethrowing the first
// exception after the loop.
template <typename Body>
void parallel_for(std::size_t count, Body body) {
  std::exception_ptr error;
  const auto total = static_cast<std::int64_t>(count);
#pragma omp parallel for schedule(dynamic, 16)
  for (std::int64_t i = 0; i < total; ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
#pragma omp critical(sofent_kernel_error)
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
}

// v such that the images perms[0](v), perms[1](v), ... are pairwise distinct.
Mask injective_mask(std::span<const Permutation> perms, std::size_t n);

// phi^sigma(a)(v) = theta(a(perms[0](v)), ..., a(perms[m-1](v))).
Config push_observable(std::span<const Permutation> perms, const LocalObservable& phi,
                       std::span<const Symbol> config);

// v with g^-1 h^p g' v = v for some p in [p_lo, p_hi].
Mask coset_collision_mask(const Permutation& g, const Permutation& g_prime, const Permutation& h,
                          std::int64_t p_lo, std::int64_t p_hi);

// The three good-vertex conditions on F' = {h^i t_k}. `enlarged` is ordered
// k * |I| + (i - lo); path_index[v] is v's path or -1 for leftover vertices.
Mask good_vertex_mask(std::span<const Permutation> enlarged,
                      std::span<const Permutation> transversal, const Permutation& h,
                      std::int64_t lo, std::int64_t hi, std::span<const std::int64_t> path_index);

// |closed ball(v, r)| for each listed vertex.
std::vector<std::size_t> ball_sizes(const ModelMetric& metric, std::span<const Vertex> vertices,
                                    double r);

double block_entropy(const BlockProductMeasure& mu);

double mask_fraction(const Mask& mask);
std::vector<Vertex> mask_members(const Mask& mask);

namespace serial {

Mask injective_mask(std::span<const Permutation> perms, std::size_t n);
Config push_observable(std::span<const Permutation> perms, const LocalObservable& phi,
                       std::span<const Symbol> config);
Mask coset_collision_mask(const Permutation& g, const Permutation& g_prime, const Permutation& h,
                          std::int64_t p_lo, std::int64_t p_hi);
Mask good_vertex_mask(std::span<const Permutation> enlarged,
                      std::span<const Permutation> transversal, const Permutation& h,
                      std::int64_t lo, std::int64_t hi, std::span<const std::int64_t> path_index);
std::vector<std::size_t> ball_sizes(const ModelMetric& metric, std::span<const Vertex> vertices,
                                    double r);
double block_entropy(const BlockProductMeasure& mu);

}  // namespace serial

// Number of OpenMP threads in use (1 when OpenMP is unavailable).
int thread_count();
void set_thread_count(int threads);

}  // namespace kernels
}  // namespace sofent
