#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "sofent/group.hpp"
#include "sofent/observable.hpp"
#include "sofent/permutation.hpp"
#include "sofent/types.hpp"

namespace sofent {

// A finite quasi-action sigma: G -> Sym(V) on V = {0, ..., n-1}.
//
// sigma is stored by its generator permutations and evaluated
// homomorphically: for a word s_1 s_2 ... s_k, sigma^g = sigma^{s_1} o ... o
// sigma^{s_k} (rightmost letter acts first). Z^d words are read as
// x_1^{e_1} ... x_d^{e_d}. An override table replaces the value on chosen
// words, which is how non-homomorphic maps are represented. Every evaluation
// is restricted to words with rho(g) <= budget.
class SoficMap {
 public:
  SoficMap(GroupPresentation group, std::size_t n, double budget,
           std::vector<Permutation> generators,
           std::map<GroupWord, Permutation> overrides = {});

  const GroupPresentation& group() const { return group_; }
  std::size_t size() const { return n_; }
  double budget() const { return budget_; }
  const std::vector<Permutation>& generators() const { return generators_; }
  const std::map<GroupWord, Permutation>& overrides() const { return overrides_; }
  bool homomorphic() const { return overrides_.empty(); }

  bool within_budget(const GroupWord& g) const;
  // Throws BudgetExceeded when rho(g) > budget.
  void check_budget(const GroupWord& g) const;

  Permutation permutation(const GroupWord& g) const;
  std::vector<Permutation> permutations(std::span<const GroupWord> F) const;
  Vertex act(const GroupWord& g, Vertex v) const;

  // Same map with a different radius budget.
  SoficMap with_budget(double budget) const;

 private:
  GroupPresentation group_;
  std::size_t n_;
  double budget_;
  std::vector<Permutation> generators_;
  std::vector<Permutation> inverses_;
  std::map<GroupWord, Permutation> overrides_;
};

// Default budget: twice the largest certification radius plus the window
// diameter.
double default_budget(double max_radius, double window_diameter);
double window_diameter(const GroupPresentation& group, std::span<const GroupWord> F);

SoficMap build_cycle_sofic(std::size_t n, double budget);
SoficMap build_torus_sofic(std::span<const std::size_t> dims, double budget,
                           std::vector<double> weights = {});
SoficMap build_random_sofic(const GroupPresentation& group, std::size_t n, std::uint64_t seed,
                            double budget);

// Mixed-radix torus indexing, coordinate 0 least significant.
Vertex torus_index(std::span<const std::size_t> dims, std::span<const std::int64_t> coords);
std::vector<std::int64_t> torus_coords(std::span<const std::size_t> dims, Vertex v);

// sigma^F(S), sorted and deduplicated.
std::vector<Vertex> orbit_image(const SoficMap& sigma, std::span<const GroupWord> F,
                                std::span<const Vertex> S);

// Pi^sigma_{v,F}(a)(g) = a(sigma^g . v), in the order of F.
Config pullback_name(const SoficMap& sigma, Vertex v, std::span<const GroupWord> F,
                     std::span<const Symbol> config);

// phi^sigma(a)(v) = theta(Pi^sigma_{v,F}(a)).
Config push_observable(const SoficMap& sigma, const LocalObservable& phi,
                       std::span<const Symbol> config);

struct PairDefect {
  GroupWord g;
  GroupWord g_prime;
  std::int64_t p_lo = 0;
  std::int64_t p_hi = 0;
  // Fraction of v with (sigma^g)^-1 (sigma^h)^p sigma^{g'} v = v for some p.
  double fixed_fraction = 0.0;
};

struct DefectReport {
  std::vector<GroupWord> F;
  // Fraction of v with g -> sigma^g . v injective on F.
  double injective_fraction = 1.0;
  std::optional<GroupWord> h;
  std::vector<PairDefect> pairs;
};

DefectReport defect_report(const SoficMap& sigma, std::span<const GroupWord> F);
// Adds the coset-pair fixed-point fractions for p in [p_lo, p_hi].
DefectReport defect_report(const SoficMap& sigma, std::span<const GroupWord> F,
                           const GroupWord& h,
                           std::span<const std::pair<GroupWord, GroupWord>> pairs,
                           std::int64_t p_lo, std::int64_t p_hi);

}  // namespace sofent
