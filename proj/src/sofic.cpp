#include "sofent/sofic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "sofent/error.hpp"
#include "sofent/kernels.hpp"
#include "sofent/rng.hpp"

namespace sofent {

SoficMap::SoficMap(GroupPresentation group, std::size_t n, double budget,
                   std::vector<Permutation> generators, std::map<GroupWord, Permutation> overrides)
    : group_(std::move(group)),
      n_(n),
      budget_(budget),
      generators_(std::move(generators)),
      overrides_(std::move(overrides)) {
  if (n_ < 1) throw InvalidArgument("sofic map needs at least one vertex");
  if (n_ > std::numeric_limits<Vertex>::max()) throw InvalidArgument("vertex count overflows");
  if (!(budget_ >= 0.0)) throw InvalidArgument("budget must be nonnegative");
  if (generators_.size() != static_cast<std::size_t>(group_.rank()))
    throw InvalidArgument("sofic map needs one permutation per generator");
  for (const auto& p : generators_)
    if (p.size() != n_) throw InvalidArgument("generator permutation has wrong size");
  for (const auto& [g, p] : overrides_) {
    group_.require(g);
    if (p.size() != n_) throw InvalidArgument("override permutation has wrong size");
    if (!within_budget(g))
      throw BudgetExceeded("override word " + word_key(g) + " lies outside the radius budget");
    if (g.is_identity() && !p.is_identity())
      throw InvalidArgument("override for the identity must be the identity permutation");
  }
  inverses_.reserve(generators_.size());
  for (const auto& p : generators_) inverses_.push_back(p.inverse());
}

bool SoficMap::within_budget(const GroupWord& g) const {
  return group_.word_metric(g) <= budget_ + kMetricTol;
}

void SoficMap::check_budget(const GroupWord& g) const {
  if (!within_budget(g))
    throw BudgetExceeded("word " + word_key(g) + " has rho = " +
                         std::to_string(group_.word_metric(g)) + " > budget " +
                         std::to_string(budget_));
}

Permutation SoficMap::permutation(const GroupWord& g) const {
  check_budget(g);
  if (auto it = overrides_.find(g); it != overrides_.end()) return it->second;
  Permutation result = Permutation::identity(n_);
  if (g.kind() == GroupKind::FreeAbelian) {
    for (std::size_t i = 0; i < g.exponents().size(); ++i)
      if (g.exponents()[i] != 0) result = compose(result, generators_[i].pow(g.exponents()[i]));
  } else {
    for (const auto& s : g.syllables())
      result = compose(result, generators_[static_cast<std::size_t>(s.generator)].pow(s.exponent));
  }
  return result;
}

std::vector<Permutation> SoficMap::permutations(std::span<const GroupWord> F) const {
  std::vector<Permutation> out;
  out.reserve(F.size());
  for (const auto& g : F) out.push_back(permutation(g));
  return out;
}

Vertex SoficMap::act(const GroupWord& g, Vertex v) const {
  check_budget(g);
  if (v >= n_) throw InvalidArgument("vertex out of range");
  if (auto it = overrides_.find(g); it != overrides_.end()) return it->second(v);
  auto apply = [&](std::size_t gen, std::int64_t e) {
    const Permutation& p = e > 0 ? generators_[gen] : inverses_[gen];
    for (std::int64_t k = 0; k < std::abs(e); ++k) v = p(v);
  };
  if (g.kind() == GroupKind::FreeAbelian) {
    for (std::size_t i = g.exponents().size(); i-- > 0;) apply(i, g.exponents()[i]);
  } else {
    const auto& syl = g.syllables();
    for (std::size_t i = syl.size(); i-- > 0;)
      apply(static_cast<std::size_t>(syl[i].generator), syl[i].exponent);
  }
  return v;
}

SoficMap SoficMap::with_budget(double budget) const {
  return SoficMap(group_, n_, budget, generators_, overrides_);
}

double default_budget(double max_radius, double window_diameter) {
  return 2.0 * max_radius + window_diameter;
}

double window_diameter(const GroupPresentation& group, std::span<const GroupWord> F) {
  double d = 0.0;
  for (const auto& a : F)
    for (const auto& b : F) d = std::max(d, group.distance(a, b));
  return d;
}

SoficMap build_cycle_sofic(std::size_t n, double budget) {
  if (n < 1) throw InvalidArgument("cycle length must be positive");
  return SoficMap(GroupPresentation::integers(), n, budget, {Permutation::cycle(n)});
}

SoficMap build_torus_sofic(std::span<const std::size_t> dims, double budget,
                           std::vector<double> weights) {
  if (dims.empty()) throw InvalidArgument("torus needs at least one dimension");
  std::size_t n = 1;
  for (std::size_t d : dims) {
    if (d < 1) throw InvalidArgument("torus side lengths must be positive");
    if (n > std::numeric_limits<Vertex>::max() / d)
      throw InvalidArgument("torus vertex count overflows");
    n *= d;
  }
  std::vector<Permutation> gens;
  std::vector<std::int64_t> coords(dims.size());
  for (std::size_t axis = 0; axis < dims.size(); ++axis) {
    std::vector<Vertex> img(n);
    for (std::size_t v = 0; v < n; ++v) {
      auto c = torus_coords(dims, static_cast<Vertex>(v));
      c[axis] = (c[axis] + 1) % static_cast<std::int64_t>(dims[axis]);
      img[v] = torus_index(dims, c);
    }
    gens.emplace_back(std::move(img));
  }
  GroupPresentation group(GroupKind::FreeAbelian, static_cast<int>(dims.size()), std::move(weights));
  return SoficMap(std::move(group), n, budget, std::move(gens));
}

SoficMap build_random_sofic(const GroupPresentation& group, std::size_t n, std::uint64_t seed,
                            double budget) {
  if (group.kind() != GroupKind::Free)
    throw InvalidArgument("random sofic maps are built for free groups only");
  if (n < 1) throw InvalidArgument("vertex count must be positive");
  Rng rng(seed);
  std::vector<Permutation> gens;
  for (int i = 0; i < group.rank(); ++i) {
    std::vector<Vertex> img(n);
    for (std::size_t v = 0; v < n; ++v) img[v] = static_cast<Vertex>(v);
    rng.shuffle(img);
    gens.emplace_back(std::move(img));
  }
  return SoficMap(group, n, budget, std::move(gens));
}

Vertex torus_index(std::span<const std::size_t> dims, std::span<const std::int64_t> coords) {
  if (coords.size() != dims.size()) throw InvalidArgument("torus coordinate rank mismatch");
  std::uint64_t index = 0;
  for (std::size_t i = dims.size(); i-- > 0;) {
    auto d = static_cast<std::int64_t>(dims[i]);
    std::int64_t c = ((coords[i] % d) + d) % d;
    index = index * dims[i] + static_cast<std::uint64_t>(c);
  }
  return static_cast<Vertex>(index);
}

std::vector<std::int64_t> torus_coords(std::span<const std::size_t> dims, Vertex v) {
  std::vector<std::int64_t> out(dims.size());
  std::uint64_t rest = v;
  for (std::size_t i = 0; i < dims.size(); ++i) {
    out[i] = static_cast<std::int64_t>(rest % dims[i]);
    rest /= dims[i];
  }
  return out;
}

std::vector<Vertex> orbit_image(const SoficMap& sigma, std::span<const GroupWord> F,
                                std::span<const Vertex> S) {
  auto perms = sigma.permutations(F);
  std::vector<Vertex> out;
  out.reserve(F.size() * S.size());
  for (const auto& p : perms)
    for (Vertex s : S) {
      if (s >= sigma.size()) throw InvalidArgument("vertex out of range");
      out.push_back(p(s));
    }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

Config pullback_name(const SoficMap& sigma, Vertex v, std::span<const GroupWord> F,
                     std::span<const Symbol> config) {
  if (config.size() != sigma.size()) throw InvalidArgument("configuration size != |V|");
  Config out;
  out.reserve(F.size());
  for (const auto& g : F) out.push_back(config[sigma.act(g, v)]);
  return out;
}

Config push_observable(const SoficMap& sigma, const LocalObservable& phi,
                       std::span<const Symbol> config) {
  if (config.size() != sigma.size()) throw InvalidArgument("configuration size != |V|");
  auto perms = sigma.permutations(phi.window());
  return kernels::push_observable(perms, phi, config);
}

DefectReport defect_report(const SoficMap& sigma, std::span<const GroupWord> F) {
  DefectReport report;
  report.F.assign(F.begin(), F.end());
  auto perms = sigma.permutations(F);
  auto mask = kernels::injective_mask(perms, sigma.size());
  report.injective_fraction = kernels::mask_fraction(mask);
  return report;
}

DefectReport defect_report(const SoficMap& sigma, std::span<const GroupWord> F,
                           const GroupWord& h,
                           std::span<const std::pair<GroupWord, GroupWord>> pairs,
                           std::int64_t p_lo, std::int64_t p_hi) {
  if (p_lo > p_hi) throw InvalidArgument("empty p-range");
  DefectReport report = defect_report(sigma, F);
  report.h = h;
  const auto& group = sigma.group();
  Permutation ph = sigma.permutation(h);
  for (const auto& [g, gp] : pairs) {
    if (group.same_right_coset(g, gp, h))
      throw InvalidArgument("pair (" + word_key(g) + ", " + word_key(gp) +
                            ") lies in one right coset of <h>");
    auto mask = kernels::coset_collision_mask(sigma.permutation(g), sigma.permutation(gp), ph,
                                              p_lo, p_hi);
    report.pairs.push_back({g, gp, p_lo, p_hi, kernels::mask_fraction(mask)});
  }
  return report;
}

}  // namespace sofent
