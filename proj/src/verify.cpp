#include "sofent/verify.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "sofent/error.hpp"
#include "sofent/kernels.hpp"
#include "sofent/rng.hpp"

namespace sofent {

namespace {

constexpr double kEntropyTol = 1e-9;

std::size_t position_in(const std::vector<Vertex>& sorted, Vertex v) {
  return static_cast<std::size_t>(std::lower_bound(sorted.begin(), sorted.end(), v) - sorted.begin());
}

void require_full_sites(const Measure& mu, std::size_t n) {
  const auto& sites = sites_of(mu);
  if (sites.size() != n || (n > 0 && sites.back() != n - 1))
    throw InvalidArgument("measure sites must be the vertex set {0, ..., n-1}");
}

SetResult evaluate_set(const Measure& mu, const SoficMap& sigma, const ModelMetric& metric,
                       std::span<const GroupWord> F, std::span<const Vertex> W, double r,
                       double target, std::string origin, std::vector<Vertex> members) {
  SetResult out;
  out.origin = std::move(origin);
  out.members = std::move(members);
  out.target = target;
  out.separated = is_r_separated(metric, out.members, r);
  out.maximal = is_maximal_separated(metric, W, out.members, r);
  if (!out.separated) return out;
  auto orbit = orbit_image(sigma, F, out.members);
  out.orbit_size = orbit.size();
  out.entropy = entropy(marginal(mu, orbit));
  const double size = static_cast<double>(out.members.size());
  out.ratio = out.members.empty() ? 0.0 : out.entropy / size;
  out.pass = out.entropy >= size * target - kEntropyTol * std::max(1.0, size);
  return out;
}

}  // namespace

MixingCertificate certify_uniform_model_mixing(const Measure& mu, const SoficMap& sigma,
                                               const ModelMetric& metric,
                                               const ProcessOracle& process,
                                               std::span<const GroupWord> F, double eps, double r,
                                               std::span<const Vertex> W,
                                               const std::string& window_description,
                                               const SetSampler& sampler) {
  if (!(eps > 0.0)) throw InvalidArgument("epsilon must be positive");
  if (!(r > 0.0)) throw InvalidArgument("r must be positive");
  if (!(r < metric.r_edge())) throw InvalidArgument("r must be smaller than the metric's R_edge");
  if (F.empty()) throw InvalidArgument("F must be nonempty");
  if (metric.size() != sigma.size()) throw InvalidArgument("metric and sofic map disagree on |V|");
  require_full_sites(mu, sigma.size());

  MixingCertificate cert;
  cert.F.assign(F.begin(), F.end());
  cert.epsilon = eps;
  cert.r = r;
  cert.window_description = window_description;
  cert.window_size = W.size();
  cert.process_entropy = process.marginal_entropy(F);
  const double target = cert.process_entropy - eps;

  std::vector<std::pair<std::string, std::vector<Vertex>>> candidates;
  std::vector<Vertex> order(W.begin(), W.end());
  std::sort(order.begin(), order.end());
  if (sampler.ascending) candidates.emplace_back("ascending", separated_set_greedy(metric, W, r, order).members);
  if (sampler.descending) {
    std::vector<Vertex> desc(order.rbegin(), order.rend());
    candidates.emplace_back("descending", separated_set_greedy(metric, W, r, desc).members);
  }
  Rng rng(sampler.seed);
  for (std::size_t i = 0; i < sampler.random_orders; ++i) {
    std::vector<Vertex> shuffled = order;
    rng.shuffle(shuffled);
    candidates.emplace_back("random:" + std::to_string(i),
                            separated_set_greedy(metric, W, r, shuffled).members);
  }
  for (std::size_t i = 0; i < sampler.user_sets.size(); ++i) {
    std::vector<Vertex> s = sampler.user_sets[i];
    std::sort(s.begin(), s.end());
    if (!is_r_separated(metric, s, r))
      throw InvalidArgument("user set " + std::to_string(i) + " is not r-separated");
    candidates.emplace_back("user:" + std::to_string(i), std::move(s));
  }

  cert.sets.resize(candidates.size());
  kernels::parallel_for(candidates.size(), [&](std::size_t i) {
    cert.sets[i] = evaluate_set(mu, sigma, metric, F, W, r, target, candidates[i].first,
                                std::move(candidates[i].second));
  });
  cert.pass = !cert.sets.empty() &&
              std::all_of(cert.sets.begin(), cert.sets.end(), [](const SetResult& s) { return s.pass; });
  return cert;
}

Lemma1Report lemma1_bound_check(const ExplicitMeasure& mu, double eps) {
  if (!(eps > 0.0 && eps <= 0.5)) throw InvalidArgument("epsilon must lie in (0, 1/2]");
  Lemma1Report out;
  out.sites = mu.sites().size();
  out.epsilon = eps;
  out.entropy = entropy(mu);
  out.cov = cov_epsilon(mu, eps);
  out.log_cov = std::log(static_cast<double>(out.cov));
  out.log_universe = static_cast<double>(out.sites) * std::log(static_cast<double>(mu.alphabet()));
  out.h_epsilon = binary_entropy(eps);
  out.bound = out.log_cov + eps * out.log_universe + out.h_epsilon;
  out.pass = out.entropy <= out.bound + kEntropyTol;
  return out;
}

std::vector<Lemma1Row> lemma1_sequence(std::span<const ExplicitMeasure> measures, double eps) {
  std::vector<Lemma1Row> rows;
  for (const auto& mu : measures) {
    auto rep = lemma1_bound_check(mu, eps);
    const double n = std::max<double>(1.0, static_cast<double>(rep.sites));
    rows.push_back({rep.sites, rep.entropy / n, rep.log_cov / n, rep.pass});
  }
  return rows;
}

Lemma4Report lemma4_chain_check(const Measure& mu, const SoficMap& sigma,
                                const LocalObservable& phi, std::span<const Vertex> S,
                                std::size_t cap) {
  std::vector<Vertex> members(S.begin(), S.end());
  std::sort(members.begin(), members.end());
  members.erase(std::unique(members.begin(), members.end()), members.end());
  const auto& F = phi.window();
  auto orbit = orbit_image(sigma, F, members);
  ExplicitMeasure local = to_explicit(marginal(mu, orbit), cap);

  // Positions inside `local` of sigma^g s, per s in window order.
  std::vector<std::vector<std::size_t>> pattern_positions;
  for (Vertex s : members) {
    std::vector<std::size_t> pos;
    for (const auto& g : F) pos.push_back(position_in(orbit, sigma.act(g, s)));
    pattern_positions.push_back(std::move(pos));
  }
  auto theta_at = [&phi](const Config& c, const std::vector<std::size_t>& pos) {
    Config pattern(pos.size());
    for (std::size_t i = 0; i < pos.size(); ++i) pattern[i] = c[pos[i]];
    return phi(pattern);
  };
  Observable beta = [&](const Config& c) {
    Config out;
    for (const auto& pos : pattern_positions) out.push_back(theta_at(c, pos));
    return out;
  };

  Lemma4Report out;
  out.S = members;
  out.h_alpha = entropy(local);
  out.h_beta = entropy(pushforward(local, beta));
  for (const auto& pos : pattern_positions) {
    Observable alpha_s = coordinate_observable(pos);
    Observable beta_s = [&, pos](const Config& c) { return Config{theta_at(c, pos)}; };
    out.sum_conditional += conditional_entropy(local, alpha_s, beta_s);
  }
  out.rhs = out.h_beta + out.sum_conditional;
  out.slack = out.rhs - out.h_alpha;
  out.pass = out.h_alpha <= out.rhs + kEntropyTol;
  return out;
}

ExplicitMeasure pullback_marginal(const Measure& mu, const SoficMap& sigma, Vertex v,
                                  std::span<const GroupWord> F, std::size_t cap) {
  std::vector<Vertex> images;
  images.reserve(F.size());
  for (const auto& g : F) images.push_back(sigma.act(g, v));
  std::vector<Vertex> unique = images;
  std::sort(unique.begin(), unique.end());
  unique.erase(std::unique(unique.begin(), unique.end()), unique.end());
  ExplicitMeasure local = to_explicit(marginal(mu, unique), cap);
  std::vector<std::size_t> pos;
  for (Vertex w : images) pos.push_back(position_in(unique, w));
  std::vector<std::pair<Config, double>> atoms;
  atoms.reserve(local.atoms().size());
  for (const auto& [c, p] : local.atoms()) {
    Config d(pos.size());
    for (std::size_t i = 0; i < pos.size(); ++i) d[i] = c[pos[i]];
    atoms.emplace_back(std::move(d), p);
  }
  std::vector<Vertex> sites(F.size());
  std::iota(sites.begin(), sites.end(), Vertex{0});
  return ExplicitMeasure(local.alphabet(), std::move(sites), std::move(atoms));
}

ConvergenceReport diagnose_local_convergence(const Measure& mu, const ProcessOracle& process,
                                             const SoficMap& sigma, std::span<const GroupWord> F,
                                             double delta, std::size_t sample_budget,
                                             std::uint64_t seed, std::size_t cap) {
  if (!(delta > 0.0)) throw InvalidArgument("delta must be positive");
  require_full_sites(mu, sigma.size());
  for (const auto& g : F) sigma.check_budget(g);
  ConvergenceReport out;
  out.F.assign(F.begin(), F.end());
  out.delta = delta;
  const ExplicitMeasure target = process.explicit_marginal(F, cap);

  const std::size_t n = sigma.size();
  if (sample_budget == 0 || sample_budget >= n) {
    out.vertices.resize(n);
    std::iota(out.vertices.begin(), out.vertices.end(), Vertex{0});
  } else {
    std::vector<Vertex> all(n);
    std::iota(all.begin(), all.end(), Vertex{0});
    Rng rng(seed);
    rng.shuffle(all);
    out.vertices.assign(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(sample_budget));
    std::sort(out.vertices.begin(), out.vertices.end());
  }
  out.tv.resize(out.vertices.size());
  kernels::parallel_for(out.vertices.size(), [&](std::size_t i) {
    out.tv[i] = total_variation(pullback_marginal(mu, sigma, out.vertices[i], F, cap), target);
  });
  out.examined = out.vertices.size();
  out.histogram.assign(10, 0);
  for (double tv : out.tv) {
    if (tv < delta) ++out.below_delta;
    if (tv <= kZeroTv) ++out.zero_tv;
    out.max_tv = std::max(out.max_tv, tv);
    ++out.histogram[std::min<std::size_t>(9, static_cast<std::size_t>(tv * 10.0))];
  }
  if (out.examined > 0) {
    out.fraction = static_cast<double>(out.below_delta) / static_cast<double>(out.examined);
    out.zero_fraction = static_cast<double>(out.zero_tv) / static_cast<double>(out.examined);
  }
  return out;
}

namespace {

// Union-find over block indices.
struct Components {
  std::vector<std::size_t> parent;
  explicit Components(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void join(std::size_t a, std::size_t b) { parent[find(a)] = find(b); }
};

// Exact H(psi^sigma_* mu), splitting a block-product measure into groups of
// vertices whose outputs share blocks. Throws CapExceeded when a group cannot
// be enumerated.
double exact_pushforward_entropy(const Measure& mu, const SoficMap& sigma,
                                 const LocalObservable& psi, std::size_t cap) {
  const std::size_t n = sigma.size();
  const auto perms = sigma.permutations(psi.window());
  if (const auto* e = std::get_if<ExplicitMeasure>(&mu)) {
    std::map<Config, double> dist;
    for (const auto& [c, p] : e->atoms()) dist[kernels::push_observable(perms, psi, c)] += p;
    return entropy(dist);
  }
  const auto& bp = std::get<BlockProductMeasure>(mu);
  Components comp(bp.blocks().size());
  std::vector<std::vector<std::size_t>> touched(n);
  for (std::size_t v = 0; v < n; ++v) {
    for (const auto& p : perms) {
      auto loc = bp.locate(p(static_cast<Vertex>(v)));
      if (!loc.filler) touched[v].push_back(loc.block);
    }
    for (std::size_t i = 1; i < touched[v].size(); ++i) comp.join(touched[v][0], touched[v][i]);
  }
  std::map<std::size_t, std::vector<Vertex>> groups;
  for (std::size_t v = 0; v < n; ++v)
    if (!touched[v].empty()) groups[comp.find(touched[v][0])].push_back(static_cast<Vertex>(v));

  std::vector<std::vector<Vertex>> list;
  for (auto& [root, members] : groups) list.push_back(std::move(members));
  std::vector<double> h(list.size(), 0.0);
  kernels::parallel_for(list.size(), [&](std::size_t gi) {
    const auto& members = list[gi];
    std::vector<Vertex> sites;
    for (Vertex v : members)
      for (const auto& p : perms) sites.push_back(p(v));
    std::sort(sites.begin(), sites.end());
    sites.erase(std::unique(sites.begin(), sites.end()), sites.end());
    ExplicitMeasure local = to_explicit(marginal(bp, sites), cap);
    std::vector<std::vector<std::size_t>> pos;
    for (Vertex v : members) {
      std::vector<std::size_t> row;
      for (const auto& p : perms) row.push_back(position_in(sites, p(v)));
      pos.push_back(std::move(row));
    }
    std::map<Config, double> dist;
    Config pattern(perms.size());
    for (const auto& [c, pr] : local.atoms()) {
      Config out(members.size());
      for (std::size_t i = 0; i < members.size(); ++i) {
        for (std::size_t j = 0; j < pattern.size(); ++j) pattern[j] = c[pos[i][j]];
        out[i] = psi(pattern);
      }
      dist[out] += pr;
    }
    h[gi] = entropy(dist);
  });
  return std::accumulate(h.begin(), h.end(), 0.0);
}

}  // namespace

Theorem1Report theorem1_report(const Measure& mu, const SoficMap& sigma, const ModelMetric& metric,
                               const ProcessOracle& process, const LocalObservable& psi,
                               std::span<const Vertex> W, double eps, double r, std::size_t cap,
                               std::size_t samples, std::uint64_t seed) {
  if (!(eps > 0.0)) throw InvalidArgument("epsilon must be positive");
  if (!(r > 0.0)) throw InvalidArgument("r must be positive");
  const std::size_t n = sigma.size();
  require_full_sites(mu, n);
  Theorem1Report out;
  out.r = r;
  out.epsilon = eps;
  out.vertices = n;
  out.window_size = W.size();
  out.K = sigma.group().ball(r).size();

  std::vector<Vertex> all(n);
  std::iota(all.begin(), all.end(), Vertex{0});
  auto sizes = kernels::ball_sizes(metric, all, r);
  std::vector<char> small(n, 0);
  for (std::size_t v = 0; v < n; ++v)
    if (sizes[v] <= out.K) {
      small[v] = 1;
      ++out.small_balls;
    }
  std::vector<Vertex> Y;
  for (Vertex v : W)
    if (v < n && small[v]) Y.push_back(v);
  std::sort(Y.begin(), Y.end());
  Y.erase(std::unique(Y.begin(), Y.end()), Y.end());
  out.y_size = Y.size();
  auto S = separated_set_greedy(metric, Y, r);
  out.s_size = S.members.size();
  out.separated = is_r_separated(metric, S.members, r);
  out.covering_pass = out.s_size * out.K >= out.y_size;

  ExplicitMeasure window_law = process.explicit_marginal(psi.window(), cap);
  out.process_entropy = entropy(pushforward(window_law, [&psi](const Config& c) {
    return Config{psi(c)};
  }));

  try {
    out.pushforward_entropy = exact_pushforward_entropy(mu, sigma, psi, cap);
    out.exact = true;
  } catch (const CapExceeded&) {
    if (samples == 0) throw;
    Rng rng(seed);
    const auto perms = sigma.permutations(psi.window());
    std::map<Config, std::size_t> counts;
    for (std::size_t i = 0; i < samples; ++i)
      ++counts[kernels::push_observable(perms, psi, sample(mu, rng))];
    std::map<Config, double> dist;
    for (const auto& [c, k] : counts) dist[c] = static_cast<double>(k) / static_cast<double>(samples);
    out.pushforward_entropy = entropy(dist);
    out.exact = false;
    out.samples = samples;
  }
  out.per_vertex_entropy = n ? out.pushforward_entropy / static_cast<double>(n) : 0.0;
  out.scaled_target = out.process_entropy / (8.0 * static_cast<double>(out.K) + 1.0);
  out.pass = out.separated && out.covering_pass;
  return out;
}

}  // namespace sofent
