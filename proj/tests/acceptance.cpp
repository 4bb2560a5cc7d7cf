// Runs the eight acceptance criteria and prints one PASS/FAIL line each.

#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <numeric>
#include <sstream>

#include "oracles.hpp"
#include "pipeline.hpp"
#include "sofent/construction.hpp"
#include "sofent/error.hpp"
#include "sofent/kernels.hpp"
#include "sofent/verify.hpp"

using namespace sofent;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

// Collects failures without stopping at the first one.
struct Checker {
  bool ok = true;
  std::ostringstream notes;
  void require(bool cond, const std::string& what) {
    if (!cond && ok) notes << "first failure: " << what << "; ";
    ok = ok && cond;
  }
};

std::vector<Vertex> all_vertices(std::size_t n) {
  std::vector<Vertex> v(n);
  std::iota(v.begin(), v.end(), Vertex{0});
  return v;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Entropy of a symmetric two-state stationary chain at sorted positions.
double flip_chain_entropy(double flip, const std::vector<std::int64_t>& positions) {
  double h = std::log(2.0);
  for (std::size_t i = 1; i < positions.size(); ++i) {
    const double gap = static_cast<double>(positions[i] - positions[i - 1]);
    h += binary_entropy(0.5 * (1.0 - std::pow(1.0 - 2.0 * flip, gap)));
  }
  return h;
}

// H of the model measure on `orbit`, path by path, from the closed form.
double closed_form_orbit_entropy(const PathPartition& partition, const std::vector<Vertex>& orbit,
                                 double flip) {
  auto index = partition.path_index();
  std::map<std::int64_t, std::vector<std::int64_t>> by_path;
  for (auto v : orbit) {
    if (index[v] < 0) continue;
    const auto& path = partition.paths[static_cast<std::size_t>(index[v])];
    auto pos = std::find(path.begin(), path.end(), v) - path.begin();
    by_path[index[v]].push_back(pos);
  }
  double h = 0.0;
  for (auto& [p, positions] : by_path) {
    std::sort(positions.begin(), positions.end());
    h += flip_chain_entropy(flip, positions);
  }
  return h;
}

struct ModelSetup {
  SoficMap sigma;
  PathPartition partition;
  BlockProductMeasure mu;
};

ModelSetup cycle_model(std::size_t n, std::size_t l, double flip, double budget) {
  auto sigma = build_cycle_sofic(n, budget);
  auto cycles = extract_cycles(sigma, GroupPresentation::integers().generator(0));
  auto partition = partition_paths(cycles, l);
  auto mu = build_model_measure(MarkovProcess::symmetric_flip(flip), partition);
  return {std::move(sigma), std::move(partition), std::move(mu)};
}

Outcome criterion1() {
  Checker c;
  const auto t0 = std::chrono::steady_clock::now();
  const std::size_t n = 1024;
  const double eps = 0.01, r = 8;
  GroupPresentation z = GroupPresentation::integers();
  BernoulliProcess nu({0.5, 0.5}, z);
  auto F = integer_words(std::vector<std::int64_t>{-1, 0, 1});
  auto sigma = build_cycle_sofic(n, default_budget(r + 1, window_diameter(z, F)));
  auto metric = build_metric(sigma, r + 1);
  Measure mu = BlockProductMeasure::product(nu.eta(), all_vertices(n));
  auto W = injective_vertices(sigma, F);
  SetSampler sampler;
  sampler.random_orders = 3;
  sampler.seed = 1;
  auto cert = certify_uniform_model_mixing(mu, sigma, metric, nu, F, eps, r, W, "injective", sampler);
  c.require(cert.pass, "certificate verdict");
  c.require(cert.sets.size() >= 5, "at least five greedy orders");
  const double log2 = std::log(2.0);
  double min_ratio = 1e300;
  for (const auto& s : cert.sets) {
    const double exact = static_cast<double>(s.orbit_size) * log2;
    c.require(std::abs(s.entropy - exact) <= 1e-9, s.origin + ": entropy = |orbit| log 2");
    c.require(std::abs(s.ratio - exact / static_cast<double>(s.members.size())) <= 1e-9, s.origin + ": ratio");
    c.require(s.ratio >= 3 * log2 - eps, s.origin + ": ratio >= 3 log 2 - eps");
    c.require(s.maximal && s.separated, s.origin + ": maximal separated");
    c.require(s.orbit_size == 3 * s.members.size(), s.origin + ": disjoint orbits");
    min_ratio = std::min(min_ratio, s.ratio);
  }
  const double t = seconds_since(t0);
  c.require(t < 60, "runtime < 60 s");
  std::ostringstream d;
  d << cert.sets.size() << " sets, min ratio " << std::setprecision(12) << min_ratio << " vs "
    << 3 * log2 - eps << ", " << std::setprecision(3) << t << " s";
  return {c.ok, d.str() + (c.ok ? "" : "; " + c.notes.str())};
}

Outcome criterion2() {
  Checker c;
  const auto t0 = std::chrono::steady_clock::now();
  const double flip = 0.25, eps = 0.01;
  GroupPresentation z = GroupPresentation::integers();
  auto nu = MarkovProcess::symmetric_flip(flip);
  auto F = integer_words(std::vector<std::int64_t>{0, 1});
  auto d = z.coset_decompose(F, z.generator(0));
  auto radius = uniform_mixing_radius(nu, d.interval_size(), eps / static_cast<double>(d.coset_count()), 64, 4);
  if (!radius.radius) return {false, "no mixing radius found"};
  double reach = 0;
  for (const auto& f : F) reach = std::max(reach, z.word_metric(f));
  const double r = static_cast<double>(*radius.radius) + 2 * reach;
  auto model = cycle_model(4096, 64, flip, default_budget(r + 1, window_diameter(z, d.enlarged)) + 1);
  auto metric = build_metric(model.sigma, r + 1);
  auto W = good_vertices(model.sigma, d, model.partition);
  Measure mu = model.mu;
  auto cert = certify_uniform_model_mixing(mu, model.sigma, metric, nu, F, eps, r, W, "good", SetSampler{});
  c.require(cert.pass, "certificate verdict");
  c.require(std::abs(cert.process_entropy - (std::log(2.0) + binary_entropy(flip))) <= 1e-12, "H(mu_F)");
  for (const auto& s : cert.sets) {
    auto orbit = orbit_image(model.sigma, F, s.members);
    double closed = closed_form_orbit_entropy(model.partition, orbit, flip);
    c.require(std::abs(s.entropy - closed) <= 1e-9 * std::max(1.0, closed), s.origin + ": block-factorized entropy");
  }
  const double t = seconds_since(t0);
  c.require(t < 300, "runtime < 5 min");
  std::ostringstream o;
  o << "r0 = " << *radius.radius << ", r = " << r << ", |W| = " << W.size() << ", " << cert.sets.size()
    << " sets, " << std::setprecision(3) << t << " s";
  return {c.ok, o.str() + (c.ok ? "" : "; " + c.notes.str())};
}

Outcome criterion3() {
  Checker c;
  const auto t0 = std::chrono::steady_clock::now();
  const double flip = 0.25, delta = 0.05;
  auto nu = MarkovProcess::symmetric_flip(flip);
  auto F = integer_words(std::vector<std::int64_t>{0, 1});
  auto model = cycle_model(4096, 64, flip, 8);
  Measure mu = model.mu;
  auto rep = diagnose_local_convergence(mu, nu, model.sigma, F, delta, 0, 0);
  const double n = static_cast<double>(model.sigma.size());
  const double threshold = 1.0 - 2.0 * 2.0 * static_cast<double>(model.partition.paths.size()) / n;
  c.require(rep.examined == model.sigma.size(), "every vertex examined");
  c.require(rep.fraction >= 0.90, "fraction >= 0.90");
  c.require(rep.zero_fraction > threshold, "interior fraction > 1 - 2|I| paths/|V|");
  // Interior vertices are exactly those whose window stays on one path.
  auto index = model.partition.path_index();
  std::size_t interior = 0;
  for (Vertex v = 0; v < model.sigma.size(); ++v) {
    Vertex w = model.sigma.act(F[1], v);
    if (index[v] >= 0 && index[v] == index[w]) ++interior;
  }
  c.require(interior == rep.zero_tv, "TV = 0 exactly on path interiors");
  const double t = seconds_since(t0);
  c.require(t < 300, "runtime < 5 min");
  std::ostringstream o;
  o << "fraction " << rep.fraction << ", interior " << rep.zero_fraction << " > " << threshold << ", "
    << std::setprecision(3) << t << " s";
  return {c.ok, o.str() + (c.ok ? "" : "; " + c.notes.str())};
}

Outcome criterion4() {
  Checker c;
  const auto t0 = std::chrono::steady_clock::now();
  const double flip = 0.25, eps = 0.01;
  GroupPresentation z2(GroupKind::FreeAbelian, 2);
  const auto h = z2.generator(0);
  auto base = std::make_shared<MarkovProcess>(MarkovProcess::symmetric_flip(flip));
  CoinducedProcess process(base, h, z2);
  std::vector<GroupWord> F{z2.identity(), z2.generator(0), z2.generator(1)};
  auto d = z2.coset_decompose(F, h);
  const std::size_t m = d.coset_count();

  auto radius = uniform_mixing_radius(*base, d.interval_size(), eps / static_cast<double>(m), 64, 4);
  if (!radius.radius) return {false, "no mixing radius found"};
  double reach = 0;
  for (const auto& f : F) reach = std::max(reach, z2.word_metric(f));
  const double r = static_cast<double>(*radius.radius) + 2 * reach;

  std::vector<std::size_t> dims{64, 64};
  auto sigma = build_torus_sofic(dims, default_budget(r + 1, window_diameter(z2, d.enlarged)) + 1);
  const std::size_t l = 16;
  std::vector<std::pair<GroupWord, GroupWord>> pairs;
  for (std::size_t i = 0; i < F.size(); ++i)
    for (std::size_t j = 0; j < F.size(); ++j)
      if (i != j && !z2.same_right_coset(F[i], F[j], h)) pairs.emplace_back(F[i], F[j]);
  auto fractions = check_condition_b(sigma, h, pairs, l);
  for (double f : fractions) c.require(f == 0.0, "condition (b) fraction exactly 0");

  const double h_interval = entropy(base->interval_law(d.interval_size()));
  const double h_enlarged = process.marginal_entropy(d.enlarged);
  c.require(std::abs(h_enlarged - static_cast<double>(m) * h_interval) <= 1e-9, "H(mu_F') = m H(nu_I)");

  auto cycles = extract_cycles(sigma, h);
  auto partition = partition_paths(cycles, l);
  Measure mu = build_model_measure(*base, partition);
  auto metric = build_metric(sigma, r + 1);
  auto W = good_vertices(sigma, d, partition);
  auto cert = certify_uniform_model_mixing(mu, sigma, metric, process, F, eps, r, W, "good", SetSampler{});
  c.require(cert.pass, "certificate verdict");
  const double t = seconds_since(t0);
  c.require(t < 600, "runtime < 10 min");
  std::ostringstream o;
  o << "m = " << m << ", |I| = " << d.interval_size() << ", r = " << r << ", H(mu_F') = " << std::setprecision(12)
    << h_enlarged << " vs " << m * h_interval << ", " << pairs.size() << " pairs at 0, " << std::setprecision(3)
    << t << " s";
  return {c.ok, o.str() + (c.ok ? "" : "; " + c.notes.str())};
}

Outcome criterion5() {
  Checker c;
  Rng rng(5150);
  std::size_t compared = 0;
  for (int trial = 0; trial < 200; ++trial) {
    auto mu = oracle::random_block_product(rng, 12, 3);
    auto joint = oracle::joint(mu);
    c.require(std::abs(entropy(mu) - oracle::entropy(joint)) <= 1e-9, "entropy");
    for (double eps : {0.01, 0.1, 0.4})
      c.require(cov_epsilon(Measure(mu), eps) == oracle::cov(joint, eps), "cov_eps");
    std::vector<Vertex> S;
    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < mu.sites().size(); ++i)
      if (rng.below(2)) {
        S.push_back(mu.sites()[i]);
        keep.push_back(i);
      }
    auto marg = marginal(mu, S);
    auto ref = oracle::project(joint, keep);
    c.require(oracle::max_abs_diff(oracle::joint(to_explicit(marg)), ref) <= 1e-9, "block-product marginal");
    c.require(std::abs(entropy(marg) - oracle::entropy(ref)) <= 1e-9, "marginal entropy");

    const std::size_t k = 2 + rng.below(2);
    const std::size_t len = 2 + rng.below(9);
    auto law = MarkovLaw::path(oracle::random_simplex(rng, k), oracle::random_stochastic(rng, k), len);
    std::vector<std::size_t> I;
    for (std::size_t i = 0; i < len; ++i)
      if (rng.below(2)) I.push_back(i);
    if (I.empty()) I.push_back(len - 1);
    auto sub = oracle::joint(markov_subset_marginal(law, I));
    auto sub_ref = oracle::markov_paths(law.initial, law.transition, I);
    c.require(oracle::max_abs_diff(sub, sub_ref) <= 1e-9, "Markov subset marginal");
    c.require(std::abs(entropy(law.select(I)) - oracle::entropy(sub_ref)) <= 1e-9, "Markov subset entropy");
    ++compared;
  }
  return {c.ok, std::to_string(compared) + " instances" + (c.ok ? "" : "; " + c.notes.str())};
}

// An observable reading a few coordinates and hashing them into k values.
Observable random_observable(Rng& rng, std::size_t sites) {
  std::vector<std::size_t> pos;
  for (std::size_t i = 0; i < sites; ++i)
    if (rng.below(2)) pos.push_back(i);
  const std::uint64_t salt = rng.next() % 97;
  const std::uint64_t k = 2 + rng.below(3);
  return [pos, salt, k](const Config& c) {
    std::uint64_t x = salt;
    for (auto p : pos) x = x * 31 + c[p] + 1;
    return Config{static_cast<Symbol>(x % k)};
  };
}

double brute_conditional(const ExplicitMeasure& mu, const Observable& a, const Observable& b) {
  std::map<Config, std::map<Config, double>> table;
  std::map<Config, double> marg;
  for (const auto& [c, p] : mu.atoms()) {
    table[b(c)][a(c)] += p;
    marg[b(c)] += p;
  }
  double h = 0.0;
  for (const auto& [bv, row] : table) {
    const double pb = marg[bv];
    for (const auto& [av, p] : row)
      if (p > 0) h -= p * std::log(p / pb);
  }
  return h;
}

Outcome criterion6() {
  Checker c;
  Rng rng(606);
  GroupPresentation z = GroupPresentation::integers();
  std::size_t lemma4 = 0, cond = 0, rokhlin = 0, chain = 0, theorem = 0;

  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 4 + rng.below(5);
    auto sigma = build_cycle_sofic(n, 4);
    const std::size_t alphabet = 2 + rng.below(2);
    Measure mu = rng.below(2) ? Measure(oracle::random_explicit(rng, alphabet, all_vertices(n)))
                              : Measure(oracle::random_block_product_on(rng, alphabet, all_vertices(n)));
    const std::size_t a = alphabet_of(mu);
    std::vector<std::int64_t> offsets{0};
    if (rng.below(2)) offsets.push_back(1);
    if (rng.below(2)) offsets.push_back(-1);
    auto window = integer_words(offsets);
    const std::uint64_t salt = rng.next() % 13;
    auto phi = LocalObservable::from_function(window, a, 3, [salt](std::span<const Symbol> p) {
      std::uint64_t x = salt;
      for (auto s : p) x = x * 7 + s;
      return static_cast<Symbol>(x % 3);
    });
    std::vector<Vertex> S{static_cast<Vertex>(rng.below(n))};
    if (rng.below(2)) S.push_back(static_cast<Vertex>((S[0] + 2 + rng.below(n - 2)) % n));
    std::sort(S.begin(), S.end());
    S.erase(std::unique(S.begin(), S.end()), S.end());
    auto rep = lemma4_chain_check(mu, sigma, phi, S);
    c.require(rep.pass && rep.h_alpha <= rep.rhs + 1e-9, "chain inequality");
    ++lemma4;
  }

  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t a = 2 + rng.below(2);
    const std::size_t n = 1 + rng.below(5);
    auto mu = oracle::random_explicit(rng, a, all_vertices(n));
    std::size_t total = 1;
    for (std::size_t i = 0; i < n; ++i) total *= a;
    std::vector<Config> E;
    for (std::size_t code = 0; code < total; ++code) {
      if (rng.below(2) == 0) continue;
      Config x(n);
      std::size_t y = code;
      for (auto& s : x) {
        s = static_cast<Symbol>(y % a);
        y /= a;
      }
      E.push_back(std::move(x));
    }
    if (E.empty()) E.push_back(Config(n, 0));
    auto b = conditioning_bound(mu, E);
    c.require(b.entropy <= b.bound + 1e-9, "conditioning bound");
    c.require(std::abs(b.entropy - oracle::entropy(oracle::joint(mu))) <= 1e-9, "conditioning bound entropy");
    ++cond;
  }

  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + rng.below(4);
    auto mu = oracle::random_explicit(rng, 2 + rng.below(2), all_vertices(n));
    auto a1 = random_observable(rng, n), a2 = random_observable(rng, n);
    auto b1 = random_observable(rng, n), b2 = random_observable(rng, n);
    const double lhs = rokhlin_distance(mu, tuple_observable({a1, a2}), tuple_observable({b1, b2}));
    const double rhs = rokhlin_distance(mu, a1, b1) + rokhlin_distance(mu, a2, b2);
    c.require(lhs <= rhs + 1e-9, "Rokhlin tuple subadditivity");
    ++rokhlin;
    const double joint = joint_entropy(mu, a1, b1);
    const double hb = entropy(pushforward(mu, b1));
    c.require(std::abs(joint - (hb + brute_conditional(mu, a1, b1))) <= 1e-9, "chain rule");
    c.require(std::abs(conditional_entropy(mu, a1, b1) - brute_conditional(mu, a1, b1)) <= 1e-9, "conditional entropy");
    ++chain;
  }

  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 30 + rng.below(60);
    const double r = 1 + static_cast<double>(rng.below(5));
    auto model = cycle_model(n, 2 + rng.below(10), 0.1 + 0.3 * rng.uniform(), 2 * r + 4);
    auto metric = build_metric(model.sigma, r + 1);
    auto nu = MarkovProcess::symmetric_flip(0.2);
    auto psi = LocalObservable::projection(integer_words(std::vector<std::int64_t>{0, 1}), rng.below(2), 2);
    Measure mu = model.mu;
    auto rep = theorem1_report(mu, model.sigma, metric, nu, psi, all_vertices(n), 0.01, r);
    c.require(rep.covering_pass && rep.s_size * rep.K >= rep.y_size, "|S| K >= |Y|");
    ++theorem;
  }
  std::ostringstream o;
  o << lemma4 << " chain, " << cond << " conditioning, " << rokhlin << " Rokhlin, " << chain << " chain-rule, "
    << theorem << " covering checks";
  return {c.ok, o.str() + (c.ok ? "" : "; " + c.notes.str())};
}

double cyclic(std::int64_t a, std::int64_t b, std::int64_t n) {
  auto d = std::abs(a - b) % n;
  return static_cast<double>(std::min(d, n - d));
}

Outcome criterion7() {
  Checker c;
  Rng rng(77);
  std::size_t triples = 0;
  for (int inst = 0; inst < 50; ++inst) {
    const bool torus = inst % 2 == 1;
    std::vector<std::size_t> dims;
    std::vector<double> weights;
    if (torus) {
      dims = {3 + rng.below(8), 3 + rng.below(8)};
      weights = {1.0, 1.0 + static_cast<double>(rng.below(3)) * 0.5};
    } else {
      dims = {3 + rng.below(60)};
      weights = {1.0};
    }
    // Every generator must be an edge for the closed form to be the path metric.
    const double r_edge = *std::max_element(weights.begin(), weights.end()) + static_cast<double>(rng.below(3));
    auto sigma = torus ? build_torus_sofic(dims, 2 * r_edge + 2, weights) : build_cycle_sofic(dims[0], 2 * r_edge + 2);
    auto metric = build_metric(sigma, r_edge);
    const std::size_t n = sigma.size();
    auto closed = [&](Vertex a, Vertex b) {
      auto ca = torus_coords(dims, a), cb = torus_coords(dims, b);
      double d = 0;
      for (std::size_t i = 0; i < dims.size(); ++i)
        d += weights[i] * cyclic(ca[i], cb[i], static_cast<std::int64_t>(dims[i]));
      return d;
    };
    std::vector<std::vector<double>> dist(n);
    for (Vertex a = 0; a < n; ++a) {
      dist[a] = metric.distances_from(a);
      for (Vertex b = 0; b < n; ++b)
        c.require(std::abs(dist[a][b] - closed(a, b)) <= 1e-9, "closed-form distance");
    }
    for (int t = 0; t < 10000; ++t) {
      const auto x = static_cast<Vertex>(rng.below(n)), y = static_cast<Vertex>(rng.below(n)),
                 z = static_cast<Vertex>(rng.below(n));
      c.require(dist[x][x] == 0.0, "identity");
      c.require(x == y || dist[x][y] > 0.0, "positivity");
      c.require(dist[x][y] == dist[y][x], "symmetry");
      c.require(dist[x][z] <= dist[x][y] + dist[y][z] + 1e-9, "triangle inequality");
      ++triples;
    }
    const double r = 1 + static_cast<double>(rng.below(4));
    auto W = all_vertices(n);
    std::vector<Vertex> order = W;
    rng.shuffle(order);
    auto set = separated_set_greedy(metric, W, r, order);
    for (std::size_t i = 0; i < set.members.size(); ++i)
      for (std::size_t j = i + 1; j < set.members.size(); ++j)
        c.require(dist[set.members[i]][set.members[j]] >= r, "pairwise separation");
    for (auto w : W) {
      bool near = false;
      for (auto s : set.members) near = near || dist[w][s] < r;
      c.require(near, "maximality");
    }
    c.require(is_r_separated(metric, set.members, r) && is_maximal_separated(metric, W, set.members, r), "rechecks");
  }
  return {c.ok, "50 instances, " + std::to_string(triples) + " triples" + (c.ok ? "" : "; " + c.notes.str())};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome criterion8() {
  auto cfg = cli::load_config(fs::path(SOFENT_CONFIG_DIR) / "markov_cycle.json");
  auto base = fs::temp_directory_path() / "sofent_acceptance";
  fs::remove_all(base);
  std::vector<std::string> reports;
  for (const char* run : {"first", "second"}) {
    auto dir = base / run;
    fs::create_directories(dir);
    std::ostringstream sink;
    auto* old = std::cout.rdbuf(sink.rdbuf());
    int code = cli::run(cfg, dir);
    std::cout.rdbuf(old);
    if (code != 0) return {false, std::string("run exited with ") + std::to_string(code)};
    reports.push_back(slurp(dir / "report.json"));
  }
  const bool same = !reports[0].empty() && reports[0] == reports[1];
  return {same, std::to_string(reports[0].size()) + " bytes, " + (same ? "identical" : "different")};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"1 Bernoulli exactness", criterion1},     {"2 construction certification", criterion2},
      {"3 local convergence", criterion3},       {"4 coinduction to Z^2", criterion4},
      {"5 oracle equivalence", criterion5},      {"6 inequality suites", criterion6},
      {"7 metric correctness", criterion7},      {"8 determinism", criterion8}};
  bool all = true;
  for (const auto& [name, check] : criteria) {
    Outcome out;
    try {
      out = check();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    all = all && out.pass;
    std::cout << (out.pass ? "PASS" : "FAIL") << "  criterion " << name << ": " << out.detail << std::endl;
  }
  return all ? 0 : 1;
}
