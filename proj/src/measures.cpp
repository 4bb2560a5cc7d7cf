#include "sofent/measures.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "sofent/error.hpp"
#include "sofent/kernels.hpp"

namespace sofent {

namespace {

std::vector<Vertex> sorted_unique(std::span<const Vertex> S) {
  std::vector<Vertex> out(S.begin(), S.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

void require_increasing(const std::vector<Vertex>& sites) {
  for (std::size_t i = 1; i < sites.size(); ++i)
    if (sites[i] <= sites[i - 1]) throw InvalidArgument("measure sites must be strictly increasing");
}

double xlogx(double p) { return p > 0.0 ? p * std::log(p) : 0.0; }

}  // namespace

ExplicitMeasure::ExplicitMeasure(std::size_t alphabet, std::vector<Vertex> sites,
                                 std::vector<std::pair<Config, double>> atoms)
    : alphabet_(alphabet), sites_(std::move(sites)) {
  if (alphabet_ < 1) throw InvalidArgument("alphabet must be nonempty");
  require_increasing(sites_);
  std::sort(atoms.begin(), atoms.end(),
            [](const auto& x, const auto& y) { return x.first < y.first; });
  double total = 0.0;
  for (auto& [config, p] : atoms) {
    if (config.size() != sites_.size()) throw InvalidArgument("atom configuration has wrong length");
    for (Symbol s : config)
      if (s >= alphabet_) throw InvalidArgument("atom symbol outside alphabet");
    if (!(p >= 0.0) || !std::isfinite(p)) throw InvalidArgument("atom probability must be nonnegative");
    total += p;
    if (!atoms_.empty() && atoms_.back().first == config)
      atoms_.back().second += p;
    else
      atoms_.emplace_back(std::move(config), p);
  }
  double slack = kProbTol + 4.0 * std::numeric_limits<double>::epsilon() * static_cast<double>(atoms_.size());
  if (std::abs(total - 1.0) > slack)
    throw InvalidArgument("atom probabilities sum to " + std::to_string(total) + ", not 1");
  std::erase_if(atoms_, [](const auto& atom) { return atom.second < kAtomFloor; });
}

ExplicitMeasure ExplicitMeasure::point_mass(std::size_t alphabet, std::vector<Vertex> sites,
                                            Config config) {
  std::vector<std::pair<Config, double>> atoms;
  atoms.emplace_back(std::move(config), 1.0);
  return ExplicitMeasure(alphabet, std::move(sites), std::move(atoms));
}

ExplicitMeasure ExplicitMeasure::uniform(std::size_t alphabet, std::vector<Vertex> sites,
                                         std::size_t cap) {
  std::vector<double> eta(alphabet, 1.0 / static_cast<double>(alphabet));
  return product(eta, std::move(sites), cap);
}

ExplicitMeasure ExplicitMeasure::product(std::span<const double> eta, std::vector<Vertex> sites,
                                         std::size_t cap) {
  const std::size_t k = eta.size();
  double raw = std::pow(static_cast<double>(k), static_cast<double>(sites.size()));
  if (raw > static_cast<double>(cap))
    throw CapExceeded("product measure has more than " + std::to_string(cap) + " atoms");
  std::vector<std::pair<Config, double>> atoms{{Config{}, 1.0}};
  for (std::size_t s = 0; s < sites.size(); ++s) {
    std::vector<std::pair<Config, double>> next;
    next.reserve(atoms.size() * k);
    for (const auto& [c, p] : atoms)
      for (std::size_t a = 0; a < k; ++a) {
        if (eta[a] <= 0.0) continue;
        Config d = c;
        d.push_back(static_cast<Symbol>(a));
        next.emplace_back(std::move(d), p * eta[a]);
      }
    atoms = std::move(next);
  }
  return ExplicitMeasure(k, std::move(sites), std::move(atoms));
}

std::size_t ExplicitMeasure::site_index(Vertex v) const {
  auto it = std::lower_bound(sites_.begin(), sites_.end(), v);
  if (it == sites_.end() || *it != v)
    throw InvalidArgument("vertex " + std::to_string(v) + " is not a site of the measure");
  return static_cast<std::size_t>(it - sites_.begin());
}

bool ExplicitMeasure::has_site(Vertex v) const {
  return std::binary_search(sites_.begin(), sites_.end(), v);
}

double ExplicitMeasure::probability(const Config& c) const {
  auto it = std::lower_bound(atoms_.begin(), atoms_.end(), c,
                             [](const auto& atom, const Config& key) { return atom.first < key; });
  return (it != atoms_.end() && it->first == c) ? it->second : 0.0;
}

std::size_t law_length(const BlockLaw& law) {
  if (const auto* m = std::get_if<MarkovLaw>(&law)) return m->length();
  return std::get<ExplicitMeasure>(law).sites().size();
}

BlockProductMeasure::BlockProductMeasure(std::size_t alphabet, std::vector<Vertex> sites,
                                         std::vector<BlockLaw> laws, std::vector<Block> blocks,
                                         std::vector<std::pair<Vertex, Symbol>> filler)
    : alphabet_(alphabet),
      sites_(std::move(sites)),
      laws_(std::move(laws)),
      blocks_(std::move(blocks)),
      filler_(std::move(filler)) {
  if (alphabet_ < 1) throw InvalidArgument("alphabet must be nonempty");
  require_increasing(sites_);
  for (const auto& law : laws_) {
    if (const auto* m = std::get_if<MarkovLaw>(&law)) {
      m->validate();
      if (m->alphabet() != alphabet_) throw InvalidArgument("block law alphabet mismatch");
    } else {
      const auto& e = std::get<ExplicitMeasure>(law);
      if (e.alphabet() != alphabet_) throw InvalidArgument("block law alphabet mismatch");
      for (std::size_t i = 0; i < e.sites().size(); ++i)
        if (e.sites()[i] != i) throw InvalidArgument("explicit block law sites must be 0..len-1");
    }
  }
  std::sort(filler_.begin(), filler_.end());
  const std::size_t unset = std::numeric_limits<std::size_t>::max();
  location_.assign(sites_.size(), Location{false, unset, 0});
  auto position_of = [&](Vertex v) {
    auto it = std::lower_bound(sites_.begin(), sites_.end(), v);
    if (it == sites_.end() || *it != v)
      throw InvalidArgument("block vertex " + std::to_string(v) + " is not a site");
    return static_cast<std::size_t>(it - sites_.begin());
  };
  for (std::size_t b = 0; b < blocks_.size(); ++b) {
    const auto& block = blocks_[b];
    if (block.law >= laws_.size()) throw InvalidArgument("block law index out of range");
    if (law_length(laws_[block.law]) != block.vertices.size())
      throw InvalidArgument("block length differs from its law length");
    for (std::size_t i = 0; i < block.vertices.size(); ++i) {
      auto& loc = location_[position_of(block.vertices[i])];
      if (loc.block != unset) throw InvalidArgument("blocks overlap");
      loc = Location{false, b, i};
    }
  }
  for (std::size_t f = 0; f < filler_.size(); ++f) {
    if (filler_[f].second >= alphabet_) throw InvalidArgument("filler symbol outside alphabet");
    auto& loc = location_[position_of(filler_[f].first)];
    if (loc.block != unset) throw InvalidArgument("filler overlaps a block");
    loc = Location{true, f, 0};
  }
  for (const auto& loc : location_)
    if (loc.block == unset) throw InvalidArgument("blocks and filler do not cover every site");
}

BlockProductMeasure BlockProductMeasure::product(std::span<const double> eta,
                                                 std::vector<Vertex> sites) {
  std::vector<std::pair<Config, double>> atoms;
  for (std::size_t a = 0; a < eta.size(); ++a)
    if (eta[a] > 0.0) atoms.push_back({Config{static_cast<Symbol>(a)}, eta[a]});
  std::vector<BlockLaw> laws{ExplicitMeasure(eta.size(), {0}, std::move(atoms))};
  std::vector<Block> blocks;
  blocks.reserve(sites.size());
  for (Vertex v : sites) blocks.push_back({{v}, 0});
  return BlockProductMeasure(eta.size(), std::move(sites), std::move(laws), std::move(blocks), {});
}

std::size_t BlockProductMeasure::site_position(Vertex v) const {
  auto it = std::lower_bound(sites_.begin(), sites_.end(), v);
  if (it == sites_.end() || *it != v)
    throw InvalidArgument("vertex " + std::to_string(v) + " is not a site of the measure");
  return static_cast<std::size_t>(it - sites_.begin());
}

BlockProductMeasure::Location BlockProductMeasure::locate(Vertex v) const {
  return location_[site_position(v)];
}

std::size_t alphabet_of(const Measure& mu) {
  return std::visit([](const auto& m) { return m.alphabet(); }, mu);
}

const std::vector<Vertex>& sites_of(const Measure& mu) {
  return std::visit([](const auto& m) -> const std::vector<Vertex>& { return m.sites(); }, mu);
}

ExplicitMeasure marginal(const ExplicitMeasure& mu, std::span<const Vertex> S) {
  std::vector<Vertex> sites = sorted_unique(S);
  std::vector<std::size_t> index;
  index.reserve(sites.size());
  for (Vertex v : sites) index.push_back(mu.site_index(v));
  std::vector<std::pair<Config, double>> atoms;
  atoms.reserve(mu.atoms().size());
  for (const auto& [c, p] : mu.atoms()) {
    Config d(index.size());
    for (std::size_t i = 0; i < index.size(); ++i) d[i] = c[index[i]];
    atoms.emplace_back(std::move(d), p);
  }
  return ExplicitMeasure(mu.alphabet(), std::move(sites), std::move(atoms));
}

BlockProductMeasure marginal(const BlockProductMeasure& mu, std::span<const Vertex> S) {
  std::vector<Vertex> sites = sorted_unique(S);
  // Selected positions per block, in block order.
  std::map<std::size_t, std::vector<std::size_t>> selected;
  std::vector<std::pair<Vertex, Symbol>> filler;
  for (Vertex v : sites) {
    auto loc = mu.locate(v);
    if (loc.filler)
      filler.push_back(mu.filler()[loc.block]);
    else
      selected[loc.block].push_back(loc.position);
  }
  std::vector<BlockLaw> laws;
  std::vector<Block> blocks;
  std::map<std::size_t, std::size_t> whole_law;  // reuse laws of fully kept blocks
  for (auto& [b, positions] : selected) {
    std::sort(positions.begin(), positions.end());
    const Block& block = mu.blocks()[b];
    const BlockLaw& law = mu.laws()[block.law];
    Block out;
    for (std::size_t p : positions) out.vertices.push_back(block.vertices[p]);
    if (positions.size() == block.vertices.size()) {
      auto [it, inserted] = whole_law.emplace(block.law, laws.size());
      if (inserted) laws.push_back(law);
      out.law = it->second;
    } else if (const auto* m = std::get_if<MarkovLaw>(&law)) {
      out.law = laws.size();
      laws.push_back(m->select(positions));
    } else {
      const auto& e = std::get<ExplicitMeasure>(law);
      std::vector<Vertex> keep(positions.begin(), positions.end());
      ExplicitMeasure sub = marginal(e, keep);
      std::vector<Vertex> relabeled(keep.size());
      std::iota(relabeled.begin(), relabeled.end(), Vertex{0});
      out.law = laws.size();
      laws.push_back(ExplicitMeasure(e.alphabet(), std::move(relabeled), sub.atoms()));
    }
    blocks.push_back(std::move(out));
  }
  return BlockProductMeasure(mu.alphabet(), std::move(sites), std::move(laws), std::move(blocks),
                             std::move(filler));
}

Measure marginal(const Measure& mu, std::span<const Vertex> S) {
  return std::visit([&](const auto& m) -> Measure { return marginal(m, S); }, mu);
}

double entropy(std::span<const double> probabilities) {
  double h = 0.0;
  for (double p : probabilities) h -= xlogx(p);
  return h;
}

double entropy(const ExplicitMeasure& mu) {
  double h = 0.0;
  for (const auto& atom : mu.atoms()) h -= xlogx(atom.second);
  return h;
}

double entropy(const BlockLaw& law) {
  return std::visit([](const auto& l) { return entropy(l); }, law);
}

double entropy(const BlockProductMeasure& mu) { return kernels::block_entropy(mu); }

double entropy(const Measure& mu) {
  return std::visit([](const auto& m) { return entropy(m); }, mu);
}

double binary_entropy(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw InvalidArgument("binary_entropy: p outside [0,1]");
  return -xlogx(p) - xlogx(1.0 - p);
}

std::size_t cov_epsilon(const ExplicitMeasure& mu, double eps) {
  if (!(eps > 0.0 && eps < 1.0)) throw InvalidArgument("cov_epsilon: eps outside (0,1)");
  std::vector<double> p;
  p.reserve(mu.atoms().size());
  for (const auto& atom : mu.atoms()) p.push_back(atom.second);
  std::sort(p.begin(), p.end(), std::greater<>());
  double mass = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    mass += p[i];
    if (mass > 1.0 - eps) return i + 1;
  }
  return p.size();
}

std::size_t cov_epsilon(const Measure& mu, double eps, std::size_t cap) {
  return cov_epsilon(to_explicit(mu, cap), eps);
}

ExplicitMeasure to_explicit(const BlockLaw& law, std::size_t cap) {
  if (const auto* m = std::get_if<MarkovLaw>(&law)) return to_explicit(*m, cap);
  return std::get<ExplicitMeasure>(law);
}

ExplicitMeasure to_explicit(const BlockProductMeasure& mu, std::size_t cap) {
  const auto& sites = mu.sites();
  Config base(sites.size(), 0);
  for (const auto& [v, s] : mu.filler())
    base[static_cast<std::size_t>(std::lower_bound(sites.begin(), sites.end(), v) - sites.begin())] = s;
  std::vector<std::pair<Config, double>> atoms{{base, 1.0}};
  std::map<std::size_t, ExplicitMeasure> expanded;
  for (const auto& block : mu.blocks()) {
    auto it = expanded.find(block.law);
    if (it == expanded.end()) it = expanded.emplace(block.law, to_explicit(mu.laws()[block.law], cap)).first;
    const auto& law = it->second;
    if (static_cast<double>(atoms.size()) * static_cast<double>(law.atoms().size()) > static_cast<double>(cap))
      throw CapExceeded("block-product enumeration exceeds cap " + std::to_string(cap));
    std::vector<std::size_t> pos;
    for (Vertex v : block.vertices)
      pos.push_back(static_cast<std::size_t>(std::lower_bound(sites.begin(), sites.end(), v) - sites.begin()));
    std::vector<std::pair<Config, double>> next;
    next.reserve(atoms.size() * law.atoms().size());
    for (const auto& [c, p] : atoms)
      for (const auto& [lc, lp] : law.atoms()) {
        Config d = c;
        for (std::size_t i = 0; i < pos.size(); ++i) d[pos[i]] = lc[i];
        next.emplace_back(std::move(d), p * lp);
      }
    atoms = std::move(next);
  }
  return ExplicitMeasure(mu.alphabet(), sites, std::move(atoms));
}

ExplicitMeasure to_explicit(const Measure& mu, std::size_t cap) {
  if (const auto* e = std::get_if<ExplicitMeasure>(&mu)) return *e;
  return to_explicit(std::get<BlockProductMeasure>(mu), cap);
}

Observable table_observable(std::map<Config, Config> table) {
  return [table = std::move(table)](const Config& c) -> Config {
    auto it = table.find(c);
    if (it == table.end()) throw MissingPattern("observable table is missing a support point");
    return it->second;
  };
}

Observable coordinate_observable(std::vector<std::size_t> positions) {
  return [positions = std::move(positions)](const Config& c) {
    Config out(positions.size());
    for (std::size_t i = 0; i < positions.size(); ++i) out[i] = c.at(positions[i]);
    return out;
  };
}

Observable constant_observable(Config value) {
  return [value = std::move(value)](const Config&) { return value; };
}

Observable tuple_observable(std::vector<Observable> parts) {
  // Length-prefixed concatenation keeps the encoding injective.
  return [parts = std::move(parts)](const Config& c) {
    Config out;
    for (const auto& f : parts) {
      Config v = f(c);
      out.push_back(static_cast<Symbol>(v.size()));
      out.insert(out.end(), v.begin(), v.end());
    }
    return out;
  };
}

std::map<Config, double> pushforward(const ExplicitMeasure& mu, const Observable& alpha) {
  std::map<Config, double> out;
  for (const auto& [c, p] : mu.atoms()) out[alpha(c)] += p;
  return out;
}

double entropy(const std::map<Config, double>& distribution) {
  double h = 0.0;
  for (const auto& [c, p] : distribution) h -= xlogx(p);
  return h;
}

double joint_entropy(const ExplicitMeasure& mu, const Observable& alpha, const Observable& beta) {
  std::map<std::pair<Config, Config>, double> joint;
  for (const auto& [c, p] : mu.atoms()) joint[{alpha(c), beta(c)}] += p;
  double h = 0.0;
  for (const auto& [key, p] : joint) h -= xlogx(p);
  return h;
}

double conditional_entropy(const ExplicitMeasure& mu, const Observable& alpha,
                           const Observable& beta) {
  double h = joint_entropy(mu, alpha, beta) - entropy(pushforward(mu, beta));
  return std::max(h, 0.0);
}

double rokhlin_distance(const ExplicitMeasure& mu, const Observable& alpha,
                        const Observable& beta) {
  return conditional_entropy(mu, alpha, beta) + conditional_entropy(mu, beta, alpha);
}

ConditioningBound conditioning_bound(const ExplicitMeasure& mu, std::span<const Config> event) {
  std::vector<Config> e(event.begin(), event.end());
  std::sort(e.begin(), e.end());
  e.erase(std::unique(e.begin(), e.end()), e.end());
  ConditioningBound out;
  out.entropy = entropy(mu);
  for (const auto& c : e) out.mass += mu.probability(c);
  out.mass = std::min(out.mass, 1.0);
  const double log_universe =
      static_cast<double>(mu.sites().size()) * std::log(static_cast<double>(mu.alphabet()));
  const double size_e = static_cast<double>(e.size());
  // E = A^V: the complement term vanishes; don't let rounding in the mass
  // pick up log 0.
  if (!e.empty() && std::log(size_e) >= log_universe - 1e-12) out.mass = 1.0;
  double bound = 0.0;
  if (out.mass > 0.0) bound += out.mass * std::log(size_e);
  if (out.mass < 1.0) {
    // log(|A|^|V| - |E|) without forming |A|^|V|.
    double log_rest = log_universe + std::log1p(-std::exp(std::log(size_e) - log_universe));
    bound += (1.0 - out.mass) * log_rest;
  }
  bound += binary_entropy(out.mass);
  out.bound = bound;
  return out;
}

double total_variation(const ExplicitMeasure& a, const ExplicitMeasure& b) {
  if (a.sites() != b.sites()) throw InvalidArgument("total_variation: measures on different sites");
  double tv = 0.0;
  auto ia = a.atoms().begin();
  auto ib = b.atoms().begin();
  while (ia != a.atoms().end() || ib != b.atoms().end()) {
    if (ib == b.atoms().end() || (ia != a.atoms().end() && ia->first < ib->first)) {
      tv += ia->second;
      ++ia;
    } else if (ia == a.atoms().end() || ib->first < ia->first) {
      tv += ib->second;
      ++ib;
    } else {
      tv += std::abs(ia->second - ib->second);
      ++ia;
      ++ib;
    }
  }
  return std::min(0.5 * tv, 1.0);
}

namespace {

std::size_t draw(std::span<const double> weights, Rng& rng) {
  double u = rng.uniform();
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (u < weights[i]) return i;
    u -= weights[i];
  }
  // Rounding left u past the last positive weight.
  for (std::size_t i = weights.size(); i-- > 0;)
    if (weights[i] > 0.0) return i;
  return 0;
}

}  // namespace

Config sample(const ExplicitMeasure& mu, Rng& rng) {
  std::vector<double> p;
  p.reserve(mu.atoms().size());
  for (const auto& atom : mu.atoms()) p.push_back(atom.second);
  return mu.atoms()[draw(p, rng)].first;
}

Config sample(const MarkovLaw& law, Rng& rng) {
  Config out(law.length());
  if (out.empty()) return out;
  std::vector<double> dist = row_times(law.initial, matrix_power(law.transition, law.offsets[0]));
  out[0] = static_cast<Symbol>(draw(dist, rng));
  std::map<std::size_t, Matrix> powers;
  for (std::size_t j = 1; j < out.size(); ++j) {
    std::size_t gap = law.offsets[j] - law.offsets[j - 1];
    auto it = powers.find(gap);
    if (it == powers.end()) it = powers.emplace(gap, matrix_power(law.transition, gap)).first;
    out[j] = static_cast<Symbol>(draw(it->second.row(out[j - 1]), rng));
  }
  return out;
}

Config sample(const Measure& mu, Rng& rng) {
  if (const auto* e = std::get_if<ExplicitMeasure>(&mu)) return sample(*e, rng);
  const auto& bp = std::get<BlockProductMeasure>(mu);
  const auto& sites = bp.sites();
  auto position = [&](Vertex v) {
    return static_cast<std::size_t>(std::lower_bound(sites.begin(), sites.end(), v) - sites.begin());
  };
  Config out(sites.size(), 0);
  for (const auto& [v, s] : bp.filler()) out[position(v)] = s;
  for (const auto& block : bp.blocks()) {
    const BlockLaw& law = bp.laws()[block.law];
    Config values = std::holds_alternative<MarkovLaw>(law)
                        ? sample(std::get<MarkovLaw>(law), rng)
                        : sample(std::get<ExplicitMeasure>(law), rng);
    for (std::size_t i = 0; i < values.size(); ++i) out[position(block.vertices[i])] = values[i];
  }
  return out;
}

}  // namespace sofent
