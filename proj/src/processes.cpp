#include "sofent/processes.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>

#include "sofent/error.hpp"

namespace sofent {

namespace {

void validate_distribution(std::span<const double> eta, const char* what) {
  if (eta.empty()) throw InvalidArgument(std::string(what) + " is empty");
  double total = 0.0;
  for (double p : eta) {
    if (!(p >= 0.0)) throw InvalidArgument(std::string(what) + " has a negative entry");
    total += p;
  }
  if (std::abs(total - 1.0) > kProbTol) throw InvalidArgument(std::string(what) + " does not sum to 1");
}

std::int64_t integer_of(const GroupWord& g) {
  if (g.kind() != GroupKind::FreeAbelian || g.rank() != 1)
    throw InvalidArgument("expected an element of Z, got " + word_key(g));
  return g.exponents()[0];
}

// Rebuilds a block-product measure on sites 0..total-1 from factors, each
// placed on the given target sites (factor site i -> targets[i]).
BlockProductMeasure combine(std::size_t alphabet, std::size_t total,
                            const std::vector<std::pair<BlockProductMeasure, std::vector<Vertex>>>& parts) {
  std::vector<BlockLaw> laws;
  std::vector<Block> blocks;
  std::vector<std::pair<Vertex, Symbol>> filler;
  for (const auto& [mu, targets] : parts) {
    const std::size_t offset = laws.size();
    laws.insert(laws.end(), mu.laws().begin(), mu.laws().end());
    auto target_of = [&](Vertex v) { return targets[mu.site_position(v)]; };
    for (const auto& b : mu.blocks()) {
      Block out{{}, offset + b.law};
      for (Vertex v : b.vertices) out.vertices.push_back(target_of(v));
      blocks.push_back(std::move(out));
    }
    for (const auto& [v, s] : mu.filler()) filler.emplace_back(target_of(v), s);
  }
  std::vector<Vertex> sites(total);
  std::iota(sites.begin(), sites.end(), Vertex{0});
  return BlockProductMeasure(alphabet, std::move(sites), std::move(laws), std::move(blocks),
                             std::move(filler));
}

}  // namespace

BlockLaw ProcessOracle::interval_law(std::size_t length) const {
  if (group().kind() != GroupKind::FreeAbelian || group().rank() != 1)
    throw InvalidArgument("interval laws are defined for processes over Z");
  std::vector<std::int64_t> positions(length);
  std::iota(positions.begin(), positions.end(), std::int64_t{0});
  auto mu = marginal(integer_words(positions));
  if (mu.blocks().size() != 1) throw InvalidArgument("interval marginal is not a single block");
  return mu.laws()[mu.blocks()[0].law];
}

void ProcessOracle::require_distinct(std::span<const GroupWord> F) const {
  std::vector<GroupWord> sorted(F.begin(), F.end());
  for (const auto& g : sorted) group().require(g);
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw InvalidArgument("marginal window has repeated elements");
}

BernoulliProcess::BernoulliProcess(std::vector<double> eta, GroupPresentation group)
    : eta_(std::move(eta)), group_(std::move(group)) {
  validate_distribution(eta_, "eta");
}

BlockProductMeasure BernoulliProcess::marginal(std::span<const GroupWord> F) const {
  require_distinct(F);
  std::vector<Vertex> sites(F.size());
  std::iota(sites.begin(), sites.end(), Vertex{0});
  return BlockProductMeasure::product(eta_, std::move(sites));
}

BlockLaw BernoulliProcess::interval_law(std::size_t length) const {
  // A chain whose rows all equal eta: exact entropy without enumeration.
  Matrix p{eta_.size(), {}};
  for (std::size_t i = 0; i < eta_.size(); ++i) p.a.insert(p.a.end(), eta_.begin(), eta_.end());
  return MarkovLaw::path(eta_, std::move(p), length);
}

std::string BernoulliProcess::describe() const {
  std::ostringstream os;
  os.precision(17);
  os << "bernoulli(";
  for (std::size_t i = 0; i < eta_.size(); ++i) os << (i ? "," : "") << eta_[i];
  os << ")";
  return os.str();
}

MarkovProcess::MarkovProcess(Matrix transition, std::vector<double> stationary)
    : transition_(std::move(transition)),
      stationary_(std::move(stationary)),
      group_(GroupPresentation::integers()) {
  MarkovLaw{stationary_, transition_, {}}.validate();
  auto next = row_times(stationary_, transition_);
  for (std::size_t i = 0; i < next.size(); ++i)
    if (std::abs(next[i] - stationary_[i]) > kProbTol)
      throw InvalidArgument("distribution is not stationary for the transition matrix");
}

MarkovProcess MarkovProcess::symmetric_flip(double flip) {
  if (!(flip >= 0.0 && flip <= 1.0)) throw InvalidArgument("flip probability outside [0,1]");
  return MarkovProcess(Matrix{2, {1.0 - flip, flip, flip, 1.0 - flip}}, {0.5, 0.5});
}

BlockProductMeasure MarkovProcess::marginal(std::span<const GroupWord> F) const {
  require_distinct(F);
  std::vector<std::pair<std::int64_t, Vertex>> order;
  for (std::size_t i = 0; i < F.size(); ++i) order.emplace_back(integer_of(F[i]), static_cast<Vertex>(i));
  std::sort(order.begin(), order.end());
  std::vector<Vertex> sites(F.size());
  std::iota(sites.begin(), sites.end(), Vertex{0});
  if (order.empty()) return BlockProductMeasure(alphabet(), {}, {}, {}, {});
  MarkovLaw law{stationary_, transition_, {}};
  Block block;
  for (const auto& [x, i] : order) {
    law.offsets.push_back(static_cast<std::size_t>(x - order.front().first));
    block.vertices.push_back(i);
  }
  return BlockProductMeasure(alphabet(), std::move(sites), {std::move(law)}, {std::move(block)}, {});
}

BlockLaw MarkovProcess::interval_law(std::size_t length) const {
  return MarkovLaw::path(stationary_, transition_, length);
}

std::string MarkovProcess::describe() const {
  std::ostringstream os;
  os.precision(17);
  os << "markov(P=[";
  for (std::size_t i = 0; i < transition_.a.size(); ++i) os << (i ? "," : "") << transition_.a[i];
  os << "])";
  return os.str();
}

CoinducedProcess::CoinducedProcess(ProcessPtr base, GroupWord h, GroupPresentation group)
    : base_(std::move(base)), h_(std::move(h)), group_(std::move(group)) {
  if (!base_) throw InvalidArgument("coinduction needs a base process");
  const auto& bg = base_->group();
  if (bg.kind() != GroupKind::FreeAbelian || bg.rank() != 1)
    throw InvalidArgument("coinduction base must be a process over Z");
  group_.require(h_);
  if (h_.is_identity()) throw TorsionError("coinduction needs h of infinite order");
}

BlockProductMeasure CoinducedProcess::marginal(std::span<const GroupWord> F) const {
  require_distinct(F);
  std::map<GroupWord, std::vector<std::pair<std::int64_t, Vertex>>> fibers;
  for (std::size_t i = 0; i < F.size(); ++i) {
    auto [t, e] = group_.coset_representative(F[i], h_);
    fibers[t].emplace_back(e, static_cast<Vertex>(i));
  }
  std::vector<std::pair<BlockProductMeasure, std::vector<Vertex>>> parts;
  for (const auto& [t, members] : fibers) {
    std::vector<std::int64_t> exponents;
    std::vector<Vertex> targets;
    for (const auto& [e, i] : members) {
      exponents.push_back(e);
      targets.push_back(i);
    }
    parts.emplace_back(base_->marginal(integer_words(exponents)), std::move(targets));
  }
  return combine(alphabet(), F.size(), parts);
}

std::string CoinducedProcess::describe() const {
  return "coinduced(" + base_->describe() + ", h=" + word_key(h_) + ")";
}

ProcessPtr bernoulli_process(std::vector<double> eta, GroupPresentation group) {
  return std::make_shared<BernoulliProcess>(std::move(eta), std::move(group));
}

ProcessPtr markov_process(Matrix transition, std::vector<double> stationary) {
  return std::make_shared<MarkovProcess>(std::move(transition), std::move(stationary));
}

ProcessPtr coinduce(ProcessPtr base, GroupWord h, GroupPresentation group) {
  return std::make_shared<CoinducedProcess>(std::move(base), std::move(h), std::move(group));
}

std::vector<GroupWord> integer_words(std::span<const std::int64_t> values) {
  std::vector<GroupWord> out;
  out.reserve(values.size());
  for (auto x : values) out.push_back(GroupWord::abelian({x}));
  return out;
}

std::vector<std::int64_t> gapped_windows(std::size_t window, std::size_t q, std::int64_t gap) {
  std::vector<std::int64_t> out;
  const auto len = static_cast<std::int64_t>(window);
  for (std::size_t j = 0; j < q; ++j) {
    std::int64_t start = static_cast<std::int64_t>(j) * (len - 1 + gap);
    for (std::int64_t i = 0; i < len; ++i) out.push_back(start + i);
  }
  return out;
}

MixingRadius uniform_mixing_radius(const ProcessOracle& nu, std::size_t window, double eps,
                                   std::int64_t gap_cap, std::size_t q_max) {
  if (window < 1) throw InvalidArgument("window length must be positive");
  if (!(eps > 0.0)) throw InvalidArgument("epsilon must be positive");
  if (gap_cap < 1) throw InvalidArgument("gap cap must be at least 1");
  if (q_max < 2) throw InvalidArgument("q_max must be at least 2");
  MixingRadius out;
  out.window = window;
  out.epsilon = eps;
  out.q_max = q_max;
  out.gap_cap = gap_cap;
  std::vector<std::int64_t> first(window);
  std::iota(first.begin(), first.end(), std::int64_t{0});
  out.window_entropy = nu.marginal_entropy(integer_words(first));
  std::ostringstream family;
  family << "equally gapped windows of length " << window << ", 2 <= q <= " << q_max
         << ", gap = next start - previous end in [1, " << gap_cap << "]";
  out.family = family.str();
  for (std::int64_t gap = 1; gap <= gap_cap; ++gap) {
    bool all = true;
    for (std::size_t q = 2; q <= q_max; ++q) {
      double joint = nu.marginal_entropy(integer_words(gapped_windows(window, q, gap)));
      double target = static_cast<double>(q) * (out.window_entropy - eps);
      bool pass = joint >= target - 1e-12;
      out.rows.push_back({gap, q, joint, target, pass});
      all = all && pass;
    }
    if (all) {
      out.radius = gap;
      break;
    }
  }
  return out;
}

}  // namespace sofent
