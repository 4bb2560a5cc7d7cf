#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <span>
#include <utility>
#include <variant>
#include <vector>

#include "sofent/rng.hpp"
#include "sofent/types.hpp"

namespace sofent {

// Probability tolerance for normalization checks.
inline constexpr double kProbTol = 1e-12;
// Atoms lighter than this are dropped.
inline constexpr double kAtomFloor = 1e-15;
inline constexpr std::size_t kDefaultEnumCap = std::size_t{1} << 22;

// Small dense row-major square matrix.
struct Matrix {
  std::size_t k = 0;
  std::vector<double> a;

  static Matrix identity(std::size_t k);
  double operator()(std::size_t i, std::size_t j) const { return a[i * k + j]; }
  double& operator()(std::size_t i, std::size_t j) { return a[i * k + j]; }
  std::span<const double> row(std::size_t i) const { return {a.data() + i * k, k}; }
};

Matrix operator*(const Matrix& x, const Matrix& y);
Matrix matrix_power(const Matrix& m, std::uint64_t e);
std::vector<double> row_times(std::span<const double> v, const Matrix& m);

// A probability measure on A^sites as a sparse list of atoms.
//
// Sites are strictly increasing vertex labels; configurations are indexed by
// site position. Atoms are kept sorted by configuration, duplicates merged.
class ExplicitMeasure {
 public:
  ExplicitMeasure(std::size_t alphabet, std::vector<Vertex> sites,
                  std::vector<std::pair<Config, double>> atoms);

  static ExplicitMeasure point_mass(std::size_t alphabet, std::vector<Vertex> sites, Config config);
  static ExplicitMeasure uniform(std::size_t alphabet, std::vector<Vertex> sites,
                                 std::size_t cap = kDefaultEnumCap);
  // eta^sites.
  static ExplicitMeasure product(std::span<const double> eta, std::vector<Vertex> sites,
                                 std::size_t cap = kDefaultEnumCap);

  std::size_t alphabet() const { return alphabet_; }
  const std::vector<Vertex>& sites() const { return sites_; }
  const std::vector<std::pair<Config, double>>& atoms() const { return atoms_; }
  // Position of v among the sites; throws if absent.
  std::size_t site_index(Vertex v) const;
  bool has_site(Vertex v) const;
  double probability(const Config& c) const;

 private:
  std::size_t alphabet_;
  std::vector<Vertex> sites_;
  std::vector<std::pair<Config, double>> atoms_;
};

// Law of (X_{o_1}, ..., X_{o_m}) for a Markov chain X_0, X_1, ... started
// from `initial` with transition matrix `transition`; offsets strictly
// increasing. A full path law of length l has offsets 0..l-1.
struct MarkovLaw {
  std::vector<double> initial;
  Matrix transition;
  std::vector<std::size_t> offsets;

  static MarkovLaw path(std::vector<double> initial, Matrix transition, std::size_t length);
  void validate() const;
  std::size_t alphabet() const { return transition.k; }
  std::size_t length() const { return offsets.size(); }
  // The law restricted to the given positions (indices into `offsets`).
  MarkovLaw select(std::span<const std::size_t> positions) const;
};

using BlockLaw = std::variant<ExplicitMeasure, MarkovLaw>;

std::size_t law_length(const BlockLaw& law);

struct Block {
  std::vector<Vertex> vertices;  // in law order (path order)
  std::size_t law = 0;           // index into the measure's law table
};

// Independent blocks, each with its own law, and a deterministic filler on
// the remaining sites.
class BlockProductMeasure {
 public:
  BlockProductMeasure(std::size_t alphabet, std::vector<Vertex> sites, std::vector<BlockLaw> laws,
                      std::vector<Block> blocks, std::vector<std::pair<Vertex, Symbol>> filler);

  // eta^sites as singleton blocks sharing one law.
  static BlockProductMeasure product(std::span<const double> eta, std::vector<Vertex> sites);

  std::size_t alphabet() const { return alphabet_; }
  const std::vector<Vertex>& sites() const { return sites_; }
  const std::vector<BlockLaw>& laws() const { return laws_; }
  const std::vector<Block>& blocks() const { return blocks_; }
  const std::vector<std::pair<Vertex, Symbol>>& filler() const { return filler_; }

  struct Location {
    bool filler = false;
    std::size_t block = 0;     // block index, or filler index when filler
    std::size_t position = 0;  // position inside the block
  };
  Location locate(Vertex v) const;
  // Index of v among the sites; throws if absent.
  std::size_t site_position(Vertex v) const;

 private:
  std::size_t alphabet_;
  std::vector<Vertex> sites_;
  std::vector<BlockLaw> laws_;
  std::vector<Block> blocks_;
  std::vector<std::pair<Vertex, Symbol>> filler_;
  std::vector<Location> location_;  // by site position
};

using Measure = std::variant<ExplicitMeasure, BlockProductMeasure>;

std::size_t alphabet_of(const Measure& mu);
const std::vector<Vertex>& sites_of(const Measure& mu);

// pi_{S*} mu. S must be a subset of the sites (any order; deduplicated).
ExplicitMeasure marginal(const ExplicitMeasure& mu, std::span<const Vertex> S);
BlockProductMeasure marginal(const BlockProductMeasure& mu, std::span<const Vertex> S);
Measure marginal(const Measure& mu, std::span<const Vertex> S);

// Shannon entropy in nats.
double entropy(std::span<const double> probabilities);
double entropy(const ExplicitMeasure& mu);
double entropy(const MarkovLaw& law);
double entropy(const BlockLaw& law);
double entropy(const BlockProductMeasure& mu);
double entropy(const Measure& mu);

double binary_entropy(double p);

// min{|E| : mu(E) > 1 - eps}.
std::size_t cov_epsilon(const ExplicitMeasure& mu, double eps);
std::size_t cov_epsilon(const Measure& mu, double eps, std::size_t cap = kDefaultEnumCap);

// Enumerates a block-product measure (or a single law) into atoms.
ExplicitMeasure to_explicit(const BlockProductMeasure& mu, std::size_t cap = kDefaultEnumCap);
ExplicitMeasure to_explicit(const MarkovLaw& law, std::size_t cap = kDefaultEnumCap);
ExplicitMeasure to_explicit(const BlockLaw& law, std::size_t cap = kDefaultEnumCap);
ExplicitMeasure to_explicit(const Measure& mu, std::size_t cap = kDefaultEnumCap);

// Marginal of a Markov path law on positions I (0-based offsets), enumerated
// by bridging consecutive selected positions with matrix powers. Sites of the
// result are the positions.
ExplicitMeasure markov_subset_marginal(const MarkovLaw& law, std::span<const std::size_t> I,
                                       std::size_t cap = kDefaultEnumCap);

// Observables on an explicit measure: functions of the full configuration.
using Observable = std::function<Config(const Config&)>;

// Looks values up in a table; configurations not in the table throw
// MissingPattern.
Observable table_observable(std::map<Config, Config> table);
// The sub-configuration at the given site positions.
Observable coordinate_observable(std::vector<std::size_t> positions);
Observable constant_observable(Config value = {});
Observable tuple_observable(std::vector<Observable> parts);

std::map<Config, double> pushforward(const ExplicitMeasure& mu, const Observable& alpha);
double entropy(const std::map<Config, double>& distribution);
double joint_entropy(const ExplicitMeasure& mu, const Observable& alpha, const Observable& beta);
// H(alpha | beta) = H(alpha, beta) - H(beta).
double conditional_entropy(const ExplicitMeasure& mu, const Observable& alpha,
                           const Observable& beta);
double rokhlin_distance(const ExplicitMeasure& mu, const Observable& alpha,
                        const Observable& beta);

// Both sides of the conditioning bound for an event E of A^sites:
// H(mu) <= mu(E) log|E| + (1 - mu(E)) log|A^V \ E| + H(mu(E)).
struct ConditioningBound {
  double entropy = 0.0;
  double bound = 0.0;
  double mass = 0.0;
};
ConditioningBound conditioning_bound(const ExplicitMeasure& mu, std::span<const Config> event);

double total_variation(const ExplicitMeasure& a, const ExplicitMeasure& b);

// One draw from mu, indexed by site position.
Config sample(const ExplicitMeasure& mu, Rng& rng);
Config sample(const MarkovLaw& law, Rng& rng);
Config sample(const Measure& mu, Rng& rng);

}  // namespace sofent
