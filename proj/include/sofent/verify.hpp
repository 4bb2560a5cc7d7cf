#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "sofent/group.hpp"
#include "sofent/measures.hpp"
#include "sofent/modelmetric.hpp"
#include "sofent/observable.hpp"
#include "sofent/processes.hpp"
#include "sofent/sofic.hpp"

namespace sofent {

// Which separated sets a mixing certificate examines.
struct SetSampler {
  bool ascending = true;
  bool descending = true;
  std::size_t random_orders = 3;
  std::uint64_t seed = 0;
  std::vector<std::vector<Vertex>> user_sets;
};

struct SetResult {
  std::string origin;  // "ascending", "descending", "random:<i>", "user:<i>"
  std::vector<Vertex> members;
  bool separated = false;
  bool maximal = false;
  std::size_t orbit_size = 0;  // |sigma^F(S)|
  double entropy = 0.0;        // H(pi_{sigma^F(S)*} mu)
  double ratio = 0.0;          // entropy / |S|
  double target = 0.0;         // H(mu_F) - eps
  bool pass = false;
};

struct MixingCertificate {
  std::vector<GroupWord> F;
  double epsilon = 0.0;
  double r = 0.0;
  std::string window_description;
  std::size_t window_size = 0;
  double process_entropy = 0.0;  // H(mu_F)
  std::vector<SetResult> sets;
  bool pass = false;
};

// Tests H(pi_{sigma^F(S)*} mu) >= |S| (H(mu_F) - eps) on maximal r-separated
// subsets S of W produced by the sampler. The verdict is scoped to the tested
// family.
MixingCertificate certify_uniform_model_mixing(const Measure& mu, const SoficMap& sigma,
                                               const ModelMetric& metric,
                                               const ProcessOracle& process,
                                               std::span<const GroupWord> F, double eps, double r,
                                               std::span<const Vertex> W,
                                               const std::string& window_description,
                                               const SetSampler& sampler);

struct Lemma1Report {
  std::size_t sites = 0;
  double epsilon = 0.0;
  double entropy = 0.0;
  std::size_t cov = 0;
  double log_cov = 0.0;
  double log_universe = 0.0;  // log |A^V|
  double h_epsilon = 0.0;
  double bound = 0.0;  // log cov + eps log|A^V| + H(eps)
  bool pass = false;
};

// H(mu) <= log cov_eps(mu) + eps log|A^V| + H(eps), for eps in (0, 1/2].
Lemma1Report lemma1_bound_check(const ExplicitMeasure& mu, double eps);

struct Lemma1Row {
  std::size_t sites = 0;
  double entropy_per_site = 0.0;
  double log_cov_per_site = 0.0;
  bool pass = false;
};
std::vector<Lemma1Row> lemma1_sequence(std::span<const ExplicitMeasure> measures, double eps);

struct Lemma4Report {
  std::vector<Vertex> S;
  double h_alpha = 0.0;      // H(pi_{sigma^F(S)})
  double h_beta = 0.0;       // H(pi_S o phi^sigma)
  double sum_conditional = 0.0;  // sum_s H(alpha_s | beta_s)
  double rhs = 0.0;
  double slack = 0.0;  // rhs - h_alpha
  bool pass = false;
};

// H(alpha) <= H(beta) + sum_s H(alpha_s | beta_s).
Lemma4Report lemma4_chain_check(const Measure& mu, const SoficMap& sigma,
                                const LocalObservable& phi, std::span<const Vertex> S,
                                std::size_t cap = kDefaultEnumCap);

struct ConvergenceReport {
  std::vector<GroupWord> F;
  double delta = 0.0;
  std::size_t examined = 0;
  std::size_t below_delta = 0;
  std::size_t zero_tv = 0;  // TV <= kZeroTv
  double fraction = 0.0;
  double zero_fraction = 0.0;
  double max_tv = 0.0;
  std::vector<std::size_t> histogram;  // 10 equal bins on [0, 1]
  std::vector<Vertex> vertices;
  std::vector<double> tv;
};

inline constexpr double kZeroTv = 1e-12;

// Total variation between (Pi_{v,F})_* mu and mu_F for every vertex
// (sample_budget == 0) or for sample_budget seeded vertices.
ConvergenceReport diagnose_local_convergence(const Measure& mu, const ProcessOracle& process,
                                             const SoficMap& sigma, std::span<const GroupWord> F,
                                             double delta, std::size_t sample_budget,
                                             std::uint64_t seed,
                                             std::size_t cap = kDefaultEnumCap);

// (Pi_{v,F})_* mu on sites 0..|F|-1.
ExplicitMeasure pullback_marginal(const Measure& mu, const SoficMap& sigma, Vertex v,
                                  std::span<const GroupWord> F, std::size_t cap = kDefaultEnumCap);

struct Theorem1Report {
  double r = 0.0;
  double epsilon = 0.0;
  std::size_t K = 0;  // |B_rho(1_G, r)|
  std::size_t vertices = 0;
  std::size_t window_size = 0;   // |W|
  std::size_t small_balls = 0;   // |W'|
  std::size_t y_size = 0;        // |Y| = |W cap W'|
  std::size_t s_size = 0;        // |S|
  bool separated = false;
  bool covering_pass = false;    // |S| K >= |Y|
  double process_entropy = 0.0;  // H_mu(psi)
  double pushforward_entropy = 0.0;  // H(psi^sigma_* mu)
  double per_vertex_entropy = 0.0;
  double scaled_target = 0.0;  // H_mu(psi) / (8K + 1)
  bool exact = true;           // false: plug-in estimate from samples
  std::size_t samples = 0;
  bool pass = false;           // every exactly checkable inequality held
};

Theorem1Report theorem1_report(const Measure& mu, const SoficMap& sigma, const ModelMetric& metric,
                               const ProcessOracle& process, const LocalObservable& psi,
                               std::span<const Vertex> W, double eps, double r,
                               std::size_t cap = kDefaultEnumCap, std::size_t samples = 4096,
                               std::uint64_t seed = 0);

}  // namespace sofent
