#include <doctest.h>

#include <cmath>
#include <numeric>

#include "oracles.hpp"
#include "sofent/error.hpp"
#include "sofent/measures.hpp"

using namespace sofent;

TEST_SUITE("measures") {

TEST_CASE("entropy of small laws") {
  ExplicitMeasure mu(2, {0, 1}, {{{0, 0}, 0.5}, {{0, 1}, 0.25}, {{1, 1}, 0.25}});
  CHECK(entropy(mu) == doctest::Approx(1.5 * std::log(2.0)).epsilon(1e-12));
  CHECK(entropy(mu) == doctest::Approx(1.0397207708).epsilon(1e-9));
  CHECK(binary_entropy(0.25) == doctest::Approx(0.5623351446).epsilon(1e-9));
  CHECK(binary_entropy(0.0) == 0.0);
  CHECK(binary_entropy(1.0) == 0.0);
  CHECK(entropy(ExplicitMeasure::point_mass(3, {4}, {2})) == 0.0);
}

TEST_CASE("covering numbers use a strict inequality") {
  auto u = ExplicitMeasure::uniform(4, {0});
  CHECK(cov_epsilon(u, 0.3) == 3);
  CHECK(cov_epsilon(u, 0.25) == 4);
  CHECK(cov_epsilon(u, 0.26) == 3);
  CHECK_THROWS(cov_epsilon(u, 1.0));
}

TEST_CASE("explicit measure validation") {
  CHECK_THROWS_AS(ExplicitMeasure(2, {0}, {{{0}, 0.5}}), InvalidArgument);
  CHECK_THROWS_AS(ExplicitMeasure(2, {1, 0}, {{{0, 0}, 1.0}}), InvalidArgument);
  CHECK_THROWS_AS(ExplicitMeasure(2, {0}, {{{2}, 1.0}}), InvalidArgument);
  ExplicitMeasure merged(2, {0}, {{{1}, 0.5}, {{1}, 0.25}, {{0}, 0.25}});
  CHECK(merged.atoms().size() == 2);
  CHECK(merged.probability({1}) == doctest::Approx(0.75));
  CHECK_THROWS(ExplicitMeasure::uniform(2, std::vector<Vertex>(30, 0), 1000));
}

TEST_CASE("product measure is a cartesian product") {
  std::vector<double> eta{0.2, 0.8};
  auto mu = ExplicitMeasure::product(eta, {0, 3, 5});
  CHECK(mu.atoms().size() == 8);
  CHECK(mu.probability({1, 0, 1}) == doctest::Approx(0.8 * 0.2 * 0.8));
  CHECK(entropy(mu) == doctest::Approx(3 * oracle::entropy(std::vector<double>{0.2, 0.8})));
  CHECK_THROWS_AS(ExplicitMeasure::product(eta, std::vector<Vertex>{0, 1, 2, 3}, 8), CapExceeded);
}

TEST_CASE("explicit marginals") {
  ExplicitMeasure mu(3, {2, 5, 9}, {{{0, 1, 2}, 0.5}, {{0, 2, 2}, 0.25}, {{1, 1, 0}, 0.25}});
  auto m = marginal(mu, std::vector<Vertex>{9, 5});
  CHECK(m.sites() == std::vector<Vertex>{5, 9});
  CHECK(m.probability({1, 2}) == doctest::Approx(0.5));
  CHECK(m.probability({1, 0}) == doctest::Approx(0.25));
  CHECK_THROWS(marginal(mu, std::vector<Vertex>{4}));
}

TEST_CASE("Markov path entropy") {
  Matrix P{2, {0.75, 0.25, 0.25, 0.75}};
  auto law = MarkovLaw::path({0.5, 0.5}, P, 2);
  CHECK(entropy(law) == doctest::Approx(std::log(2.0) + binary_entropy(0.25)).epsilon(1e-12));
  auto long_law = MarkovLaw::path({0.5, 0.5}, P, 64);
  CHECK(entropy(long_law) == doctest::Approx(std::log(2.0) + 63 * binary_entropy(0.25)).epsilon(1e-12));
  auto enumerated = to_explicit(MarkovLaw::path({0.5, 0.5}, P, 10));
  CHECK(entropy(enumerated) == doctest::Approx(std::log(2.0) + 9 * binary_entropy(0.25)).epsilon(1e-12));
}

TEST_CASE("Markov subset marginals match path enumeration") {
  Rng rng(5);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t k = 2 + rng.below(2);
    auto law = MarkovLaw::path(oracle::random_simplex(rng, k), oracle::random_stochastic(rng, k), 9);
    std::vector<std::size_t> I;
    for (std::size_t i = 0; i < 9; ++i)
      if (rng.below(2)) I.push_back(i);
    if (I.empty()) I.push_back(rng.below(9));
    auto ours = oracle::joint(markov_subset_marginal(law, I));
    auto ref = oracle::markov_paths(law.initial, law.transition, I);
    CHECK(oracle::max_abs_diff(ours, ref) < 1e-12);
    auto selected = law.select(I);
    CHECK(entropy(selected) == doctest::Approx(oracle::entropy(ref)).epsilon(1e-10));
  }
}

TEST_CASE("block-product measures against brute-force enumeration") {
  Rng rng(2024);
  for (int trial = 0; trial < 60; ++trial) {
    auto mu = oracle::random_block_product(rng, 9, 3);
    auto joint = oracle::joint(mu);
    CHECK(entropy(mu) == doctest::Approx(oracle::entropy(joint)).epsilon(1e-10));
    CHECK(oracle::max_abs_diff(oracle::joint(to_explicit(mu)), joint) < 1e-12);
    for (double eps : {0.05, 0.3}) CHECK(cov_epsilon(Measure(mu), eps) == oracle::cov(joint, eps));
    std::vector<Vertex> S;
    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < mu.sites().size(); ++i)
      if (rng.below(2)) {
        S.push_back(mu.sites()[i]);
        keep.push_back(i);
      }
    auto m = marginal(mu, S);
    auto ref = oracle::project(joint, keep);
    CHECK(oracle::max_abs_diff(oracle::joint(to_explicit(m)), ref) < 1e-12);
    CHECK(entropy(m) == doctest::Approx(oracle::entropy(ref)).epsilon(1e-10));
  }
}

TEST_CASE("block-product validation") {
  std::vector<BlockLaw> laws{ExplicitMeasure::uniform(2, {0, 1})};
  CHECK_THROWS_AS(BlockProductMeasure(2, {0, 1, 2}, laws, {{{0, 1}, 0}}, {}), InvalidArgument);
  CHECK_THROWS_AS(BlockProductMeasure(2, {0, 1, 2}, laws, {{{0, 1}, 0}}, {{1, 0}, {2, 0}}), InvalidArgument);
  BlockProductMeasure ok(2, {0, 1, 2}, laws, {{{2, 0}, 0}}, {{1, 1}});
  CHECK(ok.locate(1).filler);
  CHECK(ok.locate(0).position == 1);
  CHECK(entropy(ok) == doctest::Approx(2 * std::log(2.0)));
}

TEST_CASE("observables and Rokhlin distance") {
  Rng rng(8);
  auto mu = oracle::random_explicit(rng, 2, {0, 1, 2});
  auto a = coordinate_observable({0});
  auto b = coordinate_observable({0, 1});
  auto c = constant_observable();
  CHECK(conditional_entropy(mu, a, b) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(rokhlin_distance(mu, a, a) == doctest::Approx(0.0));
  CHECK(joint_entropy(mu, a, c) == doctest::Approx(entropy(pushforward(mu, a))));
  auto t = tuple_observable({a, coordinate_observable({1})});
  CHECK(entropy(pushforward(mu, t)) == doctest::Approx(entropy(pushforward(mu, b))));
  std::map<Config, Config> table{{{0, 0, 0}, {1}}};
  CHECK_THROWS_AS(pushforward(mu, table_observable(table)), MissingPattern);
}

TEST_CASE("conditioning bound") {
  auto mu = ExplicitMeasure::uniform(2, {0, 1, 2});
  std::vector<Config> E{{0, 0, 0}, {1, 1, 1}};
  auto b = conditioning_bound(mu, E);
  CHECK(b.mass == doctest::Approx(0.25));
  double expect = 0.25 * std::log(2.0) + 0.75 * std::log(6.0) + binary_entropy(0.25);
  CHECK(b.bound == doctest::Approx(expect));
  CHECK(b.entropy <= b.bound + 1e-12);
}

TEST_CASE("total variation") {
  auto a = ExplicitMeasure::point_mass(2, {0}, {0});
  auto b = ExplicitMeasure::point_mass(2, {0}, {1});
  auto u = ExplicitMeasure::uniform(2, {0});
  CHECK(total_variation(a, b) == 1.0);
  CHECK(total_variation(a, u) == doctest::Approx(0.5));
  CHECK(total_variation(u, u) == 0.0);
}

TEST_CASE("sampling follows the law") {
  Rng rng(1);
  ExplicitMeasure mu(2, {0}, {{{0}, 0.2}, {{1}, 0.8}});
  int ones = 0;
  for (int i = 0; i < 20000; ++i) ones += sample(mu, rng)[0];
  CHECK(ones / 20000.0 == doctest::Approx(0.8).epsilon(0.02));
  Matrix P{2, {0.9, 0.1, 0.1, 0.9}};
  auto law = MarkovLaw::path({1.0, 0.0}, P, 3);
  int stay = 0;
  for (int i = 0; i < 20000; ++i) stay += sample(law, rng)[1] == 0;
  CHECK(stay / 20000.0 == doctest::Approx(0.9).epsilon(0.02));
}

}
