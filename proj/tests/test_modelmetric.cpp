#include <doctest.h>

#include <cmath>
#include <numeric>

#include "sofent/construction.hpp"
#include "sofent/error.hpp"
#include "sofent/modelmetric.hpp"

using namespace sofent;

namespace {

double cyclic(std::int64_t a, std::int64_t b, std::int64_t n) {
  auto d = std::abs(a - b) % n;
  return static_cast<double>(std::min(d, n - d));
}

}  // namespace

TEST_SUITE("modelmetric") {

TEST_CASE("cycle distances are cyclic distances") {
  for (std::size_t n : {7u, 20u, 33u}) {
    auto sigma = build_cycle_sofic(n, 10);
    auto metric = build_metric(sigma, 3);
    for (Vertex a = 0; a < n; ++a)
      for (Vertex b = 0; b < n; ++b) CHECK(metric.distance(a, b) == doctest::Approx(cyclic(a, b, n)));
  }
}

TEST_CASE("weighted torus distances are weighted L1 torus distances") {
  std::vector<std::size_t> dims{6, 5};
  auto sigma = build_torus_sofic(dims, 20, {1.0, 2.5});
  auto metric = build_metric(sigma, 5);
  for (Vertex a = 0; a < 30; ++a)
    for (Vertex b = 0; b < 30; ++b) {
      auto ca = torus_coords(dims, a), cb = torus_coords(dims, b);
      double expect = cyclic(ca[0], cb[0], 6) + 2.5 * cyclic(ca[1], cb[1], 5);
      CHECK(metric.distance(a, b) == doctest::Approx(expect));
    }
}

TEST_CASE("separate components sit at the sentinel") {
  GroupPresentation z = GroupPresentation::integers();
  SoficMap sigma(z, 4, 4, {Permutation({1, 0, 3, 2})});
  auto metric = build_metric(sigma, 2);
  CHECK(metric.component_count() == 2);
  CHECK(metric.distance(0, 1) == 1.0);
  CHECK(metric.distance(0, 2) == metric.sentinel());
  CHECK(metric.sentinel() > 2 * metric.diameter_bound());
  CHECK(metric.distance(2, 2) == 0.0);
}

TEST_CASE("r_edge must fit in the budget") {
  auto sigma = build_cycle_sofic(10, 2);
  CHECK_THROWS_AS(build_metric(sigma, 3), BudgetExceeded);
}

TEST_CASE("balls") {
  auto sigma = build_cycle_sofic(30, 10);
  auto metric = build_metric(sigma, 4);
  CHECK(metric.ball_size(0, 3) == 7);
  CHECK(metric.open_ball(0, 3).size() == 5);
  auto ball = metric.ball(5, 2);
  CHECK(ball.front().first == 3);
  CHECK(ball.back().first == 7);
}

TEST_CASE("greedy separated sets are separated and maximal") {
  GroupPresentation f2(GroupKind::Free, 2);
  auto sigma = build_random_sofic(f2, 120, 3, 8);
  auto metric = build_metric(sigma, 2);
  std::vector<Vertex> W(120);
  std::iota(W.begin(), W.end(), Vertex{0});
  for (double r : {1.0, 2.0, 3.0}) {
    auto set = separated_set_greedy(metric, W, r);
    CHECK(set.covers);
    CHECK(is_r_separated(metric, set.members, r));
    CHECK(is_maximal_separated(metric, W, set.members, r));
    for (std::size_t i = 0; i < set.members.size(); ++i)
      for (std::size_t j = i + 1; j < set.members.size(); ++j)
        CHECK(metric.distance(set.members[i], set.members[j]) >= r);
    for (auto w : W) {
      bool near = false;
      for (auto s : set.members) near = near || metric.distance(w, s) < r;
      CHECK(near);
    }
  }
  std::vector<Vertex> bad{0, sigma.act(f2.generator(0), 0)};
  if (bad[0] != bad[1]) CHECK_FALSE(is_r_separated(metric, bad, 2.0));
}

TEST_CASE("isometric neighbourhoods on a large cycle") {
  auto sigma = build_cycle_sofic(40, 10);
  auto metric = build_metric(sigma, 3);
  CHECK(is_isometric_at(sigma, metric, 0, 4));
  auto small = build_cycle_sofic(6, 10);
  auto small_metric = build_metric(small, 3);
  CHECK_FALSE(is_isometric_at(small, small_metric, 0, 4));
}

TEST_CASE("good vertices on a cut cycle") {
  auto sigma = build_cycle_sofic(40, 10);
  GroupPresentation z = GroupPresentation::integers();
  std::vector<GroupWord> F{z.identity(), z.generator(0)};
  auto d = z.coset_decompose(F, z.generator(0));
  auto cycles = extract_cycles(sigma, z.generator(0));
  auto partition = partition_paths(cycles, 8);
  auto good = good_vertices(sigma, d, partition);
  // Every vertex but the last of each of the five paths.
  CHECK(good.size() == 35);
  for (auto v : good) CHECK(v % 8 != 7);
  CHECK(injective_vertices(sigma, F).size() == 40);
}

TEST_CASE("edge listing") {
  auto sigma = build_cycle_sofic(5, 4);
  auto metric = build_metric(sigma, 1);
  CHECK(metric.edges().size() == 5);
  CHECK(metric.edge_count() == 5);
  auto csv = metric_edges_csv(metric);
  CHECK(csv.find("0,1,1") != std::string::npos);
}

}
