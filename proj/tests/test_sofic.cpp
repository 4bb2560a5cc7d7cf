#include <doctest.h>

#include <set>

#include "sofent/error.hpp"
#include "sofent/sofic.hpp"

using namespace sofent;

TEST_SUITE("sofic") {

TEST_CASE("permutation algebra") {
  Permutation p({2, 0, 1, 3});
  Permutation q({1, 0, 3, 2});
  CHECK(compose(p, p.inverse()).is_identity());
  CHECK(compose(p, q)(0) == p(q(0)));
  CHECK(p.pow(3).is_identity());
  CHECK(p.pow(-1) == p.inverse());
  CHECK(Permutation::cycle(5).pow(5).is_identity());
  CHECK_THROWS(Permutation({0, 0, 1}));
}

TEST_CASE("cycle approximation acts by translation") {
  auto sigma = build_cycle_sofic(17, 10);
  GroupPresentation z = GroupPresentation::integers();
  for (std::int64_t k = -10; k <= 10; ++k)
    for (Vertex v = 0; v < 17; ++v)
      CHECK(sigma.act(z.generator(0, k), v) == static_cast<Vertex>(((static_cast<std::int64_t>(v) + k) % 17 + 17) % 17));
  CHECK_THROWS_AS(sigma.permutation(z.generator(0, 11)), BudgetExceeded);
}

TEST_CASE("torus approximation acts coordinatewise") {
  std::vector<std::size_t> dims{5, 7};
  auto sigma = build_torus_sofic(dims, 6);
  for (Vertex v = 0; v < 35; ++v) {
    auto c = torus_coords(dims, v);
    CHECK(torus_index(dims, c) == v);
    auto w = sigma.act(GroupWord::abelian({2, -3}), v);
    auto d = torus_coords(dims, w);
    CHECK(d[0] == (c[0] + 2) % 5);
    CHECK(d[1] == (c[1] - 3 + 7) % 7);
  }
}

TEST_CASE("random approximation of F2 is homomorphic and seeded") {
  GroupPresentation f2(GroupKind::Free, 2);
  auto sigma = build_random_sofic(f2, 50, 11, 6);
  auto again = build_random_sofic(f2, 50, 11, 6);
  auto other = build_random_sofic(f2, 50, 12, 6);
  CHECK(sigma.generators() == again.generators());
  CHECK(sigma.generators() != other.generators());
  auto a = f2.generator(0), b = f2.generator(1);
  CHECK(sigma.permutation(mul(a, b)) == compose(sigma.permutation(a), sigma.permutation(b)));
  CHECK(sigma.permutation(mul(a, inverse(a))).is_identity());
  CHECK(sigma.permutation(power(b, -2)) == sigma.permutation(b).pow(-2));
}

TEST_CASE("overrides replace single words") {
  GroupPresentation z = GroupPresentation::integers();
  std::map<GroupWord, Permutation> overrides{{z.generator(0, 2), Permutation::identity(6)}};
  SoficMap sigma(z, 6, 4, {Permutation::cycle(6)}, overrides);
  CHECK_FALSE(sigma.homomorphic());
  CHECK(sigma.permutation(z.generator(0, 2)).is_identity());
  CHECK(sigma.act(z.generator(0, 3), 0) == 3);
}

TEST_CASE("orbit images and pullback names") {
  auto sigma = build_cycle_sofic(10, 4);
  GroupPresentation z = GroupPresentation::integers();
  std::vector<GroupWord> F{z.identity(), z.generator(0)};
  std::vector<Vertex> S{0, 4, 9};
  CHECK(orbit_image(sigma, F, S) == std::vector<Vertex>{0, 1, 4, 5, 9});
  Config a{0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
  CHECK(pullback_name(sigma, 9, F, a) == Config{9, 0});
}

TEST_CASE("pushed observables read the pulled-back pattern") {
  auto sigma = build_cycle_sofic(8, 4);
  GroupPresentation z = GroupPresentation::integers();
  std::vector<GroupWord> F{z.identity(), z.generator(0), z.generator(0, 2)};
  auto phi = LocalObservable::parity(F);
  Config a{1, 0, 1, 1, 0, 0, 1, 0};
  auto pushed = push_observable(sigma, phi, a);
  for (Vertex v = 0; v < 8; ++v) CHECK(pushed[v] == (a[v] ^ a[(v + 1) % 8] ^ a[(v + 2) % 8]));
}

TEST_CASE("defect report") {
  GroupPresentation z = GroupPresentation::integers();
  std::vector<GroupWord> F;
  for (int k = -2; k <= 2; ++k) F.push_back(z.generator(0, k));
  CHECK(defect_report(build_cycle_sofic(5, 4), F).injective_fraction == 1.0);
  CHECK(defect_report(build_cycle_sofic(4, 4), F).injective_fraction == 0.0);

  std::vector<std::size_t> dims{8, 8};
  auto torus = build_torus_sofic(dims, 20);
  GroupPresentation z2(GroupKind::FreeAbelian, 2);
  std::vector<std::pair<GroupWord, GroupWord>> pairs{{z2.identity(), z2.generator(1)}};
  auto rep = defect_report(torus, std::vector<GroupWord>{z2.identity()}, z2.generator(0), pairs, -8, 8);
  CHECK(rep.pairs.at(0).fixed_fraction == 0.0);
  // Pairs inside one coset of <h> are rejected.
  std::vector<std::pair<GroupWord, GroupWord>> same{{z2.identity(), z2.generator(0)}};
  CHECK_THROWS(defect_report(torus, std::vector<GroupWord>{z2.identity()}, z2.generator(0), same, -1, 1));
}

TEST_CASE("local observables") {
  GroupPresentation z = GroupPresentation::integers();
  std::vector<GroupWord> F{z.identity(), z.generator(0)};
  auto id = LocalObservable::identity(F, 3);
  CHECK(id.output_alphabet() == 9);
  std::set<Symbol> seen;
  for (Symbol x = 0; x < 3; ++x)
    for (Symbol y = 0; y < 3; ++y) seen.insert(id(std::vector<Symbol>{x, y}));
  CHECK(seen.size() == 9);
  auto proj = LocalObservable::projection(F, 1, 3);
  CHECK(proj(std::vector<Symbol>{2, 1}) == 1);
  LocalObservable partial(F, 2, 2, {0, 1, -1, 1});
  CHECK_THROWS_AS(partial(std::vector<Symbol>{0, 1}), MissingPattern);
  auto fn = LocalObservable::from_function(F, 2, 2, [](std::span<const Symbol> p) { return p[0] & p[1]; });
  CHECK(fn(std::vector<Symbol>{1, 1}) == 1);
  CHECK(fn(std::vector<Symbol>{1, 0}) == 0);
}

}
