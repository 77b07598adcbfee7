#include <catch2/catch_amalgamated.hpp>

#include "symgame/fixtures.hpp"
#include "symgame/gamut.hpp"
#include "symgame/rng.hpp"
#include "symgame/symmetry.hpp"

using namespace symgame;
using Catch::Approx;

TEST_CASE("is_symmetry on the taxi games") {
  const Permutation swap01({1, 0});
  REQUIRE(is_symmetry(taxi_identical(), swap01));
  REQUIRE(is_symmetry(taxi_identical(), Permutation::identity(2)));
  // u(H,W)=0 vs u(W,H)=2 breaks the swap.
  std::string why;
  REQUIRE_FALSE(is_symmetry(taxi_permits(), swap01, &why));
  REQUIRE_FALSE(why.empty());
}

TEST_CASE("is_symmetry requires matching action counts") {
  const Game g({2, 3}, std::vector<double>(6, 1.0));
  std::string why;
  REQUIRE_FALSE(is_symmetry(g, Permutation({1, 0}), &why));
  REQUIRE(why.find("action counts") != std::string::npos);
  REQUIRE(is_symmetry(g, Permutation::identity(2)));
}

TEST_CASE("rotation symmetry of the robot-butler game") {
  const Game g = robot_butler_game();
  REQUIRE(is_symmetry(g, Permutation({1, 2, 3, 0})));
  REQUIRE(is_symmetry(g, Permutation({2, 3, 0, 1})));
}

TEST_CASE("generate_group closure") {
  const auto c4 = generate_group(4, {Permutation({1, 2, 3, 0})});
  REQUIRE(c4.elements.size() == 4);

  const auto trivial = generate_group(3, {});
  REQUIRE(trivial.elements.size() == 1);
  REQUIRE(trivial.elements[0] == Permutation::identity(3));

  const auto s3 = generate_group(3, {Permutation({1, 0, 2}), Permutation({0, 2, 1})});
  REQUIRE(s3.elements.size() == 6);

  REQUIRE_THROWS_AS(generate_group(5, {Permutation({1, 2, 3, 4, 0})}, 3),
                    std::runtime_error);
}

TEST_CASE("group axioms hold on generated groups") {
  SplitMix64 rng(77);
  for (int rep = 0; rep < 10; ++rep) {
    const int n = 3 + static_cast<int>(rng.next_below(3));
    std::vector<Permutation> gens;
    for (int k = 0; k < 2; ++k) {
      std::vector<int> m(n);
      std::iota(m.begin(), m.end(), 0);
      for (int i = n - 1; i > 0; --i) {
        std::swap(m[i], m[rng.next_below(static_cast<std::uint64_t>(i) + 1)]);
      }
      gens.emplace_back(std::move(m));
    }
    const auto g = generate_group(n, gens);
    REQUIRE(g.contains(Permutation::identity(n)));
    for (const auto& p : g.elements) {
      REQUIRE(g.contains(p.inverse()));
      for (const auto& q : g.elements) REQUIRE(g.contains(p.compose(q)));
    }
  }
}

TEST_CASE("all_symmetries") {
  REQUIRE(all_symmetries(taxi_identical()).elements.size() == 2);
  REQUIRE(all_symmetries(taxi_permits()).elements.size() == 1);
  // Generated games are totally symmetric.
  const Game g = generate({GamutClass::kCoordinationGame, 4, 3, 9});
  REQUIRE(all_symmetries(g).elements.size() == 24);
  // The symmetry set is closed under composition.
  const auto group = all_symmetries(robot_butler_game());
  for (const auto& p : group.elements)
    for (const auto& q : group.elements) REQUIRE(group.contains(p.compose(q)));

  const Game big(std::vector<int>(7, 2), std::vector<double>(128, 0.0));
  REQUIRE_THROWS_AS(all_symmetries(big), std::invalid_argument);
}

TEST_CASE("orbits of rotation groups") {
  const auto c4 = generate_group(4, {Permutation({1, 2, 3, 0})});
  const auto one = orbits(c4);
  REQUIRE(one.num_orbits() == 1);
  REQUIRE(one.orbits[0] == std::vector<int>({0, 1, 2, 3}));

  const auto opposite = generate_group(4, {Permutation({2, 3, 0, 1})});
  const auto pairs = orbits(opposite);
  REQUIRE(pairs.num_orbits() == 2);
  REQUIRE(pairs.orbits[0] == std::vector<int>({0, 2}));
  REQUIRE(pairs.orbits[1] == std::vector<int>({1, 3}));

  const auto none = orbits(generate_group(4, {}));
  REQUIRE(none.num_orbits() == 4);
}

TEST_CASE("orbit refinement: fewer generators refine more") {
  SplitMix64 rng(78);
  for (int rep = 0; rep < 10; ++rep) {
    const int n = 4 + static_cast<int>(rng.next_below(3));
    std::vector<Permutation> q_gens;
    for (int k = 0; k < 3; ++k) {
      std::vector<int> m(n);
      std::iota(m.begin(), m.end(), 0);
      for (int i = n - 1; i > 0; --i)
        std::swap(m[i], m[rng.next_below(static_cast<std::uint64_t>(i) + 1)]);
      q_gens.emplace_back(std::move(m));
    }
    std::vector<Permutation> p_gens(q_gens.begin(), q_gens.begin() + 1);
    const auto part_p = orbits(generate_group(n, p_gens));
    const auto part_q = orbits(generate_group(n, q_gens));
    // Every orbit of <P> sits inside one orbit of <Q>.
    for (const auto& orbit : part_p.orbits) {
      const int label = part_q.orbit_of[orbit.front()];
      for (int member : orbit) REQUIRE(part_q.orbit_of[member] == label);
    }
  }
}

TEST_CASE("pure-profile symmetry implies the mixed-profile identity") {
  SplitMix64 rng(79);
  for (const Game& g : {taxi_identical(), robot_butler_game(),
                        generate({GamutClass::kRandomGame, 3, 3, 4})}) {
    const auto group = all_symmetries(g);
    for (int rep = 0; rep < 100; ++rep) {
      std::vector<std::vector<double>> s;
      for (int i = 0; i < g.num_players(); ++i)
        s.push_back(random_simplex(g.action_count(i), rng));
      const StrategyProfile prof(s);
      const auto eu = expected_utility(g, prof);
      const auto& rho = group.elements[rng.next_below(group.elements.size())];
      std::vector<std::vector<double>> permuted(s.size());
      for (int j = 0; j < g.num_players(); ++j) permuted[j] = s[rho(j)];
      const auto eu_perm = expected_utility(g, StrategyProfile(permuted));
      for (int i = 0; i < g.num_players(); ++i) {
        REQUIRE(eu[rho(i)] == Approx(eu_perm[i]).margin(1e-9));
      }
    }
  }
}

TEST_CASE("is_invariant") {
  const auto one = OrbitPartition::single(2);
  REQUIRE(is_invariant(StrategyProfile({{0.5, 0.5}, {0.5, 0.5}}), one, 0.0));
  REQUIRE_FALSE(is_invariant(StrategyProfile({{0.5, 0.5}, {0.6, 0.4}}), one, 1e-9));

  // Alternating profile is invariant under the opposite-corner orbits.
  const auto pairs = orbits(generate_group(4, {Permutation({2, 3, 0, 1})}));
  const StrategyProfile alt({{0.3, 0.7}, {0.9, 0.1}, {0.3, 0.7}, {0.9, 0.1}});
  REQUIRE(is_invariant(alt, pairs, 0.0));
  REQUIRE_FALSE(is_invariant(alt, OrbitPartition::single(4), 1e-9));
}

TEST_CASE("expand_symmetric and read-back") {
  const Game butler = robot_butler_game();
  const auto pairs = orbits(generate_group(4, {Permutation({2, 3, 0, 1})}));
  const auto diag = expand_symmetric(butler, pairs, {{1.0, 0.0}, {0.0, 1.0}});
  REQUIRE(expected_utility(butler, diag)[0] == 2.0);
  REQUIRE(is_invariant(diag, pairs, 0.0));

  const Game ten = ten_robot_game();
  const auto all_a = expand_symmetric(ten, OrbitPartition::single(10),
                                      {{1.0, 0.0, 0.0}});
  REQUIRE(expected_utility(ten, all_a)[0] == 1.0);

  // Round trip: shared -> profile -> shared.
  SplitMix64 rng(80);
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<std::vector<double>> shared = {random_simplex(2, rng),
                                               random_simplex(2, rng)};
    const auto prof = expand_symmetric(butler, pairs, shared);
    REQUIRE(shared_from_profile(prof, pairs) == shared);
  }

  REQUIRE_THROWS_AS(
      expand_symmetric(butler, pairs, {{1.0, 0.0}}), std::invalid_argument);
  REQUIRE_THROWS_AS(
      expand_symmetric(butler, pairs, {{1.0, 0.0}, {0.5, 0.25, 0.25}}),
      std::invalid_argument);
}

TEST_CASE("permutation validation") {
  REQUIRE_THROWS_AS(Permutation({0, 0}), std::invalid_argument);
  REQUIRE_THROWS_AS(Permutation({0, 2}), std::invalid_argument);
  const Permutation p({2, 0, 1});
  REQUIRE(p.compose(p.inverse()) == Permutation::identity(3));
}
