#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "symgame/analysis.hpp"
#include "symgame/fixtures.hpp"
#include "symgame/gamut.hpp"
#include "symgame/optimize.hpp"

using namespace symgame;
using Catch::Approx;

namespace {
const StrategyProfile kMid22({{0.5, 0.5}, {0.5, 0.5}});
}

TEST_CASE("exploitability of known profiles") {
  REQUIRE(exploitability(taxi_identical(), kMid22) == 0.0);
  REQUIRE(exploitability(taxi_both_needed(), kMid22) == 0.0);
  // Both at H: either taxi gains 2-1 by switching to W.
  const auto hh = StrategyProfile::point_masses(taxi_identical(), {0, 0});
  REQUIRE(exploitability(taxi_identical(), hh) == 1.0);
}

TEST_CASE("exploitability scales with positive affine payoff changes") {
  SplitMix64 rng(21);
  for (int rep = 0; rep < 20; ++rep) {
    const Game g = generate(
        {GamutClass::kRandomGame, 2 + static_cast<int>(rng.next_below(3)),
         2 + static_cast<int>(rng.next_below(3)), rng.next()});
    std::vector<std::vector<double>> s;
    for (int i = 0; i < g.num_players(); ++i)
      s.push_back(random_simplex(g.action_count(i), rng));
    const StrategyProfile prof(s);
    const double alpha = 0.25 + 4.0 * rng.next_double();
    const double beta = rng.uniform(-50.0, 50.0);
    std::vector<double> scaled = g.shared_tensor();
    for (auto& u : scaled) u = alpha * u + beta;
    const Game g2(g.action_counts(), std::move(scaled));
    REQUIRE(exploitability(g2, prof) ==
            Approx(alpha * exploitability(g, prof)).margin(1e-9));
  }
}

TEST_CASE("is_deterministic") {
  REQUIRE(is_deterministic(StrategyProfile({{1.0, 0.0}, {0.0, 1.0}})));
  REQUIRE_FALSE(is_deterministic(StrategyProfile({{0.5, 0.5}, {1.0, 0.0}})));
  const Game ten = ten_robot_game();
  REQUIRE(is_deterministic(
      StrategyProfile::point_masses(ten, std::vector<int>(10, 0))));
}

TEST_CASE("degeneracy of equilibria") {
  const Game deg = degenerate_3x3_game(0.1);
  const auto aa = StrategyProfile::point_masses(deg, {0, 0});
  REQUIRE(is_degenerate_equilibrium(deg, aa, 1e-9));

  // Mixed taxi optimum: against the opponent's pure H, own payoffs 1 vs 2
  // differ across the support, so mixing matters.
  REQUIRE_FALSE(is_degenerate_equilibrium(taxi_identical(), kMid22, 1e-9));

  // All-a in the ten-robot game: every unilateral deviation drops the payoff
  // from 1 to 0, so no player is indifferent.
  const Game ten = ten_robot_game();
  const auto all_a = StrategyProfile::point_masses(ten, std::vector<int>(10, 0));
  REQUIRE_FALSE(is_degenerate_equilibrium(ten, all_a, 1e-9));

  // Rejects non-equilibrium input.
  const auto hh = StrategyProfile::point_masses(taxi_identical(), {0, 0});
  REQUIRE_THROWS_AS(is_degenerate_equilibrium(taxi_identical(), hh, 1e-9),
                    std::invalid_argument);
}

TEST_CASE("stability verdicts") {
  REQUIRE(stability_verdict(taxi_identical(), kMid22, 1e-9) ==
          Stability::kUnstable);
  const Game ten = ten_robot_game();
  const auto all_a = StrategyProfile::point_masses(ten, std::vector<int>(10, 0));
  REQUIRE(stability_verdict(ten, all_a, 1e-9) == Stability::kStable);
  const Game deg = degenerate_3x3_game(0.1);
  REQUIRE(stability_verdict(deg, StrategyProfile::point_masses(deg, {0, 0}),
                            1e-9) == Stability::kUnknownDegenerate);
}

TEST_CASE("joint-deviation search oracle") {
  SplitMix64 rng(22);
  // Mixed taxi optimum: an anti-aligned pair improves.
  const auto found =
      asym_local_search_oracle(taxi_identical(), kMid22, 0.05, 2000, rng);
  REQUIRE(found.has_value());
  REQUIRE(expected_utility(taxi_identical(), *found)[0] > 1.5 + 1e-9);

  // Degenerate (a,a): row to b, column to c.
  const Game deg = degenerate_3x3_game(0.1);
  const auto aa = StrategyProfile::point_masses(deg, {0, 0});
  const auto improved = asym_local_search_oracle(deg, aa, 0.05, 2000, rng);
  REQUIRE(improved.has_value());

  // Stable all-a: nothing within radius 0.01.
  const Game ten = ten_robot_game();
  const auto all_a = StrategyProfile::point_masses(ten, std::vector<int>(10, 0));
  REQUIRE_FALSE(
      asym_local_search_oracle(ten, all_a, 0.01, 10000, rng).has_value());

  REQUIRE_THROWS_AS(asym_local_search_oracle(ten, all_a, 0.0, 10, rng),
                    std::invalid_argument);
}

TEST_CASE("payoff perturbation bound") {
  REQUIRE(perturbation_eps_nash_bound(0.0) == 0.0);
  REQUIRE(perturbation_eps_nash_bound(0.5) == 1.0);
  REQUIRE_THROWS_AS(perturbation_eps_nash_bound(-0.1), std::invalid_argument);

  // Empirical companion: perturbed games keep the optimum 2*eps-Nash.
  SplitMix64 rng(23);
  const double eps = 0.1;
  for (int rep = 0; rep < 100; ++rep) {
    const Game noisy = perturb_payoffs(taxi_identical(), eps, rng);
    REQUIRE(exploitability(noisy, kMid22) <= 2 * eps);
  }
}

TEST_CASE("total variation bound") {
  REQUIRE(tv_eps_nash_bound(0.0, taxi_identical()) == 0.0);
  REQUIRE(tv_eps_nash_bound(0.1, taxi_identical()) == Approx(0.8).margin(1e-15));

  // Profiles within TV 0.1 of the optimum stay 0.8-Nash.
  SplitMix64 rng(24);
  const double delta = 0.1;
  for (int rep = 0; rep < 100; ++rep) {
    std::vector<std::vector<double>> s = kMid22.strategies();
    for (auto& v : s) {
      const double shift = rng.uniform(-0.2, 0.2);
      v[0] += shift;
      v[1] -= shift;
      for (auto& p : v) p = std::clamp(p, 0.0, 1.0);
    }
    StrategyProfile cand(s);
    // Shrink toward the optimum until the exact TV is within delta.
    while (profile_tv_distance(cand, kMid22) > delta) {
      auto t = cand.strategies();
      for (std::size_t i = 0; i < t.size(); ++i)
        for (std::size_t a = 0; a < t[i].size(); ++a)
          t[i][a] = 0.5 * (t[i][a] + kMid22.strategy(i)[a]);
      cand = StrategyProfile(t);
    }
    REQUIRE(exploitability(taxi_identical(), cand) <=
            tv_eps_nash_bound(delta, taxi_identical()) + 1e-12);
  }
}

TEST_CASE("KL bound and Pinsker consistency") {
  REQUIRE(kl_eps_nash_bound(0.0, taxi_identical()) == 0.0);
  REQUIRE(kl_eps_nash_bound(0.02, taxi_identical()) == Approx(0.8).margin(1e-12));
  for (double nu : {0.001, 0.02, 0.5}) {
    REQUIRE(kl_eps_nash_bound(nu, taxi_identical()) ==
            Approx(tv_eps_nash_bound(std::sqrt(nu / 2), taxi_identical()))
                .margin(1e-12));
  }
}

TEST_CASE("profile distance helpers") {
  REQUIRE(profile_tv_distance(kMid22, kMid22) == 0.0);
  REQUIRE(profile_kl_divergence(kMid22, kMid22) == 0.0);
  const StrategyProfile other({{0.6, 0.4}, {0.5, 0.5}});
  REQUIRE(profile_tv_distance(kMid22, other) == Approx(0.1).margin(1e-12));
  const StrategyProfile pure({{1.0, 0.0}, {0.5, 0.5}});
  REQUIRE(profile_kl_divergence(kMid22, pure) ==
          std::numeric_limits<double>::infinity());
}

TEST_CASE("simultaneous best response") {
  const auto br_hh =
      simultaneous_best_response(taxi_identical(), kMid22, {0, 0});
  REQUIRE(expected_utility(taxi_identical(), br_hh)[0] == 1.0);

  // At a strict pure equilibrium the update reproduces the profile.
  const Game ten = ten_robot_game();
  const auto all_a = StrategyProfile::point_masses(ten, std::vector<int>(10, 0));
  const auto same =
      simultaneous_best_response(ten, all_a, std::vector<int>(10, 0));
  REQUIRE(same.strategies() == all_a.strategies());
  REQUIRE_THROWS_AS(
      simultaneous_best_response(ten, all_a, std::vector<int>(10, 1)),
      std::invalid_argument);

  const auto br_hw =
      simultaneous_best_response(taxi_both_needed(), kMid22, {0, 1});
  REQUIRE(expected_utility(taxi_both_needed(), br_hw)[0] == 0.0);
}

TEST_CASE("worst-case perturbation decrease") {
  // Mixed taxi optimum: worst joint selection (H,H) or (W,W) loses a third.
  const auto dec = worst_case_perturbation_decrease(taxi_identical(), kMid22, 1e-9);
  REQUIRE(dec.has_value());
  REQUIRE(dec->exact);
  REQUIRE(dec->pct == Approx(100.0 / 3.0).margin(1e-9));

  // Anti-coordination variant: worst selection wipes out all value.
  const auto dec_c =
      worst_case_perturbation_decrease(taxi_both_needed(), kMid22, 1e-9);
  REQUIRE(dec_c.has_value());
  REQUIRE(dec_c->pct == Approx(100.0).margin(1e-9));

  // Strict pure equilibrium: singleton best responses, zero decrease.
  const Game ten = ten_robot_game();
  const auto all_a = StrategyProfile::point_masses(ten, std::vector<int>(10, 0));
  const auto dec_pure = worst_case_perturbation_decrease(ten, all_a, 1e-9);
  REQUIRE(dec_pure.has_value());
  REQUIRE(dec_pure->pct == 0.0);

  // With a known payoff floor the denominator measures EU above the floor.
  const auto dec_floor = worst_case_perturbation_decrease(
      taxi_identical(), kMid22, 1e-9, /*payoff_floor=*/0.0);
  REQUIRE(dec_floor->pct == Approx(100.0 / 3.0).margin(1e-9));
  const auto dec_floor2 = worst_case_perturbation_decrease(
      taxi_identical(), kMid22, 1e-9, /*payoff_floor=*/-1.5);
  REQUIRE(dec_floor2->pct == Approx(100.0 * 0.5 / 3.0).margin(1e-9));

  REQUIRE_THROWS_AS(
      worst_case_perturbation_decrease(
          taxi_identical(), StrategyProfile::point_masses(taxi_identical(), {0, 0}),
          1e-9),
      std::invalid_argument);
}

TEST_CASE("decrease is zero exactly when best responses are singletons") {
  SplitMix64 rng(25);
  int mixed_seen = 0, pure_seen = 0;
  for (int rep = 0; rep < 40; ++rep) {
    const Game g = generate({GamutClass::kRandomGame, 2, 2, rng.next()});
    const auto part = OrbitPartition::single(2);
    OptimizerConfig cfg;
    cfg.seed = rng.next();
    cfg.restarts = 4;
    const auto best =
        best_of_runs(g, part, cfg, {Method::kReplicator, Method::kGradient}).best;
    const auto prof = expand_symmetric(g, part, best.final_shared);
    if (exploitability(g, prof) > 1e-8) continue;
    const auto dec = worst_case_perturbation_decrease(g, prof, 1e-6,
                                                      kGamutPayoffFloor);
    if (!dec) continue;
    bool all_singleton = true;
    for (int i = 0; i < 2; ++i)
      all_singleton =
          all_singleton && best_response_set(g, prof, i, 1e-6).size() == 1;
    if (all_singleton) {
      REQUIRE(dec->pct == 0.0);
      ++pure_seen;
    } else {
      REQUIRE(dec->pct > 0.0);
      ++mixed_seen;
    }
  }
  REQUIRE(mixed_seen > 0);
  REQUIRE(pure_seen > 0);
}

TEST_CASE("analyze composes a full report") {
  const auto rep = analyze(taxi_identical(), kMid22, 1e-6);
  REQUIRE(rep.exploitability == 0.0);
  REQUIRE(rep.is_mixed);
  REQUIRE_FALSE(rep.is_deterministic);
  REQUIRE(rep.is_degenerate.has_value());
  REQUIRE_FALSE(*rep.is_degenerate);
  REQUIRE(rep.asym_locally_optimal == Stability::kUnstable);
  REQUIRE(rep.perturbation_decrease_pct.has_value());
  REQUIRE(*rep.perturbation_decrease_pct == Approx(100.0 / 3.0).margin(1e-9));

  // Non-equilibrium input: equilibrium-only fields stay unset.
  const auto hh = StrategyProfile::point_masses(taxi_identical(), {0, 0});
  const auto rep2 = analyze(taxi_identical(), hh, 1e-6);
  REQUIRE(rep2.exploitability == 1.0);
  REQUIRE_FALSE(rep2.is_degenerate.has_value());
  REQUIRE_FALSE(rep2.asym_locally_optimal.has_value());
}
