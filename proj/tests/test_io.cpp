#include <catch2/catch_amalgamated.hpp>

#include "symgame/fixtures.hpp"
#include "symgame/json_io.hpp"
#include "symgame/sweep.hpp"
#include "symgame/toml_lite.hpp"

using namespace symgame;
using Catch::Approx;

TEST_CASE("game JSON round trip is bit-exact") {
  SplitMix64 rng(31);
  for (int rep = 0; rep < 10; ++rep) {
    const GamutSpec spec{GamutClass::kRandomGame,
                         2 + static_cast<int>(rng.next_below(3)),
                         2 + static_cast<int>(rng.next_below(3)), rng.next()};
    const Game g = generate(spec);
    const Game back = game_from_json(json::parse(game_to_json(g, &spec).dump()));
    REQUIRE(back.shared_tensor() == g.shared_tensor());
    REQUIRE(back.action_counts() == g.action_counts());
    REQUIRE(back.is_common_payoff());
  }

  // Awkward doubles survive as well.
  const Game tricky({2, 2}, {0.1, 1e-300, -0.0, 12345678901234.5678});
  const Game back = game_from_json(json::parse(game_to_json(tricky).dump()));
  REQUIRE(back.shared_tensor() == tricky.shared_tensor());
}

TEST_CASE("non-common games carry one tensor per player") {
  const Game g({2, 2}, {{1.0, 2.0, 3.0, 4.0}, {4.0, 3.0, 2.0, 1.0}}, false);
  const Game back = game_from_json(json::parse(game_to_json(g).dump()));
  REQUIRE_FALSE(back.is_common_payoff());
  REQUIRE(back.tensor(0) == g.tensor(0));
  REQUIRE(back.tensor(1) == g.tensor(1));
}

TEST_CASE("game JSON rejects malformed input") {
  REQUIRE_THROWS(game_from_json(json::parse(R"({"players": 2})")));
  REQUIRE_THROWS(game_from_json(json::parse(
      R"({"players": 2, "actions": [2], "payoffs": [1,2,3,4]})")));
  REQUIRE_THROWS(game_from_json(json::parse(
      R"({"players": 2, "actions": [2,2], "common_payoff": true, "payoffs": [1,2,3]})")));
}

TEST_CASE("profile JSON round trip") {
  SplitMix64 rng(32);
  for (int rep = 0; rep < 10; ++rep) {
    std::vector<std::vector<double>> s = {random_simplex(3, rng),
                                          random_simplex(2, rng)};
    const StrategyProfile prof(s);
    const auto back = profile_from_json(json::parse(profile_to_json(prof).dump()));
    REQUIRE(back.strategies() == prof.strategies());
  }
}

TEST_CASE("permutation and group JSON") {
  const Permutation p({2, 0, 1});
  REQUIRE(permutation_from_json(json::parse(permutation_to_json(p).dump())) == p);

  const auto g = generate_group(4, {Permutation({1, 2, 3, 0})});
  const auto back = group_from_json(json::parse(group_to_json(g).dump()));
  REQUIRE(back.elements.size() == 4);
  REQUIRE(back.generators.size() == 1);
  for (const auto& e : g.elements) REQUIRE(back.contains(e));
}

TEST_CASE("opt run and analysis report JSON fields") {
  OptimizerConfig cfg;
  cfg.seed = 3;
  const auto run = run_replicator(taxi_identical(), OrbitPartition::single(2),
                                  {{0.4, 0.6}}, cfg);
  const json j = opt_run_to_json(run);
  REQUIRE(j.at("method") == "replicator");
  REQUIRE(j.at("converged").get<bool>());
  REQUIRE(j.at("final_shared")[0][0].get<double>() == run.final_shared[0][0]);
  REQUIRE(j.at("expected_utility").get<double>() == run.expected_utility);
  REQUIRE(j.contains("iterations_used"));
  REQUIRE(j.contains("kkt_residual"));

  const auto rep =
      analyze(taxi_identical(), StrategyProfile({{0.5, 0.5}, {0.5, 0.5}}), 1e-6);
  const json jr = analysis_report_to_json(rep);
  REQUIRE(jr.at("exploitability").get<double>() == 0.0);
  REQUIRE(jr.at("is_mixed").get<bool>());
  REQUIRE(jr.at("asym_locally_optimal") == "unstable");
  REQUIRE(jr.at("is_degenerate").get<bool>() == false);
  REQUIRE(jr.at("perturbation_decrease_pct").get<double>() ==
          Approx(100.0 / 3.0).margin(1e-9));

  const auto rep2 = analyze(
      taxi_identical(), StrategyProfile::point_masses(taxi_identical(), {0, 0}),
      1e-6);
  const json jr2 = analysis_report_to_json(rep2);
  REQUIRE(jr2.at("is_degenerate").is_null());
  REQUIRE(jr2.at("asym_locally_optimal").is_null());
}

TEST_CASE("optimizer config from JSON") {
  const auto cfg = optimizer_config_from_json(
      json::parse(R"({"step_size": 0.5, "max_iters": 50, "seed": 9})"));
  REQUIRE(cfg.step_size == 0.5);
  REQUIRE(cfg.max_iters == 50);
  REQUIRE(cfg.seed == 9);
  REQUIRE(cfg.restarts == 10);  // default preserved
  REQUIRE_THROWS(optimizer_config_from_json(json::parse(R"({"step_size": 0})")));
}

TEST_CASE("toml subset parser") {
  const std::string text = R"(
# sweep configuration
classes = ["RandomGame", "CoordinationGame"]
players_min = 2
players_max = 5
games_per_cell = 100        # paper scale
master_seed = 43
mixedness_threshold = 1e-4
output_dir = "out/sweep"
flag = true
)";
  const TomlTable t = parse_toml(text);
  REQUIRE(t.at("players_min").as_int() == 2);
  REQUIRE(t.at("games_per_cell").as_int() == 100);
  REQUIRE(t.at("mixedness_threshold").as_double() == Approx(1e-4));
  REQUIRE(t.at("output_dir").as_string() == "out/sweep");
  REQUIRE(t.at("flag").as_bool());
  const auto& classes = t.at("classes").as_array();
  REQUIRE(classes.size() == 2);
  REQUIRE(classes[0].as_string() == "RandomGame");

  REQUIRE_THROWS_AS(parse_toml("key 5"), std::invalid_argument);
  REQUIRE_THROWS_AS(parse_toml("[section]"), std::invalid_argument);
  REQUIRE_THROWS_AS(parse_toml("key = "), std::invalid_argument);
  REQUIRE_THROWS_AS(parse_toml("key = [1, 2"), std::invalid_argument);
}

TEST_CASE("sweep config from toml") {
  const auto cfg = sweep_config_from_toml(parse_toml(R"(
classes = ["random"]
players_min = 2
players_max = 3
actions_min = 2
actions_max = 3
games_per_cell = 5
runs_per_method = 4
master_seed = 7
threads = 2
output_dir = "x"
)"));
  REQUIRE(cfg.classes == std::vector<GamutClass>{GamutClass::kRandomGame});
  REQUIRE(cfg.players_max == 3);
  REQUIRE(cfg.games_per_cell == 5);
  REQUIRE(cfg.runs_per_method == 4);
  REQUIRE(cfg.master_seed == 7);
  REQUIRE(cfg.threads == 2);
  REQUIRE(cfg.output_dir == "x");
}
