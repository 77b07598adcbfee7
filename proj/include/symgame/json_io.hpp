#pragma once

// JSON interchange formats.
//
// Game:            {"players": n, "actions": [|A_1|,...], "common_payoff": true,
//                   "payoffs": [flat row-major array]}
//                  (non-common games carry one array per player instead)
// StrategyProfile: {"strategies": [[p,...],...]}
// Permutations are zero-based one-line index arrays; groups carry "elements"
// plus a "generators" sub-array.
//
// Doubles are emitted with shortest round-trip formatting, so values
// representable in 64-bit floats survive a dump/parse cycle bit-exactly.

#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "symgame/analysis.hpp"
#include "symgame/game.hpp"
#include "symgame/gamut.hpp"
#include "symgame/optimize.hpp"
#include "symgame/symmetry.hpp"

namespace symgame {

using json = nlohmann::json;

inline json game_to_json(const Game& game, const GamutSpec* provenance = nullptr) {
  json j;
  j["players"] = game.num_players();
  j["actions"] = game.action_counts();
  j["common_payoff"] = game.is_common_payoff();
  if (game.is_common_payoff()) {
    j["payoffs"] = game.shared_tensor();
  } else {
    json per_player = json::array();
    for (int i = 0; i < game.num_players(); ++i) per_player.push_back(game.tensor(i));
    j["payoffs"] = per_player;
  }
  if (provenance) {
    j["gamut"] = {{"class", to_string(provenance->cls)},
                  {"players", provenance->players},
                  {"actions", provenance->actions},
                  {"seed", provenance->seed}};
  }
  return j;
}

inline Game game_from_json(const json& j) {
  if (!j.contains("players") || !j.contains("actions") || !j.contains("payoffs"))
    throw std::invalid_argument("game JSON: need players, actions, payoffs");
  const int n = j.at("players").get<int>();
  auto actions = j.at("actions").get<std::vector<int>>();
  if (static_cast<int>(actions.size()) != n)
    throw std::invalid_argument("game JSON: actions array length != players");
  const bool common = j.value("common_payoff", true);
  if (common) {
    return Game(std::move(actions), j.at("payoffs").get<std::vector<double>>());
  }
  auto per_player = j.at("payoffs").get<std::vector<std::vector<double>>>();
  return Game(std::move(actions), std::move(per_player), /*common=*/false);
}

inline json profile_to_json(const StrategyProfile& profile) {
  return json{{"strategies", profile.strategies()}};
}

inline StrategyProfile profile_from_json(const json& j) {
  if (!j.contains("strategies"))
    throw std::invalid_argument("profile JSON: need strategies");
  return StrategyProfile(
      j.at("strategies").get<std::vector<std::vector<double>>>());
}

inline json permutation_to_json(const Permutation& p) { return json(p.map()); }

inline Permutation permutation_from_json(const json& j) {
  return Permutation(j.get<std::vector<int>>());
}

inline json group_to_json(const SymmetryGroup& g) {
  json elements = json::array();
  for (const auto& p : g.elements) elements.push_back(p.map());
  json generators = json::array();
  for (const auto& p : g.generators) generators.push_back(p.map());
  return json{{"elements", elements}, {"generators", generators}};
}

inline SymmetryGroup group_from_json(const json& j) {
  SymmetryGroup g;
  for (const auto& e : j.at("elements")) g.elements.push_back(permutation_from_json(e));
  if (j.contains("generators")) {
    for (const auto& e : j.at("generators"))
      g.generators.push_back(permutation_from_json(e));
  }
  std::sort(g.elements.begin(), g.elements.end());
  return g;
}

inline json opt_run_to_json(const OptRun& run) {
  json j;
  j["method"] = to_string(run.method);
  j["final_shared"] = run.final_shared;
  j["expected_utility"] = run.expected_utility;
  j["iterations_used"] = run.iterations_used;
  j["converged"] = run.converged;
  j["kkt_residual"] = run.kkt_residual;
  return j;
}

inline json analysis_report_to_json(const AnalysisReport& rep) {
  json j;
  j["exploitability"] = rep.exploitability;
  j["is_nash_at"] = rep.is_nash_at;
  j["is_deterministic"] = rep.is_deterministic;
  j["is_mixed"] = rep.is_mixed;
  j["is_degenerate"] = rep.is_degenerate ? json(*rep.is_degenerate) : json();
  j["asym_locally_optimal"] =
      rep.asym_locally_optimal ? json(to_string(*rep.asym_locally_optimal)) : json();
  j["perturbation_decrease_pct"] = rep.perturbation_decrease_pct
                                       ? json(*rep.perturbation_decrease_pct)
                                       : json();
  return j;
}

inline OptimizerConfig optimizer_config_from_json(const json& j) {
  OptimizerConfig cfg;
  cfg.step_size = j.value("step_size", cfg.step_size);
  cfg.max_iters = j.value("max_iters", cfg.max_iters);
  cfg.convergence_tol = j.value("convergence_tol", cfg.convergence_tol);
  cfg.restarts = j.value("restarts", cfg.restarts);
  cfg.seed = j.value("seed", cfg.seed);
  cfg.validate();
  return cfg;
}

inline json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  json j;
  in >> j;
  return j;
}

inline void save_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << text;
  if (!out) throw std::runtime_error("failed writing " + path);
}

}  // namespace symgame
