// Command-line front end: generate games, find invariant optima, analyze
// profiles, enumerate symmetries, run experiment sweeps, and check the
// built-in fixtures.
//
// Exit codes: 0 success, 1 assertion/fixture failure, 2 usage or I/O error.

#include <cstdio>
#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "symgame/analysis.hpp"
#include "symgame/fixtures.hpp"
#include "symgame/gamut.hpp"
#include "symgame/json_io.hpp"
#include "symgame/optimize.hpp"
#include "symgame/sweep.hpp"
#include "symgame/symmetry.hpp"
#include "symgame/toml_lite.hpp"

namespace {

using namespace symgame;

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    if (text.empty() || text.back() != '\n') std::cout << '\n';
  } else {
    save_text_file(out_path, text);
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Orbit partition for the CLI: either the single orbit of a totally symmetric
// game (verified via the cycle and swap generators) or the orbits of a
// user-supplied generator set, each checked against the game.
OrbitPartition partition_for(const Game& game, const std::string& group_path,
                             bool total) {
  const int n = game.num_players();
  if (total || group_path.empty()) {
    if (n > 1) {
      std::vector<int> cycle(static_cast<std::size_t>(n));
      for (int i = 0; i < n; ++i)
        cycle[static_cast<std::size_t>(i)] = (i + 1) % n;
      std::vector<int> swap01(static_cast<std::size_t>(n));
      for (int i = 0; i < n; ++i) swap01[static_cast<std::size_t>(i)] = i;
      std::swap(swap01[0], swap01[1]);
      std::string why;
      if (!is_symmetry(game, Permutation(cycle), &why) ||
          !is_symmetry(game, Permutation(swap01), &why)) {
        throw std::runtime_error(
            "game is not totally symmetric (" + why +
            "); pass --group with verified generator permutations");
      }
    }
    return OrbitPartition::single(n);
  }
  const json j = load_json_file(group_path);
  std::vector<Permutation> gens;
  const json& arr = j.is_array() ? j : j.at("generators");
  for (const auto& e : arr) gens.push_back(permutation_from_json(e));
  for (const auto& g : gens) {
    std::string why;
    if (!is_symmetry(game, g, &why))
      throw std::runtime_error("permutation " + json(g.map()).dump() +
                               " is not a symmetry of the game: " + why);
  }
  return orbits(generate_group(n, gens));
}

int cmd_generate(const std::string& cls, int players, int actions,
                 std::uint64_t seed, const std::string& out_path) {
  GamutSpec spec{gamut_class_from_string(cls), players, actions, seed};
  const Game game = generate(spec);
  emit(game_to_json(game, &spec).dump(2), out_path);
  return 0;
}

// Groups print with one permutation per line (zero-based index arrays).
std::string format_group(const SymmetryGroup& group) {
  std::ostringstream os;
  const auto emit_list = [&](const std::vector<Permutation>& perms) {
    for (std::size_t k = 0; k < perms.size(); ++k) {
      os << "    " << json(perms[k].map()).dump()
         << (k + 1 < perms.size() ? "," : "") << "\n";
    }
  };
  os << "{\n  \"elements\": [\n";
  emit_list(group.elements);
  os << "  ],\n  \"generators\": [\n";
  emit_list(group.generators);
  os << "  ]\n}";
  return os.str();
}

int cmd_symmetries(const std::string& game_path, int cap,
                   const std::string& out_path) {
  const Game game = game_from_json(load_json_file(game_path));
  emit(format_group(all_symmetries(game, cap)), out_path);
  return 0;
}

int cmd_optimize(const std::string& game_path, const std::string& group_path,
                 bool total, const std::string& method,
                 const OptimizerConfig& config, const std::string& out_path) {
  const Game game = game_from_json(load_json_file(game_path));
  const OrbitPartition partition = partition_for(game, group_path, total);
  std::vector<Method> methods;
  if (method == "replicator") methods = {Method::kReplicator};
  else if (method == "gradient") methods = {Method::kGradient};
  else if (method == "both") methods = {Method::kReplicator, Method::kGradient};
  else throw CLI::ValidationError("--method must be replicator|gradient|both");
  const auto result = best_of_runs(game, partition, config, methods);
  json j;
  j["best"] = opt_run_to_json(result.best);
  json runs = json::array();
  for (const auto& r : result.all) runs.push_back(opt_run_to_json(r));
  j["runs"] = runs;
  json orbits_json = json::array();
  for (const auto& o : partition.orbits) orbits_json.push_back(o);
  j["orbits"] = orbits_json;
  emit(j.dump(2), out_path);
  return 0;
}

std::string report_markdown(const AnalysisReport& rep) {
  std::ostringstream os;
  os << "| field | value |\n|---|---|\n";
  os << "| exploitability | " << rep.exploitability << " |\n";
  os << "| is_nash_at | " << rep.is_nash_at << " |\n";
  os << "| deterministic | " << (rep.is_deterministic ? "yes" : "no") << " |\n";
  os << "| mixed | " << (rep.is_mixed ? "yes" : "no") << " |\n";
  os << "| degenerate | "
     << (rep.is_degenerate ? (*rep.is_degenerate ? "yes" : "no") : "n/a")
     << " |\n";
  os << "| joint-deviation verdict | "
     << (rep.asym_locally_optimal ? to_string(*rep.asym_locally_optimal) : "n/a")
     << " |\n";
  os << "| worst-case decrease | ";
  if (rep.perturbation_decrease_pct) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.4f%%", *rep.perturbation_decrease_pct);
    os << buf;
  } else {
    os << "n/a";
  }
  os << " |\n";
  return os.str();
}

int cmd_analyze(const std::string& game_path, const std::string& profile_path,
                double nash_tol, int grid, const std::string& format,
                const std::string& out_path) {
  const Game game = game_from_json(load_json_file(game_path));
  const StrategyProfile profile = profile_from_json(load_json_file(profile_path));
  const AnalysisReport rep = analyze(game, profile, nash_tol);
  json j = analysis_report_to_json(rep);
  if (grid > 0) {
    if (game.num_players() != 2 || game.action_count(0) != 2 ||
        game.action_count(1) != 2)
      throw std::runtime_error("--grid needs a 2-player, 2-action game");
    json rows = json::array();
    for (int i = 0; i < grid; ++i) {
      const double p = static_cast<double>(i) / (grid - 1);
      json row = json::array();
      for (int k = 0; k < grid; ++k) {
        const double q = static_cast<double>(k) / (grid - 1);
        const StrategyProfile point({{p, 1 - p}, {q, 1 - q}});
        row.push_back(expected_utility(game, point)[0]);
      }
      rows.push_back(row);
    }
    j["eu_grid"] = rows;
  }
  if (format == "md") {
    emit(report_markdown(rep), out_path);
  } else {
    emit(j.dump(2), out_path);
  }
  return 0;
}

int cmd_sweep(const std::string& config_path, const std::string& out_dir,
              int threads, std::optional<std::uint64_t> seed,
              const std::string& format) {
  SweepConfig cfg;
  if (!config_path.empty()) {
    if (config_path.size() > 5 &&
        config_path.substr(config_path.size() - 5) == ".json") {
      const json j = load_json_file(config_path);
      cfg = sweep_config_from_toml(TomlTable{});  // defaults
      if (j.contains("classes")) {
        cfg.classes.clear();
        for (const auto& c : j.at("classes"))
          cfg.classes.push_back(gamut_class_from_string(c.get<std::string>()));
      }
      cfg.players_min = j.value("players_min", cfg.players_min);
      cfg.players_max = j.value("players_max", cfg.players_max);
      cfg.actions_min = j.value("actions_min", cfg.actions_min);
      cfg.actions_max = j.value("actions_max", cfg.actions_max);
      cfg.games_per_cell = j.value("games_per_cell", cfg.games_per_cell);
      cfg.runs_per_method = j.value("runs_per_method", cfg.runs_per_method);
      cfg.master_seed = j.value("master_seed", cfg.master_seed);
      cfg.mixedness_threshold =
          j.value("mixedness_threshold", cfg.mixedness_threshold);
      cfg.output_dir = j.value("output_dir", cfg.output_dir);
    } else {
      cfg = sweep_config_from_toml(parse_toml(read_file(config_path)));
    }
  }
  if (!out_dir.empty()) cfg.output_dir = out_dir;
  if (threads > 0) cfg.threads = threads;
  if (seed) cfg.master_seed = *seed;
  cfg.validate();
  const SweepResult result = run_sweep(cfg);
  const auto written = write_sweep_outputs(result, cfg, cfg.output_dir);
  if (format == "json") {
    json cells = json::array();
    for (const auto& c : result.cells) {
      cells.push_back({{"class", to_string(c.cls)},
                       {"players", c.players},
                       {"actions", c.actions},
                       {"frac_mixed", c.frac_mixed},
                       {"frac_single_replicator", c.frac_single_replicator},
                       {"frac_single_gradient", c.frac_single_gradient},
                       {"frac_any10_replicator", c.frac_any_replicator},
                       {"frac_any10_gradient", c.frac_any_gradient},
                       {"mean_decrease_pct",
                        std::isnan(c.mean_decrease_pct)
                            ? json()
                            : json(c.mean_decrease_pct)},
                       {"n_games", c.n_games}});
    }
    std::cout << cells.dump(2) << "\n";
  } else if (format == "md") {
    std::cout << read_file((std::filesystem::path(cfg.output_dir) / "summary.md")
                               .string());
  } else {
    std::cout << cells_csv(result);
  }
  std::cerr << "wrote " << written.size() << " files to " << cfg.output_dir
            << "\n";
  int failed = 0;
  for (const auto& g : result.games) failed += g.failed ? 1 : 0;
  if (failed > 0) {
    std::cerr << failed << " games failed; see summary.md\n";
    return 1;
  }
  return 0;
}

int cmd_fixtures() {
  const auto checks = run_fixture_checks();
  bool all_ok = true;
  for (const auto& c : checks) {
    std::cout << (c.passed ? "[PASS] " : "[FAIL] ") << c.name;
    if (!c.detail.empty()) std::cout << ": " << c.detail;
    std::cout << "\n";
    all_ok = all_ok && c.passed;
  }
  return all_ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"symgame: symmetric common-payoff game analysis"};
  app.require_subcommand(1);

  // generate
  auto* gen = app.add_subcommand("generate", "generate a game from a seeded class");
  std::string gen_class = "random";
  int gen_players = 2, gen_actions = 2;
  std::uint64_t gen_seed = 0;
  std::string gen_out;
  gen->add_option("--class", gen_class, "random|coordination|collaboration");
  gen->add_option("--players", gen_players, "number of players")->check(CLI::Range(2, 12));
  gen->add_option("--actions", gen_actions, "actions per player")->check(CLI::Range(2, 12));
  gen->add_option("--seed", gen_seed, "draw seed");
  gen->add_option("--out", gen_out, "output file (stdout if omitted)");

  // symmetries
  auto* sym = app.add_subcommand("symmetries", "enumerate all symmetries of a game");
  std::string sym_game, sym_out;
  int sym_cap = 6;
  sym->add_option("--game", sym_game, "game JSON file")->required();
  sym->add_option("--cap", sym_cap, "brute-force player cap");
  sym->add_option("--out", sym_out, "output file");

  // optimize
  auto* opt = app.add_subcommand("optimize", "search for an invariant local optimum");
  std::string opt_game, opt_group, opt_method = "both", opt_out, opt_config;
  bool opt_total = false;
  OptimizerConfig opt_cfg;
  opt->add_option("--game", opt_game, "game JSON file")->required();
  opt->add_option("--group", opt_group, "JSON file with generator permutations");
  opt->add_flag("--total", opt_total, "use the single all-players orbit");
  opt->add_option("--method", opt_method, "replicator|gradient|both");
  opt->add_option("--restarts", opt_cfg.restarts, "runs per method");
  opt->add_option("--seed", opt_cfg.seed, "master seed");
  opt->add_option("--step", opt_cfg.step_size, "step size (unit payoff scale)");
  opt->add_option("--max-iters", opt_cfg.max_iters, "iteration cap");
  opt->add_option("--tol", opt_cfg.convergence_tol, "convergence tolerance");
  opt->add_option("--config", opt_config, "optimizer config (TOML or JSON)");
  opt->add_option("--out", opt_out, "output file");

  // analyze
  auto* ana = app.add_subcommand("analyze", "equilibrium/stability report for a profile");
  std::string ana_game, ana_profile, ana_format = "json", ana_out;
  double ana_tol = 1e-6;
  int ana_grid = 0;
  ana->add_option("--game", ana_game, "game JSON file")->required();
  ana->add_option("--profile", ana_profile, "profile JSON file")->required();
  ana->add_option("--nash-tol", ana_tol, "equilibrium tolerance");
  ana->add_option("--grid", ana_grid, "also dump an NxN expected-utility grid");
  ana->add_option("--format", ana_format, "json|md");
  ana->add_option("--out", ana_out, "output file");

  // sweep
  auto* swp = app.add_subcommand("sweep", "run the experiment sweep");
  std::string swp_config, swp_out, swp_format = "csv";
  int swp_threads = 0;
  std::uint64_t swp_seed = 0;
  bool swp_seed_set = false;
  swp->add_option("--config", swp_config, "sweep config (TOML, or JSON by extension)");
  swp->add_option("--out", swp_out, "output directory");
  swp->add_option("--threads", swp_threads, "worker threads (0 = hardware)");
  swp->add_option("--seed", swp_seed, "master seed override")
      ->each([&](const std::string&) { swp_seed_set = true; });
  swp->add_option("--format", swp_format, "stdout format: csv|md|json");

  // fixtures
  app.add_subcommand("fixtures", "run the built-in golden examples");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (gen->parsed())
      return cmd_generate(gen_class, gen_players, gen_actions, gen_seed, gen_out);
    if (sym->parsed()) return cmd_symmetries(sym_game, sym_cap, sym_out);
    if (opt->parsed()) {
      if (!opt_config.empty()) {
        const int restarts = opt_cfg.restarts;
        const std::uint64_t seed = opt_cfg.seed;
        if (opt_config.size() > 5 &&
            opt_config.substr(opt_config.size() - 5) == ".json") {
          opt_cfg = optimizer_config_from_json(load_json_file(opt_config));
        } else {
          const TomlTable t = parse_toml(read_file(opt_config));
          if (auto it = t.find("step_size"); it != t.end())
            opt_cfg.step_size = it->second.as_double();
          if (auto it = t.find("max_iters"); it != t.end())
            opt_cfg.max_iters = static_cast<int>(it->second.as_int());
          if (auto it = t.find("convergence_tol"); it != t.end())
            opt_cfg.convergence_tol = it->second.as_double();
          if (auto it = t.find("restarts"); it != t.end())
            opt_cfg.restarts = static_cast<int>(it->second.as_int());
          if (auto it = t.find("seed"); it != t.end())
            opt_cfg.seed = static_cast<std::uint64_t>(it->second.as_int());
        }
        // Command-line values win over config-file values when both given.
        if (opt->count("--restarts")) opt_cfg.restarts = restarts;
        if (opt->count("--seed")) opt_cfg.seed = seed;
      }
      return cmd_optimize(opt_game, opt_group, opt_total, opt_method, opt_cfg,
                          opt_out);
    }
    if (ana->parsed())
      return cmd_analyze(ana_game, ana_profile, ana_tol, ana_grid, ana_format,
                         ana_out);
    if (swp->parsed())
      return cmd_sweep(swp_config, swp_out, swp_threads,
                       swp_seed_set ? std::optional<std::uint64_t>(swp_seed)
                                    : std::nullopt,
                       swp_format);
    if (app.get_subcommand("fixtures")->parsed()) return cmd_fixtures();
  } catch (const CLI::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
