#pragma once

// Batch experiment runner: sweeps generated game classes over player/action
// grids, optimizes every game with multi-restart replicator dynamics and
// projected gradient ascent, and aggregates per-cell statistics:
//   - fraction of games whose best solution is mixed,
//   - fraction of single runs reaching the best-of-all solution (per method),
//   - fraction of games where at least one of a method's runs reaches it,
//   - mean worst-case perturbation decrease over games with mixed optima.
//
// Per-game seeds derive from (master_seed, class, players, actions, index), so
// results are byte-identical regardless of worker count or scheduling.

#include <atomic>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "symgame/analysis.hpp"
#include "symgame/game.hpp"
#include "symgame/gamut.hpp"
#include "symgame/optimize.hpp"
#include "symgame/symmetry.hpp"
#include "symgame/toml_lite.hpp"

namespace symgame {

struct SweepConfig {
  std::vector<GamutClass> classes = {GamutClass::kRandomGame,
                                     GamutClass::kCoordinationGame,
                                     GamutClass::kCollaborationGame};
  int players_min = 2, players_max = 5;
  int actions_min = 2, actions_max = 5;
  int games_per_cell = 100;
  int runs_per_method = 10;
  std::uint64_t master_seed = 0;
  double mixedness_threshold = 1e-4;   // mixed iff some max action prob < 1 - this
  double optimality_rel_tol = 1e-6;    // "reaches best" tolerance, scaled below
  OptimizerConfig optimizer;           // restarts/seed overridden per game
  std::string output_dir = "sweep_out";
  int threads = 0;                     // 0 = hardware concurrency

  void validate() const {
    if (classes.empty()) throw std::invalid_argument("sweep: no classes");
    if (players_min < 2 || players_min > players_max)
      throw std::invalid_argument("sweep: bad player range");
    if (actions_min < 2 || actions_min > actions_max)
      throw std::invalid_argument("sweep: bad action range");
    if (games_per_cell < 1) throw std::invalid_argument("sweep: games_per_cell");
    if (runs_per_method < 1) throw std::invalid_argument("sweep: runs_per_method");
  }
};

// Outcome for a single generated game.
struct GameOutcome {
  GamutClass cls;
  int players = 0, actions = 0, index = 0;
  std::uint64_t seed = 0;
  bool failed = false;
  std::string error;
  double best_eu = 0.0;
  bool best_mixed = false;
  double best_exploitability = 0.0;
  double best_kkt = 0.0;
  bool best_converged = false;
  int optimal_runs_replicator = 0;
  int optimal_runs_gradient = 0;
  std::vector<std::vector<double>> best_shared;
  std::optional<double> decrease_pct;  // only for mixed equilibria
};

struct CellResult {
  GamutClass cls;
  int players = 0, actions = 0;
  int n_games = 0;
  int failed_games = 0;
  double frac_mixed = 0.0;
  double frac_single_replicator = 0.0;
  double frac_single_gradient = 0.0;
  double frac_any_replicator = 0.0;
  double frac_any_gradient = 0.0;
  double mean_decrease_pct = std::numeric_limits<double>::quiet_NaN();
  int decrease_games = 0;
};

struct SweepResult {
  std::vector<CellResult> cells;
  std::vector<GameOutcome> games;
};

inline std::uint64_t gamut_class_id(GamutClass c) {
  return static_cast<std::uint64_t>(c) + 1;
}

inline std::uint64_t per_game_seed(std::uint64_t master, GamutClass cls,
                                   int players, int actions, int index) {
  return derive_seed(master, {gamut_class_id(cls),
                              static_cast<std::uint64_t>(players),
                              static_cast<std::uint64_t>(actions),
                              static_cast<std::uint64_t>(index)});
}

inline GameOutcome run_sweep_game(const SweepConfig& config, GamutClass cls,
                                  int players, int actions, int index) {
  GameOutcome out;
  out.cls = cls;
  out.players = players;
  out.actions = actions;
  out.index = index;
  out.seed = per_game_seed(config.master_seed, cls, players, actions, index);
  try {
    const Game game = generate({cls, players, actions, out.seed});
    const auto partition = OrbitPartition::single(players);
    OptimizerConfig cfg = config.optimizer;
    cfg.restarts = config.runs_per_method;
    cfg.seed = out.seed;
    const auto result =
        best_of_runs(game, partition, cfg, {Method::kReplicator, Method::kGradient});
    out.best_eu = result.best.expected_utility;
    out.best_kkt = result.best.kkt_residual;
    out.best_converged = result.best.converged;
    out.best_shared = result.best.final_shared;

    double max_prob = 1.0;
    for (const auto& x : result.best.final_shared) {
      double m = 0.0;
      for (double p : x) m = std::max(m, p);
      max_prob = std::min(max_prob, m);
    }
    out.best_mixed = max_prob < 1.0 - config.mixedness_threshold;

    const auto expanded = expand_symmetric(game, partition, result.best.final_shared);
    out.best_exploitability = exploitability(game, expanded);

    const double eq_tol =
        config.optimality_rel_tol * std::max(1.0, std::abs(out.best_eu));
    for (const auto& run : result.all) {
      if (run.expected_utility >= out.best_eu - eq_tol) {
        (run.method == Method::kReplicator ? out.optimal_runs_replicator
                                           : out.optimal_runs_gradient)++;
      }
    }

    if (out.best_mixed && out.best_exploitability <= 1e-6) {
      if (auto dec = worst_case_perturbation_decrease(
              game, expanded, /*br_tol=*/1e-6,
              /*payoff_floor=*/kGamutPayoffFloor, /*sample_seed=*/out.seed)) {
        out.decrease_pct = dec->pct;
      }
    }
  } catch (const std::exception& e) {
    out.failed = true;
    out.error = e.what();
  }
  return out;
}

inline SweepResult run_sweep(const SweepConfig& config) {
  config.validate();
  struct Task {
    GamutClass cls;
    int players, actions, index;
  };
  std::vector<Task> tasks;
  for (const GamutClass cls : config.classes) {
    for (int p = config.players_min; p <= config.players_max; ++p) {
      for (int a = config.actions_min; a <= config.actions_max; ++a) {
        for (int g = 0; g < config.games_per_cell; ++g) {
          tasks.push_back({cls, p, a, g});
        }
      }
    }
  }
  SweepResult result;
  result.games.resize(tasks.size());

  int workers = config.threads > 0
                    ? config.threads
                    : static_cast<int>(std::thread::hardware_concurrency());
  if (workers < 1) workers = 1;
  std::atomic<std::size_t> next{0};
  const auto worker = [&]() {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= tasks.size()) break;
      const Task& t = tasks[i];
      result.games[i] = run_sweep_game(config, t.cls, t.players, t.actions, t.index);
    }
  };
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  // Deterministic reduce in task order.
  std::size_t i = 0;
  for (const GamutClass cls : config.classes) {
    for (int p = config.players_min; p <= config.players_max; ++p) {
      for (int a = config.actions_min; a <= config.actions_max; ++a) {
        CellResult cell;
        cell.cls = cls;
        cell.players = p;
        cell.actions = a;
        cell.n_games = config.games_per_cell;
        int mixed = 0, any_rep = 0, any_grad = 0, single_rep = 0, single_grad = 0;
        double decrease_sum = 0.0;
        int decrease_n = 0, ok_games = 0;
        for (int g = 0; g < config.games_per_cell; ++g, ++i) {
          const GameOutcome& o = result.games[i];
          if (o.failed) {
            ++cell.failed_games;
            continue;
          }
          ++ok_games;
          if (o.best_mixed) ++mixed;
          single_rep += o.optimal_runs_replicator;
          single_grad += o.optimal_runs_gradient;
          if (o.optimal_runs_replicator > 0) ++any_rep;
          if (o.optimal_runs_gradient > 0) ++any_grad;
          if (o.decrease_pct) {
            decrease_sum += *o.decrease_pct;
            ++decrease_n;
          }
        }
        if (ok_games > 0) {
          cell.frac_mixed = static_cast<double>(mixed) / ok_games;
          cell.frac_single_replicator =
              static_cast<double>(single_rep) /
              (static_cast<double>(ok_games) * config.runs_per_method);
          cell.frac_single_gradient =
              static_cast<double>(single_grad) /
              (static_cast<double>(ok_games) * config.runs_per_method);
          cell.frac_any_replicator = static_cast<double>(any_rep) / ok_games;
          cell.frac_any_gradient = static_cast<double>(any_grad) / ok_games;
        }
        if (decrease_n > 0) cell.mean_decrease_pct = decrease_sum / decrease_n;
        cell.decrease_games = decrease_n;
        result.cells.push_back(std::move(cell));
      }
    }
  }
  return result;
}

// --- output files ---

namespace detail {

inline std::string fixed6(double v) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(6);
  os << v;
  return os.str();
}

inline std::string fixed4(double v) {
  if (std::isnan(v)) return "";
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(4);
  os << v;
  return os.str();
}

}  // namespace detail

// One row per (class, players, actions) cell.
inline std::string cells_csv(const SweepResult& result) {
  std::ostringstream os;
  os << "class,players,actions,frac_mixed,frac_single_replicator,"
        "frac_single_gradient,frac_any10_replicator,frac_any10_gradient,"
        "mean_decrease_pct,n_games\n";
  for (const auto& c : result.cells) {
    os << to_string(c.cls) << ',' << c.players << ',' << c.actions << ','
       << detail::fixed6(c.frac_mixed) << ','
       << detail::fixed6(c.frac_single_replicator) << ','
       << detail::fixed6(c.frac_single_gradient) << ','
       << detail::fixed6(c.frac_any_replicator) << ','
       << detail::fixed6(c.frac_any_gradient) << ','
       << detail::fixed4(c.mean_decrease_pct) << ',' << c.n_games << '\n';
  }
  return os.str();
}

namespace detail {

template <typename Get>
std::string matrix_csv(const SweepResult& result, GamutClass cls,
                       const SweepConfig& config, Get get) {
  std::ostringstream os;
  os << "players";
  for (int a = config.actions_min; a <= config.actions_max; ++a) os << ",A" << a;
  os << '\n';
  for (int p = config.players_min; p <= config.players_max; ++p) {
    os << p;
    for (int a = config.actions_min; a <= config.actions_max; ++a) {
      for (const auto& c : result.cells) {
        if (c.cls == cls && c.players == p && c.actions == a) {
          os << ',' << get(c);
          break;
        }
      }
    }
    os << '\n';
  }
  return os.str();
}

template <typename Get>
void markdown_matrix(std::ostringstream& os, const SweepResult& result,
                     GamutClass cls, const SweepConfig& config,
                     const std::string& title, Get get) {
  os << "### " << title << " — " << to_string(cls) << "\n\n";
  os << "| players \\ actions |";
  for (int a = config.actions_min; a <= config.actions_max; ++a) os << ' ' << a << " |";
  os << "\n|---|";
  for (int a = config.actions_min; a <= config.actions_max; ++a) os << "---|";
  os << '\n';
  for (int p = config.players_min; p <= config.players_max; ++p) {
    os << "| " << p << " |";
    for (int a = config.actions_min; a <= config.actions_max; ++a) {
      for (const auto& c : result.cells) {
        if (c.cls == cls && c.players == p && c.actions == a) {
          os << ' ' << get(c) << " |";
          break;
        }
      }
    }
    os << '\n';
  }
  os << '\n';
}

}  // namespace detail

// Writes cells.csv, per-quantity matrix CSVs, and a markdown summary into
// `dir`. All output is deterministic for a fixed config.
inline std::vector<std::string> write_sweep_outputs(const SweepResult& result,
                                                    const SweepConfig& config,
                                                    const std::string& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create output dir " + dir);
  std::vector<std::string> written;
  const auto write = [&](const std::string& name, const std::string& text) {
    const std::string path = (fs::path(dir) / name).string();
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << text;
    if (!out) throw std::runtime_error("failed writing " + path);
    written.push_back(path);
  };

  write("cells.csv", cells_csv(result));

  const auto mixed = [](const CellResult& c) { return detail::fixed6(c.frac_mixed); };
  const auto single_rep = [](const CellResult& c) {
    return detail::fixed6(c.frac_single_replicator);
  };
  const auto single_grad = [](const CellResult& c) {
    return detail::fixed6(c.frac_single_gradient);
  };
  const auto any_rep = [](const CellResult& c) {
    return detail::fixed6(c.frac_any_replicator);
  };
  const auto any_grad = [](const CellResult& c) {
    return detail::fixed6(c.frac_any_gradient);
  };
  const auto decrease = [](const CellResult& c) {
    return detail::fixed4(c.mean_decrease_pct);
  };

  std::ostringstream md;
  md << "# Sweep summary\n\nmaster_seed = " << config.master_seed
     << ", games per cell = " << config.games_per_cell << ", runs per method = "
     << config.runs_per_method << "\n\n";
  for (const GamutClass cls : config.classes) {
    const std::string tag = to_string(cls);
    write("table_mixed_" + tag + ".csv",
          detail::matrix_csv(result, cls, config, mixed));
    write("table_single_run_replicator_" + tag + ".csv",
          detail::matrix_csv(result, cls, config, single_rep));
    write("table_single_run_gradient_" + tag + ".csv",
          detail::matrix_csv(result, cls, config, single_grad));
    write("table_any_of_k_replicator_" + tag + ".csv",
          detail::matrix_csv(result, cls, config, any_rep));
    write("table_any_of_k_gradient_" + tag + ".csv",
          detail::matrix_csv(result, cls, config, any_grad));
    detail::markdown_matrix(md, result, cls, config,
                            "Fraction of games with a mixed best solution", mixed);
    detail::markdown_matrix(md, result, cls, config,
                            "Fraction of single replicator runs reaching the best solution",
                            single_rep);
    detail::markdown_matrix(md, result, cls, config,
                            "Fraction of single gradient runs reaching the best solution",
                            single_grad);
    detail::markdown_matrix(
        md, result, cls, config,
        "Fraction of games where some replicator run reaches the best solution",
        any_rep);
    detail::markdown_matrix(
        md, result, cls, config,
        "Fraction of games where some gradient run reaches the best solution",
        any_grad);
    if (cls == GamutClass::kRandomGame) {
      write("table_decrease_" + tag + ".csv",
            detail::matrix_csv(result, cls, config, decrease));
      detail::markdown_matrix(
          md, result, cls, config,
          "Mean worst-case perturbation decrease (% of payoff-floor-rescaled EU), "
          "mixed optima only",
          decrease);
    }
  }
  int failed = 0;
  for (const auto& g : result.games) failed += g.failed ? 1 : 0;
  md << "Failed games: " << failed << "\n";
  if (failed > 0) {
    for (const auto& g : result.games) {
      if (g.failed)
        md << "- " << to_string(g.cls) << " p=" << g.players << " a=" << g.actions
           << " i=" << g.index << ": " << g.error << "\n";
    }
  }
  write("summary.md", md.str());
  return written;
}

// --- config file parsing ---

inline SweepConfig sweep_config_from_toml(const TomlTable& t) {
  SweepConfig cfg;
  const auto get_int = [&](const char* key, int& out) {
    auto it = t.find(key);
    if (it != t.end()) out = static_cast<int>(it->second.as_int());
  };
  const auto get_double = [&](const char* key, double& out) {
    auto it = t.find(key);
    if (it != t.end()) out = it->second.as_double();
  };
  if (auto it = t.find("classes"); it != t.end()) {
    cfg.classes.clear();
    for (const auto& v : it->second.as_array()) {
      cfg.classes.push_back(gamut_class_from_string(v.as_string()));
    }
  }
  get_int("players_min", cfg.players_min);
  get_int("players_max", cfg.players_max);
  get_int("actions_min", cfg.actions_min);
  get_int("actions_max", cfg.actions_max);
  get_int("games_per_cell", cfg.games_per_cell);
  get_int("runs_per_method", cfg.runs_per_method);
  get_int("threads", cfg.threads);
  if (auto it = t.find("master_seed"); it != t.end())
    cfg.master_seed = static_cast<std::uint64_t>(it->second.as_int());
  get_double("mixedness_threshold", cfg.mixedness_threshold);
  get_double("optimality_rel_tol", cfg.optimality_rel_tol);
  if (auto it = t.find("output_dir"); it != t.end())
    cfg.output_dir = it->second.as_string();
  get_double("step_size", cfg.optimizer.step_size);
  get_int("max_iters", cfg.optimizer.max_iters);
  get_double("convergence_tol", cfg.optimizer.convergence_tol);
  cfg.validate();
  return cfg;
}

}  // namespace symgame
