#pragma once

// Local search for orbit-invariant strategy profiles of common-payoff games.
//
// Two methods over the product of per-orbit simplices:
//  - replicator dynamics: Euler steps of
//        d/dt x(a) = x(a) * [dev(a, x) - EU(x)]
//    realized multiplicatively, x'(a) = x(a) * (1 + step * (dev(a) - EU)),
//    with the step halved whenever a coordinate would go negative, then
//    renormalized;
//  - projected gradient ascent with exact sort-based simplex projection and
//    backtracking (halve the step while EU would decrease).
//
// Both iterate until the max-norm coordinate update falls below the
// convergence tolerance. run_* report the first-order (KKT) residual at the
// final point: per orbit, max_a g(a) - <g, x> with g the orbit gradient.
//
// Inside run_replicator and run_projected_gradient, fitness differences and
// gradients are divided by max(1, max|u|), i.e. the step size is measured on
// the unit payoff scale. Optima are invariant under positive payoff rescaling,
// and Euler steps of size ~1 are only stable on that scale; with raw payoffs
// in the hundreds the step-1 replicator orbits around interior optima instead
// of converging. The single-step replicator_step entry point applies the raw,
// unnormalized update.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "symgame/game.hpp"
#include "symgame/rng.hpp"
#include "symgame/simplex.hpp"
#include "symgame/symmetric_table.hpp"
#include "symgame/symmetry.hpp"

namespace symgame {

enum class Method { kReplicator, kGradient };

inline const char* to_string(Method m) {
  return m == Method::kReplicator ? "replicator" : "gradient";
}

struct OptimizerConfig {
  double step_size = 1.0;        // replicator Euler step / initial gradient step
  int max_iters = 10000;
  double convergence_tol = 1e-10;  // on the max-norm coordinate update
  int restarts = 10;
  std::uint64_t seed = 0;
  bool record_trace = false;     // keep per-iterate EU values in OptRun::eu_trace

  void validate() const {
    if (step_size <= 0.0) throw std::invalid_argument("step_size must be > 0");
    if (max_iters < 1) throw std::invalid_argument("max_iters must be >= 1");
    if (convergence_tol < 0.0)
      throw std::invalid_argument("convergence_tol must be >= 0");
    if (restarts < 1) throw std::invalid_argument("restarts must be >= 1");
  }
};

struct OptRun {
  std::vector<std::vector<double>> final_shared;  // one simplex vector per orbit
  double expected_utility = 0.0;
  int iterations_used = 0;
  bool converged = false;
  Method method = Method::kReplicator;
  double kkt_residual = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> eu_trace;  // filled when OptimizerConfig::record_trace
};

// Evaluates expected utility and per-orbit deviation payoffs at an
// orbit-shared point. Uses the multiset fast path when the game is totally
// symmetric (payoffs shared per unordered profile) and the partition is a
// single orbit; otherwise expands and sweeps the full tensor. Holds references
// to the game and partition, which must outlive it.
class OrbitEvaluator {
 public:
  OrbitEvaluator(const Game& game, const OrbitPartition& partition)
      : game_(game), partition_(partition) {
    if (!game.is_common_payoff())
      throw std::invalid_argument("OrbitEvaluator: game must be common-payoff");
    if (partition.num_players() != game.num_players())
      throw std::invalid_argument("OrbitEvaluator: partition/game mismatch");
    if (partition.num_orbits() == 1) {
      fast_ = SymmetricGameTable::from_game(game);
    }
    fitness_scale_ = std::max(1.0, max_abs_payoff(game));
    orbit_action_counts_.reserve(
        static_cast<std::size_t>(partition.num_orbits()));
    for (int o = 0; o < partition.num_orbits(); ++o) {
      const int rep = partition.representative(o);
      const int count = game.action_count(rep);
      for (int i : partition.orbits[static_cast<std::size_t>(o)]) {
        if (game.action_count(i) != count)
          throw std::invalid_argument(
              "OrbitEvaluator: players in orbit " + std::to_string(o) +
              " have different action counts");
      }
      orbit_action_counts_.push_back(count);
    }
  }

  const Game& game() const { return game_; }
  const OrbitPartition& partition() const { return partition_; }
  int num_orbits() const { return partition_.num_orbits(); }
  int orbit_size(int o) const {
    return static_cast<int>(partition_.orbits[static_cast<std::size_t>(o)].size());
  }
  int orbit_action_count(int o) const {
    return orbit_action_counts_[static_cast<std::size_t>(o)];
  }
  bool uses_fast_path() const { return fast_.has_value(); }
  double fitness_scale() const { return fitness_scale_; }

  void check_shared(const std::vector<std::vector<double>>& shared) const {
    if (static_cast<int>(shared.size()) != num_orbits())
      throw std::invalid_argument("shared point: need one vector per orbit");
    for (int o = 0; o < num_orbits(); ++o) {
      if (static_cast<int>(shared[static_cast<std::size_t>(o)].size()) !=
          orbit_action_count(o))
        throw std::invalid_argument("shared point: wrong dimension for orbit " +
                                    std::to_string(o));
    }
  }

  // devs[o][a] = expected payoff when orbit o's representative deviates to a
  // while everyone else follows the shared point. Returns EU of the point.
  double deviations(const std::vector<std::vector<double>>& shared,
                    std::vector<std::vector<double>>& devs) const {
    check_shared(shared);
    devs.resize(static_cast<std::size_t>(num_orbits()));
    if (fast_) {
      devs[0].resize(shared[0].size());
      fast_->deviations(shared[0], devs[0]);
      double eu = 0.0;
      for (std::size_t a = 0; a < shared[0].size(); ++a)
        eu += shared[0][a] * devs[0][a];
      return eu;
    }
    // General path: per-player strategy views, one sweep per orbit rep.
    std::vector<std::vector<double>> strategies(
        static_cast<std::size_t>(game_.num_players()));
    for (int i = 0; i < game_.num_players(); ++i) {
      strategies[static_cast<std::size_t>(i)] =
          shared[static_cast<std::size_t>(
              partition_.orbit_of[static_cast<std::size_t>(i)])];
    }
    double eu = 0.0;
    for (int o = 0; o < num_orbits(); ++o) {
      detail::deviation_sweep(game_, strategies, partition_.representative(o),
                              game_.tensor(0),
                              devs[static_cast<std::size_t>(o)]);
      if (o == 0) {
        for (std::size_t a = 0; a < shared[0].size(); ++a)
          eu += shared[0][a] * devs[0][a];
      }
    }
    return eu;
  }

  double expected_utility(const std::vector<std::vector<double>>& shared) const {
    if (fast_) {
      check_shared(shared);
      return fast_->expected_utility(shared[0]);
    }
    std::vector<std::vector<double>> devs;
    return deviations(shared, devs);
  }

 private:
  const Game& game_;
  const OrbitPartition& partition_;
  std::vector<int> orbit_action_counts_;
  std::optional<SymmetricGameTable> fast_;
  double fitness_scale_ = 1.0;
};

// Partial derivative of EU with respect to the shared probability mass of each
// orbit action: sum over the orbit's members of that player's deviation
// payoff. At an invariant point the members' deviation payoffs coincide, so
// this is orbit_size * dev(representative).
inline std::vector<std::vector<double>> symmetric_gradient_impl(
    const OrbitEvaluator& eval, const std::vector<std::vector<double>>& shared,
    double* eu_out = nullptr) {
  std::vector<std::vector<double>> devs;
  const double eu = eval.deviations(shared, devs);
  if (eu_out) *eu_out = eu;
  for (int o = 0; o < eval.num_orbits(); ++o) {
    const double size = static_cast<double>(eval.orbit_size(o));
    for (auto& g : devs[static_cast<std::size_t>(o)]) g *= size;
  }
  return devs;
}

// First-order optimality residual at a shared point: max over orbits of
// max_a g(a) - <g, x>. Zero iff every orbit's support lies on its gradient max.
inline double kkt_residual_impl(const OrbitEvaluator& eval,
                                const std::vector<std::vector<double>>& shared) {
  std::vector<std::vector<double>> devs;
  eval.deviations(shared, devs);
  double residual = 0.0;
  for (int o = 0; o < eval.num_orbits(); ++o) {
    const auto& d = devs[static_cast<std::size_t>(o)];
    const auto& x = shared[static_cast<std::size_t>(o)];
    double mx = d[0], avg = 0.0;
    for (std::size_t a = 0; a < d.size(); ++a) {
      mx = std::max(mx, d[a]);
      avg += x[a] * d[a];
    }
    residual = std::max(residual,
                        static_cast<double>(eval.orbit_size(o)) * (mx - avg));
  }
  return residual;
}

namespace detail {

inline std::vector<std::vector<double>> replicator_step_impl(
    const OrbitEvaluator& eval, const std::vector<std::vector<double>>& shared,
    double step) {
  std::vector<std::vector<double>> devs;
  const double eu = eval.deviations(shared, devs);
  // Shrink the step until no coordinate would go negative:
  // x(a) * (1 + step * (dev(a) - eu)) >= 0 requires step * (eu - dev(a)) <= 1.
  double worst_decline = 0.0;
  for (int o = 0; o < eval.num_orbits(); ++o) {
    const auto& x = shared[static_cast<std::size_t>(o)];
    const auto& d = devs[static_cast<std::size_t>(o)];
    for (std::size_t a = 0; a < x.size(); ++a) {
      if (x[a] > 0.0) worst_decline = std::max(worst_decline, eu - d[a]);
    }
  }
  double s = step;
  while (s * worst_decline > 1.0) s *= 0.5;

  std::vector<std::vector<double>> next(shared.size());
  for (int o = 0; o < eval.num_orbits(); ++o) {
    const auto& x = shared[static_cast<std::size_t>(o)];
    const auto& d = devs[static_cast<std::size_t>(o)];
    auto& y = next[static_cast<std::size_t>(o)];
    if (x.size() == 1) {  // zero-dimensional simplex: nothing to move
      y = x;
      continue;
    }
    y.resize(x.size());
    double sum = 0.0;
    for (std::size_t a = 0; a < x.size(); ++a) {
      y[a] = std::max(x[a] * (1.0 + s * (d[a] - eu)), 0.0);
      sum += y[a];
    }
    if (sum <= 0.0) {
      y = x;  // fully stalled step; keep the point
    } else {
      for (auto& v : y) v /= sum;
    }
  }
  return next;
}

inline double max_update(const std::vector<std::vector<double>>& a,
                         const std::vector<std::vector<double>>& b) {
  double d = 0.0;
  for (std::size_t o = 0; o < a.size(); ++o) {
    for (std::size_t k = 0; k < a[o].size(); ++k) {
      d = std::max(d, std::abs(a[o][k] - b[o][k]));
    }
  }
  return d;
}

inline OptRun finish_run(const OrbitEvaluator& eval, Method method,
                         std::vector<std::vector<double>> shared, int iters,
                         bool converged, std::vector<double> trace) {
  OptRun run;
  run.method = method;
  run.expected_utility = eval.expected_utility(shared);
  run.kkt_residual = kkt_residual_impl(eval, shared);
  run.final_shared = std::move(shared);
  run.iterations_used = iters;
  run.converged = converged;
  run.eu_trace = std::move(trace);
  return run;
}

inline OptRun run_replicator_impl(const OrbitEvaluator& eval,
                                  std::vector<std::vector<double>> shared,
                                  const OptimizerConfig& config) {
  config.validate();
  eval.check_shared(shared);
  const double step = config.step_size / eval.fitness_scale();
  std::vector<double> trace;
  if (config.record_trace) trace.push_back(eval.expected_utility(shared));
  bool converged = false;
  int iters = 0;
  for (; iters < config.max_iters; ++iters) {
    auto next = replicator_step_impl(eval, shared, step);
    const double delta = max_update(shared, next);
    shared = std::move(next);
    if (config.record_trace) trace.push_back(eval.expected_utility(shared));
    if (delta < config.convergence_tol) {
      ++iters;
      converged = true;
      break;
    }
  }
  return finish_run(eval, Method::kReplicator, std::move(shared), iters,
                    converged, std::move(trace));
}

inline OptRun run_projected_gradient_impl(const OrbitEvaluator& eval,
                                          std::vector<std::vector<double>> shared,
                                          const OptimizerConfig& config) {
  config.validate();
  eval.check_shared(shared);
  constexpr int kMaxHalvings = 60;
  const double scale = eval.fitness_scale();
  double eu = eval.expected_utility(shared);
  std::vector<double> trace;
  if (config.record_trace) trace.push_back(eu);
  bool converged = false;
  int iters = 0;
  double step_next = config.step_size;
  for (; iters < config.max_iters; ++iters) {
    auto grad = symmetric_gradient_impl(eval, shared);
    // Unit-payoff scale, and per-orbit division by sqrt(orbit size) (a
    // positive diagonal preconditioner, still an ascent direction). Step 1
    // then moves coordinates by order 1 at most, keeping the search local to
    // the starting basin like the replicator flow.
    for (int o = 0; o < eval.num_orbits(); ++o) {
      const double denom =
          scale * std::sqrt(static_cast<double>(eval.orbit_size(o)));
      for (auto& g : grad[static_cast<std::size_t>(o)]) g /= denom;
    }
    std::vector<std::vector<double>> candidate = shared;
    double step = step_next;
    bool accepted = false;
    for (int h = 0; h <= kMaxHalvings; ++h) {
      for (int o = 0; o < eval.num_orbits(); ++o) {
        const auto& x = shared[static_cast<std::size_t>(o)];
        if (x.size() == 1) {
          candidate[static_cast<std::size_t>(o)] = x;
          continue;
        }
        std::vector<double> target(x.size());
        const auto& g = grad[static_cast<std::size_t>(o)];
        for (std::size_t a = 0; a < x.size(); ++a)
          target[a] = x[a] + step * g[a];
        candidate[static_cast<std::size_t>(o)] = project_to_simplex(target);
      }
      const double eu_candidate = eval.expected_utility(candidate);
      if (eu_candidate >= eu) {
        eu = eu_candidate;
        accepted = true;
        // Carry the step across iterations: grow on first-try success, keep
        // the halved value otherwise (bounded by the configured base step).
        step_next = h == 0 ? std::min(2.0 * step, config.step_size) : step;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      ++iters;
      converged = true;  // no ascent step exists at any tried scale
      break;
    }
    const double delta = max_update(shared, candidate);
    shared = std::move(candidate);
    if (config.record_trace) trace.push_back(eu);
    if (delta < config.convergence_tol) {
      ++iters;
      converged = true;
      break;
    }
  }
  return finish_run(eval, Method::kGradient, std::move(shared), iters, converged,
                    std::move(trace));
}

}  // namespace detail

// One Euler step of the replicator dynamic applied per orbit.
inline std::vector<std::vector<double>> replicator_step(
    const Game& game, const OrbitPartition& partition,
    const std::vector<std::vector<double>>& shared, double step) {
  if (step <= 0.0) throw std::invalid_argument("replicator_step: step must be > 0");
  OrbitEvaluator eval(game, partition);
  return detail::replicator_step_impl(eval, shared, step);
}

inline std::vector<std::vector<double>> symmetric_gradient(
    const Game& game, const OrbitPartition& partition,
    const std::vector<std::vector<double>>& shared) {
  OrbitEvaluator eval(game, partition);
  return symmetric_gradient_impl(eval, shared);
}

inline double kkt_residual(const Game& game, const OrbitPartition& partition,
                           const std::vector<std::vector<double>>& shared) {
  OrbitEvaluator eval(game, partition);
  return kkt_residual_impl(eval, shared);
}

inline OptRun run_replicator(const Game& game, const OrbitPartition& partition,
                             std::vector<std::vector<double>> init,
                             const OptimizerConfig& config) {
  OrbitEvaluator eval(game, partition);
  return detail::run_replicator_impl(eval, std::move(init), config);
}

inline OptRun run_projected_gradient(const Game& game,
                                     const OrbitPartition& partition,
                                     std::vector<std::vector<double>> init,
                                     const OptimizerConfig& config) {
  OrbitEvaluator eval(game, partition);
  return detail::run_projected_gradient_impl(eval, std::move(init), config);
}

struct BestOfRuns {
  OptRun best;
  std::vector<OptRun> all;
};

inline std::uint64_t method_stream_id(Method m) {
  return m == Method::kReplicator ? 1 : 2;
}

// `restarts` independent runs per method from uniform random simplex inits.
// Per-run seeds derive from (config.seed, method, run index); ties on expected
// utility keep the earliest run in (method order, run index) order.
inline BestOfRuns best_of_runs(const Game& game, const OrbitPartition& partition,
                               const OptimizerConfig& config,
                               const std::vector<Method>& methods) {
  config.validate();
  if (methods.empty())
    throw std::invalid_argument("best_of_runs: need at least one method");
  OrbitEvaluator eval(game, partition);
  BestOfRuns out;
  bool have_best = false;
  for (const Method method : methods) {
    for (int r = 0; r < config.restarts; ++r) {
      SplitMix64 rng(
          derive_seed(config.seed, {method_stream_id(method),
                                    static_cast<std::uint64_t>(r)}));
      std::vector<std::vector<double>> init;
      init.reserve(static_cast<std::size_t>(eval.num_orbits()));
      for (int o = 0; o < eval.num_orbits(); ++o) {
        init.push_back(random_simplex(eval.orbit_action_count(o), rng));
      }
      OptRun run = method == Method::kReplicator
                       ? detail::run_replicator_impl(eval, std::move(init), config)
                       : detail::run_projected_gradient_impl(eval, std::move(init),
                                                             config);
      if (!have_best || run.expected_utility > out.best.expected_utility) {
        out.best = run;
        have_best = true;
      }
      out.all.push_back(std::move(run));
    }
  }
  return out;
}

}  // namespace symgame
