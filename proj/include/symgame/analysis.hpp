#pragma once

// Equilibrium and stability diagnostics for strategy profiles:
// exploitability, degeneracy, the deterministic-iff-stable verdict for joint
// asymmetric deviations, robustness bounds for payoff/strategy perturbations,
// simultaneous best response, and the worst-case infinitesimal-perturbation
// payoff decrease realized as adversarial tie-breaking among exact best
// responses.

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

namespace symgame {

enum class Stability { kStable, kUnstable, kUnknownDegenerate };

inline const char* to_string(Stability s) {
  switch (s) {
    case Stability::kStable: return "stable";
    case Stability::kUnstable: return "unstable";
    case Stability::kUnknownDegenerate: return "unknown-degenerate";
  }
  return "?";
}

// Maximum unilateral gain over players and pure deviations; zero (within
// tolerance) iff the profile is a Nash equilibrium.
inline double exploitability(const Game& game, const StrategyProfile& profile) {
  profile.check_matches(game);
  double worst = 0.0;
  for (int i = 0; i < game.num_players(); ++i) {
    const auto devs = deviation_utilities(game, profile, i);
    double eu_i = 0.0, best = devs[0];
    const auto& si = profile.strategy(i);
    for (std::size_t a = 0; a < devs.size(); ++a) {
      eu_i += si[a] * devs[a];
      best = std::max(best, devs[a]);
    }
    worst = std::max(worst, best - eu_i);
  }
  return std::max(worst, 0.0);
}

inline bool is_deterministic(const StrategyProfile& profile,
                             double threshold = kSupportThreshold) {
  for (int i = 0; i < profile.num_players(); ++i) {
    if (profile.support(i, threshold).size() != 1) return false;
  }
  return true;
}

namespace detail {

inline void require_equilibrium(const Game& game, const StrategyProfile& profile,
                                double tol, const char* who) {
  const double eps = exploitability(game, profile);
  if (eps > tol)
    throw std::invalid_argument(std::string(who) +
                                ": profile is not an equilibrium at tolerance " +
                                std::to_string(tol) + " (exploitability " +
                                std::to_string(eps) + ")");
}

// Visit every pure opponent profile drawn from the supports of profile's
// strategies (player `skip` excluded).
template <typename Fn>
void for_each_support_profile(const Game& game, const StrategyProfile& profile,
                              int skip, Fn&& fn) {
  const int n = game.num_players();
  std::vector<std::vector<int>> supports;
  supports.reserve(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    supports.push_back(j == skip ? std::vector<int>{0} : profile.support(j));
  }
  std::vector<int> a(static_cast<std::size_t>(n), 0);
  std::vector<int> cursor(static_cast<std::size_t>(n), 0);
  while (true) {
    for (int j = 0; j < n; ++j)
      a[static_cast<std::size_t>(j)] =
          supports[static_cast<std::size_t>(j)]
                  [static_cast<std::size_t>(cursor[static_cast<std::size_t>(j)])];
    fn(a);
    int j = n - 1;
    for (; j >= 0; --j) {
      auto& c = cursor[static_cast<std::size_t>(j)];
      if (++c < static_cast<int>(supports[static_cast<std::size_t>(j)].size()))
        break;
      c = 0;
    }
    if (j < 0) break;
  }
}

}  // namespace detail

// Degeneracy of a given Nash equilibrium.
// Deterministic case: degenerate iff at least two players are indifferent
// (within tol) between their played action and some other action.
// Mixed case: degenerate iff for every player and every pure opponent profile
// from the supports, the payoff is constant across the player's own support.
inline bool is_degenerate_equilibrium(const Game& game,
                                      const StrategyProfile& profile,
                                      double tol) {
  detail::require_equilibrium(game, profile, tol, "is_degenerate_equilibrium");
  if (is_deterministic(profile)) {
    int indifferent = 0;
    for (int i = 0; i < game.num_players(); ++i) {
      const int played = profile.support(i).front();
      const auto devs = deviation_utilities(game, profile, i);
      for (std::size_t a = 0; a < devs.size(); ++a) {
        if (static_cast<int>(a) == played) continue;
        if (std::abs(devs[a] - devs[static_cast<std::size_t>(played)]) <= tol) {
          ++indifferent;
          break;
        }
      }
    }
    return indifferent >= 2;
  }
  // Mixed case.
  for (int i = 0; i < game.num_players(); ++i) {
    const auto own_support = profile.support(i);
    if (own_support.size() < 2) continue;
    bool constant_everywhere = true;
    detail::for_each_support_profile(
        game, profile, i, [&](std::vector<int>& a) {
          if (!constant_everywhere) return;
          a[static_cast<std::size_t>(i)] = own_support.front();
          const double ref = game.payoff(i, a);
          for (std::size_t k = 1; k < own_support.size(); ++k) {
            a[static_cast<std::size_t>(i)] = own_support[k];
            if (std::abs(game.payoff(i, a) - ref) > tol) {
              constant_everywhere = false;
              return;
            }
          }
        });
    if (!constant_everywhere) return false;  // mixing matters somewhere
  }
  return true;
}

// For an equilibrium produced as a symmetric local optimum: stable under joint
// asymmetric deviation iff deterministic, provided the equilibrium is
// non-degenerate; degenerate equilibria get no verdict.
inline Stability stability_verdict(const Game& game,
                                   const StrategyProfile& profile, double tol) {
  if (is_degenerate_equilibrium(game, profile, tol))
    return Stability::kUnknownDegenerate;
  return is_deterministic(profile) ? Stability::kStable : Stability::kUnstable;
}

namespace detail {

inline StrategyProfile shift_pair(const StrategyProfile& base, int player,
                                  int from, int to, double amount) {
  auto s = base.strategies();
  auto& v = s[static_cast<std::size_t>(player)];
  v[static_cast<std::size_t>(from)] -= amount;
  v[static_cast<std::size_t>(to)] += amount;
  return StrategyProfile(std::move(s));
}

}  // namespace detail

// Searches for a jointly deviating profile with strictly higher common payoff
// where every action probability changes by at most `radius`.
// Deterministic part: exhaustive sweep over single-player and player-pair
// mass transfers (from-action, to-action per player) at magnitudes radius,
// radius/4, radius/16. Randomized part: up to `samples` random joint
// perturbations from the supplied stream. Returns the first improving profile
// (margin 1e-9) or nullopt.
inline std::optional<StrategyProfile> asym_local_search_oracle(
    const Game& game, const StrategyProfile& profile, double radius,
    int samples, SplitMix64& rng) {
  if (radius <= 0.0)
    throw std::invalid_argument("asym_local_search_oracle: radius must be > 0");
  profile.check_matches(game);
  constexpr double kMargin = 1e-9;
  const double base_eu = expected_utility(game, profile)[0];
  const int n = game.num_players();

  const auto improving = [&](const StrategyProfile& cand) {
    return expected_utility(game, cand)[0] > base_eu + kMargin;
  };

  const double magnitudes[3] = {radius, radius / 4.0, radius / 16.0};

  // Single-player transfers.
  for (int i = 0; i < n; ++i) {
    const auto& si = profile.strategy(i);
    for (int from = 0; from < game.action_count(i); ++from) {
      if (si[static_cast<std::size_t>(from)] <= 0.0) continue;
      for (int to = 0; to < game.action_count(i); ++to) {
        if (to == from) continue;
        for (double mag : magnitudes) {
          const double m = std::min(mag, si[static_cast<std::size_t>(from)]);
          if (m <= 0.0) continue;
          auto cand = detail::shift_pair(profile, i, from, to, m);
          if (improving(cand)) return cand;
        }
      }
    }
  }

  // Player-pair transfers (the joint deviations that defeat mixed optima).
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const auto& si = profile.strategy(i);
      const auto& sj = profile.strategy(j);
      for (int fi = 0; fi < game.action_count(i); ++fi) {
        if (si[static_cast<std::size_t>(fi)] <= 0.0) continue;
        for (int ti = 0; ti < game.action_count(i); ++ti) {
          if (ti == fi) continue;
          for (int fj = 0; fj < game.action_count(j); ++fj) {
            if (sj[static_cast<std::size_t>(fj)] <= 0.0) continue;
            for (int tj = 0; tj < game.action_count(j); ++tj) {
              if (tj == fj) continue;
              for (double mag : magnitudes) {
                const double mi = std::min(mag, si[static_cast<std::size_t>(fi)]);
                const double mj = std::min(mag, sj[static_cast<std::size_t>(fj)]);
                if (mi <= 0.0 || mj <= 0.0) continue;
                auto cand = detail::shift_pair(profile, i, fi, ti, mi);
                cand = detail::shift_pair(cand, j, fj, tj, mj);
                if (improving(cand)) return cand;
              }
            }
          }
        }
      }
    }
  }

  // Random joint perturbations: each player independently transfers a random
  // amount between two random actions with probability 1/2.
  for (int s = 0; s < samples; ++s) {
    StrategyProfile cand = profile;
    bool moved = false;
    for (int i = 0; i < n; ++i) {
      if (game.action_count(i) < 2) continue;
      if (rng.next_double() < 0.5) continue;
      const int from = static_cast<int>(rng.next_below(
          static_cast<std::uint64_t>(game.action_count(i))));
      int to = static_cast<int>(rng.next_below(
          static_cast<std::uint64_t>(game.action_count(i) - 1)));
      if (to >= from) ++to;
      const double avail = cand.strategy(i)[static_cast<std::size_t>(from)];
      const double m = rng.next_double() * std::min(radius, avail);
      if (m <= 0.0) continue;
      cand = detail::shift_pair(cand, i, from, to, m);
      moved = true;
    }
    if (moved && improving(cand)) return cand;
  }
  return std::nullopt;
}

// Payoff-perturbation bound: a locally optimal invariant profile of the
// original game is a 2*eps-Nash equilibrium of any game whose payoffs differ
// by at most eps everywhere.
inline double perturbation_eps_nash_bound(double eps) {
  if (eps < 0.0)
    throw std::invalid_argument("perturbation_eps_nash_bound: eps must be >= 0");
  return 2.0 * eps;
}

// Strategy-perturbation bound in total variation distance.
inline double tv_eps_nash_bound(double delta, const Game& game) {
  if (delta < 0.0)
    throw std::invalid_argument("tv_eps_nash_bound: delta must be >= 0");
  return 4.0 * delta * max_abs_payoff(game);
}

// Strategy-perturbation bound in KL divergence, via Pinsker's inequality.
inline double kl_eps_nash_bound(double nu, const Game& game) {
  if (nu < 0.0)
    throw std::invalid_argument("kl_eps_nash_bound: nu must be >= 0");
  return 2.0 * std::sqrt(2.0 * nu) * max_abs_payoff(game);
}

// Point masses on one chosen best response per player. Each selection must lie
// in that player's best-response set at tolerance br_tol.
inline StrategyProfile simultaneous_best_response(const Game& game,
                                                  const StrategyProfile& profile,
                                                  const PureProfile& selection,
                                                  double br_tol = 1e-9) {
  profile.check_matches(game);
  if (static_cast<int>(selection.size()) != game.num_players())
    throw std::invalid_argument("simultaneous_best_response: bad selection size");
  for (int i = 0; i < game.num_players(); ++i) {
    const auto brs = best_response_set(game, profile, i, br_tol);
    if (std::find(brs.begin(), brs.end(),
                  selection[static_cast<std::size_t>(i)]) == brs.end())
      throw std::invalid_argument(
          "simultaneous_best_response: selection for player " +
          std::to_string(i) + " is not a best response");
  }
  return StrategyProfile::point_masses(game, selection);
}

struct PerturbationDecrease {
  double pct = 0.0;
  bool exact = true;  // false when the selection product was sampled
};

// Worst-case payoff decrease when an infinitesimal payoff perturbation steers
// every indifferent player to an adversarial best response and all players
// jointly switch to those best responses.
//
// Returns 100 * (EU(s) - min EU) / |EU(s)|, or, when `payoff_floor` is given,
// 100 * (EU(s) - min EU) / (EU(s) - floor) — the decrease after payoffs are
// affinely rescaled so the floor maps to zero (used for generated games with a
// known payoff range, where |EU| can be arbitrarily close to zero).
// nullopt when the denominator is smaller than 1e-9. Selection products larger
// than 10^6 are sampled (10^5 draws) and flagged non-exact.
inline std::optional<PerturbationDecrease> worst_case_perturbation_decrease(
    const Game& game, const StrategyProfile& profile, double br_tol = 1e-6,
    std::optional<double> payoff_floor = std::nullopt,
    std::uint64_t sample_seed = 0) {
  if (!game.is_common_payoff())
    throw std::invalid_argument(
        "worst_case_perturbation_decrease: game must be common-payoff");
  detail::require_equilibrium(game, profile, 1e-6,
                              "worst_case_perturbation_decrease");
  const double eu = expected_utility(game, profile)[0];
  const int n = game.num_players();
  std::vector<std::vector<int>> br_sets;
  br_sets.reserve(static_cast<std::size_t>(n));
  double product = 1.0;
  for (int i = 0; i < n; ++i) {
    br_sets.push_back(best_response_set(game, profile, i, br_tol));
    product *= static_cast<double>(br_sets.back().size());
  }
  const auto& tensor = game.shared_tensor();
  double min_eu = std::numeric_limits<double>::infinity();
  bool exact = true;
  if (product <= 1e6) {
    std::vector<int> cursor(static_cast<std::size_t>(n), 0);
    std::vector<int> a(static_cast<std::size_t>(n));
    while (true) {
      for (int i = 0; i < n; ++i)
        a[static_cast<std::size_t>(i)] =
            br_sets[static_cast<std::size_t>(i)]
                   [static_cast<std::size_t>(cursor[static_cast<std::size_t>(i)])];
      min_eu = std::min(
          min_eu, tensor[static_cast<std::size_t>(game.flat_index(a))]);
      int i = n - 1;
      for (; i >= 0; --i) {
        auto& c = cursor[static_cast<std::size_t>(i)];
        if (++c < static_cast<int>(br_sets[static_cast<std::size_t>(i)].size()))
          break;
        c = 0;
      }
      if (i < 0) break;
    }
  } else {
    exact = false;  // sampled lower bound on the worst case
    SplitMix64 rng(derive_seed(sample_seed, {0x77C5ull}));
    std::vector<int> a(static_cast<std::size_t>(n));
    for (int s = 0; s < 100000; ++s) {
      for (int i = 0; i < n; ++i) {
        const auto& brs = br_sets[static_cast<std::size_t>(i)];
        a[static_cast<std::size_t>(i)] =
            brs[rng.next_below(brs.size())];
      }
      min_eu = std::min(
          min_eu, tensor[static_cast<std::size_t>(game.flat_index(a))]);
    }
  }
  const double denom = payoff_floor ? (eu - *payoff_floor) : std::abs(eu);
  if (denom < 1e-9) return std::nullopt;
  return PerturbationDecrease{100.0 * (eu - min_eu) / denom, exact};
}

struct AnalysisReport {
  double exploitability = 0.0;
  double is_nash_at = 0.0;  // tolerance used for the equilibrium checks
  bool is_deterministic = false;
  bool is_mixed = false;
  std::optional<bool> is_degenerate;            // set only for equilibria
  std::optional<Stability> asym_locally_optimal;  // set only for equilibria
  std::optional<double> perturbation_decrease_pct;
};

// One-stop report used by the analyze command.
inline AnalysisReport analyze(const Game& game, const StrategyProfile& profile,
                              double nash_tol = 1e-6,
                              std::optional<double> payoff_floor = std::nullopt) {
  AnalysisReport rep;
  rep.exploitability = exploitability(game, profile);
  rep.is_nash_at = nash_tol;
  rep.is_deterministic = is_deterministic(profile);
  rep.is_mixed = !rep.is_deterministic;
  if (rep.exploitability <= nash_tol) {
    rep.is_degenerate = is_degenerate_equilibrium(game, profile, nash_tol);
    rep.asym_locally_optimal = *rep.is_degenerate
                                   ? Stability::kUnknownDegenerate
                                   : (rep.is_deterministic ? Stability::kStable
                                                           : Stability::kUnstable);
    if (rep.is_mixed && rep.exploitability <= 1e-6) {
      if (auto dec = worst_case_perturbation_decrease(game, profile, nash_tol,
                                                      payoff_floor)) {
        rep.perturbation_decrease_pct = dec->pct;
      }
    }
  }
  return rep;
}

// --- perturbation helpers for the robustness checks ---

// Independent per-player payoff noise in [-eps, eps]; the result is a general
// (non-common) game within eps of the original everywhere.
inline Game perturb_payoffs(const Game& game, double eps, SplitMix64& rng) {
  std::vector<std::vector<double>> tensors;
  tensors.reserve(static_cast<std::size_t>(game.num_players()));
  for (int i = 0; i < game.num_players(); ++i) {
    std::vector<double> t = game.tensor(i);
    for (auto& u : t) u += rng.uniform(-eps, eps);
    tensors.push_back(std::move(t));
  }
  return Game(game.action_counts(), std::move(tensors), /*common=*/false);
}

// Exact total variation distance between the joint action distributions of
// two product profiles: (1/2) sum_a |prod s(a) - prod t(a)|.
inline double profile_tv_distance(const StrategyProfile& s,
                                  const StrategyProfile& t) {
  if (s.num_players() != t.num_players())
    throw std::invalid_argument("profile_tv_distance: player count mismatch");
  const int n = s.num_players();
  std::vector<int> a(static_cast<std::size_t>(n), 0);
  double total = 0.0;
  while (true) {
    double ps = 1.0, pt = 1.0;
    for (int j = 0; j < n; ++j) {
      ps *= s.strategy(j)[static_cast<std::size_t>(a[static_cast<std::size_t>(j)])];
      pt *= t.strategy(j)[static_cast<std::size_t>(a[static_cast<std::size_t>(j)])];
    }
    total += std::abs(ps - pt);
    int j = n - 1;
    for (; j >= 0; --j) {
      auto& aj = a[static_cast<std::size_t>(j)];
      if (++aj < static_cast<int>(s.strategy(j).size())) break;
      aj = 0;
    }
    if (j < 0) break;
  }
  return 0.5 * total;
}

// KL divergence between product profiles: sum_i KL(s_i || t_i). Infinite when
// some s_i puts mass outside t_i's support.
inline double profile_kl_divergence(const StrategyProfile& s,
                                    const StrategyProfile& t) {
  if (s.num_players() != t.num_players())
    throw std::invalid_argument("profile_kl_divergence: player count mismatch");
  double kl = 0.0;
  for (int i = 0; i < s.num_players(); ++i) {
    const auto& p = s.strategy(i);
    const auto& q = t.strategy(i);
    for (std::size_t a = 0; a < p.size(); ++a) {
      if (p[a] == 0.0) continue;
      if (q[a] == 0.0) return std::numeric_limits<double>::infinity();
      kl += p[a] * std::log(p[a] / q[a]);
    }
  }
  return kl;
}

}  // namespace symgame
