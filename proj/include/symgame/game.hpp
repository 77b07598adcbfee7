#pragma once

// Finite normal-form games with exact multilinear expected utilities.
//
// Payoff tensors are flat arrays in mixed-radix row-major order with player 0
// most significant:  index(a) = sum_i a_i * prod_{j>i} |A_j|.
// Common-payoff games store a single tensor referenced by every player.

#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace symgame {

// Probabilities above this threshold count as "in support". Optimizers leave
// near-zero residue on dead actions; exact fixtures are far from the cutoff.
constexpr double kSupportThreshold = 1e-9;

// Strategy vectors must sum to 1 within this slack; anything closer is
// renormalized, anything further is rejected as a real bug.
constexpr double kSimplexRejectTol = 1e-6;

using PureProfile = std::vector<int>;

class Game {
 public:
  // Common-payoff game: one shared tensor.
  Game(std::vector<int> action_counts, std::vector<double> shared_payoffs)
      : Game(std::move(action_counts), split_shared(std::move(shared_payoffs)),
             /*common=*/true) {}

  // General game: one tensor per player.
  Game(std::vector<int> action_counts,
       std::vector<std::vector<double>> per_player_payoffs, bool common_payoff)
      : action_counts_(std::move(action_counts)),
        payoffs_(std::move(per_player_payoffs)),
        common_payoff_(common_payoff) {
    validate();
  }

  int num_players() const { return static_cast<int>(action_counts_.size()); }
  const std::vector<int>& action_counts() const { return action_counts_; }
  int action_count(int player) const {
    return action_counts_[static_cast<std::size_t>(player)];
  }
  bool is_common_payoff() const { return common_payoff_; }

  std::int64_t table_size() const {
    return static_cast<std::int64_t>(payoffs_.front().size());
  }

  std::int64_t stride(int player) const {
    return strides_[static_cast<std::size_t>(player)];
  }

  const std::vector<double>& tensor(int player) const {
    return common_payoff_ ? payoffs_[0]
                          : payoffs_[static_cast<std::size_t>(player)];
  }
  const std::vector<double>& shared_tensor() const {
    if (!common_payoff_)
      throw std::logic_error("shared_tensor: game is not common-payoff");
    return payoffs_[0];
  }

  std::int64_t flat_index(std::span<const int> profile) const {
    if (profile.size() != action_counts_.size())
      throw std::invalid_argument("flat_index: profile has wrong length");
    std::int64_t idx = 0;
    for (std::size_t i = 0; i < profile.size(); ++i) {
      if (profile[i] < 0 || profile[i] >= action_counts_[i])
        throw std::out_of_range("flat_index: action out of range for player " +
                                std::to_string(i));
      idx += profile[i] * strides_[i];
    }
    return idx;
  }

  double payoff(int player, std::span<const int> profile) const {
    return tensor(player)[static_cast<std::size_t>(flat_index(profile))];
  }

 private:
  static std::vector<std::vector<double>> split_shared(std::vector<double> t) {
    std::vector<std::vector<double>> out;
    out.push_back(std::move(t));
    return out;
  }

  void validate() {
    if (action_counts_.empty())
      throw std::invalid_argument("Game: need at least one player");
    std::int64_t size = 1;
    for (std::size_t i = 0; i < action_counts_.size(); ++i) {
      if (action_counts_[i] < 1)
        throw std::invalid_argument("Game: action count must be >= 1 (player " +
                                    std::to_string(i) + ")");
      size *= action_counts_[i];
    }
    strides_.assign(action_counts_.size(), 1);
    for (int i = static_cast<int>(action_counts_.size()) - 2; i >= 0; --i) {
      strides_[i] = strides_[i + 1] * action_counts_[i + 1];
    }
    const std::size_t expected_tensors =
        common_payoff_ ? 1 : action_counts_.size();
    if (payoffs_.size() != expected_tensors)
      throw std::invalid_argument("Game: wrong number of payoff tensors");
    for (const auto& t : payoffs_) {
      if (static_cast<std::int64_t>(t.size()) != size)
        throw std::invalid_argument(
            "Game: payoff tensor has " + std::to_string(t.size()) +
            " entries, expected " + std::to_string(size));
      for (double u : t) {
        if (!std::isfinite(u))
          throw std::invalid_argument("Game: payoff entries must be finite");
      }
    }
  }

  std::vector<int> action_counts_;
  std::vector<std::int64_t> strides_;
  std::vector<std::vector<double>> payoffs_;
  bool common_payoff_ = false;
};

inline Game make_common_payoff_game(int num_players,
                                    std::vector<int> action_counts,
                                    std::vector<double> payoff_table) {
  if (static_cast<int>(action_counts.size()) != num_players)
    throw std::invalid_argument(
        "make_common_payoff_game: action_counts size must equal player count");
  return Game(std::move(action_counts), std::move(payoff_table));
}

class StrategyProfile {
 public:
  explicit StrategyProfile(std::vector<std::vector<double>> strategies)
      : strategies_(std::move(strategies)) {
    for (std::size_t i = 0; i < strategies_.size(); ++i) normalize(i);
  }

  static StrategyProfile point_masses(const Game& game,
                                      const PureProfile& actions) {
    if (static_cast<int>(actions.size()) != game.num_players())
      throw std::invalid_argument("point_masses: profile has wrong length");
    std::vector<std::vector<double>> s;
    s.reserve(actions.size());
    for (std::size_t i = 0; i < actions.size(); ++i) {
      const int m = game.action_count(static_cast<int>(i));
      if (actions[i] < 0 || actions[i] >= m)
        throw std::out_of_range("point_masses: action out of range for player " +
                                std::to_string(i));
      std::vector<double> v(static_cast<std::size_t>(m), 0.0);
      v[static_cast<std::size_t>(actions[i])] = 1.0;
      s.push_back(std::move(v));
    }
    return StrategyProfile(std::move(s));
  }

  int num_players() const { return static_cast<int>(strategies_.size()); }
  const std::vector<std::vector<double>>& strategies() const {
    return strategies_;
  }
  const std::vector<double>& strategy(int player) const {
    return strategies_[static_cast<std::size_t>(player)];
  }

  std::vector<int> support(int player,
                           double threshold = kSupportThreshold) const {
    std::vector<int> out;
    const auto& s = strategy(player);
    for (std::size_t a = 0; a < s.size(); ++a) {
      if (s[a] > threshold) out.push_back(static_cast<int>(a));
    }
    return out;
  }

  void check_matches(const Game& game) const {
    if (num_players() != game.num_players())
      throw std::invalid_argument("profile/game player count mismatch: " +
                                  std::to_string(num_players()) + " vs " +
                                  std::to_string(game.num_players()));
    for (int i = 0; i < num_players(); ++i) {
      if (static_cast<int>(strategy(i).size()) != game.action_count(i))
        throw std::invalid_argument("profile/game mismatch for player " +
                                    std::to_string(i) + ": " +
                                    std::to_string(strategy(i).size()) +
                                    " probabilities, game has " +
                                    std::to_string(game.action_count(i)) +
                                    " actions");
    }
  }

 private:
  void normalize(std::size_t player) {
    auto& s = strategies_[player];
    if (s.empty())
      throw std::invalid_argument("StrategyProfile: empty strategy for player " +
                                  std::to_string(player));
    double sum = 0.0;
    for (auto& p : s) {
      if (!std::isfinite(p) || p < -kSupportThreshold)
        throw std::invalid_argument(
            "StrategyProfile: negative/invalid probability for player " +
            std::to_string(player));
      if (p < 0.0) p = 0.0;
      sum += p;
    }
    if (std::abs(sum - 1.0) > kSimplexRejectTol)
      throw std::invalid_argument(
          "StrategyProfile: probabilities for player " + std::to_string(player) +
          " sum to " + std::to_string(sum));
    // Renormalize only beyond a few ulp; already-normalized vectors must pass
    // through unchanged so serialization round-trips bit-exactly.
    if (std::abs(sum - 1.0) > 1e-15) {
      for (auto& p : s) p /= sum;
    }
  }

  std::vector<std::vector<double>> strategies_;
};

namespace detail {

// devs[b] += sum over opponent profiles a_{-i} of
//   (prod_{j != i} s_j(a_j)) * tensor[b, a_{-i}],
// skipping zero-probability branches.
inline void deviation_sweep(const Game& game,
                            const std::vector<std::vector<double>>& strategies,
                            int player, const std::vector<double>& tensor,
                            std::vector<double>& devs) {
  const int n = game.num_players();
  const int my_actions = game.action_count(player);
  const std::int64_t my_stride = game.stride(player);
  devs.assign(static_cast<std::size_t>(my_actions), 0.0);

  // Iterative DFS over the other players' actions.
  struct Frame {
    int action = 0;
  };
  std::vector<int> order;
  order.reserve(static_cast<std::size_t>(n) - 1);
  for (int j = 0; j < n; ++j)
    if (j != player) order.push_back(j);

  const int depth_max = static_cast<int>(order.size());
  std::vector<int> action_at(static_cast<std::size_t>(depth_max), 0);
  std::vector<double> weight_at(static_cast<std::size_t>(depth_max) + 1, 1.0);
  std::vector<std::int64_t> base_at(static_cast<std::size_t>(depth_max) + 1, 0);

  int depth = 0;
  while (depth >= 0) {
    if (depth == depth_max) {
      const double w = weight_at[static_cast<std::size_t>(depth)];
      const std::int64_t base = base_at[static_cast<std::size_t>(depth)];
      const double* t = tensor.data() + base;
      for (int b = 0; b < my_actions; ++b) {
        devs[static_cast<std::size_t>(b)] += w * t[b * my_stride];
      }
      --depth;
      continue;
    }
    const int j = order[static_cast<std::size_t>(depth)];
    int& a = action_at[static_cast<std::size_t>(depth)];
    const auto& sj = strategies[static_cast<std::size_t>(j)];
    bool descended = false;
    while (a < game.action_count(j)) {
      const double p = sj[static_cast<std::size_t>(a)];
      const int chosen = a++;
      if (p == 0.0) continue;
      weight_at[static_cast<std::size_t>(depth) + 1] =
          weight_at[static_cast<std::size_t>(depth)] * p;
      base_at[static_cast<std::size_t>(depth) + 1] =
          base_at[static_cast<std::size_t>(depth)] + chosen * game.stride(j);
      ++depth;
      descended = true;
      break;
    }
    if (!descended) {
      a = 0;
      --depth;
    }
  }
}

}  // namespace detail

// Expected payoff to `player` of each pure action, holding everyone else at
// `profile`. The profile's own strategy for `player` is ignored (not mutated).
inline std::vector<double> deviation_utilities(const Game& game,
                                               const StrategyProfile& profile,
                                               int player) {
  profile.check_matches(game);
  if (player < 0 || player >= game.num_players())
    throw std::out_of_range("deviation_utilities: player index out of range");
  std::vector<double> devs;
  detail::deviation_sweep(game, profile.strategies(), player,
                          game.tensor(player), devs);
  return devs;
}

inline double deviation_utility(const Game& game, const StrategyProfile& profile,
                                int player, int action) {
  const auto devs = deviation_utilities(game, profile, player);
  if (action < 0 || action >= static_cast<int>(devs.size()))
    throw std::out_of_range("deviation_utility: action index out of range");
  return devs[static_cast<std::size_t>(action)];
}

// Exact multilinear expectation, one entry per player. For common-payoff games
// all entries are equal (computed once).
inline std::vector<double> expected_utility(const Game& game,
                                            const StrategyProfile& profile) {
  profile.check_matches(game);
  const int n = game.num_players();
  std::vector<double> eu(static_cast<std::size_t>(n), 0.0);
  std::vector<double> devs;
  const int reps = game.is_common_payoff() ? 1 : n;
  for (int i = 0; i < reps; ++i) {
    detail::deviation_sweep(game, profile.strategies(), i, game.tensor(i), devs);
    double value = 0.0;
    const auto& si = profile.strategy(i);
    for (std::size_t a = 0; a < devs.size(); ++a) value += si[a] * devs[a];
    eu[static_cast<std::size_t>(i)] = value;
  }
  if (game.is_common_payoff()) {
    for (int i = 1; i < n; ++i) eu[static_cast<std::size_t>(i)] = eu[0];
  }
  return eu;
}

// All actions whose deviation utility is within `tol` of the maximum.
inline std::vector<int> best_response_set(const Game& game,
                                          const StrategyProfile& profile,
                                          int player, double tol) {
  if (tol < 0.0) throw std::invalid_argument("best_response_set: tol must be >= 0");
  const auto devs = deviation_utilities(game, profile, player);
  double best = devs[0];
  for (double d : devs) best = std::max(best, d);
  std::vector<int> out;
  for (std::size_t a = 0; a < devs.size(); ++a) {
    if (devs[a] >= best - tol) out.push_back(static_cast<int>(a));
  }
  return out;
}

// Canonicalize optimizer output: drop sub-threshold residue from dead actions
// and renormalize. Support-based predicates (deterministic, degenerate) reason
// about the thresholded profile; this makes that profile explicit.
inline StrategyProfile snap_support(const StrategyProfile& profile,
                                    double threshold = kSupportThreshold) {
  auto s = profile.strategies();
  for (auto& v : s) {
    double kept = 0.0;
    for (double p : v)
      if (p > threshold) kept += p;
    if (kept <= 0.0) continue;
    for (auto& p : v) p = p > threshold ? p / kept : 0.0;
  }
  return StrategyProfile(std::move(s));
}

inline double max_abs_payoff(const Game& game) {
  double m = 0.0;
  const int reps = game.is_common_payoff() ? 1 : game.num_players();
  for (int i = 0; i < reps; ++i) {
    for (double u : game.tensor(i)) m = std::max(m, std::abs(u));
  }
  return m;
}

}  // namespace symgame
