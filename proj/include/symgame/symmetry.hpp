#pragma once

// Player-permutation symmetries of a game: verification, group closure,
// orbit partitions, and orbit-invariant strategy profiles.
//
// A permutation rho is a symmetry when permuting the strategy profile permutes
// the expected payoffs. Expected utility is multilinear in the per-player
// strategies, so equality on pure profiles is necessary and sufficient; the
// check below quantifies over pure profiles only.

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "symgame/game.hpp"

namespace symgame {

constexpr std::size_t kDefaultGroupCap = 3628800;  // 10!

class Permutation {
 public:
  explicit Permutation(std::vector<int> map) : map_(std::move(map)) {
    std::vector<bool> seen(map_.size(), false);
    for (int v : map_) {
      if (v < 0 || v >= static_cast<int>(map_.size()) ||
          seen[static_cast<std::size_t>(v)])
        throw std::invalid_argument("Permutation: map is not a bijection");
      seen[static_cast<std::size_t>(v)] = true;
    }
  }

  static Permutation identity(int n) {
    std::vector<int> m(static_cast<std::size_t>(n));
    std::iota(m.begin(), m.end(), 0);
    return Permutation(std::move(m));
  }

  int size() const { return static_cast<int>(map_.size()); }
  int operator()(int i) const { return map_[static_cast<std::size_t>(i)]; }
  const std::vector<int>& map() const { return map_; }

  // (p.compose(q))(i) = p(q(i)): apply q first, then p.
  Permutation compose(const Permutation& q) const {
    if (size() != q.size())
      throw std::invalid_argument("Permutation::compose: size mismatch");
    std::vector<int> m(map_.size());
    for (std::size_t i = 0; i < map_.size(); ++i) {
      m[i] = map_[static_cast<std::size_t>(q.map_[i])];
    }
    return Permutation(std::move(m));
  }

  Permutation inverse() const {
    std::vector<int> m(map_.size());
    for (std::size_t i = 0; i < map_.size(); ++i) {
      m[static_cast<std::size_t>(map_[i])] = static_cast<int>(i);
    }
    return Permutation(std::move(m));
  }

  bool operator==(const Permutation& o) const { return map_ == o.map_; }
  bool operator<(const Permutation& o) const { return map_ < o.map_; }

 private:
  std::vector<int> map_;
};

struct SymmetryGroup {
  std::vector<Permutation> elements;    // sorted, canonical order
  std::vector<Permutation> generators;  // the subset it was generated from

  int num_players() const {
    return elements.empty() ? 0 : elements.front().size();
  }
  bool contains(const Permutation& p) const {
    return std::binary_search(elements.begin(), elements.end(), p);
  }
};

// Breadth-first closure under composition. Always contains the identity.
// Aborts if the closure would exceed `cap` elements.
inline SymmetryGroup generate_group(int n, std::vector<Permutation> generators,
                                    std::size_t cap = kDefaultGroupCap) {
  for (const auto& g : generators) {
    if (g.size() != n)
      throw std::invalid_argument("generate_group: generator size mismatch");
  }
  std::set<Permutation> closed;
  std::vector<Permutation> frontier;
  closed.insert(Permutation::identity(n));
  frontier.push_back(Permutation::identity(n));
  for (const auto& g : generators) {
    if (closed.insert(g).second) frontier.push_back(g);
  }
  while (!frontier.empty()) {
    std::vector<Permutation> next;
    for (const auto& p : frontier) {
      for (const auto& g : generators) {
        Permutation q = g.compose(p);
        if (closed.insert(q).second) {
          if (closed.size() > cap)
            throw std::runtime_error("generate_group: closure exceeds cap of " +
                                     std::to_string(cap) + " elements");
          next.push_back(std::move(q));
        }
      }
    }
    frontier = std::move(next);
  }
  SymmetryGroup group;
  group.elements.assign(closed.begin(), closed.end());
  group.generators = std::move(generators);
  return group;
}

// True iff permuting the players by `perm` leaves payoffs invariant:
// u_{perm(i)}(a) == u_i(a o perm) for every pure profile a and player i.
// Mismatched action counts between i and perm(i) yield false (with a reason).
inline bool is_symmetry(const Game& game, const Permutation& perm,
                        std::string* reason = nullptr) {
  const int n = game.num_players();
  if (perm.size() != n) {
    if (reason) *reason = "permutation size differs from player count";
    return false;
  }
  for (int i = 0; i < n; ++i) {
    if (game.action_count(i) != game.action_count(perm(i))) {
      if (reason)
        *reason = "players " + std::to_string(i) + " and " +
                  std::to_string(perm(i)) + " have different action counts";
      return false;
    }
  }
  std::vector<int> a(static_cast<std::size_t>(n), 0);
  std::vector<int> b(static_cast<std::size_t>(n), 0);
  const std::int64_t total = game.table_size();
  for (std::int64_t flat = 0; flat < total; ++flat) {
    // b = a o perm, i.e. b_j = a_{perm(j)}.
    for (int j = 0; j < n; ++j)
      b[static_cast<std::size_t>(j)] = a[static_cast<std::size_t>(perm(j))];
    const std::int64_t idx_b = game.flat_index(b);
    if (game.is_common_payoff()) {
      if (game.shared_tensor()[static_cast<std::size_t>(flat)] !=
          game.shared_tensor()[static_cast<std::size_t>(idx_b)]) {
        if (reason) *reason = "payoff mismatch on a pure profile";
        return false;
      }
    } else {
      for (int i = 0; i < n; ++i) {
        if (game.tensor(perm(i))[static_cast<std::size_t>(flat)] !=
            game.tensor(i)[static_cast<std::size_t>(idx_b)]) {
          if (reason) *reason = "payoff mismatch on a pure profile";
          return false;
        }
      }
    }
    // Advance the odometer (player n-1 least significant).
    for (int j = n - 1; j >= 0; --j) {
      if (++a[static_cast<std::size_t>(j)] < game.action_count(j)) break;
      a[static_cast<std::size_t>(j)] = 0;
    }
  }
  return true;
}

// The full set of symmetries, by filtering all n! permutations. Guarded by a
// brute-force cap on the player count.
inline SymmetryGroup all_symmetries(const Game& game, int brute_force_cap = 6) {
  const int n = game.num_players();
  if (n > brute_force_cap)
    throw std::invalid_argument("all_symmetries: " + std::to_string(n) +
                                " players exceeds brute-force cap of " +
                                std::to_string(brute_force_cap));
  std::vector<int> m(static_cast<std::size_t>(n));
  std::iota(m.begin(), m.end(), 0);
  SymmetryGroup group;
  do {
    Permutation p{m};
    if (is_symmetry(game, p)) group.elements.push_back(std::move(p));
  } while (std::next_permutation(m.begin(), m.end()));
  group.generators = group.elements;
  return group;
}

struct OrbitPartition {
  std::vector<int> orbit_of;              // player -> orbit label
  std::vector<std::vector<int>> orbits;   // label -> sorted member list

  int num_players() const { return static_cast<int>(orbit_of.size()); }
  int num_orbits() const { return static_cast<int>(orbits.size()); }
  int representative(int orbit) const {
    return orbits[static_cast<std::size_t>(orbit)].front();
  }

  // All players in one orbit (totally symmetric use).
  static OrbitPartition single(int n) {
    OrbitPartition p;
    p.orbit_of.assign(static_cast<std::size_t>(n), 0);
    p.orbits.emplace_back();
    for (int i = 0; i < n; ++i) p.orbits[0].push_back(i);
    return p;
  }

  // Each player alone.
  static OrbitPartition singletons(int n) {
    OrbitPartition p;
    p.orbit_of.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      p.orbit_of[static_cast<std::size_t>(i)] = i;
      p.orbits.push_back({i});
    }
    return p;
  }
};

// Union-find over all (i, rho(i)) pairs. Orbits are listed by their smallest
// member, members sorted ascending.
inline OrbitPartition orbits(const SymmetryGroup& group) {
  const int n = group.num_players();
  if (n == 0) return OrbitPartition{};
  std::vector<int> parent(static_cast<std::size_t>(n));
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[static_cast<std::size_t>(x)] != x) {
      parent[static_cast<std::size_t>(x)] =
          parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
      x = parent[static_cast<std::size_t>(x)];
    }
    return x;
  };
  auto unite = [&](int x, int y) {
    x = find(x);
    y = find(y);
    if (x != y) parent[static_cast<std::size_t>(std::max(x, y))] = std::min(x, y);
  };
  for (const auto& p : group.elements) {
    for (int i = 0; i < n; ++i) unite(i, p(i));
  }
  OrbitPartition part;
  part.orbit_of.assign(static_cast<std::size_t>(n), -1);
  for (int i = 0; i < n; ++i) {
    const int root = find(i);
    if (part.orbit_of[static_cast<std::size_t>(root)] < 0) {
      part.orbit_of[static_cast<std::size_t>(root)] =
          static_cast<int>(part.orbits.size());
      part.orbits.emplace_back();
    }
    const int label = part.orbit_of[static_cast<std::size_t>(root)];
    part.orbit_of[static_cast<std::size_t>(i)] = label;
    part.orbits[static_cast<std::size_t>(label)].push_back(i);
  }
  return part;
}

// True iff players sharing an orbit play componentwise-equal strategies.
inline bool is_invariant(const StrategyProfile& profile,
                         const OrbitPartition& partition, double tol) {
  if (profile.num_players() != partition.num_players())
    throw std::invalid_argument("is_invariant: player count mismatch");
  for (const auto& orbit : partition.orbits) {
    const auto& ref = profile.strategy(orbit.front());
    for (std::size_t k = 1; k < orbit.size(); ++k) {
      const auto& s = profile.strategy(orbit[k]);
      if (s.size() != ref.size()) return false;
      for (std::size_t a = 0; a < ref.size(); ++a) {
        if (std::abs(s[a] - ref[a]) > tol) return false;
      }
    }
  }
  return true;
}

// Assigns each player its orbit's shared simplex vector; the result is
// orbit-invariant by construction.
inline StrategyProfile expand_symmetric(
    const Game& game, const OrbitPartition& partition,
    const std::vector<std::vector<double>>& shared) {
  if (partition.num_players() != game.num_players())
    throw std::invalid_argument("expand_symmetric: partition/game mismatch");
  if (static_cast<int>(shared.size()) != partition.num_orbits())
    throw std::invalid_argument("expand_symmetric: need one vector per orbit");
  for (int o = 0; o < partition.num_orbits(); ++o) {
    for (int i : partition.orbits[static_cast<std::size_t>(o)]) {
      if (static_cast<int>(shared[static_cast<std::size_t>(o)].size()) !=
          game.action_count(i))
        throw std::invalid_argument(
            "expand_symmetric: orbit " + std::to_string(o) +
            " vector does not match player " + std::to_string(i) +
            "'s action count");
    }
  }
  std::vector<std::vector<double>> strategies(
      static_cast<std::size_t>(game.num_players()));
  for (int i = 0; i < game.num_players(); ++i) {
    strategies[static_cast<std::size_t>(i)] =
        shared[static_cast<std::size_t>(
            partition.orbit_of[static_cast<std::size_t>(i)])];
  }
  return StrategyProfile(std::move(strategies));
}

// Read back one shared vector per orbit (from each orbit's representative).
inline std::vector<std::vector<double>> shared_from_profile(
    const StrategyProfile& profile, const OrbitPartition& partition) {
  std::vector<std::vector<double>> shared;
  shared.reserve(static_cast<std::size_t>(partition.num_orbits()));
  for (int o = 0; o < partition.num_orbits(); ++o) {
    shared.push_back(profile.strategy(partition.representative(o)));
  }
  return shared;
}

}  // namespace symgame
