#pragma once

// Seeded generators for three totally symmetric game classes. Each draw
// assigns one payoff per unordered action profile and replicates it to every
// ordered profile with that multiset, so every generated game is totally
// symmetric by construction.
//
//   RandomGame        all values Unif(-100, 100)
//   CoordinationGame  all-same profiles Unif(0, 100), others Unif(-100, 0)
//   CollaborationGame all-same profiles exactly 100, others Unif(-100, 99)
//
// Values are drawn in ascending unordered-profile rank with one SplitMix64
// stream per spec, which pins the byte-level output of every draw.

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "symgame/game.hpp"
#include "symgame/rng.hpp"
#include "symgame/symmetric_table.hpp"

namespace symgame {

enum class GamutClass { kRandomGame, kCoordinationGame, kCollaborationGame };

inline const char* to_string(GamutClass c) {
  switch (c) {
    case GamutClass::kRandomGame: return "RandomGame";
    case GamutClass::kCoordinationGame: return "CoordinationGame";
    case GamutClass::kCollaborationGame: return "CollaborationGame";
  }
  return "?";
}

inline GamutClass gamut_class_from_string(const std::string& s) {
  std::string t;
  for (char c : s) t += static_cast<char>(std::tolower(c));
  if (t == "randomgame" || t == "random") return GamutClass::kRandomGame;
  if (t == "coordinationgame" || t == "coordination")
    return GamutClass::kCoordinationGame;
  if (t == "collaborationgame" || t == "collaboration")
    return GamutClass::kCollaborationGame;
  throw std::invalid_argument("unknown game class: " + s);
}

// Every class draws payoffs in (-100, 100); used when normalizing expected
// utilities to the unit payoff scale.
constexpr double kGamutPayoffFloor = -100.0;
constexpr double kGamutPayoffCeil = 100.0;

struct GamutSpec {
  GamutClass cls = GamutClass::kRandomGame;
  int players = 2;
  int actions = 2;
  std::uint64_t seed = 0;
};

// Canonical index of an unordered action profile: the rank of its sorted
// action list among all sorted lists (combinatorial number system).
inline std::uint64_t unordered_index(std::vector<int> actions_multiset,
                                     int num_actions) {
  std::sort(actions_multiset.begin(), actions_multiset.end());
  return multiset_rank_sorted(actions_multiset, num_actions);
}

inline SymmetricGameTable generate_table(const GamutSpec& spec) {
  if (spec.players < 2 || spec.actions < 2)
    throw std::invalid_argument("gamut: players and actions must be >= 2");
  SplitMix64 rng(spec.seed);
  std::vector<double> values;
  values.reserve(multiset_count(spec.players, spec.actions));
  for_each_multiset(spec.players, spec.actions, [&](const std::vector<int>& counts) {
    const bool all_same =
        std::any_of(counts.begin(), counts.end(),
                    [&](int c) { return c == spec.players; });
    double v = 0.0;
    switch (spec.cls) {
      case GamutClass::kRandomGame:
        v = rng.uniform(-100.0, 100.0);
        break;
      case GamutClass::kCoordinationGame:
        v = all_same ? rng.uniform(0.0, 100.0) : rng.uniform(-100.0, 0.0);
        break;
      case GamutClass::kCollaborationGame:
        v = all_same ? 100.0 : rng.uniform(-100.0, 99.0);
        break;
    }
    values.push_back(v);
  });
  return SymmetricGameTable::from_values(spec.players, spec.actions,
                                         std::move(values));
}

inline Game generate(const GamutSpec& spec) { return generate_table(spec).to_game(); }

}  // namespace symgame
