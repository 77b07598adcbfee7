#pragma once

// Built-in example games with known optima, used as golden fixtures by the
// test suite and the `fixtures` command.

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "symgame/analysis.hpp"
#include "symgame/game.hpp"
#include "symgame/optimize.hpp"
#include "symgame/symmetry.hpp"

namespace symgame {

// Two taxis choose between driving home (H=0) or to work (W=1); one ride of
// each kind is requested. Payoffs differ by who holds which entrance permit.

// Only taxi 0 may enter the work area, only taxi 1 the home area.
inline Game taxi_permits() {
  return make_common_payoff_game(2, {2, 2}, {1, 0, 2, 1});
}

// Both taxis hold both permits; serving different rides pays 2.
inline Game taxi_identical() {
  return make_common_payoff_game(2, {2, 2}, {1, 2, 2, 1});
}

// Both groups are large and need both taxis at the same destination.
inline Game taxi_both_needed() {
  return make_common_payoff_game(2, {2, 2}, {1, 0, 0, 1});
}

// Ten robots each pick action a=0, b=1, or c=2. Everyone playing a pays 1;
// exactly one b with the rest c pays 1+bonus; anything else pays 0.
inline Game ten_robot_game(double bonus = 0.1) {
  const int n = 10;
  std::vector<int> counts(n, 3);
  std::int64_t size = 1;
  for (int i = 0; i < n; ++i) size *= 3;
  std::vector<double> payoffs(static_cast<std::size_t>(size), 0.0);
  std::vector<int> a(static_cast<std::size_t>(n), 0);
  for (std::int64_t flat = 0; flat < size; ++flat) {
    int num_a = 0, num_b = 0, num_c = 0;
    for (int v : a) (v == 0 ? num_a : v == 1 ? num_b : num_c)++;
    double u = 0.0;
    if (num_a == n) u = 1.0;
    else if (num_b == 1 && num_c == n - 1) u = 1.0 + bonus;
    payoffs[static_cast<std::size_t>(flat)] = u;
    for (int j = n - 1; j >= 0; --j) {
      if (++a[static_cast<std::size_t>(j)] < 3) break;
      a[static_cast<std::size_t>(j)] = 0;
    }
  }
  return Game(std::move(counts), std::move(payoffs));
}

// 3x3 coordination-style game where (a,a) is the unique symmetric optimum yet
// every player is indifferent against a, so the equilibrium is degenerate and
// a joint (b, c) shift improves the payoff.
inline Game degenerate_3x3_game(double eps = 0.1) {
  return make_common_payoff_game(
      2, {3, 3},
      {1.0, 1.0, 1.0,
       1.0, -10.0, 1.0 + eps,
       1.0, 1.0 + eps, -10.0});
}

// Four robot butlers stand at the corners of a square and hold food (0) or
// drink (1). The partygoer group at corner i can reach butlers i-1, i, i+1.
// A group scores 0 with no reachable drink, 1 with drink but no food (all
// three butlers hold drink), else 2. The common payoff is the mean group
// score, so it ranges over [0, 2].
inline Game robot_butler_game() {
  std::vector<double> payoffs(16);
  std::vector<int> a(4, 0);
  for (int flat = 0; flat < 16; ++flat) {
    double total = 0.0;
    for (int g = 0; g < 4; ++g) {
      int drink = 0, food = 0;
      for (int off = -1; off <= 1; ++off) {
        const int b = (g + off + 4) % 4;
        (a[static_cast<std::size_t>(b)] == 1 ? drink : food)++;
      }
      if (drink == 0) total += 0.0;
      else if (food == 0) total += 1.0;
      else total += 2.0;
    }
    payoffs[static_cast<std::size_t>(flat)] = total / 4.0;
    for (int j = 3; j >= 0; --j) {
      if (++a[static_cast<std::size_t>(j)] < 2) break;
      a[static_cast<std::size_t>(j)] = 0;
    }
  }
  return Game({2, 2, 2, 2}, std::move(payoffs));
}

inline double robot_butler_optimal_drink_prob() { return 2.0 - std::sqrt(2.0); }
inline double robot_butler_optimal_eu() { return 4.0 * (std::sqrt(2.0) - 1.0); }

// Two robots choose a contingency plan before learning their private need for
// a contested resource. Types High (values the resource at 6) and Low (values
// it at 4) are independent fair coin flips. Actions: Aggressive takes the
// resource, Cautious defers. Both aggressive destroys it (0); one aggressive
// robot takes it; both cautious gives it to a uniformly random robot. The
// common payoff is the expected sum of utilities over the four type pairs.
//
// Plans are indexed by (action when High, action when Low) with A=aggressive,
// C=cautious:  0=AA, 1=AC, 2=CA, 3=CC.
inline Game veil_of_ignorance_game() {
  const double values[2] = {6.0, 4.0};  // type 0 = High, type 1 = Low
  const auto outcome = [&](int act1, int act2, double v1, double v2) {
    if (act1 == 0 && act2 == 0) return 0.0;        // both aggressive
    if (act1 == 0) return v1;                      // robot 1 takes it
    if (act2 == 0) return v2;                      // robot 2 takes it
    return 0.5 * (v1 + v2);                        // random allocation
  };
  const auto plan_action = [](int plan, int type) {
    // plan bit 0 (High) is the leading letter, bit 1 (Low) the trailing one;
    // 0 encodes Aggressive, 1 Cautious.
    return type == 0 ? plan / 2 : plan % 2;
  };
  std::vector<double> payoffs(16);
  for (int p = 0; p < 4; ++p) {
    for (int q = 0; q < 4; ++q) {
      double total = 0.0;
      for (int t1 = 0; t1 < 2; ++t1) {
        for (int t2 = 0; t2 < 2; ++t2) {
          total += outcome(plan_action(p, t1), plan_action(q, t2),
                           values[t1], values[t2]);
        }
      }
      payoffs[static_cast<std::size_t>(p * 4 + q)] = total / 4.0;
    }
  }
  return Game({4, 4}, std::move(payoffs));
}

// Optimal invariant plan: Low always cautious, High aggressive w.p. 1/6.
inline std::vector<double> veil_optimal_plan() {
  return {0.0, 1.0 / 6.0, 0.0, 5.0 / 6.0};
}
inline double veil_optimal_eu() { return 121.0 / 24.0; }
inline double veil_asymmetric_benchmark_eu() { return 21.0 / 4.0; }

struct FixtureCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

namespace detail {

class FixtureRecorder {
 public:
  explicit FixtureRecorder(std::string name) : name_(std::move(name)) {}

  void expect(bool ok, const std::string& what) {
    if (!ok) {
      failed_ = true;
      if (!detail_.empty()) detail_ += "; ";
      detail_ += what;
    }
  }

  void expect_near(double actual, double expected, double tol,
                   const std::string& what) {
    if (!(std::abs(actual - expected) <= tol)) {
      std::ostringstream os;
      os.precision(17);
      os << what << ": got " << actual << ", want " << expected << " +/- " << tol;
      expect(false, os.str());
    }
  }

  FixtureCheck finish() const { return {name_, !failed_, detail_}; }

 private:
  std::string name_;
  bool failed_ = false;
  std::string detail_;
};

}  // namespace detail

// Machine-checked golden corpus. All seeds are fixed, so the outcome is
// deterministic.
inline std::vector<FixtureCheck> run_fixture_checks() {
  std::vector<FixtureCheck> checks;
  const Permutation swap01({1, 0});

  {
    detail::FixtureRecorder rec("taxi-1a");
    const Game g = taxi_permits();
    const auto pure = StrategyProfile::point_masses(g, {1, 0});  // (W, H)
    rec.expect(expected_utility(g, pure)[0] == 2.0, "pure (W,H) pays 2");
    rec.expect(!is_symmetry(g, swap01), "swap must not be a symmetry");
    rec.expect(all_symmetries(g).elements.size() == 1, "only the identity");
    const StrategyProfile mid({{0.5, 0.5}, {0.5, 0.5}});
    rec.expect(best_response_set(g, mid, 0, 0.0) == std::vector<int>{1},
               "W dominates for player 0");
    checks.push_back(rec.finish());
  }

  {
    detail::FixtureRecorder rec("taxi-1b");
    const Game g = taxi_identical();
    const StrategyProfile mid({{0.5, 0.5}, {0.5, 0.5}});
    rec.expect(expected_utility(g, mid)[0] == 1.5, "EU(0.5,0.5) = 1.5");
    rec.expect(is_symmetry(g, swap01), "swap is a symmetry");
    rec.expect(all_symmetries(g).elements.size() == 2, "full S_2");
    const auto part = OrbitPartition::single(2);
    OptimizerConfig cfg;
    auto run = run_replicator(g, part, {{0.4, 0.6}}, cfg);
    rec.expect_near(run.final_shared[0][0], 0.5, 1e-6, "replicator -> 0.5");
    rec.expect_near(run.expected_utility, 1.5, 1e-9, "replicator EU");
    rec.expect(exploitability(g, mid) == 0.0, "mixed point is Nash");
    rec.expect(stability_verdict(g, mid, 1e-9) == Stability::kUnstable,
               "mixed optimum is unstable");
    SplitMix64 rng(7);
    rec.expect(asym_local_search_oracle(g, mid, 0.05, 2000, rng).has_value(),
               "joint deviation improves the mixed optimum");
    auto dec = worst_case_perturbation_decrease(g, mid, 1e-9);
    rec.expect(dec.has_value(), "decrease defined");
    if (dec) rec.expect_near(dec->pct, 100.0 / 3.0, 1e-9, "decrease 33.33%");
    checks.push_back(rec.finish());
  }

  {
    detail::FixtureRecorder rec("taxi-1c");
    const Game g = taxi_both_needed();
    const StrategyProfile mid({{0.5, 0.5}, {0.5, 0.5}});
    rec.expect(exploitability(g, mid) == 0.0, "(0.5,0.5) is Nash");
    rec.expect_near(expected_utility(g, mid)[0], 0.5, 0.0, "EU 0.5");
    // Yet local search started off-center ascends away to a pure profile.
    const auto part = OrbitPartition::single(2);
    OptimizerConfig cfg;
    for (double p0 : {0.9, 0.3}) {
      auto run = run_projected_gradient(g, part, {{p0, 1.0 - p0}}, cfg);
      rec.expect_near(run.expected_utility, 1.0, 1e-9,
                      "gradient from " + std::to_string(p0) + " reaches EU 1");
    }
    auto dec = worst_case_perturbation_decrease(g, mid, 1e-9);
    rec.expect(dec.has_value() && dec->pct == 100.0, "decrease 100%");
    checks.push_back(rec.finish());
  }

  {
    detail::FixtureRecorder rec("ten-robot");
    const Game g = ten_robot_game(0.1);
    const auto all_a = StrategyProfile::point_masses(
        g, std::vector<int>(10, 0));
    rec.expect(expected_utility(g, all_a)[0] == 1.0, "all-a pays 1");
    rec.expect(exploitability(g, all_a) == 0.0, "all-a is Nash");
    rec.expect(!is_degenerate_equilibrium(g, all_a, 1e-9), "non-degenerate");
    rec.expect(stability_verdict(g, all_a, 1e-9) == Stability::kStable,
               "stable under joint deviation");
    SplitMix64 rng(11);
    rec.expect(!asym_local_search_oracle(g, all_a, 0.01, 10000, rng).has_value(),
               "no improving joint deviation at radius 0.01");
    const auto part = OrbitPartition::single(10);
    OptimizerConfig cfg;
    cfg.seed = 2024;
    auto best = best_of_runs(g, part, cfg,
                             {Method::kReplicator, Method::kGradient});
    rec.expect_near(best.best.expected_utility, 1.0, 1e-6,
                    "best of 20 runs finds all-a");
    checks.push_back(rec.finish());
  }

  {
    detail::FixtureRecorder rec("degenerate-3x3");
    const Game g = degenerate_3x3_game(0.1);
    const auto aa = StrategyProfile::point_masses(g, {0, 0});
    const auto vs_a = StrategyProfile::point_masses(g, {0, 0});
    rec.expect(best_response_set(g, vs_a, 0, 0.0) == std::vector<int>({0, 1, 2}),
               "everything best-responds to a");
    rec.expect(exploitability(g, aa) == 0.0, "(a,a) is Nash");
    rec.expect(is_degenerate_equilibrium(g, aa, 1e-9), "(a,a) is degenerate");
    rec.expect(stability_verdict(g, aa, 1e-9) == Stability::kUnknownDegenerate,
               "degenerate: no verdict");
    SplitMix64 rng(5);
    rec.expect(asym_local_search_oracle(g, aa, 0.05, 2000, rng).has_value(),
               "joint (b,c) shift improves (a,a)");
    const auto part = OrbitPartition::single(2);
    OptimizerConfig cfg;
    cfg.seed = 31;
    auto best = best_of_runs(g, part, cfg,
                             {Method::kReplicator, Method::kGradient});
    rec.expect_near(best.best.expected_utility, 1.0, 1e-6,
                    "best symmetric play is the point mass on a");
    rec.expect(best.best.final_shared[0][0] > 0.999, "mass concentrates on a");
    checks.push_back(rec.finish());
  }

  {
    detail::FixtureRecorder rec("robot-butler");
    const Game g = robot_butler_game();
    const Permutation rotation({1, 2, 3, 0});
    rec.expect(is_symmetry(g, rotation), "clockwise rotation is a symmetry");
    const auto rot_group = generate_group(4, {rotation});
    rec.expect(rot_group.elements.size() == 4, "rotation generates C_4");
    // Payoffs depend only on the action multiset, so in fact every
    // permutation is a symmetry.
    rec.expect(all_symmetries(g).elements.size() == 24, "full S_4");
    rec.expect(orbits(rot_group).num_orbits() == 1, "one rotation orbit");

    const auto part = OrbitPartition::single(4);
    OptimizerConfig cfg;
    cfg.seed = 99;
    auto best = best_of_runs(g, part, cfg,
                             {Method::kReplicator, Method::kGradient});
    rec.expect_near(best.best.final_shared[0][1],
                    robot_butler_optimal_drink_prob(), 1e-4,
                    "drink probability 2 - sqrt(2)");
    rec.expect_near(best.best.expected_utility, robot_butler_optimal_eu(), 1e-6,
                    "EU 4(sqrt(2) - 1)");
    const auto expanded = expand_symmetric(g, part, best.best.final_shared);
    rec.expect(exploitability(g, expanded) <= 1e-6, "optimum is Nash");
    rec.expect(stability_verdict(g, expanded, 1e-6) == Stability::kUnstable,
               "mixed optimum is unstable");

    // Restricting symmetry to the opposite-corner swap allows the global
    // optimum: one diagonal holds food, the other drink.
    const auto swap_group = generate_group(4, {Permutation({2, 3, 0, 1})});
    const auto pairs = orbits(swap_group);
    rec.expect(pairs.num_orbits() == 2 && pairs.orbits[0] == std::vector<int>({0, 2}),
               "opposite corners share an orbit");
    const auto diag = expand_symmetric(g, pairs, {{1.0, 0.0}, {0.0, 1.0}});
    rec.expect(expected_utility(g, diag)[0] == 2.0, "diagonal profile pays 2");
    rec.expect(is_invariant(diag, pairs, 0.0), "diagonal profile is invariant");
    rec.expect(exploitability(g, diag) == 0.0, "global optimum is Nash");
    rec.expect(stability_verdict(g, diag, 1e-9) == Stability::kStable,
               "pure global optimum is stable");
    checks.push_back(rec.finish());
  }

  {
    detail::FixtureRecorder rec("veil-of-ignorance");
    const Game g = veil_of_ignorance_game();
    rec.expect(is_symmetry(g, swap01), "plan game is symmetric");
    // Robot 1 aggressive only when High, robot 2 always cautious.
    const auto benchmark = StrategyProfile::point_masses(g, {1, 3});
    rec.expect(expected_utility(g, benchmark)[0] ==
                   veil_asymmetric_benchmark_eu(),
               "asymmetric benchmark pays exactly 21/4");
    const auto part = OrbitPartition::single(2);
    OptimizerConfig cfg;
    cfg.seed = 17;
    auto best = best_of_runs(g, part, cfg,
                             {Method::kReplicator, Method::kGradient});
    const auto want = veil_optimal_plan();
    for (std::size_t a = 0; a < want.size(); ++a) {
      rec.expect_near(best.best.final_shared[0][a], want[a], 1e-4,
                      "optimal plan coordinate " + std::to_string(a));
    }
    rec.expect_near(best.best.expected_utility, veil_optimal_eu(), 1e-7,
                    "EU 121/24 at the optimizer's point");
    const auto exact = expand_symmetric(g, part, {want});
    rec.expect_near(expected_utility(g, exact)[0], veil_optimal_eu(), 1e-9,
                    "EU 121/24 at the exact optimum");
    const auto expanded = expand_symmetric(g, part, best.best.final_shared);
    rec.expect(exploitability(g, expanded) <= 1e-6, "optimum is Nash");
    rec.expect(stability_verdict(g, expanded, 1e-6) == Stability::kUnstable,
               "mixed plan optimum is unstable");
    rec.expect(best.best.expected_utility < veil_asymmetric_benchmark_eu(),
               "asymmetric play beats the invariant optimum");
    checks.push_back(rec.finish());
  }

  return checks;
}

}  // namespace symgame
