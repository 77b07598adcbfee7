#pragma once

// Compact payoff table for totally symmetric common-payoff games: one value
// per unordered action profile (multiset of actions).
//
// Multisets are ranked by their sorted action list's position among all sorted
// lists (combinatorial number system), so ranks are stable across platforms.
// The table also powers a fast evaluator for all-players-alike strategies:
// with shared strategy x, the deviation payoff of action b is
//   dev[b] = sum over (n-1)-multisets M of  (n-1)!/prod(M_a!) * prod_a x_a^M_a
//            * value[M + e_b],
// and EU = sum_b x_b dev[b].

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "symgame/game.hpp"

namespace symgame {

namespace detail {

inline std::uint64_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t r = 1;
  for (int i = 1; i <= k; ++i) {
    r = r * static_cast<std::uint64_t>(n - k + i) / static_cast<std::uint64_t>(i);
  }
  return r;
}

}  // namespace detail

// Number of multisets of size n over m actions: C(m+n-1, n).
inline std::uint64_t multiset_count(int n, int m) {
  return detail::binomial(m + n - 1, n);
}

// Rank of a non-decreasing action sequence among all non-decreasing sequences
// of the same length over {0..m-1}, in lexicographic order.
inline std::uint64_t multiset_rank_sorted(std::span<const int> sorted, int m) {
  const int n = static_cast<int>(sorted.size());
  std::uint64_t rank = 0;
  int prev = 0;
  for (int i = 0; i < n; ++i) {
    const int ai = sorted[static_cast<std::size_t>(i)];
    if (ai < prev || ai >= m)
      throw std::invalid_argument("multiset_rank: sequence not sorted/in range");
    for (int v = prev; v < ai; ++v) {
      // Sequences equal so far, value v here, anything >= v afterwards.
      rank += detail::binomial(m - v + n - i - 2, n - i - 1);
    }
    prev = ai;
  }
  return rank;
}

// Visit every multiset of size n over m actions in rank order. The callback
// receives the per-action count vector.
inline void for_each_multiset(int n, int m,
                              const std::function<void(const std::vector<int>&)>& fn) {
  std::vector<int> seq(static_cast<std::size_t>(n), 0);
  std::vector<int> counts(static_cast<std::size_t>(m), 0);
  const auto emit = [&]() {
    std::fill(counts.begin(), counts.end(), 0);
    for (int v : seq) ++counts[static_cast<std::size_t>(v)];
    fn(counts);
  };
  if (n == 0) {
    fn(counts);
    return;
  }
  while (true) {
    emit();
    // Next non-decreasing sequence in lex order.
    int i = n - 1;
    while (i >= 0 && seq[static_cast<std::size_t>(i)] == m - 1) --i;
    if (i < 0) break;
    const int v = seq[static_cast<std::size_t>(i)] + 1;
    for (int j = i; j < n; ++j) seq[static_cast<std::size_t>(j)] = v;
  }
}

class SymmetricGameTable {
 public:
  static SymmetricGameTable from_values(int players, int actions,
                                        std::vector<double> values) {
    if (players < 1 || actions < 1)
      throw std::invalid_argument("SymmetricGameTable: bad dimensions");
    if (values.size() != multiset_count(players, actions))
      throw std::invalid_argument("SymmetricGameTable: wrong value count");
    SymmetricGameTable t;
    t.n_ = players;
    t.m_ = actions;
    t.values_ = std::move(values);
    t.build_dev_terms();
    return t;
  }

  // Reads the multiset-shared structure out of a full tensor. Returns nullopt
  // unless the game is common-payoff, all action counts are equal, and every
  // ordered profile with the same multiset carries the exact same payoff.
  static std::optional<SymmetricGameTable> from_game(const Game& game) {
    if (!game.is_common_payoff()) return std::nullopt;
    const int n = game.num_players();
    const int m = game.action_count(0);
    for (int i = 1; i < n; ++i) {
      if (game.action_count(i) != m) return std::nullopt;
    }
    std::vector<double> values(multiset_count(n, m));
    std::vector<bool> seen(values.size(), false);
    std::vector<int> a(static_cast<std::size_t>(n), 0);
    std::vector<int> sorted(static_cast<std::size_t>(n));
    const auto& tensor = game.shared_tensor();
    for (std::int64_t flat = 0; flat < game.table_size(); ++flat) {
      sorted.assign(a.begin(), a.end());
      std::sort(sorted.begin(), sorted.end());
      const std::uint64_t r = multiset_rank_sorted(sorted, m);
      const double u = tensor[static_cast<std::size_t>(flat)];
      if (!seen[r]) {
        seen[r] = true;
        values[r] = u;
      } else if (values[r] != u) {
        return std::nullopt;
      }
      for (int j = n - 1; j >= 0; --j) {
        if (++a[static_cast<std::size_t>(j)] < m) break;
        a[static_cast<std::size_t>(j)] = 0;
      }
    }
    return from_values(n, m, std::move(values));
  }

  int players() const { return n_; }
  int actions() const { return m_; }
  const std::vector<double>& values() const { return values_; }

  double value_of_sorted(std::span<const int> sorted) const {
    return values_[multiset_rank_sorted(sorted, m_)];
  }

  // Deviation payoff of each action against n-1 opponents all playing x.
  void deviations(std::span<const double> x, std::span<double> devs) const {
    for (auto& d : devs) d = 0.0;
    for (const auto& term : dev_terms_) {
      double w = term.coef;
      for (int a = 0; a < m_; ++a) {
        const int c = term.counts[static_cast<std::size_t>(a)];
        if (c == 0) continue;
        const double xa = x[static_cast<std::size_t>(a)];
        if (xa == 0.0) {
          w = 0.0;
          break;
        }
        for (int k = 0; k < c; ++k) w *= xa;
      }
      if (w == 0.0) continue;
      for (int a = 0; a < m_; ++a) {
        devs[static_cast<std::size_t>(a)] +=
            w * values_[term.plus_index[static_cast<std::size_t>(a)]];
      }
    }
  }

  double expected_utility(std::span<const double> x) const {
    std::vector<double> devs(static_cast<std::size_t>(m_));
    deviations(x, devs);
    double eu = 0.0;
    for (int a = 0; a < m_; ++a)
      eu += x[static_cast<std::size_t>(a)] * devs[static_cast<std::size_t>(a)];
    return eu;
  }

  // Expand to the full ordered tensor.
  Game to_game() const {
    std::vector<int> counts(static_cast<std::size_t>(n_), m_);
    std::int64_t size = 1;
    for (int i = 0; i < n_; ++i) size *= m_;
    std::vector<double> tensor(static_cast<std::size_t>(size));
    std::vector<int> a(static_cast<std::size_t>(n_), 0);
    std::vector<int> sorted(static_cast<std::size_t>(n_));
    for (std::int64_t flat = 0; flat < size; ++flat) {
      sorted.assign(a.begin(), a.end());
      std::sort(sorted.begin(), sorted.end());
      tensor[static_cast<std::size_t>(flat)] = value_of_sorted(sorted);
      for (int j = n_ - 1; j >= 0; --j) {
        if (++a[static_cast<std::size_t>(j)] < m_) break;
        a[static_cast<std::size_t>(j)] = 0;
      }
    }
    return Game(std::move(counts), std::move(tensor));
  }

 private:
  struct DevTerm {
    double coef;                          // (n-1)! / prod(counts!)
    std::vector<int> counts;              // opponent multiset, per action
    std::vector<std::uint32_t> plus_index;  // rank of multiset + e_a
  };

  void build_dev_terms() {
    dev_terms_.clear();
    for_each_multiset(n_ - 1, m_, [&](const std::vector<int>& counts) {
      DevTerm term;
      term.counts = counts;
      double coef = 1.0;
      int placed = 0;
      for (int a = 0; a < m_; ++a) {
        for (int k = 1; k <= counts[static_cast<std::size_t>(a)]; ++k) {
          ++placed;
          coef *= static_cast<double>(placed) / static_cast<double>(k);
        }
      }
      term.coef = coef;
      term.plus_index.resize(static_cast<std::size_t>(m_));
      std::vector<int> seq;
      for (int a = 0; a < m_; ++a) {
        seq.clear();
        for (int v = 0; v < m_; ++v) {
          int c = counts[static_cast<std::size_t>(v)] + (v == a ? 1 : 0);
          seq.insert(seq.end(), static_cast<std::size_t>(c), v);
        }
        term.plus_index[static_cast<std::size_t>(a)] =
            static_cast<std::uint32_t>(multiset_rank_sorted(seq, m_));
      }
      dev_terms_.push_back(std::move(term));
    });
  }

  int n_ = 0;
  int m_ = 0;
  std::vector<double> values_;
  std::vector<DevTerm> dev_terms_;
};

}  // namespace symgame
