#pragma once

#include <functional>
#include <random>
#include <string>
#include <vector>

#include "rposet/ltl.hpp"
#include "rposet/inclusion.hpp"
#include "rposet/poset.hpp"
#include "rposet/prop.hpp"

namespace testsupport {

using rposet::Formula;
using rposet::PropId;
using rposet::PropSet;
using rposet::Word;

/// Table with props p0..p{n-1}, ids 0..n-1.
inline rposet::PropTable make_table(int n) {
  rposet::PropTable t;
  for (int i = 0; i < n; ++i) t.intern("p" + std::to_string(i));
  return t;
}

/// Random PNF formula with at most `max_len` nodes over props [0, props).
inline Formula random_formula(std::mt19937_64& rng, int max_len, int props) {
  auto pick = [&](int n) { return static_cast<int>(rng() % static_cast<unsigned>(n)); };
  std::function<Formula(int)> gen = [&](int budget) -> Formula {
    if (budget <= 1) {
      int k = pick(10);
      if (k == 0) return Formula::truth();
      if (k <= 5) return Formula::atom(pick(props));
      return Formula::not_atom(pick(props));
    }
    switch (pick(budget >= 3 ? 7 : 4)) {
      case 0: return gen(1);
      case 1: return Formula::eventually(gen(budget - 1));
      case 2: return Formula::next(gen(budget - 1));
      case 3: return Formula::eventually(gen(budget - 1));
      default: {
        int left = 1 + pick(budget - 2);
        int right = budget - 1 - left;
        Formula a = gen(left), b = gen(right);
        int k = pick(3);
        if (k == 0) return Formula::conj({a, b});
        if (k == 1) return Formula::disj({a, b});
        return Formula::until(a, b);
      }
    }
  };
  return gen(1 + pick(max_len));
}

inline PropSet random_symbol(std::mt19937_64& rng, int props) {
  PropSet s;
  for (int p = 0; p < props; ++p) {
    if (rng() % 2) s.insert(p);
  }
  return s;
}

inline Word random_word(std::mt19937_64& rng, int max_len, int props) {
  Word w(rng() % static_cast<unsigned>(max_len + 1));
  for (auto& s : w) s = random_symbol(rng, props);
  return w;
}

/// Calls f on every word of length 0..max_len over the given symbols.
inline void for_each_word(const std::vector<PropSet>& symbols, std::size_t max_len,
                          const std::function<void(const Word&)>& f) {
  Word w;
  std::function<void()> rec = [&] {
    f(w);
    if (w.size() == max_len) return;
    for (const auto& s : symbols) {
      w.push_back(s);
      rec();
      w.pop_back();
    }
  };
  rec();
}

/// Def.-style membership by enumerating every position assignment.
inline bool brute_force_satisfies(const Word& w, const rposet::RPoset& p) {
  const std::size_t k = p.size(), n = w.size();
  if (k == 0) return true;
  if (n == 0) return false;
  std::vector<std::size_t> tau(k, 0);
  while (true) {
    bool ok = true;
    for (std::size_t i = 0; i < k && ok; ++i) {
      const auto& s = p.subtasks[i];
      ok = s.action.satisfied_by(w[tau[i]]);
      for (std::size_t m = 0; m < tau[i] && ok; ++m) ok = !s.avoid_before.intersects(w[m]);
    }
    for (auto [h, l] : p.orders) ok = ok && tau[h] <= tau[l];
    for (const auto& g : p.excludes) {
      if (!ok) break;
      bool all_same = true;
      for (auto i : g) all_same = all_same && tau[i] == tau[g.front()];
      ok = !all_same;
    }
    if (ok) return true;
    std::size_t d = 0;
    while (d < k && ++tau[d] == n) tau[d++] = 0;
    if (d == k) return false;
  }
}

/// Random poset with at most `max_subtasks` subtasks over props [0, props).
inline rposet::RPoset random_poset(std::mt19937_64& rng, int max_subtasks, int props) {
  rposet::RPoset p;
  const int k = 1 + static_cast<int>(rng() % static_cast<unsigned>(max_subtasks));
  for (int i = 0; i < k; ++i) {
    rposet::Subtask s;
    for (int q = 0; q < props; ++q) {
      switch (rng() % 8) {
        case 0: case 1: s.action.pos.insert(q); break;
        case 2: s.action.neg.insert(q); break;
        case 3: s.avoid_before.insert(q); break;
        default: break;
      }
    }
    if (s.action.pos.empty()) s.action.pos.insert(static_cast<PropId>(rng() % props));
    s.action.neg = s.action.neg - s.action.pos;
    p.subtasks.push_back(s);
  }
  for (int i = 0; i < k; ++i) {
    for (int j = i + 1; j < k; ++j) {
      if (rng() % 3 == 0) p.orders.emplace_back(i, j);
      if (rng() % 5 == 0) p.excludes.push_back({std::size_t(i), std::size_t(j)});
    }
  }
  rposet::canonicalize(p);
  return p;
}

inline std::vector<PropSet> symbols_over(int props) {
  std::vector<PropId> ids;
  for (int p = 0; p < props; ++p) ids.push_back(p);
  return rposet::all_symbols(PropSet(ids));
}

/// First poset (in score order) whose subtasks each assert at most one prop.
inline const rposet::RPoset* first_single_action(const std::vector<rposet::RPoset>& posets) {
  for (const auto& p : posets) {
    bool ok = true;
    for (const auto& s : p.subtasks) ok = ok && s.action.pos.size() <= 1;
    if (ok) return &p;
  }
  return nullptr;
}

}  // namespace testsupport
