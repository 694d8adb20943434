#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <optional>
#include <unordered_map>
#include <vector>

#include "rposet/prop.hpp"

namespace rposet {

/// Every subset of `props`, in increasing bitmask order over the sorted ids.
std::vector<PropSet> all_symbols(const PropSet& props);

struct InclusionResult {
  bool included = false;
  /// True when the search stopped at the node limit without a verdict.
  bool exhausted = false;
  Word counterexample;
};

namespace detail {

struct SubsetKey {
  std::uint64_t a;
  std::vector<std::uint64_t> b;
  friend bool operator==(const SubsetKey&, const SubsetKey&) = default;
};

struct SubsetKeyHash {
  std::size_t operator()(const SubsetKey& k) const {
    std::size_t h = std::hash<std::uint64_t>{}(k.a);
    for (auto x : k.b) h = h * 1000003u ^ std::hash<std::uint64_t>{}(x);
    return h;
  }
};

}  // namespace detail

/// Decides L(A) ⊆ L(B) over the given symbol set by breadth-first search of
/// A-states paired with B-subsets. A and B expose initial(), step() and
/// accepting() over 64-bit state codes. The counterexample is a shortest word
/// accepted by A and rejected by B. `max_len` bounds the word length.
template <class A, class B>
InclusionResult check_inclusion(const A& a, const B& b, const std::vector<PropSet>& symbols,
                                std::optional<std::size_t> max_len = std::nullopt,
                                std::size_t max_nodes = 50'000'000) {
  using detail::SubsetKey;
  struct Node {
    SubsetKey key;
    std::size_t parent;
    std::size_t symbol;
    std::size_t depth;
  };
  std::vector<Node> nodes;
  std::unordered_map<SubsetKey, std::size_t, detail::SubsetKeyHash> seen;
  std::deque<std::size_t> queue;

  auto normalize = [](std::vector<std::uint64_t>& v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
  };
  auto b_accepts = [&](const std::vector<std::uint64_t>& set) {
    return std::any_of(set.begin(), set.end(), [&](std::uint64_t s) { return b.accepting(s); });
  };
  auto witness = [&](std::size_t idx) {
    InclusionResult r;
    Word w;
    while (nodes[idx].parent != static_cast<std::size_t>(-1)) {
      w.push_back(symbols[nodes[idx].symbol]);
      idx = nodes[idx].parent;
    }
    std::reverse(w.begin(), w.end());
    r.counterexample = std::move(w);
    return r;
  };

  std::vector<std::uint64_t> b_init;
  for (auto s : b.initial()) b_init.push_back(static_cast<std::uint64_t>(s));
  normalize(b_init);
  for (auto s : a.initial()) {
    SubsetKey key{static_cast<std::uint64_t>(s), b_init};
    if (seen.count(key)) continue;
    seen.emplace(key, nodes.size());
    nodes.push_back({std::move(key), static_cast<std::size_t>(-1), 0, 0});
    queue.push_back(nodes.size() - 1);
  }

  std::vector<typename A::State> a_next;
  std::vector<typename B::State> b_step;
  while (!queue.empty()) {
    const std::size_t idx = queue.front();
    queue.pop_front();
    if (a.accepting(nodes[idx].key.a) && !b_accepts(nodes[idx].key.b)) return witness(idx);
    if (max_len && nodes[idx].depth >= *max_len) continue;
    for (std::size_t si = 0; si < symbols.size(); ++si) {
      a_next.clear();
      a.step(nodes[idx].key.a, symbols[si], a_next);
      if (a_next.empty()) continue;
      std::vector<std::uint64_t> b_next;
      for (auto bs : nodes[idx].key.b) {
        b_step.clear();
        b.step(bs, symbols[si], b_step);
        for (auto t : b_step) b_next.push_back(static_cast<std::uint64_t>(t));
      }
      normalize(b_next);
      for (auto as : a_next) {
        SubsetKey key{static_cast<std::uint64_t>(as), b_next};
        if (seen.count(key)) continue;
        if (nodes.size() >= max_nodes) {
          InclusionResult r;
          r.exhausted = true;
          return r;
        }
        seen.emplace(key, nodes.size());
        nodes.push_back({std::move(key), idx, si, nodes[idx].depth + 1});
        queue.push_back(nodes.size() - 1);
      }
    }
  }
  InclusionResult r;
  r.included = true;
  return r;
}

/// Language union of several automata of the same type; state codes carry the
/// member index in the top 16 bits.
template <class M>
struct UnionStepper {
  std::vector<M> members;
  using State = std::uint64_t;
  static constexpr int kShift = 48;

  std::vector<State> initial() const {
    std::vector<State> out;
    for (std::size_t i = 0; i < members.size(); ++i) {
      for (auto s : members[i].initial()) out.push_back((State(i) << kShift) | State(s));
    }
    return out;
  }
  void step(State s, const PropSet& symbol, std::vector<State>& out) const {
    const std::size_t i = s >> kShift;
    std::vector<typename M::State> tmp;
    members[i].step(s & ((State(1) << kShift) - 1), symbol, tmp);
    for (auto t : tmp) out.push_back((State(i) << kShift) | State(t));
  }
  bool accepting(State s) const {
    return members[s >> kShift].accepting(s & ((State(1) << kShift) - 1));
  }
};

/// Language intersection; each component state must fit in 32 bits.
template <class M1, class M2>
struct ProductStepper {
  M1 first;
  M2 second;
  using State = std::uint64_t;

  std::vector<State> initial() const {
    std::vector<State> out;
    for (auto x : first.initial()) {
      for (auto y : second.initial()) out.push_back((State(x) << 32) | State(y));
    }
    return out;
  }
  void step(State s, const PropSet& symbol, std::vector<State>& out) const {
    std::vector<typename M1::State> xs;
    std::vector<typename M2::State> ys;
    first.step(s >> 32, symbol, xs);
    if (xs.empty()) return;
    second.step(s & 0xffffffffu, symbol, ys);
    for (auto x : xs) {
      for (auto y : ys) out.push_back((State(x) << 32) | State(y));
    }
  }
  bool accepting(State s) const {
    return first.accepting(s >> 32) && second.accepting(s & 0xffffffffu);
  }
};

}  // namespace rposet
