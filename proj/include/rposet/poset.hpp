#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rposet/automaton.hpp"
#include "rposet/prop.hpp"

namespace rposet {

/// One subtask: `action` must hold at its word position and no prop of
/// `avoid_before` may appear at any earlier position.
struct Subtask {
  Term action;
  PropSet avoid_before;

  PropSet props() const { return action.pos | action.neg | avoid_before; }
  friend bool operator==(const Subtask&, const Subtask&) = default;
  friend auto operator<=>(const Subtask&, const Subtask&) = default;
};

using OrderPair = std::pair<std::size_t, std::size_t>;

/// Relaxed poset (Ω, ⪯, ≠). Subtask ids are vector indices. `orders` holds the
/// covering pairs (h, l) meaning h ⪯ l; semantics use the transitive closure.
/// Each `excludes` group forbids all its members sharing one position.
struct RPoset {
  std::vector<Subtask> subtasks;
  std::vector<OrderPair> orders;
  std::vector<std::vector<std::size_t>> excludes;

  std::size_t size() const { return subtasks.size(); }
  friend bool operator==(const RPoset&, const RPoset&) = default;
};

struct PosetScore {
  std::size_t subtask_count = 0;
  std::size_t order_count = 0;
  friend bool operator==(const PosetScore&, const PosetScore&) = default;
  friend auto operator<=>(const PosetScore&, const PosetScore&) = default;
};

PosetScore score(const RPoset& p);

/// Strict-predecessor closure as bitmasks (bit h of result[l] set iff h ⪯ l,
/// h != l). Requires at most 64 subtasks.
std::vector<std::uint64_t> predecessor_masks(const RPoset& p);

/// Transitive closure of `orders` as a dense matrix; reach[h][l] for h ⪯ l.
std::vector<std::vector<bool>> order_closure(std::size_t n, const std::vector<OrderPair>& orders);

bool is_acyclic(std::size_t n, const std::vector<OrderPair>& orders);

/// Reduces orders to covering pairs, sorts them, and canonicalizes exclude
/// groups (sorted, deduplicated, singletons dropped). Orders must be acyclic.
void canonicalize(RPoset& p);

bool precedes(const RPoset& p, std::size_t h, std::size_t l);

PropSet props_of(const RPoset& p);

/// Membership in the poset language: some placement of subtasks onto
/// positions meets every label, order and exclusion constraint.
bool word_satisfies(const Word& w, const RPoset& p);

/// Exact language inclusion L(a) ⊆ L(b) over the props of both posets.
bool language_included(const RPoset& a, const RPoset& b);

/// Exposes a poset to the inclusion engine; states are bitmasks of placed
/// subtasks.
class PosetStepper {
public:
  using State = std::uint64_t;
  explicit PosetStepper(const RPoset& p);
  std::vector<State> initial() const { return {0}; }
  void step(State placed, const PropSet& symbol, std::vector<State>& out) const;
  bool accepting(State placed) const { return placed == full_; }

private:
  std::vector<Subtask> subtasks_;
  std::vector<std::uint64_t> preds_;
  std::vector<std::uint64_t> groups_;
  std::uint64_t full_ = 0;
};

struct SearchBudget {
  std::size_t max_expansions = 1'000'000;
  std::optional<double> max_seconds;
};

/// Deterministic expansion counter with an optional wall-clock cap.
class BudgetMeter {
public:
  explicit BudgetMeter(const SearchBudget& budget);
  /// Records `n` expansions; false once the budget is spent.
  bool charge(std::size_t n = 1);
  bool exhausted() const { return exhausted_; }
  std::size_t used() const { return used_; }

private:
  SearchBudget budget_;
  std::chrono::steady_clock::time_point start_;
  std::size_t used_ = 0;
  bool exhausted_ = false;
};

struct PosetExtraction {
  std::vector<RPoset> posets;
  std::vector<std::string> diagnostics;
  /// True when no path was skipped or weakened and the budget sufficed, so
  /// the union of the poset languages equals the automaton language.
  bool complete = true;
  bool budget_exhausted = false;
  std::size_t expansions = 0;
};

/// Extracts R-posets from a normalized automaton: one chain per accepting
/// path and guard term, relaxed while the poset language stays inside the
/// automaton language, then pruned of subsumed posets and sorted by score.
PosetExtraction compute_posets(const Nfa& nfa, const SearchBudget& budget = {});

/// Adds label-implied orders (h ⪯ l whenever l's action asserts a prop h must
/// avoid before it), lets predecessors absorb the avoid sets of successors,
/// and adds exclusions for label-contradictory pairs. Language preserving;
/// never introduces a cycle.
void saturate(RPoset& p);

std::string to_dot(const RPoset& p, const PropTable& table);

/// Line-oriented text form: `subtask`, `order` and `exclude` records.
std::string serialize(const RPoset& p, const PropTable& table);

/// Sort by score, keeping construction order among ties.
void sort_by_score(std::vector<RPoset>& posets);

}  // namespace rposet
