#pragma once

#include <set>
#include <stdexcept>
#include <utility>

#include "rposet/assignment.hpp"
#include "rposet/ltl.hpp"
#include "rposet/product.hpp"

namespace rposet {

struct ExecutionState {
  Time now = 0;
  /// Subtasks whose completion is already part of the emitted word.
  std::set<std::size_t> finished;
  std::set<std::size_t> in_progress;
  Word emitted_word;
  RPoset poset;
  Plan plan;

  std::set<std::size_t> committed() const;
};

struct AdaptationReport {
  std::set<std::size_t> essential_conflicts;
  std::set<std::size_t> removed;
  RPoset new_poset;
  double product_seconds = 0;
  double assignment_seconds = 0;
  std::size_t product_expansions = 0;
};

class AdaptationError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Product of the current poset with a contingent one, where committed
/// subtasks are never merge targets, never relabelled, and precede every
/// subtask appended from p2.
ProductResult online_product(const RPoset& p1, const RPoset& p2, const std::set<std::size_t>& committed,
                             const SearchBudget& budget = {},
                             std::function<bool(const Subtask&)> admissible = nullptr);

/// Scheduled, non-committed subtasks whose timing breaks an order or
/// exclusion of `p_new`: the predecessor of a violated order (its successor
/// when the predecessor is committed), and the later starter of an
/// exclusion group that executes simultaneously.
std::set<std::size_t> essential_conflicts(const RPoset& p_new, const Plan& plan,
                                          const std::set<std::size_t>& committed);

/// `ec` plus every non-committed transitive ⪯-successor of its members.
std::set<std::size_t> conflict_closure(const std::set<std::size_t>& ec, const RPoset& p_new,
                                       const std::set<std::size_t>& committed);

struct AdaptOptions {
  SearchBudget budget;
  /// Product results tried (in score order) before giving up; 0 means all.
  std::size_t max_attempts = 0;
};

/// Online adaptation to a contingent formula. The returned state keeps every
/// finished and in-progress entry; throws AdaptationError when no product of
/// the contingent poset admits a plan (the input state stays valid).
std::pair<ExecutionState, AdaptationReport> adapt(const ExecutionState& state, const Formula& contingent,
                                                  const PropTable& table, const WorldModel& world,
                                                  const AdaptOptions& options = {});

/// True when every asserted prop of every subtask is a single behavior the
/// world can bind.
bool plannable(const RPoset& p, const PropTable& table, const WorldModel& world);

}  // namespace rposet
