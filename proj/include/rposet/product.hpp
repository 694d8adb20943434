#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "rposet/poset.hpp"

namespace rposet {

/// Partial injective map from second-operand subtask ids to product ids.
struct SubtaskMapping {
  std::vector<std::optional<std::size_t>> target;

  explicit SubtaskMapping(std::size_t domain_size = 0) : target(domain_size) {}
  std::vector<std::size_t> domain() const;
  std::vector<std::size_t> range() const;
  bool total() const;
  /// Inverse lookup: the second-operand id mapped onto `product_id`.
  std::optional<std::size_t> inverse(std::size_t product_id) const;
};

/// Labels of `target` are all contained in those of `candidate`.
bool subtask_entails(const Subtask& candidate, const Subtask& target);

/// Label union; nullopt when the merged action asserts and denies one prop.
std::optional<Subtask> merge_subtasks(const Subtask& a, const Subtask& b);

struct ProductOptions {
  /// First-operand subtasks that are already committed: never merge targets,
  /// never relabelled, and implicitly before every appended subtask.
  std::vector<bool> committed;
  /// Extra per-subtask admissibility test applied to merged labels.
  std::function<bool(const Subtask&)> admissible;
  /// Keep the cyclic candidates that closure prunes (for completeness audits).
  bool keep_pruned = false;
};

struct ClosureOutcome {
  enum class Status { Ok, Cycle, CommittedConflict };
  Status status = Status::Ok;
  /// The closed poset; for Cycle, the candidate with its raw (cyclic) orders.
  RPoset poset;
};

/// Relation calculation for a total mapping: inherits both orders, lets
/// predecessors absorb the avoid sets of their successors, adds label-forced
/// orders to a fixpoint, and unions the exclusion groups. Subtasks
/// [0, |p1|) are first-operand subtasks in the product.
ClosureOutcome relation_closure(const std::vector<Subtask>& subtasks, const SubtaskMapping& mapping,
                                const RPoset& p1, const RPoset& p2,
                                const ProductOptions& options = {});

/// Lazily enumerates product leaves in depth-first order: second-operand
/// subtasks in ascending id, merge branches (ascending target) before append.
class ProductEnumerator {
public:
  ProductEnumerator(const RPoset& p1, const RPoset& p2, ProductOptions options = {});
  ~ProductEnumerator();
  ProductEnumerator(ProductEnumerator&&) noexcept;
  ProductEnumerator& operator=(ProductEnumerator&&) noexcept;

  /// Next closed product, or nullopt when the search space is exhausted or
  /// the meter runs out.
  std::optional<RPoset> next(BudgetMeter& meter);
  bool finished() const;
  /// Candidates pruned because closure forced a cycle (if kept).
  const std::vector<RPoset>& pruned() const;

private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

enum class ProductStatus { Complete, Partial, Empty, BudgetExhausted };

struct ProductResult {
  std::vector<RPoset> posets;
  ProductStatus status = ProductStatus::Complete;
  std::size_t expansions = 0;
  std::vector<RPoset> pruned;
};

/// All products of two posets, deduplicated and sorted by score.
ProductResult poset_product(const RPoset& p1, const RPoset& p2, const SearchBudget& budget = {},
                            const ProductOptions& options = {});

struct ChainOptions {
  /// Products collected and ranked per fold step before descending.
  std::size_t per_step_results = 16;
  /// Stop after this many complete folds (0: until the search or budget ends).
  std::size_t max_results = 0;
  std::function<bool(const Subtask&)> admissible;
};

struct ChainResult {
  std::optional<RPoset> first;
  std::vector<RPoset> stream;
  ProductStatus status = ProductStatus::Complete;
  std::size_t expansions = 0;
  std::size_t first_expansions = 0;
  /// Index of the poset set whose product first came out empty.
  std::optional<std::size_t> infeasible_step;
};

/// Left fold of products over several poset sets: best-first depth-first
/// search whose first leaf is the greedy fold; further folds are streamed
/// until the search space or the budget is exhausted.
ChainResult product_chain(const std::vector<std::vector<RPoset>>& poset_sets,
                          const SearchBudget& budget = {}, const ChainOptions& options = {});

}  // namespace rposet
