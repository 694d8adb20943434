#include "rposet/product.hpp"

#include <algorithm>
#include <set>
#include <string>

namespace rposet {

std::vector<std::size_t> SubtaskMapping::domain() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < target.size(); ++i) {
    if (target[i]) out.push_back(i);
  }
  return out;
}

std::vector<std::size_t> SubtaskMapping::range() const {
  std::vector<std::size_t> out;
  for (const auto& t : target) {
    if (t) out.push_back(*t);
  }
  std::sort(out.begin(), out.end());
  return out;
}

bool SubtaskMapping::total() const {
  return std::all_of(target.begin(), target.end(), [](const auto& t) { return t.has_value(); });
}

std::optional<std::size_t> SubtaskMapping::inverse(std::size_t product_id) const {
  for (std::size_t i = 0; i < target.size(); ++i) {
    if (target[i] == product_id) return i;
  }
  return std::nullopt;
}

bool subtask_entails(const Subtask& candidate, const Subtask& target) {
  return candidate.action.implies(target.action) &&
         target.avoid_before.subset_of(candidate.avoid_before);
}

std::optional<Subtask> merge_subtasks(const Subtask& a, const Subtask& b) {
  Subtask m{a.action & b.action, a.avoid_before | b.avoid_before};
  if (!m.action.consistent()) return std::nullopt;
  return m;
}

namespace {

std::string poset_key(const RPoset& p) {
  std::string key;
  for (const auto& s : p.subtasks) {
    for (auto x : s.action.pos) key += std::to_string(x) + ",";
    key += "|";
    for (auto x : s.action.neg) key += std::to_string(x) + ",";
    key += "|";
    for (auto x : s.avoid_before) key += std::to_string(x) + ",";
    key += ";";
  }
  key += "#";
  for (auto [h, l] : p.orders) key += std::to_string(h) + "<" + std::to_string(l) + ",";
  key += "#";
  for (const auto& g : p.excludes) {
    for (auto i : g) key += std::to_string(i) + ".";
    key += ",";
  }
  return key;
}

}  // namespace

ClosureOutcome relation_closure(const std::vector<Subtask>& subtasks, const SubtaskMapping& mapping,
                                const RPoset& p1, const RPoset& p2,
                                const ProductOptions& options) {
  const std::size_t n = subtasks.size();
  const std::size_t n1 = p1.size();
  ClosureOutcome out;
  RPoset& p = out.poset;
  p.subtasks = subtasks;
  p.orders = p1.orders;
  for (auto [h, l] : p2.orders) p.orders.emplace_back(*mapping.target.at(h), *mapping.target.at(l));

  auto committed = [&](std::size_t i) {
    return i < n1 && i < options.committed.size() && options.committed[i];
  };
  // Committed work is done, so it precedes everything appended from p2.
  std::vector<OrderPair> implicit;
  for (std::size_t c = 0; c < n1; ++c) {
    if (!committed(c)) continue;
    for (std::size_t x = n1; x < n; ++x) implicit.emplace_back(c, x);
  }
  auto closure = [&] {
    std::vector<OrderPair> all = p.orders;
    all.insert(all.end(), implicit.begin(), implicit.end());
    return order_closure(n, all);
  };

  auto reach = closure();
  for (std::size_t i = 0; i < n; ++i) {
    if (reach[i][i]) {
      out.status = ClosureOutcome::Status::Cycle;
      return out;
    }
  }

  bool changed = true;
  while (changed) {
    changed = false;
    // A predecessor must also avoid whatever its successors avoid.
    for (std::size_t i = 0; i < n; ++i) {
      if (committed(i)) continue;
      for (std::size_t j = 0; j < n; ++j) {
        if (i == j || !reach[i][j]) continue;
        PropSet merged = p.subtasks[i].avoid_before | p.subtasks[j].avoid_before;
        if (merged != p.subtasks[i].avoid_before) {
          p.subtasks[i].avoid_before = std::move(merged);
          changed = true;
        }
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (i == j) continue;
        // j asserts a prop i avoids before itself, so i cannot come after j.
        if (!p.subtasks[j].action.pos.intersects(p.subtasks[i].avoid_before)) continue;
        if (reach[i][j]) continue;
        if (reach[j][i]) {
          if (committed(j) && !committed(i) && i >= n1) {
            out.status = ClosureOutcome::Status::CommittedConflict;
            return out;
          }
          continue;
        }
        p.orders.emplace_back(i, j);
        if (p.subtasks[i].action.pos.intersects(p.subtasks[j].avoid_before)) {
          p.orders.emplace_back(j, i);
          out.status = ClosureOutcome::Status::Cycle;
          return out;
        }
        reach = closure();
        changed = true;
      }
    }
  }

  p.excludes = p1.excludes;
  for (const auto& g : p2.excludes) {
    std::vector<std::size_t> mapped;
    for (auto i : g) mapped.push_back(*mapping.target.at(i));
    p.excludes.push_back(std::move(mapped));
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const Term& a = p.subtasks[i].action;
      const Term& b = p.subtasks[j].action;
      if (a.pos.intersects(b.neg) || b.pos.intersects(a.neg)) p.excludes.push_back({i, j});
    }
  }
  canonicalize(p);
  return out;
}

struct ProductEnumerator::Impl {
  struct Frame {
    std::vector<Subtask> subtasks;
    SubtaskMapping mapping;
    std::vector<bool> used;
    std::size_t j = 0;
    std::size_t branch = 0;
  };

  RPoset p1;
  RPoset p2;
  ProductOptions options;
  std::vector<Frame> stack;
  std::vector<RPoset> pruned;

  bool is_committed(std::size_t i) const {
    return i < options.committed.size() && options.committed[i];
  }

  std::optional<RPoset> next(BudgetMeter& meter) {
    const std::size_t n1 = p1.size(), n2 = p2.size();
    while (!stack.empty()) {
      Frame& f = stack.back();
      if (f.j == n2) {
        Frame leaf = std::move(f);
        stack.pop_back();
        if (!meter.charge()) return std::nullopt;
        ClosureOutcome c = relation_closure(leaf.subtasks, leaf.mapping, p1, p2, options);
        if (c.status == ClosureOutcome::Status::Ok) return std::move(c.poset);
        if (c.status == ClosureOutcome::Status::Cycle && options.keep_pruned) {
          pruned.push_back(std::move(c.poset));
        }
        continue;
      }
      if (f.branch > n1) {
        stack.pop_back();
        continue;
      }
      const std::size_t b = f.branch++;
      if (!meter.charge()) return std::nullopt;
      const Subtask& incoming = p2.subtasks[f.j];
      if (b < n1) {
        if (f.used[b] || is_committed(b)) continue;
        auto merged = merge_subtasks(f.subtasks[b], incoming);
        if (!merged) continue;
        if (options.admissible && !options.admissible(*merged)) continue;
        Frame child{f.subtasks, f.mapping, f.used, f.j + 1, 0};
        child.subtasks[b] = std::move(*merged);
        child.mapping.target[f.j] = b;
        child.used[b] = true;
        stack.push_back(std::move(child));
      } else {
        Frame child{f.subtasks, f.mapping, f.used, f.j + 1, 0};
        child.mapping.target[f.j] = child.subtasks.size();
        child.subtasks.push_back(incoming);
        stack.push_back(std::move(child));
      }
    }
    return std::nullopt;
  }
};

ProductEnumerator::ProductEnumerator(const RPoset& p1, const RPoset& p2, ProductOptions options)
    : impl_(std::make_unique<Impl>()) {
  impl_->p1 = p1;
  impl_->p2 = p2;
  impl_->options = std::move(options);
  impl_->stack.push_back({p1.subtasks, SubtaskMapping(p2.size()), std::vector<bool>(p1.size(), false), 0, 0});
}

ProductEnumerator::~ProductEnumerator() = default;
ProductEnumerator::ProductEnumerator(ProductEnumerator&&) noexcept = default;
ProductEnumerator& ProductEnumerator::operator=(ProductEnumerator&&) noexcept = default;

std::optional<RPoset> ProductEnumerator::next(BudgetMeter& meter) { return impl_->next(meter); }
bool ProductEnumerator::finished() const { return impl_->stack.empty(); }
const std::vector<RPoset>& ProductEnumerator::pruned() const { return impl_->pruned; }

ProductResult poset_product(const RPoset& p1, const RPoset& p2, const SearchBudget& budget,
                            const ProductOptions& options) {
  BudgetMeter meter(budget);
  ProductEnumerator en(p1, p2, options);
  ProductResult out;
  std::set<std::string> seen;
  while (auto p = en.next(meter)) {
    if (seen.insert(poset_key(*p)).second) out.posets.push_back(std::move(*p));
  }
  sort_by_score(out.posets);
  out.pruned = en.pruned();
  out.expansions = meter.used();
  const bool cut = !en.finished();
  if (out.posets.empty()) {
    out.status = cut ? ProductStatus::BudgetExhausted : ProductStatus::Empty;
  } else {
    out.status = cut ? ProductStatus::Partial : ProductStatus::Complete;
  }
  return out;
}

namespace {

class ChainSearch {
public:
  ChainSearch(const std::vector<std::vector<RPoset>>& sets, const SearchBudget& budget,
              const ChainOptions& options)
      : sets_(sets), meter_(budget), options_(options) {}

  ChainResult run() {
    if (sets_.empty()) {
      emit(RPoset{});
    } else {
      for (const auto& p : sets_[0]) {
        if (stop()) break;
        fold(1, p);
      }
    }
    result_.expansions = meter_.used();
    if (result_.first) {
      result_.status = cut_ ? ProductStatus::Partial : ProductStatus::Complete;
    } else {
      result_.status = cut_ ? ProductStatus::BudgetExhausted : ProductStatus::Empty;
    }
    return std::move(result_);
  }

private:
  bool stop() const {
    return cut_ || (options_.max_results && result_.stream.size() >= options_.max_results);
  }

  void emit(RPoset p) {
    if (!seen_.insert(poset_key(p)).second) return;
    if (!result_.first) {
      result_.first = p;
      result_.first_expansions = meter_.used();
    }
    result_.stream.push_back(std::move(p));
  }

  void fold(std::size_t k, const RPoset& current) {
    if (k == sets_.size()) {
      emit(current);
      return;
    }
    bool any = false;
    for (const auto& q : sets_[k]) {
      if (stop()) return;
      ProductOptions po;
      po.admissible = options_.admissible;
      ProductEnumerator en(current, q, po);
      std::vector<RPoset> products;
      std::set<std::string> local;
      while (!options_.per_step_results || products.size() < options_.per_step_results) {
        auto p = en.next(meter_);
        if (!p) break;
        if (local.insert(poset_key(*p)).second) products.push_back(std::move(*p));
      }
      if (meter_.exhausted()) cut_ = true;
      sort_by_score(products);
      any = any || !products.empty();
      for (const auto& r : products) {
        if (stop()) return;
        fold(k + 1, r);
      }
    }
    if (!any && !cut_ && !result_.infeasible_step) result_.infeasible_step = k;
  }

  const std::vector<std::vector<RPoset>>& sets_;
  BudgetMeter meter_;
  ChainOptions options_;
  ChainResult result_;
  std::set<std::string> seen_;
  bool cut_ = false;
};

}  // namespace

ChainResult product_chain(const std::vector<std::vector<RPoset>>& poset_sets,
                          const SearchBudget& budget, const ChainOptions& options) {
  return ChainSearch(poset_sets, budget, options).run();
}

}  // namespace rposet
