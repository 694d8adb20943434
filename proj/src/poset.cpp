#include "rposet/poset.hpp"

#include <algorithm>
#include <functional>
#include <set>
#include <sstream>
#include <stdexcept>

#include "rposet/inclusion.hpp"

namespace rposet {

PosetScore score(const RPoset& p) { return {p.subtasks.size(), p.orders.size()}; }

std::vector<std::vector<bool>> order_closure(std::size_t n, const std::vector<OrderPair>& orders) {
  std::vector<std::vector<bool>> reach(n, std::vector<bool>(n, false));
  for (auto [h, l] : orders) reach.at(h).at(l) = true;
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      if (!reach[i][k]) continue;
      for (std::size_t j = 0; j < n; ++j) {
        if (reach[k][j]) reach[i][j] = true;
      }
    }
  }
  return reach;
}

bool is_acyclic(std::size_t n, const std::vector<OrderPair>& orders) {
  auto reach = order_closure(n, orders);
  for (std::size_t i = 0; i < n; ++i) {
    if (reach[i][i]) return false;
  }
  return true;
}

std::vector<std::uint64_t> predecessor_masks(const RPoset& p) {
  const std::size_t n = p.size();
  if (n > 64) throw std::length_error("poset exceeds 64 subtasks");
  auto reach = order_closure(n, p.orders);
  std::vector<std::uint64_t> out(n, 0);
  for (std::size_t h = 0; h < n; ++h) {
    for (std::size_t l = 0; l < n; ++l) {
      if (h != l && reach[h][l]) out[l] |= std::uint64_t(1) << h;
    }
  }
  return out;
}

bool precedes(const RPoset& p, std::size_t h, std::size_t l) {
  return order_closure(p.size(), p.orders)[h][l];
}

void canonicalize(RPoset& p) {
  const std::size_t n = p.size();
  auto reach = order_closure(n, p.orders);
  std::vector<OrderPair> reduced;
  for (std::size_t h = 0; h < n; ++h) {
    for (std::size_t l = 0; l < n; ++l) {
      if (h == l || !reach[h][l]) continue;
      bool covered = false;
      for (std::size_t k = 0; k < n && !covered; ++k) {
        covered = k != h && k != l && reach[h][k] && reach[k][l];
      }
      if (!covered) reduced.emplace_back(h, l);
    }
  }
  p.orders = std::move(reduced);

  std::vector<std::vector<std::size_t>> groups;
  for (auto g : p.excludes) {
    std::sort(g.begin(), g.end());
    g.erase(std::unique(g.begin(), g.end()), g.end());
    if (g.size() >= 2) groups.push_back(std::move(g));
  }
  std::sort(groups.begin(), groups.end(), [](const auto& a, const auto& b) {
    return a.size() != b.size() ? a.size() < b.size() : a < b;
  });
  groups.erase(std::unique(groups.begin(), groups.end()), groups.end());
  // A group containing another group adds no constraint.
  std::vector<std::vector<std::size_t>> kept;
  for (const auto& g : groups) {
    bool redundant = std::any_of(kept.begin(), kept.end(), [&](const auto& k) {
      return std::includes(g.begin(), g.end(), k.begin(), k.end());
    });
    if (!redundant) kept.push_back(g);
  }
  std::sort(kept.begin(), kept.end());
  p.excludes = std::move(kept);
}

PropSet props_of(const RPoset& p) {
  PropSet out;
  for (const auto& s : p.subtasks) out |= s.props();
  return out;
}

PosetStepper::PosetStepper(const RPoset& p)
    : subtasks_(p.subtasks), preds_(predecessor_masks(p)) {
  if (p.size() >= 64) throw std::length_error("poset exceeds 63 subtasks");
  full_ = (std::uint64_t(1) << p.size()) - 1;
  for (const auto& g : p.excludes) {
    std::uint64_t m = 0;
    for (auto i : g) m |= std::uint64_t(1) << i;
    groups_.push_back(m);
  }
}

void PosetStepper::step(State placed, const PropSet& symbol, std::vector<State>& out) const {
  std::uint64_t candidates = 0, forced = 0;
  for (std::size_t i = 0; i < subtasks_.size(); ++i) {
    const std::uint64_t bit = std::uint64_t(1) << i;
    if (placed & bit) continue;
    if (subtasks_[i].action.satisfied_by(symbol)) candidates |= bit;
    if (subtasks_[i].avoid_before.intersects(symbol)) forced |= bit;
  }
  // Anything still unplaced after this position must avoid the symbol.
  if ((forced & ~candidates) != 0) return;
  const std::uint64_t optional = candidates & ~forced;
  std::uint64_t sub = optional;
  while (true) {
    const std::uint64_t x = forced | sub;
    const std::uint64_t after = placed | x;
    bool ok = true;
    for (std::uint64_t rest = x; rest && ok; rest &= rest - 1) {
      const int i = __builtin_ctzll(rest);
      ok = (preds_[i] & ~after) == 0;
    }
    for (std::size_t g = 0; g < groups_.size() && ok; ++g) ok = (groups_[g] & ~x) != 0;
    if (ok) out.push_back(after);
    if (sub == 0) break;
    sub = (sub - 1) & optional;
  }
}

bool word_satisfies(const Word& w, const RPoset& p) {
  PosetStepper stepper(p);
  std::vector<std::uint64_t> cur{0}, next;
  for (const auto& symbol : w) {
    next.clear();
    for (auto s : cur) stepper.step(s, symbol, next);
    std::sort(next.begin(), next.end());
    next.erase(std::unique(next.begin(), next.end()), next.end());
    cur.swap(next);
    if (cur.empty()) return false;
  }
  return std::any_of(cur.begin(), cur.end(), [&](auto s) { return stepper.accepting(s); });
}

bool language_included(const RPoset& a, const RPoset& b) {
  auto symbols = all_symbols(props_of(a) | props_of(b));
  return check_inclusion(PosetStepper(a), PosetStepper(b), symbols).included;
}

BudgetMeter::BudgetMeter(const SearchBudget& budget)
    : budget_(budget), start_(std::chrono::steady_clock::now()) {}

bool BudgetMeter::charge(std::size_t n) {
  if (exhausted_) return false;
  used_ += n;
  if (used_ > budget_.max_expansions) exhausted_ = true;
  if (budget_.max_seconds) {
    const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start_;
    if (elapsed.count() > *budget_.max_seconds) exhausted_ = true;
  }
  return !exhausted_;
}

void saturate(RPoset& p) {
  const std::size_t n = p.size();
  bool changed = true;
  while (changed) {
    changed = false;
    auto reach = order_closure(n, p.orders);
    for (std::size_t i = 0; i < n && !changed; ++i) {
      for (std::size_t j = 0; j < n && !changed; ++j) {
        if (i == j || reach[i][j] || reach[j][i]) continue;
        // j asserting a prop that i must avoid can never come before i.
        if (p.subtasks[j].action.pos.intersects(p.subtasks[i].avoid_before)) {
          p.orders.emplace_back(i, j);
          changed = true;
        }
      }
    }
    if (changed) continue;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (i == j || !reach[i][j]) continue;
        PropSet merged = p.subtasks[i].avoid_before | p.subtasks[j].avoid_before;
        if (merged != p.subtasks[i].avoid_before) {
          p.subtasks[i].avoid_before = std::move(merged);
          changed = true;
        }
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const Term& a = p.subtasks[i].action;
      const Term& b = p.subtasks[j].action;
      if (a.pos.intersects(b.neg) || b.pos.intersects(a.neg)) p.excludes.push_back({i, j});
    }
  }
  canonicalize(p);
}

void sort_by_score(std::vector<RPoset>& posets) {
  std::stable_sort(posets.begin(), posets.end(),
                   [](const RPoset& a, const RPoset& b) { return score(a) < score(b); });
}

namespace {

struct PathStep {
  Term action;
  PropSet avoid;
};

class Extractor {
public:
  Extractor(const Nfa& nfa, const SearchBudget& budget)
      : nfa_(nfa), meter_(budget), symbols_(all_symbols(nfa.alphabet())) {}

  PosetExtraction run() {
    HarmonyReport harmony = check_self_loop_harmonious(nfa_);
    if (!harmony.holds) {
      out_.complete = false;
      for (const auto& w : harmony.witnesses) {
        note("harmony violation on edge q" + std::to_string(w.from) + " -> q" +
             std::to_string(w.to) + ": " + w.reason);
      }
    }
    prepare_avoid_options();
    on_path_.assign(nfa_.state_count(), false);
    for (StateId s : nfa_.initial()) {
      if (meter_.exhausted()) break;
      dfs(s);
    }
    finish();
    return std::move(out_);
  }

private:
  void note(std::string msg) {
    if (std::find(out_.diagnostics.begin(), out_.diagnostics.end(), msg) == out_.diagnostics.end()) {
      out_.diagnostics.push_back(std::move(msg));
    }
  }

  void prepare_avoid_options() {
    avoid_options_.resize(nfa_.state_count());
    weakened_.assign(nfa_.state_count(), false);
    for (StateId s = 0; s < nfa_.state_count(); ++s) {
      const Guard* loop = nfa_.self_loop(s);
      if (!loop) continue;
      for (const auto& t : loop->terms()) {
        if (t.pos.empty()) {
          avoid_options_[s].push_back(t.neg);
        }
      }
      weakened_[s] = loop->terms().size() != avoid_options_[s].size() || loop->terms().size() > 1;
    }
  }

  void dfs(StateId s) {
    if (nfa_.accepting(s)) {
      handle_path();
      return;
    }
    const auto& options = avoid_options_[s];
    if (options.empty()) {
      out_.complete = false;
      note("paths through q" + std::to_string(s) +
           " skipped: no self-loop term free of positive literals");
      return;
    }
    if (weakened_[s]) {
      out_.complete = false;
      note("self-loop of q" + std::to_string(s) + " is not a single negative term; coverage partial");
    }
    on_path_[s] = true;
    for (std::size_t idx : nfa_.out(s)) {
      const Edge& e = nfa_.edges()[idx];
      if (e.dst == s) continue;
      if (on_path_[e.dst]) {
        out_.complete = false;
        note("cycle through q" + std::to_string(e.dst) + " not unrolled");
        continue;
      }
      for (const auto& term : e.guard.terms()) {
        for (const auto& avoid : options) {
          if (!meter_.charge()) {
            out_.budget_exhausted = true;
            out_.complete = false;
            on_path_[s] = false;
            return;
          }
          path_.push_back({term, avoid});
          dfs(e.dst);
          path_.pop_back();
          if (meter_.exhausted()) {
            on_path_[s] = false;
            return;
          }
        }
      }
    }
    on_path_[s] = false;
  }

  bool inside(const RPoset& p) {
    meter_.charge();
    return check_inclusion(PosetStepper(p), NfaStepper{&nfa_}, symbols_).included;
  }

  void handle_path() {
    RPoset chain;
    for (std::size_t i = 0; i < path_.size(); ++i) {
      chain.subtasks.push_back({path_[i].action, path_[i].avoid});
      if (i > 0) {
        chain.orders.emplace_back(i - 1, i);
        chain.excludes.push_back({i - 1, i});
      }
    }
    Word canonical;
    for (const auto& st : chain.subtasks) canonical.push_back(st.action.pos);
    const bool witness = word_satisfies(canonical, chain);
    for (const auto& done : found_) {
      if (done.size() > chain.size() || (witness && !word_satisfies(canonical, done))) continue;
      if (language_included(chain, done)) return;
    }
    RPoset relaxed = relax(std::move(chain));
    saturate(relaxed);
    found_.push_back(std::move(relaxed));
  }

  // A linear extension of `p` that places `early` as soon as possible and
  // puts `together` at one position when both are free at once.
  static Word linearization(const RPoset& p, std::optional<std::size_t> early,
                            std::optional<std::pair<std::size_t, std::size_t>> together) {
    const auto preds = predecessor_masks(p);
    std::uint64_t placed = 0;
    Word w;
    auto free = [&](std::size_t i) { return !(placed >> i & 1) && (preds[i] & ~placed) == 0; };
    while (placed != (p.size() == 64 ? ~0ULL : (1ULL << p.size()) - 1)) {
      std::size_t pick = p.size();
      if (early && free(*early)) pick = *early;
      for (std::size_t i = 0; i < p.size() && pick == p.size(); ++i) {
        if (free(i)) pick = i;
      }
      if (pick == p.size()) return {};
      PropSet symbol = p.subtasks[pick].action.pos;
      placed |= 1ULL << pick;
      if (together) {
        auto [a, b] = *together;
        std::size_t other = pick == a ? b : pick == b ? a : p.size();
        if (other < p.size() && free(other)) {
          symbol |= p.subtasks[other].action.pos;
          placed |= 1ULL << other;
        }
      }
      w.push_back(std::move(symbol));
    }
    return w;
  }

  // Cheap rejection: a witness word of `trial` the automaton refuses.
  bool refuted(const RPoset& trial, const Word& w) {
    return !w.empty() && word_satisfies(w, trial) && !accepts(nfa_, w);
  }

  RPoset relax(RPoset p) {
    bool changed = true;
    while (changed) {
      changed = false;
      for (std::size_t g = 0; g < p.excludes.size(); ++g) {
        RPoset trial = p;
        trial.excludes.erase(trial.excludes.begin() + static_cast<std::ptrdiff_t>(g));
        const auto& grp = p.excludes[g];
        if (grp.size() == 2 && refuted(trial, linearization(trial, grp[0], std::pair{grp[0], grp[1]}))) continue;
        if (inside(trial)) {
          p = std::move(trial);
          changed = true;
          --g;
        }
      }
      for (std::size_t k = 0; k < p.orders.size(); ++k) {
        RPoset trial = p;
        const auto [h, l] = p.orders[k];
        trial.orders.erase(trial.orders.begin() + static_cast<std::ptrdiff_t>(k));
        canonicalize(trial);
        if (refuted(trial, linearization(trial, l, std::nullopt)) ||
            refuted(trial, linearization(trial, l, std::pair{h, l}))) {
          continue;
        }
        if (inside(trial)) {
          p = std::move(trial);
          changed = true;
          k = static_cast<std::size_t>(-1);
        }
      }
    }
    canonicalize(p);
    return p;
  }

  void finish() {
    std::vector<bool> dropped(found_.size(), false);
    std::vector<Word> sample;
    std::vector<bool> usable;
    for (const auto& p : found_) {
      sample.push_back(linearization(p, std::nullopt, std::nullopt));
      usable.push_back(word_satisfies(sample.back(), p));
    }
    auto included = [&](std::size_t a, std::size_t b) {
      if (usable[a] && !word_satisfies(sample[a], found_[b])) return false;
      return language_included(found_[a], found_[b]);
    };
    for (std::size_t i = 0; i < found_.size(); ++i) {
      for (std::size_t j = 0; j < found_.size() && !dropped[i]; ++j) {
        if (i == j || dropped[j]) continue;
        // A subsumed poset survives when it scores better than its cover.
        const auto si = score(found_[i]), sj = score(found_[j]);
        if (si < sj || !included(i, j)) continue;
        dropped[i] = sj < si || j < i || !included(j, i);
      }
    }
    for (std::size_t i = 0; i < found_.size(); ++i) {
      if (!dropped[i]) out_.posets.push_back(std::move(found_[i]));
    }
    sort_by_score(out_.posets);
    out_.expansions = meter_.used();
    out_.budget_exhausted = out_.budget_exhausted || meter_.exhausted();
  }

  const Nfa& nfa_;
  BudgetMeter meter_;
  std::vector<PropSet> symbols_;
  std::vector<std::vector<PropSet>> avoid_options_;
  std::vector<bool> weakened_;
  std::vector<bool> on_path_;
  std::vector<PathStep> path_;
  std::vector<RPoset> found_;
  PosetExtraction out_;
};

}  // namespace

PosetExtraction compute_posets(const Nfa& nfa, const SearchBudget& budget) {
  return Extractor(nfa, budget).run();
}

std::string to_dot(const RPoset& p, const PropTable& table) {
  std::ostringstream os;
  os << "digraph rposet {\n";
  if (!p.subtasks.empty()) os << "  node [shape=box];\n";
  for (std::size_t i = 0; i < p.size(); ++i) {
    const Subtask& s = p.subtasks[i];
    os << "  w" << i << " [label=\"w" << i << "\\naction: " << guard_to_string(Guard({s.action}), table)
       << "\\navoid: " << table.format(s.avoid_before) << "\"];\n";
  }
  for (auto [h, l] : p.orders) os << "  w" << h << " -> w" << l << ";\n";
  for (std::size_t g = 0; g < p.excludes.size(); ++g) {
    const auto& group = p.excludes[g];
    if (group.size() == 2) {
      os << "  w" << group[0] << " -> w" << group[1]
         << " [dir=none, color=red, style=dashed];\n";
      continue;
    }
    os << "  x" << g << " [shape=point, color=red];\n";
    for (auto i : group) os << "  x" << g << " -> w" << i << " [dir=none, color=red, style=dashed];\n";
  }
  os << "}\n";
  return os.str();
}

std::string serialize(const RPoset& p, const PropTable& table) {
  std::ostringstream os;
  os << "subtasks " << p.size() << "\n";
  for (std::size_t i = 0; i < p.size(); ++i) {
    const Subtask& s = p.subtasks[i];
    os << "subtask " << i << " pos=" << table.format(s.action.pos)
       << " neg=" << table.format(s.action.neg) << " avoid=" << table.format(s.avoid_before) << "\n";
  }
  for (auto [h, l] : p.orders) os << "order " << h << " " << l << "\n";
  for (const auto& g : p.excludes) {
    os << "exclude";
    for (auto i : g) os << " " << i;
    os << "\n";
  }
  return os.str();
}

}  // namespace rposet
