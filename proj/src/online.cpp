#include "rposet/online.hpp"

#include <algorithm>
#include <chrono>

#include "rposet/automaton.hpp"

namespace rposet {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t) {
  return std::chrono::duration<double>(Clock::now() - t).count();
}

bool bindable(const Subtask& s, const PropTable& table, const WorldModel& world) {
  try {
    bind_subtask(s, table, world);
    return true;
  } catch (const std::invalid_argument&) {
    return false;
  }
}

// Whether the entry puts an entity of `type` into `region` (crew on its way
// or on site, or the object it handles).
bool entry_touches(const ScheduleEntry& e, const WorldModel& world, const std::string& type, RegionId region) {
  if (e.object && world.object(*e.object)->type == type && (e.from == region || e.to == region)) return true;
  for (const auto& c : e.crew) {
    if (world.agents()[c.agent].type != type) continue;
    if (e.from == region || e.to == region) return true;
    const auto& rs = c.leg.route.regions;
    if (std::find(rs.begin(), rs.end(), region) != rs.end()) return true;
  }
  return false;
}

// The part of a leg already travelled at `now`, ending at the next region reached.
Leg truncate_leg(const Leg& leg, Time now) {
  Leg out{leg.agent, leg.depart, {}};
  for (std::size_t i = 0; i < leg.route.regions.size(); ++i) {
    out.route.regions.push_back(leg.route.regions[i]);
    out.route.arrivals.push_back(leg.route.arrivals[i]);
    if (leg.depart + leg.route.arrivals[i] >= now) break;
  }
  return out;
}

}  // namespace

std::set<std::size_t> ExecutionState::committed() const {
  std::set<std::size_t> out = finished;
  out.insert(in_progress.begin(), in_progress.end());
  return out;
}

bool plannable(const RPoset& p, const PropTable& table, const WorldModel& world) {
  return std::all_of(p.subtasks.begin(), p.subtasks.end(),
                     [&](const Subtask& s) { return bindable(s, table, world); });
}

ProductResult online_product(const RPoset& p1, const RPoset& p2, const std::set<std::size_t>& committed,
                             const SearchBudget& budget, std::function<bool(const Subtask&)> admissible) {
  ProductOptions opts;
  opts.committed.assign(p1.size(), false);
  for (std::size_t c : committed) {
    if (c >= p1.size()) throw std::out_of_range("committed subtask outside the poset");
    opts.committed[c] = true;
  }
  opts.admissible = std::move(admissible);
  return poset_product(p1, p2, budget, opts);
}

std::set<std::size_t> essential_conflicts(const RPoset& p_new, const Plan& plan,
                                          const std::set<std::size_t>& committed) {
  std::set<std::size_t> out;
  auto free = [&](std::size_t i) { return !committed.count(i); };
  auto reach = order_closure(p_new.size(), p_new.orders);
  for (std::size_t i = 0; i < p_new.size(); ++i) {
    const ScheduleEntry* a = plan.entry_for(i);
    if (!a) continue;
    for (std::size_t j = 0; j < p_new.size(); ++j) {
      const ScheduleEntry* b = plan.entry_for(j);
      if (!b || i == j || !reach[i][j] || (!free(i) && !free(j))) continue;
      if (b->start < a->start || b->end < a->end) out.insert(free(i) ? i : j);
    }
  }
  for (const auto& g : p_new.excludes) {
    std::vector<const ScheduleEntry*> es;
    for (auto i : g) {
      if (const ScheduleEntry* e = plan.entry_for(i)) es.push_back(e);
    }
    if (es.size() != g.size()) continue;
    Time max_start = es.front()->start, min_end = es.front()->end;
    bool same_end = true;
    for (const auto* e : es) {
      max_start = std::max(max_start, e->start);
      min_end = std::min(min_end, e->end);
      same_end = same_end && e->end == es.front()->end;
    }
    if (max_start >= min_end && !same_end) continue;
    // The latest starter (highest id among ties) is the one to move.
    const ScheduleEntry* late = nullptr;
    for (const auto* e : es) {
      if (!free(e->subtask)) continue;
      if (!late || e->start > late->start || (e->start == late->start && e->subtask > late->subtask)) late = e;
    }
    if (late) out.insert(late->subtask);
  }
  return out;
}

std::set<std::size_t> conflict_closure(const std::set<std::size_t>& ec, const RPoset& p_new,
                                       const std::set<std::size_t>& committed) {
  std::set<std::size_t> out = ec;
  auto reach = order_closure(p_new.size(), p_new.orders);
  for (std::size_t i : ec) {
    for (std::size_t j = 0; j < p_new.size(); ++j) {
      if (reach[i][j] && !committed.count(j)) out.insert(j);
    }
  }
  return out;
}

namespace {

struct Repair {
  Plan plan;
  std::set<std::size_t> ec;
  std::set<std::size_t> removed;
};

Repair repair(const ExecutionState& state, const RPoset& p_new, const PropTable& table,
              const WorldModel& world) {
  const auto committed = state.committed();
  const Plan& old = state.plan;
  Repair r;
  r.ec = essential_conflicts(p_new, old, committed);

  const std::size_t n1 = state.poset.size();
  for (const auto& e : old.entries) {
    const std::size_t i = e.subtask;
    if (committed.count(i)) continue;
    if (i < n1 && !(p_new.subtasks[i] == state.poset.subtasks[i])) r.ec.insert(i);
  }
  // Entries that would cross a presence ban introduced by the product.
  for (std::size_t w = 0; w < p_new.size(); ++w) {
    for (PropId p : p_new.subtasks[w].avoid_before | p_new.subtasks[w].action.neg) {
      const PresenceBinding* b = table.presence(p);
      if (!b) continue;
      if (w < n1 && (state.poset.subtasks[w].avoid_before.contains(p) ||
                     state.poset.subtasks[w].action.neg.contains(p))) {
        continue;
      }
      auto region = world.region(b->region);
      if (!region) throw std::invalid_argument("unknown region '" + b->region + "'");
      for (const auto& e : old.entries) {
        if (!committed.count(e.subtask) && entry_touches(e, world, b->entity_type, *region)) r.ec.insert(e.subtask);
      }
    }
  }

  r.removed = conflict_closure(r.ec, p_new, committed);
  // Later entries of the same agents and objects lose their starting state.
  bool grew = true;
  while (grew) {
    grew = false;
    for (const auto& e : old.entries) {
      if (!r.removed.count(e.subtask)) continue;
      auto drop_later = [&](const std::vector<const ScheduleEntry*>& seq) {
        for (const ScheduleEntry* x : seq) {
          if (x->start > e.start && !committed.count(x->subtask) && r.removed.insert(x->subtask).second) {
            grew = true;
          }
        }
      };
      for (const auto& c : e.crew) drop_later(old.agent_sequence(c.agent));
      if (e.object) drop_later(old.object_sequence(*e.object));
    }
  }

  r.plan.moves = old.moves;
  for (const auto& e : old.entries) {
    if (!r.removed.count(e.subtask)) {
      r.plan.entries.push_back(e);
      continue;
    }
    for (const auto& c : e.crew) {
      if (c.leg.depart < state.now && c.leg.route.regions.size() > 1) {
        r.plan.moves.push_back(truncate_leg(c.leg, state.now));
      }
    }
  }
  return r;
}

}  // namespace

std::pair<ExecutionState, AdaptationReport> adapt(const ExecutionState& state, const Formula& contingent,
                                                  const PropTable& table, const WorldModel& world,
                                                  const AdaptOptions& options) {
  AdaptationReport report;
  const auto start = Clock::now();
  Nfa nfa = normalize(translate(contingent)).first;
  PosetExtraction ex = compute_posets(nfa, options.budget);
  report.product_expansions += ex.expansions;
  auto admissible = [&](const Subtask& s) { return bindable(s, table, world); };
  const auto committed = state.committed();

  std::vector<RPoset> products;
  for (const auto& cp : ex.posets) {
    if (!plannable(cp, table, world)) continue;
    ProductResult pr = online_product(state.poset, cp, committed, options.budget, admissible);
    report.product_expansions += pr.expansions;
    products.insert(products.end(), pr.posets.begin(), pr.posets.end());
    if (!products.empty()) break;
  }
  report.product_seconds = seconds_since(start);
  if (products.empty()) throw AdaptationError("no admissible product with the contingent formula");

  const auto assign_start = Clock::now();
  std::string last_error;
  std::size_t attempts = 0;
  for (const auto& p_new : products) {
    if (options.max_attempts && attempts++ >= options.max_attempts) break;
    Repair r = repair(state, p_new, table, world);
    try {
      AssignmentContext ctx{p_new, table, world, state.now};
      Plan plan = tbcn(ctx, std::move(r.plan));
      ExecutionState next = state;
      next.poset = p_new;
      next.plan = std::move(plan);
      report.essential_conflicts = std::move(r.ec);
      report.removed = std::move(r.removed);
      report.new_poset = p_new;
      report.assignment_seconds = seconds_since(assign_start);
      return {std::move(next), std::move(report)};
    } catch (const PlanningError& e) {
      last_error = e.what();
    }
  }
  throw AdaptationError("no product admits a plan: " + last_error);
}

}  // namespace rposet
