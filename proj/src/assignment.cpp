#include "rposet/assignment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

namespace rposet {

namespace {

constexpr Time kEps = 1e-9;
// Offset used to separate completions that would otherwise coincide.
constexpr Time kTick = 1e-3;

RegionId region_of(const WorldModel& world, const std::string& name) {
  auto r = world.region(name);
  if (!r) throw std::invalid_argument("unknown region '" + name + "'");
  return *r;
}

struct AgentState {
  RegionId region;
  Time free;
};

AgentState agent_state(const Plan& plan, const WorldModel& world, std::size_t agent) {
  AgentState s{world.agents().at(agent).start, 0};
  for (const auto& e : plan.entries) {
    for (const auto& c : e.crew) {
      if (c.agent == agent && e.end >= s.free) s = {e.to, e.end};
    }
  }
  for (const auto& m : plan.moves) {
    if (m.agent == agent && m.arrival() >= s.free) s = {m.route.regions.back(), m.arrival()};
  }
  return s;
}

struct ObjectState {
  RegionId region;
  Time free;
};

ObjectState object_state(const Plan& plan, const ObjectSpec& o) {
  ObjectState s{o.region, o.appear};
  for (const auto& e : plan.entries) {
    if (e.object == o.id && e.end >= s.free) s = {e.to, e.end};
  }
  return s;
}

bool overlaps_closed(const Stay& s, Time from, Time until) {
  return s.from <= until && from < s.until;
}

bool overlaps_open(const Stay& s, Time from, Time until) {
  return std::max(s.from, from) < std::min(s.until, until);
}

// Occupancy of `region` by entities of `type` under the plan.
std::vector<Stay> occupancy(const Plan& plan, const WorldModel& world, const std::string& type,
                            RegionId region) {
  std::vector<Stay> out;
  for (std::size_t a = 0; a < world.agents().size(); ++a) {
    if (world.agents()[a].type != type) continue;
    for (const auto& s : agent_stays(plan, world, a)) {
      if (s.region == region) out.push_back(s);
    }
  }
  for (const auto& o : world.objects()) {
    if (o.type != type) continue;
    for (const auto& s : object_stays(plan, world, o.id)) {
      if (s.region == region) out.push_back(s);
    }
  }
  return out;
}

struct NegatedPresence {
  std::string type;
  RegionId region;
};

std::vector<NegatedPresence> negated_presence(const Subtask& s, const PropTable& table,
                                              const WorldModel& world) {
  std::vector<NegatedPresence> out;
  for (PropId p : s.action.neg) {
    if (const auto* b = table.presence(p)) out.push_back({b->entity_type, region_of(world, b->region)});
  }
  return out;
}

std::vector<std::size_t> predecessors(const RPoset& p, std::size_t w) {
  std::vector<std::size_t> out;
  for (auto [h, l] : p.orders) {
    if (l == w) out.push_back(h);
  }
  return out;
}

void merge_stay(std::vector<Stay>& out, RegionId r, Time from, Time until) {
  if (until < from) until = from;
  if (!out.empty() && out.back().region == r) {
    out.back().until = until;
    return;
  }
  if (!out.empty()) out.back().until = from;
  out.push_back({r, from, until});
}

}  // namespace

std::optional<BoundBehavior> bind_subtask(const Subtask& s, const PropTable& table,
                                          const WorldModel& world) {
  std::optional<BoundBehavior> out;
  for (PropId p : s.action.pos) {
    const BehaviorBinding* b = table.behavior(p);
    if (!b) {
      throw std::invalid_argument("subtask asserts '" + table.name(p) +
                                  "', which is not a behavior proposition");
    }
    if (out) {
      throw std::invalid_argument("subtask asserts several behaviors: " + table.format(s.action.pos));
    }
    BoundBehavior bound;
    bound.spec = world.behavior(b->behavior);
    if (!bound.spec) throw std::invalid_argument("unknown behavior '" + b->behavior + "'");
    bound.label = table.name(p);
    bound.object = b->object;
    if (b->object && !world.object(*b->object)) {
      throw std::invalid_argument("unknown object " + std::to_string(*b->object) + " in '" +
                                  table.name(p) + "'");
    }
    bound.from = region_of(world, b->from);
    bound.to = region_of(world, b->to);
    out = bound;
  }
  return out;
}

const ScheduleEntry* Plan::entry_for(std::size_t subtask) const {
  for (const auto& e : entries) {
    if (e.subtask == subtask) return &e;
  }
  return nullptr;
}

namespace {

bool by_start(const ScheduleEntry* a, const ScheduleEntry* b) {
  return a->start != b->start ? a->start < b->start : a->subtask < b->subtask;
}

}  // namespace

std::vector<const ScheduleEntry*> Plan::agent_sequence(std::size_t agent) const {
  std::vector<const ScheduleEntry*> out;
  for (const auto& e : entries) {
    for (const auto& c : e.crew) {
      if (c.agent == agent) out.push_back(&e);
    }
  }
  std::sort(out.begin(), out.end(), by_start);
  return out;
}

std::vector<const ScheduleEntry*> Plan::object_sequence(int object) const {
  std::vector<const ScheduleEntry*> out;
  for (const auto& e : entries) {
    if (e.object == object) out.push_back(&e);
  }
  std::sort(out.begin(), out.end(), by_start);
  return out;
}

Time Plan::makespan() const {
  Time m = 0;
  for (const auto& e : entries) m = std::max(m, e.end);
  return m;
}

std::set<std::size_t> feasible_subtasks(const std::set<std::size_t>& unassigned,
                                        const std::set<std::size_t>& assigned,
                                        const std::vector<OrderPair>& orders) {
  std::set<std::size_t> out;
  for (std::size_t w : unassigned) {
    bool ok = true;
    for (auto [h, l] : orders) ok = ok && (l != w || assigned.count(h));
    if (ok) out.insert(w);
  }
  return out;
}

std::vector<Stay> agent_stays(const Plan& plan, const WorldModel& world, std::size_t agent) {
  struct Item {
    const Leg* leg;
    const ScheduleEntry* entry;
  };
  std::vector<Item> items;
  for (const auto& e : plan.entries) {
    for (const auto& c : e.crew) {
      if (c.agent == agent) items.push_back({&c.leg, &e});
    }
  }
  for (const auto& m : plan.moves) {
    if (m.agent == agent) items.push_back({&m, nullptr});
  }
  std::stable_sort(items.begin(), items.end(),
                   [](const Item& a, const Item& b) { return a.leg->depart < b.leg->depart; });
  std::vector<Stay> out;
  merge_stay(out, world.agents().at(agent).start, 0, kNever);
  for (const auto& it : items) {
    const Leg& leg = *it.leg;
    for (std::size_t i = 1; i < leg.route.regions.size(); ++i) {
      merge_stay(out, leg.route.regions[i], leg.depart + leg.route.arrivals[i], kNever);
    }
    if (it.entry) merge_stay(out, it.entry->to, it.entry->end, kNever);
  }
  out.back().until = kNever;
  return out;
}

std::vector<Stay> object_stays(const Plan& plan, const WorldModel& world, int object) {
  const ObjectSpec* o = world.object(object);
  if (!o) return {};
  std::vector<Stay> out;
  merge_stay(out, o->region, o->appear, kNever);
  for (const ScheduleEntry* e : plan.object_sequence(object)) merge_stay(out, e->to, e->end, kNever);
  out.back().until = kNever;
  return out;
}

std::vector<RegionBan> region_bans(const AssignmentContext& ctx, const Plan& plan) {
  std::vector<RegionBan> out;
  for (std::size_t w = 0; w < ctx.poset.size(); ++w) {
    const Subtask& s = ctx.poset.subtasks[w];
    const ScheduleEntry* e = plan.entry_for(w);
    for (PropId p : s.avoid_before) {
      const PresenceBinding* b = ctx.table.presence(p);
      if (!b) continue;
      const Time until = e ? e->end : kNever;
      if (until <= ctx.now) continue;
      out.push_back({b->entity_type, region_of(ctx.world, b->region), ctx.now, until, w});
    }
    if (!e) continue;
    for (const auto& np : negated_presence(s, ctx.table, ctx.world)) {
      if (e->end < ctx.now) continue;
      out.push_back({np.type, np.region, e->start, e->end, w, true});
    }
  }
  return out;
}

namespace {

// Earliest arrival of `agent` at `target`, departing no earlier than `free`
// and routing around every ban on its type that is still active at departure.
std::optional<Leg> earliest_leg(const AssignmentContext& ctx, const std::vector<RegionBan>& bans,
                                std::size_t agent, RegionId origin, Time free, RegionId target) {
  const std::string& type = ctx.world.agents()[agent].type;
  std::vector<Time> departures{free};
  for (const auto& b : bans) {
    if (b.entity_type == type && b.until > free && b.until < kNever) departures.push_back(b.until);
  }
  std::sort(departures.begin(), departures.end());
  std::optional<Leg> best;
  for (Time t : departures) {
    if (best && t >= best->arrival()) break;
    std::vector<bool> blocked(ctx.world.region_count(), false);
    for (const auto& b : bans) {
      if (b.entity_type == type && b.until > t) blocked[b.region] = true;
    }
    auto route = ctx.world.shortest_route(origin, target, blocked);
    if (!route) continue;
    Leg leg{agent, t, std::move(*route)};
    if (!best || leg.arrival() < best->arrival()) best = std::move(leg);
  }
  return best;
}

// Whether the intervals of a ≠ group share an instant or a completion.
bool group_conflict(const std::vector<std::pair<Time, Time>>& spans) {
  Time max_start = -kNever, min_end = kNever;
  bool same_end = true;
  for (const auto& [s, e] : spans) {
    max_start = std::max(max_start, s);
    min_end = std::min(min_end, e);
    same_end = same_end && std::abs(e - spans.front().second) <= kEps;
  }
  return max_start < min_end - kEps || same_end;
}

struct StartQuery {
  std::size_t w;
  Time duration;
  Time lower;
  std::optional<BoundBehavior> bound;
  // Types of the entities taking part (crew agents and object).
  std::vector<std::string> types;
};

// Earliest start ≥ q.lower meeting ≠ groups and region bans; kNever if none.
Time earliest_start(const StartQuery& q, const AssignmentContext& ctx, const Plan& plan,
                    const std::vector<RegionBan>& bans) {
  const RPoset& p = ctx.poset;
  const Time d = q.duration;
  std::vector<std::vector<std::pair<Time, Time>>> groups;
  for (const auto& g : p.excludes) {
    if (std::find(g.begin(), g.end(), q.w) == g.end()) continue;
    std::vector<std::pair<Time, Time>> spans;
    bool all = true;
    for (auto i : g) {
      if (i == q.w) continue;
      const ScheduleEntry* e = plan.entry_for(i);
      if (!e) {
        all = false;
        break;
      }
      spans.emplace_back(e->start, e->end);
    }
    if (all) groups.push_back(std::move(spans));
  }

  std::vector<Stay> busy;
  const bool transfer = q.bound && q.bound->from != q.bound->to;
  for (const auto& np : negated_presence(p.subtasks[q.w], ctx.table, ctx.world)) {
    for (const auto& t : q.types) {
      if (t == np.type && q.bound && (np.region == q.bound->from || np.region == q.bound->to)) {
        return kNever;
      }
    }
    auto occ = occupancy(plan, ctx.world, np.type, np.region);
    busy.insert(busy.end(), occ.begin(), occ.end());
  }

  Time s = q.lower;
  for (int guard = 0; guard < 100000 && s < kNever; ++guard) {
    Time next = s;
    for (auto spans : groups) {
      spans.emplace_back(next, next + d);
      if (!group_conflict(spans)) continue;
      Time min_end = kNever;
      for (std::size_t i = 0; i + 1 < spans.size(); ++i) min_end = std::min(min_end, spans[i].second);
      next = next < min_end - kEps ? min_end : next + kTick;
    }
    if (transfer) {
      for (const auto& b : bans) {
        if (b.region != q.bound->to || b.until <= next + d) continue;
        if (std::find(q.types.begin(), q.types.end(), b.entity_type) == q.types.end()) continue;
        next = b.until == kNever ? kNever : std::max(next, b.until - d);
      }
    }
    for (const auto& st : busy) {
      if (overlaps_closed(st, next, next + d)) next = st.until;
    }
    if (next == s) return s;
    s = next;
  }
  return kNever;
}

Time global_lower(std::size_t w, Time d, const AssignmentContext& ctx, const Plan& plan) {
  Time lower = ctx.now;
  for (std::size_t h : predecessors(ctx.poset, w)) {
    const ScheduleEntry* e = plan.entry_for(h);
    if (!e) return kNever;
    lower = std::max({lower, e->start, e->end - d});
  }
  return lower;
}

}  // namespace

TimeBounds compute_time_bounds(std::size_t w, const AssignmentContext& ctx, const Plan& plan) {
  TimeBounds tb;
  auto bound = bind_subtask(ctx.poset.subtasks.at(w), ctx.table, ctx.world);
  const Time d = bound ? bound->spec->duration : 0;
  const auto bans = region_bans(ctx, plan);
  StartQuery q{w, d, global_lower(w, d, ctx, plan), bound, {}};
  tb.global = q.lower == kNever ? kNever : earliest_start(q, ctx, plan, bans);
  if (!bound) return tb;

  if (bound->object) {
    const ObjectSpec* o = ctx.world.object(*bound->object);
    ObjectState os = object_state(plan, *o);
    tb.object = os.region == bound->from ? std::max(os.free, ctx.now) : kNever;
  }

  for (std::size_t a = 0; a < ctx.world.agents().size(); ++a) {
    LocalBound lb;
    lb.agent = a;
    for (const auto& [action, count] : bound->spec->crew) {
      if (ctx.world.provides(a, action)) lb.actions.push_back(action);
    }
    if (lb.actions.empty()) continue;
    AgentState st = agent_state(plan, ctx.world, a);
    auto leg = earliest_leg(ctx, bans, a, st.region, std::max(st.free, ctx.now), bound->from);
    if (!leg) continue;
    lb.arrival = leg->arrival();
    lb.leg = std::move(*leg);
    tb.local.push_back(std::move(lb));
  }
  return tb;
}

namespace {

std::optional<ScheduleEntry> plan_subtask(std::size_t w, const AssignmentContext& ctx, const Plan& plan) {
  auto bound = bind_subtask(ctx.poset.subtasks[w], ctx.table, ctx.world);
  TimeBounds tb = compute_time_bounds(w, ctx, plan);
  if (tb.global == kNever || tb.object == kNever) return std::nullopt;

  ScheduleEntry e;
  e.subtask = w;
  StartQuery q{w, 0, tb.global, bound, {}};
  if (bound) {
    e.behavior = bound->spec->name;
    e.label = bound->label;
    e.object = bound->object;
    e.from = bound->from;
    e.to = bound->to;
    q.duration = bound->spec->duration;
    if (bound->object) q.types.push_back(ctx.world.object(*bound->object)->type);

    std::vector<bool> taken(ctx.world.agents().size(), false);
    Time ready = std::max(tb.global, tb.object);
    for (const auto& [action, count] : bound->spec->crew) {
      std::vector<const LocalBound*> offers;
      for (const auto& lb : tb.local) {
        if (!taken[lb.agent] && std::find(lb.actions.begin(), lb.actions.end(), action) != lb.actions.end()) {
          offers.push_back(&lb);
        }
      }
      if (offers.size() < static_cast<std::size_t>(count)) return std::nullopt;
      std::stable_sort(offers.begin(), offers.end(), [](const LocalBound* a, const LocalBound* b) {
        return a->arrival != b->arrival ? a->arrival < b->arrival : a->agent < b->agent;
      });
      for (int k = 0; k < count; ++k) {
        const LocalBound* lb = offers[k];
        taken[lb->agent] = true;
        ready = std::max(ready, lb->arrival);
        e.crew.push_back({lb->agent, action, lb->leg});
        q.types.push_back(ctx.world.agents()[lb->agent].type);
      }
    }
    q.lower = ready;
  }
  const auto bans = region_bans(ctx, plan);
  e.start = earliest_start(q, ctx, plan, bans);
  if (e.start == kNever) return std::nullopt;
  e.end = e.start + q.duration;
  return e;
}

}  // namespace

Plan tbcn(const AssignmentContext& ctx, Plan seed) {
  Plan plan = std::move(seed);
  std::set<std::size_t> assigned, unassigned;
  for (const auto& e : plan.entries) assigned.insert(e.subtask);
  for (std::size_t w = 0; w < ctx.poset.size(); ++w) {
    if (!assigned.count(w)) unassigned.insert(w);
  }
  Time work = 0;
  for (const auto& e : plan.entries) {
    if (const BehaviorSpec* b = ctx.world.behavior(e.behavior)) work += b->work();
  }

  while (!unassigned.empty()) {
    auto feasible = feasible_subtasks(unassigned, assigned, ctx.poset.orders);
    std::optional<ScheduleEntry> best;
    double best_eta = -1;
    Time best_work = 0;
    for (std::size_t w : feasible) {
      auto cand = plan_subtask(w, ctx, plan);
      if (!cand) continue;
      const BehaviorSpec* b = ctx.world.behavior(cand->behavior);
      const Time cw = b ? b->work() : 0;
      const Time latest = std::max(plan.makespan(), cand->end);
      const double eta = latest > 0 ? (work + cw) / latest : 0;
      const bool better = !best || eta > best_eta + kEps ||
                          (std::abs(eta - best_eta) <= kEps && cand->end < best->end - kEps);
      if (better) {
        best = std::move(cand);
        best_eta = eta;
        best_work = cw;
      }
    }
    if (!best) {
      std::vector<std::size_t> blocking(feasible.empty() ? unassigned.begin() : feasible.begin(),
                                        feasible.empty() ? unassigned.end() : feasible.end());
      std::string msg = "deadlock: no schedulable subtask among {";
      for (std::size_t i = 0; i < blocking.size(); ++i) {
        msg += (i ? "," : "") + std::to_string(blocking[i]);
      }
      throw PlanningError(msg + "}", std::move(blocking));
    }
    work += best_work;
    assigned.insert(best->subtask);
    unassigned.erase(best->subtask);
    plan.entries.push_back(std::move(*best));
  }
  return plan;
}

std::vector<Violation> validate_plan(const Plan& plan, const AssignmentContext& ctx,
                                     const ValidationOptions& options) {
  std::vector<Violation> out;
  auto report = [&](Time t, std::string what) { out.push_back({t, std::move(what)}); };
  const RPoset& p = ctx.poset;
  const WorldModel& world = ctx.world;

  std::map<std::size_t, int> seen;
  for (const auto& e : plan.entries) ++seen[e.subtask];
  for (std::size_t w = 0; w < p.size(); ++w) {
    if (seen[w] > 1) report(0, "subtask " + std::to_string(w) + " scheduled more than once");
    if (options.complete && seen[w] == 0) report(0, "subtask " + std::to_string(w) + " not scheduled");
  }

  for (const auto& e : plan.entries) {
    const std::string id = "subtask " + std::to_string(e.subtask);
    if (e.subtask >= p.size()) {
      report(e.start, id + " is not in the poset");
      continue;
    }
    std::optional<BoundBehavior> bound;
    try {
      bound = bind_subtask(p.subtasks[e.subtask], ctx.table, world);
    } catch (const std::exception& ex) {
      report(e.start, id + ": " + ex.what());
      continue;
    }
    if (e.end < e.start - kEps) report(e.start, id + " ends before it starts");
    if (!bound) continue;
    if (e.behavior != bound->spec->name || e.from != bound->from || e.to != bound->to ||
        e.object != bound->object) {
      report(e.start, id + " does not execute " + bound->label);
    }
    if (std::abs(e.end - e.start - bound->spec->duration) > 1e-6) {
      report(e.start, id + " has the wrong duration");
    }
    std::map<std::string, int> need;
    for (const auto& [a, n] : bound->spec->crew) need[a] += n;
    std::set<std::size_t> agents;
    for (const auto& c : e.crew) {
      if (c.agent >= world.agents().size()) {
        report(e.start, id + " uses an unknown agent");
        continue;
      }
      if (!agents.insert(c.agent).second) {
        report(e.start, id + ": agent " + world.agents()[c.agent].name + " fills two slots");
      }
      if (!world.provides(c.agent, c.action)) {
        report(e.start, id + ": agent " + world.agents()[c.agent].name + " cannot provide " + c.action);
      }
      --need[c.action];
    }
    for (const auto& [a, n] : need) {
      if (n != 0) report(e.start, id + ": crew for action " + a + " is off by " + std::to_string(-n));
    }
  }

  for (auto [h, l] : p.orders) {
    const ScheduleEntry* a = plan.entry_for(h);
    const ScheduleEntry* b = plan.entry_for(l);
    if (!a || !b) continue;
    if (b->start < a->start - kEps || b->end < a->end - kEps) {
      report(b->start, "order " + std::to_string(h) + " before " + std::to_string(l) + " violated");
    }
  }
  for (const auto& g : p.excludes) {
    std::vector<std::pair<Time, Time>> spans;
    for (auto i : g) {
      if (const ScheduleEntry* e = plan.entry_for(i)) spans.emplace_back(e->start, e->end);
    }
    if (spans.size() == g.size() && group_conflict(spans)) {
      std::string ids;
      for (auto i : g) ids += (ids.empty() ? "" : ",") + std::to_string(i);
      report(spans.front().first, "exclusion group {" + ids + "} executes simultaneously");
    }
  }

  for (std::size_t a = 0; a < world.agents().size(); ++a) {
    const std::string& name = world.agents()[a].name;
    struct Item {
      const Leg* leg;
      const ScheduleEntry* entry;
    };
    std::vector<Item> items;
    for (const auto& e : plan.entries) {
      for (const auto& c : e.crew) {
        if (c.agent == a) items.push_back({&c.leg, &e});
      }
    }
    for (const auto& m : plan.moves) {
      if (m.agent == a) items.push_back({&m, nullptr});
    }
    std::stable_sort(items.begin(), items.end(),
                     [](const Item& x, const Item& y) { return x.leg->depart < y.leg->depart; });
    RegionId region = world.agents()[a].start;
    Time free = 0;
    for (const auto& it : items) {
      const Leg& leg = *it.leg;
      if (leg.depart < free - kEps) report(leg.depart, name + " departs while busy");
      const auto& rs = leg.route.regions;
      if (rs.empty() || rs.front() != region) {
        report(leg.depart, name + " departs from a region it is not in");
      }
      for (std::size_t i = 1; i < rs.size(); ++i) {
        auto d = world.edge_duration(rs[i - 1], rs[i]);
        if (!d) {
          report(leg.depart, name + " moves along a missing edge");
        } else if (std::abs(leg.route.arrivals[i] - leg.route.arrivals[i - 1] - *d) > 1e-6) {
          report(leg.depart, name + " travels faster or slower than the edge allows");
        }
      }
      if (!rs.empty()) region = rs.back();
      free = leg.arrival();
      if (it.entry) {
        if (region != it.entry->from) {
          report(it.entry->start, name + " is not at the start region of subtask " +
                                      std::to_string(it.entry->subtask));
        }
        if (it.entry->start < free - kEps) {
          report(it.entry->start, name + " starts subtask " + std::to_string(it.entry->subtask) +
                                      " before arriving");
        }
        region = it.entry->to;
        free = it.entry->end;
      }
    }
  }

  for (const auto& o : world.objects()) {
    RegionId region = o.region;
    Time free = o.appear;
    for (const ScheduleEntry* e : plan.object_sequence(o.id)) {
      const std::string what = "object " + std::to_string(o.id) + " in subtask " + std::to_string(e->subtask);
      if (e->start < free - kEps) report(e->start, what + " is not available yet");
      if (region != e->from) report(e->start, what + " is not at the start region");
      region = e->to;
      free = e->end;
    }
  }

  AssignmentContext at{ctx.poset, ctx.table, ctx.world, options.bans_from};
  for (auto b : region_bans(at, plan)) {
    if (b.from >= options.bans_until) continue;
    b.from = std::max(b.from, options.bans_from);
    if (b.until > options.bans_until) {
      b.until = options.bans_until;
      b.closed = false;
    }
    auto hit = [&](const Stay& s) {
      return b.closed ? overlaps_closed(s, b.from, b.until) : overlaps_open(s, b.from, b.until);
    };
    for (std::size_t a = 0; a < world.agents().size(); ++a) {
      if (world.agents()[a].type != b.entity_type) continue;
      for (const auto& s : agent_stays(plan, world, a)) {
        if (s.region == b.region && hit(s)) {
          report(std::max(s.from, b.from), world.agents()[a].name + " enters banned region " +
                                               world.region_name(b.region));
        }
      }
    }
    for (const auto& o : world.objects()) {
      if (o.type != b.entity_type) continue;
      for (const auto& s : object_stays(plan, world, o.id)) {
        if (s.region == b.region && hit(s)) {
          report(std::max(s.from, b.from), "object " + std::to_string(o.id) + " enters banned region " +
                                               world.region_name(b.region));
        }
      }
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const Violation& a, const Violation& b) { return a.time < b.time; });
  return out;
}

std::string gantt_text(const Plan& plan, const WorldModel& world) {
  struct Row {
    std::size_t lane;
    Time start;
    std::size_t subtask;
    std::string text;
  };
  std::vector<Row> rows;
  char buf[64];
  for (const auto& e : plan.entries) {
    std::snprintf(buf, sizeof buf, " %zu %.3f %.3f ", e.subtask, e.start, e.end);
    const std::string label = e.label.empty() ? "-" : e.label;
    if (e.crew.empty()) rows.push_back({world.agents().size(), e.start, e.subtask, "-" + std::string(buf) + label});
    for (const auto& c : e.crew) {
      rows.push_back({c.agent, e.start, e.subtask, world.agents()[c.agent].name + buf + label + " " + c.action});
    }
  }
  std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
    if (a.lane != b.lane) return a.lane < b.lane;
    return a.start != b.start ? a.start < b.start : a.subtask < b.subtask;
  });
  std::ostringstream os;
  for (const auto& r : rows) os << r.text << "\n";
  return os.str();
}

}  // namespace rposet
