#include <algorithm>
#include <cstdio>
#include <sstream>

#include "rposet/sim.hpp"

namespace rposet {

namespace {

constexpr Time kSame = 1e-9;

std::string fmt(Time t) {
  if (t == kNever) return "inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", t);
  return buf;
}

template <class C>
std::string join(const C& items) {
  std::ostringstream os;
  bool first = true;
  for (const auto& x : items) {
    os << (first ? "" : ",") << x;
    first = false;
  }
  return first ? "-" : os.str();
}

bool is_ban(const Violation& v) { return v.what.find("banned region") != std::string::npos; }

// Checks the placement that maps each subtask to its completion instant.
std::vector<Violation> witness_violations(const Trace& tr) {
  std::vector<Violation> out;
  const RPoset& p = tr.final_poset;
  std::vector<std::size_t> tau(p.size(), 0);
  for (std::size_t i = 0; i < p.size(); ++i) {
    const ScheduleEntry* e = tr.plan.entry_for(i);
    const std::string id = "subtask " + std::to_string(i);
    if (!e) {
      out.push_back({0, id + " never executed"});
      continue;
    }
    auto it = std::lower_bound(tr.word_times.begin(), tr.word_times.end(), e->end - kSame);
    tau[i] = static_cast<std::size_t>(it - tr.word_times.begin());
    if (tau[i] >= tr.word.size()) {
      if (!p.subtasks[i].action.pos.empty() || tr.word.empty()) {
        out.push_back({e->end, id + " has no completion symbol"});
        continue;
      }
      tau[i] = tr.word.size() - 1;
    }
    const Subtask& s = p.subtasks[i];
    if (!s.action.satisfied_by(tr.word[tau[i]])) {
      out.push_back({e->end, id + " label does not hold at its completion"});
    }
    for (std::size_t m = 0; m < tau[i]; ++m) {
      if (s.avoid_before.intersects(tr.word[m])) {
        out.push_back({tr.word_times[m], id + " is preceded by a forbidden completion"});
        break;
      }
    }
  }
  if (!out.empty()) return out;
  auto reach = order_closure(p.size(), p.orders);
  for (std::size_t h = 0; h < p.size(); ++h) {
    for (std::size_t l = 0; l < p.size(); ++l) {
      if (h != l && reach[h][l] && tau[h] > tau[l]) {
        out.push_back({tr.word_times[tau[l]],
                       "subtask " + std::to_string(l) + " completes before its predecessor " + std::to_string(h)});
      }
    }
  }
  for (const auto& g : p.excludes) {
    if (std::all_of(g.begin(), g.end(), [&](std::size_t i) { return tau[i] == tau[g.front()]; })) {
      out.push_back({tr.word_times[tau[g.front()]], "exclusion group {" + join(g) + "} completes at one instant"});
    }
  }
  return out;
}

}  // namespace

std::string VerifyReport::text() const {
  std::ostringstream os;
  auto section = [&](const char* name, const std::vector<Violation>& vs) {
    os << name << " " << (vs.empty() ? "ok" : "FAIL") << " " << vs.size() << "\n";
    for (const auto& v : vs) os << "  " << fmt(v.time) << " " << v.what << "\n";
  };
  section("formulas", formulas);
  section("poset", poset);
  section("bans", bans);
  section("physical", physical);
  return os.str();
}

VerifyReport verify_trace(const Trace& tr, const Scenario& sc) {
  VerifyReport r;
  for (const auto& f : sc.base) {
    if (!evaluate(f.formula, tr.word)) r.formulas.push_back({0, "formula " + f.name + " is not satisfied"});
  }
  for (const auto& c : tr.contingents) {
    Word suffix;
    for (std::size_t i = 0; i < tr.word.size(); ++i) {
      if (tr.word_times[i] > c.release) suffix.push_back(tr.word[i]);
    }
    if (!evaluate(c.formula.formula, suffix)) {
      r.formulas.push_back({c.release, "contingent formula " + c.formula.name + " is not satisfied after release"});
    }
  }

  r.poset = witness_violations(tr);
  if (!r.poset.empty() && tr.final_poset.size() <= 20 && word_satisfies(tr.word, tr.final_poset)) r.poset.clear();

  for (std::size_t k = 0; k < tr.stages.size(); ++k) {
    const Stage& s = tr.stages[k];
    AssignmentContext ctx{s.poset, tr.table, tr.world};
    ValidationOptions vo;
    vo.complete = false;
    vo.bans_from = s.time;
    vo.bans_until = k + 1 < tr.stages.size() ? tr.stages[k + 1].time : kNever;
    for (auto& v : validate_plan(tr.plan, ctx, vo)) {
      if (is_ban(v)) r.bans.push_back(std::move(v));
    }
  }

  AssignmentContext ctx{tr.final_poset, tr.table, tr.world};
  ValidationOptions vo;
  vo.bans_until = 0;
  r.physical = validate_plan(tr.plan, ctx, vo);
  for (std::size_t i = 1; i < tr.word_times.size(); ++i) {
    if (tr.word_times[i] <= tr.word_times[i - 1]) r.physical.push_back({tr.word_times[i], "word symbols out of order"});
  }
  return r;
}

Time sequential_baseline(const Trace& tr) {
  std::vector<const ScheduleEntry*> order;
  for (const auto& e : tr.plan.entries) order.push_back(&e);
  std::stable_sort(order.begin(), order.end(), [](const ScheduleEntry* a, const ScheduleEntry* b) {
    return a->start != b->start ? a->start < b->start : a->subtask < b->subtask;
  });
  const WorldModel& w = tr.world;
  std::vector<RegionId> agent_at;
  for (const auto& a : w.agents()) agent_at.push_back(a.start);

  Time clock = 0;
  for (const ScheduleEntry* e : order) {
    Time start = clock;
    if (e->subtask < tr.release.size()) start = std::max(start, tr.release[e->subtask]);
    if (e->object) {
      if (const ObjectSpec* o = w.object(*e->object)) start = std::max(start, o->appear);
    }
    const Time ready = start;
    for (const auto& c : e->crew) {
      auto route = w.shortest_route(agent_at[c.agent], e->from);
      if (!route) throw PlanningError("sequential baseline: region unreachable", {e->subtask});
      start = std::max(start, ready + route->duration());
      agent_at[c.agent] = e->to;
    }
    clock = start + (e->end - e->start);
  }
  return clock;
}

std::optional<std::string> inject_fault(Trace& tr, const Scenario& sc, Fault fault) {
  (void)sc;
  if (fault == Fault::SwapCompletions) {
    for (auto [h, l] : tr.final_poset.orders) {
      auto find = [&](std::size_t i) {
        return std::find_if(tr.plan.entries.begin(), tr.plan.entries.end(),
                            [&](const ScheduleEntry& e) { return e.subtask == i; });
      };
      auto a = find(h), b = find(l);
      if (a == tr.plan.entries.end() || b == tr.plan.entries.end()) continue;
      if (a->label.empty() || b->label.empty() || a->label == b->label || a->end == b->end) continue;
      std::swap(a->start, b->start);
      std::swap(a->end, b->end);
      rebuild_word(tr);
      return "swapped the completions of subtasks " + std::to_string(h) + " and " + std::to_string(l);
    }
    return std::nullopt;
  }
  // A round trip into the banned region, fitted into a gap where the agent
  // neither travels nor works, so only the ban check can object.
  for (const auto& s : tr.stages) {
    AssignmentContext ctx{s.poset, tr.table, tr.world, s.time};
    for (const auto& b : region_bans(ctx, tr.plan)) {
      for (std::size_t a = 0; a < tr.world.agents().size(); ++a) {
        if (tr.world.agents()[a].type != b.entity_type) continue;
        std::vector<std::pair<Time, Time>> busy;
        for (const auto& e : tr.plan.entries) {
          for (const auto& c : e.crew) {
            if (c.agent == a) busy.emplace_back(c.leg.depart, e.end);
          }
        }
        for (const auto& m : tr.plan.moves) {
          if (m.agent == a) busy.emplace_back(m.depart, m.arrival());
        }
        std::vector<Time> candidates{b.from};
        for (const auto& [from, until] : busy) {
          if (until > b.from) candidates.push_back(until);
        }
        std::sort(candidates.begin(), candidates.end());
        const auto stays = agent_stays(tr.plan, tr.world, a);
        for (Time at : candidates) {
          if (at >= b.until) break;
          auto stay = std::find_if(stays.begin(), stays.end(),
                                   [&](const Stay& st) { return st.from <= at && at < st.until; });
          if (stay == stays.end() || stay->region == b.region) continue;
          auto go = tr.world.shortest_route(stay->region, b.region);
          auto back = tr.world.shortest_route(b.region, stay->region);
          if (!go || !back || at + go->duration() >= b.until) continue;
          Route trip = *go;
          for (std::size_t i = 1; i < back->regions.size(); ++i) {
            trip.regions.push_back(back->regions[i]);
            trip.arrivals.push_back(go->duration() + back->arrivals[i]);
          }
          const Time done = at + trip.duration();
          if (done > stay->until) continue;
          const bool clash = std::any_of(busy.begin(), busy.end(), [&](const auto& iv) {
            return iv.first < done && at < iv.second;
          });
          if (clash) continue;
          tr.plan.moves.push_back({a, at, trip});
          return "moved " + tr.world.agents()[a].name + " into banned region " + tr.world.region_name(b.region) +
                 " and back at " + fmt(at);
        }
      }
    }
  }
  return std::nullopt;
}

std::string trace_text(const Trace& tr, const Scenario& sc) {
  std::ostringstream os;
  const WorldModel& w = tr.world;
  os << "scenario " << (sc.name.empty() ? "-" : sc.name) << "\n";
  for (const auto& s : tr.stages) {
    os << "stage " << fmt(s.time) << " " << s.cause << " subtasks=" << s.poset.size() << "\n";
  }
  for (const auto& ev : sc.events) {
    os << "event " << fmt(ev.object.appear) << " object " << ev.object.id << " " << ev.object.type << " "
       << w.region_name(ev.object.region) << " " << w.region_name(ev.goal) << "\n";
  }
  for (const auto& a : tr.adaptations) {
    os << "adapt " << fmt(a.time) << " objects=" << join(a.objects) << " conflicts=" << join(a.essential_conflicts)
       << " removed=" << join(a.removed) << " subtasks=" << a.subtasks_before << "->" << a.subtasks_after << "\n";
  }
  std::vector<const ScheduleEntry*> entries;
  for (const auto& e : tr.plan.entries) entries.push_back(&e);
  std::sort(entries.begin(), entries.end(), [](const ScheduleEntry* a, const ScheduleEntry* b) {
    return a->start != b->start ? a->start < b->start : a->subtask < b->subtask;
  });
  for (const ScheduleEntry* e : entries) {
    std::vector<std::string> crew;
    for (const auto& c : e->crew) crew.push_back(w.agents()[c.agent].name + ":" + c.action);
    os << "entry " << e->subtask << " " << (e->label.empty() ? "-" : e->label) << " " << fmt(e->start) << " "
       << fmt(e->end) << " release=" << fmt(e->subtask < tr.release.size() ? tr.release[e->subtask] : 0) << " crew="
       << join(crew) << "\n";
  }
  for (const auto& m : tr.plan.moves) {
    std::vector<std::string> rs;
    for (RegionId r : m.route.regions) rs.push_back(w.region_name(r));
    os << "move " << w.agents()[m.agent].name << " " << fmt(m.depart) << " " << join(rs) << "\n";
  }
  for (std::size_t a = 0; a < w.agents().size(); ++a) {
    for (const auto& s : agent_stays(tr.plan, w, a)) {
      os << "agent " << w.agents()[a].name << " " << w.region_name(s.region) << " " << fmt(s.from) << " "
         << fmt(s.until) << "\n";
    }
  }
  for (const auto& o : w.objects()) {
    for (const auto& s : object_stays(tr.plan, w, o.id)) {
      os << "object " << o.id << " " << w.region_name(s.region) << " " << fmt(s.from) << " " << fmt(s.until) << "\n";
    }
  }
  for (std::size_t i = 0; i < tr.word.size(); ++i) {
    os << "symbol " << fmt(tr.word_times[i]) << " " << tr.table.format(tr.word[i]) << "\n";
  }
  return os.str();
}

std::string metrics_text(const Metrics& m) {
  std::ostringstream os;
  char ratio[32];
  std::snprintf(ratio, sizeof ratio, "%.4f", m.sequential_baseline > 0 ? m.makespan / m.sequential_baseline : 0.0);
  os << "makespan " << fmt(m.makespan) << "\n"
     << "sequential_baseline " << fmt(m.sequential_baseline) << "\n"
     << "parallel_ratio " << ratio << "\n"
     << "offline_subtasks " << m.offline_subtasks << "\n"
     << "final_subtasks " << m.final_subtasks << "\n"
     << "adaptations " << m.adaptations << "\n";
  for (const auto& f : m.formulas) {
    char eta[32];
    std::snprintf(eta, sizeof eta, "%.4f", f.efficiency);
    os << "formula " << f.name << " release=" << fmt(f.release) << " satisfied=" << (f.satisfied ? 1 : 0)
       << " at=" << fmt(f.satisfied_at) << " duration=" << fmt(f.duration) << " efficiency=" << eta << "\n";
  }
  return os.str();
}

std::string timings_text(const Metrics& m, const Trace& tr) {
  std::ostringstream os;
  char buf[64];
  auto line = [&](const char* key, double v) {
    std::snprintf(buf, sizeof buf, "%s %.6f\n", key, v);
    os << buf;
  };
  line("offline_product_seconds", m.offline_product_seconds);
  line("offline_assignment_seconds", m.offline_assignment_seconds);
  line("adapt_seconds", m.adapt_seconds);
  line("recompute_seconds", m.recompute_seconds);
  for (const auto& a : tr.adaptations) {
    std::snprintf(buf, sizeof buf, "adapt %.3f product %.6f assignment %.6f\n", a.time, a.product_seconds,
                  a.assignment_seconds);
    os << buf;
  }
  return os.str();
}

}  // namespace rposet
