#include "rposet/sim.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <sstream>

#include "rposet/automaton.hpp"
#include "rposet/product.hpp"

namespace rposet {

namespace {

using Clock = std::chrono::steady_clock;
constexpr Time kSame = 1e-9;

double seconds_since(Clock::time_point t) {
  return std::chrono::duration<double>(Clock::now() - t).count();
}

std::string fmt(Time t) {
  if (t == kNever) return "inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", t);
  return buf;
}

template <class C>
std::string join(const C& items, const char* sep = ",") {
  std::ostringstream os;
  bool first = true;
  for (const auto& x : items) {
    os << (first ? "" : sep) << x;
    first = false;
  }
  return first ? "-" : os.str();
}

std::function<bool(const Subtask&)> admissible_in(const PropTable& table, const WorldModel& world) {
  return [&table, &world](const Subtask& s) {
    RPoset one;
    one.subtasks = {s};
    return plannable(one, table, world);
  };
}

std::vector<RPoset> plannable_posets(const Formula& f, const PropTable& table, const WorldModel& world,
                                     const SearchBudget& budget) {
  Nfa nfa = normalize(translate(f)).first;
  PosetExtraction ex = compute_posets(nfa, budget);
  std::vector<RPoset> out;
  for (auto& p : ex.posets) {
    if (plannable(p, table, world)) out.push_back(std::move(p));
  }
  return out;
}

void classify(ExecutionState& st) {
  st.finished.clear();
  st.in_progress.clear();
  for (const auto& e : st.plan.entries) {
    if (e.end <= st.now) st.finished.insert(e.subtask);
    else if (e.start < st.now) st.in_progress.insert(e.subtask);
  }
}

Word finished_word(const Plan& plan, const PropTable& table, Time now) {
  Plan done;
  for (const auto& e : plan.entries) {
    if (e.end <= now) done.entries.push_back(e);
  }
  Trace tmp;
  tmp.plan = std::move(done);
  tmp.table = table;
  rebuild_word(tmp);
  return tmp.word;
}

// First product of the chain (or a later one from the stream) that tbcn can
// schedule.
std::pair<RPoset, Plan> offline_plan(const std::vector<std::vector<RPoset>>& sets, const PropTable& table,
                                     const WorldModel& world, const SearchBudget& budget, Metrics& m) {
  auto t0 = Clock::now();
  ChainOptions co;
  co.admissible = admissible_in(table, world);
  co.max_results = 4;
  ChainResult cr = product_chain(sets, budget, co);
  if (!cr.first) {
    std::string cause = "no admissible product";
    if (cr.infeasible_step) cause += " (empty at formula " + std::to_string(*cr.infeasible_step + 1) + ")";
    const bool exhausted = cr.status == ProductStatus::BudgetExhausted;
    if (exhausted) cause += " within the search budget";
    throw SimulationError("offline product", cause, exhausted);
  }
  std::vector<RPoset> candidates{*cr.first};
  for (const auto& p : cr.stream) {
    if (!(p == *cr.first)) candidates.push_back(p);
  }
  m.offline_product_seconds += seconds_since(t0);
  auto a0 = Clock::now();
  std::string last;
  for (const auto& p : candidates) {
    try {
      AssignmentContext ctx{p, table, world};
      Plan plan = tbcn(ctx);
      m.offline_assignment_seconds = seconds_since(a0);
      return {p, std::move(plan)};
    } catch (const PlanningError& e) {
      last = e.what();
    }
  }
  throw SimulationError("offline assignment", last);
}

}  // namespace

void rebuild_word(Trace& tr) {
  std::vector<std::pair<Time, PropId>> events;
  for (const auto& e : tr.plan.entries) {
    if (e.label.empty()) continue;
    auto p = tr.table.find(e.label);
    if (p) events.emplace_back(e.end, *p);
  }
  std::sort(events.begin(), events.end());
  tr.word.clear();
  tr.word_times.clear();
  for (const auto& [t, p] : events) {
    if (tr.word_times.empty() || t - tr.word_times.back() > kSame) {
      tr.word_times.push_back(t);
      tr.word.emplace_back();
    }
    tr.word.back().insert(p);
  }
}

OfflinePlan plan_offline(const Scenario& sc, const SearchBudget& budget) {
  auto t0 = Clock::now();
  std::vector<std::vector<RPoset>> sets;
  for (const auto& f : sc.base) {
    auto ps = plannable_posets(f.formula, sc.table, sc.world, budget);
    if (ps.empty()) throw SimulationError("offline posets", "formula " + f.name + " has no plannable R-poset");
    sets.push_back(std::move(ps));
  }
  Metrics m;
  m.offline_product_seconds = seconds_since(t0);
  auto [poset, plan] = offline_plan(sets, sc.table, sc.world, budget, m);
  return {std::move(poset), std::move(plan), m.offline_product_seconds, m.offline_assignment_seconds};
}

RunResult run(const Scenario& sc, const RunOptions& options) {
  RunResult out;
  Trace& tr = out.trace;
  Metrics& m = out.metrics;
  tr.world = sc.world;
  tr.table = sc.table;

  auto [poset, plan, product_seconds, assignment_seconds] = plan_offline(sc, options.budget);
  m.offline_product_seconds = product_seconds;
  m.offline_assignment_seconds = assignment_seconds;
  m.offline_subtasks = poset.size();

  ExecutionState st;
  st.poset = std::move(poset);
  st.plan = std::move(plan);
  tr.release.assign(st.poset.size(), 0);
  tr.stages.push_back({0, "offline", st.poset, st.plan});

  std::vector<NamedFormula> released(sc.base.begin(), sc.base.end());
  for (std::size_t k = 0; k < sc.events.size();) {
    const Time t = sc.events[k].object.appear;
    AdaptationRecord rec;
    rec.time = t;
    rec.subtasks_before = st.poset.size();
    for (; k < sc.events.size() && sc.events[k].object.appear == t; ++k) {
      const ObjectEvent& ev = sc.events[k];
      tr.world.add_object(ev.object);
      const std::string text = instantiate_template(sc.templates.at(ev.object.type), ev.object.id,
                                                    tr.world.region_name(ev.object.region),
                                                    tr.world.region_name(ev.goal));
      NamedFormula nf{ev.object.type + std::to_string(ev.object.id), text,
                      parse_bound_formula(text, tr.table, tr.world)};
      tr.contingents.push_back({ev.object.id, t, nf});
      released.push_back(nf);
      rec.objects.push_back(ev.object.id);

      st.now = t;
      classify(st);
      st.emitted_word = finished_word(st.plan, tr.table, t);
      AdaptOptions ao;
      ao.budget = options.budget;
      try {
        auto [next, report] = adapt(st, nf.formula, tr.table, tr.world, ao);
        st = std::move(next);
        rec.essential_conflicts.insert(report.essential_conflicts.begin(), report.essential_conflicts.end());
        rec.removed.insert(report.removed.begin(), report.removed.end());
        rec.product_seconds += report.product_seconds;
        rec.assignment_seconds += report.assignment_seconds;
      } catch (const AdaptationError& e) {
        throw SimulationError("online adaptation at t=" + fmt(t) + " for object " + std::to_string(ev.object.id),
                              e.what());
      }
      tr.release.resize(st.poset.size(), t);
    }
    rec.subtasks_after = st.poset.size();
    m.adapt_seconds += rec.product_seconds + rec.assignment_seconds;
    tr.stages.push_back({t, "objects " + join(rec.objects), st.poset, st.plan});
    tr.adaptations.push_back(std::move(rec));

    if (options.measure_recompute) {
      auto r0 = Clock::now();
      std::vector<std::vector<RPoset>> all;
      for (const auto& f : released) all.push_back(plannable_posets(f.formula, tr.table, tr.world, options.budget));
      ChainOptions co;
      co.admissible = admissible_in(tr.table, tr.world);
      co.max_results = 1;
      product_chain(all, options.budget, co);
      m.recompute_seconds += seconds_since(r0);
    }
  }

  for (std::size_t w = 0; w < st.poset.size(); ++w) {
    if (!st.plan.entry_for(w)) {
      throw SimulationError("execution", "subtask " + std::to_string(w) + " was never scheduled");
    }
  }
  tr.plan = std::move(st.plan);
  tr.final_poset = std::move(st.poset);
  rebuild_word(tr);

  m.makespan = tr.plan.makespan();
  m.sequential_baseline = sequential_baseline(tr);
  m.final_subtasks = tr.final_poset.size();
  m.adaptations = tr.adaptations.size();

  auto formula_metrics = [&](const NamedFormula& f, Time release) {
    FormulaMetrics fm;
    fm.name = f.name;
    fm.release = release;
    Word suffix;
    std::vector<Time> times;
    for (std::size_t i = 0; i < tr.word.size(); ++i) {
      if (tr.word_times[i] > release) {
        suffix.push_back(tr.word[i]);
        times.push_back(tr.word_times[i]);
      }
    }
    if (evaluate(f.formula, {})) {
      fm.satisfied = true;
      fm.satisfied_at = release;
    }
    for (std::size_t k = 1; k <= suffix.size() && !fm.satisfied; ++k) {
      if (evaluate(f.formula, Word(suffix.begin(), suffix.begin() + static_cast<std::ptrdiff_t>(k)))) {
        fm.satisfied = true;
        fm.satisfied_at = times[k - 1];
      }
    }
    if (!fm.satisfied) return fm;
    fm.duration = fm.satisfied_at - release;
    const PropSet props = atoms(f.formula);
    Time work = 0;
    for (const auto& e : tr.plan.entries) {
      auto p = tr.table.find(e.label);
      if (!p || !props.contains(*p) || e.end <= release || e.end > fm.satisfied_at + kSame) continue;
      if (const BehaviorSpec* b = tr.world.behavior(e.behavior)) work += b->work();
    }
    fm.efficiency = fm.duration > 0 ? work / fm.duration : 0;
    return fm;
  };
  for (const auto& f : sc.base) m.formulas.push_back(formula_metrics(f, 0));
  for (const auto& c : tr.contingents) m.formulas.push_back(formula_metrics(c.formula, c.release));
  return out;
}

}  // namespace rposet
