#include "doctest.h"
#include "support.hpp"
#include "world_fixture.hpp"

#include "rposet/online.hpp"

using namespace rposet;
using testsupport::act;
using testsupport::brute_force_satisfies;
using testsupport::Fixture;

namespace {

ScheduleEntry timed(std::size_t subtask, Time start, Time end) {
  ScheduleEntry e;
  e.subtask = subtask;
  e.start = start;
  e.end = end;
  return e;
}

// Membership of w0·w where committed subtasks sit inside w0 and the
// `suffix_only` subtasks sit inside w.
bool split_satisfies(const Word& w0, const Word& w, const RPoset& p, const std::set<std::size_t>& committed,
                     const std::set<std::size_t>& suffix_only) {
  Word full = w0;
  full.insert(full.end(), w.begin(), w.end());
  const std::size_t k = p.size(), n = full.size();
  if (k == 0) return true;
  if (n == 0) return false;
  std::vector<std::size_t> tau(k, 0);
  while (true) {
    bool ok = true;
    for (std::size_t i = 0; i < k && ok; ++i) {
      if (committed.count(i)) ok = tau[i] < w0.size();
      if (suffix_only.count(i)) ok = ok && tau[i] >= w0.size();
    }
    if (ok) {
      ok = true;
      for (std::size_t i = 0; i < k && ok; ++i) {
        const auto& s = p.subtasks[i];
        ok = s.action.satisfied_by(full[tau[i]]);
        for (std::size_t m = 0; m < tau[i] && ok; ++m) ok = !s.avoid_before.intersects(full[m]);
      }
      for (auto [h, l] : p.orders) ok = ok && tau[h] <= tau[l];
      for (const auto& g : p.excludes) {
        bool same = true;
        for (auto i : g) same = same && tau[i] == tau[g.front()];
        ok = ok && !same;
      }
      if (ok) return true;
    }
    std::size_t d = 0;
    while (d < k && ++tau[d] == n) tau[d++] = 0;
    if (d == k) return false;
  }
}

}  // namespace

TEST_CASE("essential conflicts follow the new relations") {
  RPoset p;
  p.subtasks.resize(3);
  Plan plan;
  plan.entries = {timed(0, 50, 55), timed(1, 40, 45), timed(2, 12, 20)};
  CHECK(essential_conflicts(p, plan, {}).empty());

  p.orders = {{0, 1}};
  CHECK(essential_conflicts(p, plan, {}) == std::set<std::size_t>{0});
  // A committed predecessor pushes the conflict onto its successor.
  CHECK(essential_conflicts(p, plan, {0}) == std::set<std::size_t>{1});
  CHECK(essential_conflicts(p, plan, {0, 1}).empty());

  RPoset q;
  q.subtasks.resize(3);
  Plan overlap;
  overlap.entries = {timed(0, 12, 14), timed(1, 10, 15), timed(2, 15, 16)};
  q.excludes = {{0, 1}};
  CHECK(essential_conflicts(q, overlap, {}) == std::set<std::size_t>{0});
  // Back-to-back execution is not a conflict.
  q.excludes = {{1, 2}};
  CHECK(essential_conflicts(q, overlap, {}).empty());
}

TEST_CASE("conflict closure removes transitive successors") {
  RPoset chain;
  chain.subtasks.resize(3);
  chain.orders = {{0, 1}, {1, 2}};
  CHECK(conflict_closure({}, chain, {}).empty());
  CHECK(conflict_closure({0}, chain, {}) == std::set<std::size_t>{0, 1, 2});

  RPoset diamond;
  diamond.subtasks.resize(5);
  diamond.orders = {{0, 1}, {0, 2}, {1, 3}, {2, 4}};
  CHECK(conflict_closure({1}, diamond, {}) == std::set<std::size_t>{1, 3});
  CHECK(conflict_closure({0}, diamond, {3}) == std::set<std::size_t>{0, 1, 2, 4});
}

TEST_CASE("online product never merges into committed subtasks") {
  RPoset p1, p2;
  p1.subtasks = {{Term{{0}, {}}, {}}, {Term{{1}, {}}, {}}};
  p2.subtasks = {{Term{{0}, {}}, {}}};
  auto free = online_product(p1, p2, {});
  auto plain = poset_product(p1, p2);
  CHECK(free.posets == plain.posets);

  auto r = online_product(p1, p2, {0});
  REQUIRE_FALSE(r.posets.empty());
  for (const auto& p : r.posets) {
    CHECK(p.subtasks[0] == p1.subtasks[0]);
    CHECK(p.size() >= 2);
  }
  bool appended = std::any_of(r.posets.begin(), r.posets.end(), [](const RPoset& p) {
    return p.size() == 3 && p.subtasks[2] == Subtask{Term{{0}, {}}, {}};
  });
  CHECK(appended);
  CHECK_THROWS(online_product(p1, p2, {7}));
}

TEST_CASE("online products are sound on split words") {
  std::mt19937_64 rng(61);
  auto symbols = testsupport::symbols_over(3);
  int checked = 0;
  for (int trial = 0; trial < 40; ++trial) {
    RPoset p1 = testsupport::random_poset(rng, 3, 3);
    RPoset p2 = testsupport::random_poset(rng, 2, 3);
    // Committed subtasks form a down-closed set of p1.
    std::set<std::size_t> committed;
    auto reach = order_closure(p1.size(), p1.orders);
    for (std::size_t i = 0; i < p1.size(); ++i) {
      if (rng() % 2) continue;
      bool roots_in = true;
      for (std::size_t h = 0; h < p1.size(); ++h) roots_in = roots_in && (!reach[h][i] || committed.count(h));
      if (roots_in) committed.insert(i);
    }
    auto r = online_product(p1, p2, committed);
    for (const auto& p : r.posets) {
      // Everything not yet committed executes after the release instant.
      std::set<std::size_t> suffix;
      for (std::size_t i = 0; i < p.size(); ++i) {
        if (!committed.count(i)) suffix.insert(i);
      }
      for (int k = 0; k < 150; ++k) {
        Word w0 = testsupport::random_word(rng, 2, 3);
        Word w = testsupport::random_word(rng, 3, 3);
        if (!split_satisfies(w0, w, p, committed, suffix)) continue;
        Word full = w0;
        full.insert(full.end(), w.begin(), w.end());
        CHECK(brute_force_satisfies(full, p1));
        CHECK(brute_force_satisfies(w, p2));
        ++checked;
      }
    }
  }
  CHECK(checked > 50);
}

TEST_CASE("adapt repairs the plan and keeps committed entries") {
  Fixture f;
  f.agents({{"A", 0}, {"A", 2}, {"B", 3}, {"B", 1}});
  const PropId a = f.behavior("K0", 0, 0), b = f.behavior("K0", 2, 2), c = f.behavior("K1", 3, 3);
  const PropId d = f.behavior("K2", 4, 4);
  (void)d;
  ExecutionState st;
  st.poset.subtasks = {act(a), act(b), act(c)};
  st.poset.orders = {{0, 2}};
  AssignmentContext ctx{st.poset, f.table, f.world};
  st.plan = tbcn(ctx);
  REQUIRE(validate_plan(st.plan, ctx).empty());

  st.now = st.plan.entry_for(0)->end;
  for (const auto& e : st.plan.entries) {
    if (e.end <= st.now) st.finished.insert(e.subtask);
    else if (e.start <= st.now) st.in_progress.insert(e.subtask);
  }
  REQUIRE(st.finished.count(0));

  SUBCASE("true leaves the plan alone") {
    auto [next, report] = adapt(st, parse_formula("true", f.table), f.table, f.world);
    CHECK(report.essential_conflicts.empty());
    CHECK(report.removed.empty());
    CHECK(next.poset == st.poset);
    CHECK(next.plan.entries.size() == st.plan.entries.size());
  }

  SUBCASE("a contingent task adds subtasks after the committed ones") {
    Formula phi = parse_formula("F(K0_r0_r0 & F K2_r4_r4)", f.table);
    auto [next, report] = adapt(st, phi, f.table, f.world);
    CHECK(next.poset.size() > st.poset.size());
    for (std::size_t i : st.committed()) {
      REQUIRE(next.plan.entry_for(i));
      CHECK(next.plan.entry_for(i)->start == st.plan.entry_for(i)->start);
      CHECK(next.plan.entry_for(i)->crew.size() == st.plan.entry_for(i)->crew.size());
      CHECK_FALSE(report.removed.count(i));
    }
    // The finished K0_r0_r0 is not reused: a fresh one is appended.
    std::size_t k0 = 0;
    for (const auto& s : next.poset.subtasks) k0 += s.action.pos.contains(a);
    CHECK(k0 == 2);
    AssignmentContext nctx{next.poset, f.table, f.world, st.now};
    auto v = validate_plan(next.plan, nctx, {true, st.now});
    for (const auto& x : v) INFO(x.what);
    CHECK(v.empty());
    for (const auto& e : next.plan.entries) {
      if (e.subtask >= st.poset.size()) CHECK(e.start >= st.now);
    }
    CHECK(std::includes(report.removed.begin(), report.removed.end(), report.essential_conflicts.begin(),
                        report.essential_conflicts.end()));
  }

  SUBCASE("an unplannable contingent task is an error and the state survives") {
    Formula phi = parse_formula("F(K0_r0_r0 & K0_r2_r2)", f.table);
    CHECK_THROWS_AS(adapt(st, phi, f.table, f.world), AdaptationError);
  }
}
