#include "doctest.h"
#include "support.hpp"

#include "rposet/product.hpp"

using namespace rposet;
using testsupport::brute_force_satisfies;
using testsupport::for_each_word;

namespace {

Subtask st(PropSet pos, PropSet neg = {}, PropSet avoid = {}) {
  return {Term{std::move(pos), std::move(neg)}, std::move(avoid)};
}

struct Hospital {
  PropTable table;
  PropId d, c, m, g1;
  RPoset b1, b2;

  Hospital() {
    d = table.intern("D_w7_w7");
    c = table.intern("C_w7_w7");
    m = table.intern("M_w7_w7");
    g1 = table.intern("G1_w7_e3");
    b1 = best("F D_w7_w7 & F(C_w7_w7 & !M_w7_w7 & F M_w7_w7)");
    b2 = best("F(C_w7_w7 & !G1_w7_e3 & F G1_w7_e3) & (!D_w7_w7 U C_w7_w7)");
  }

  RPoset best(const char* text) {
    auto ex = compute_posets(normalize(translate(parse_formula(text, table))).first);
    const RPoset* single = testsupport::first_single_action(ex.posets);
    REQUIRE(single);
    return *single;
  }
};

std::size_t find_action(const RPoset& p, PropId prop) {
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p.subtasks[i].action.pos.contains(prop)) return i;
  }
  return p.size();
}

}  // namespace

TEST_CASE("entailment and merging of subtasks") {
  CHECK(subtask_entails(st({0, 1}, {}, {2}), st({0}, {}, {2})));
  CHECK(subtask_entails(st({0}), st({0})));
  CHECK_FALSE(subtask_entails(st({0}), st({0}, {}, {2})));

  auto merged = merge_subtasks(st({0}, {1}, {2}), st({0}, {}, {3}));
  REQUIRE(merged);
  CHECK(*merged == st({0}, {1}, {2, 3}));
  CHECK(merge_subtasks(st({0}), Subtask{}) == st({0}));
  CHECK_FALSE(merge_subtasks(st({0}), st({}, {0})));
}

TEST_CASE("relation closure on disjoint and contradictory inputs") {
  RPoset p1, p2;
  p1.subtasks = {st({0}), st({1})};
  p1.orders = {{0, 1}};
  p2.subtasks = {st({2}), st({3})};
  p2.orders = {{0, 1}};
  SubtaskMapping m(2);
  m.target = {2, 3};
  std::vector<Subtask> all = {st({0}), st({1}), st({2}), st({3})};
  auto c = relation_closure(all, m, p1, p2);
  REQUIRE(c.status == ClosureOutcome::Status::Ok);
  CHECK(c.poset.orders == std::vector<OrderPair>{{0, 1}, {2, 3}});
  CHECK(c.poset.subtasks == all);

  RPoset a, b;
  a.subtasks = {st({1}, {}, {0})};
  b.subtasks = {st({0}, {}, {1})};
  SubtaskMapping mb(1);
  mb.target = {1};
  auto cyc = relation_closure({a.subtasks[0], b.subtasks[0]}, mb, a, b);
  CHECK(cyc.status == ClosureOutcome::Status::Cycle);
}

TEST_CASE("product with the empty poset is the identity") {
  RPoset p1;
  p1.subtasks = {st({0}, {}, {2}), st({1})};
  p1.orders = {{0, 1}};
  auto r = poset_product(p1, RPoset{});
  REQUIRE(r.posets.size() == 1);
  CHECK(r.posets[0] == p1);
  CHECK(r.status == ProductStatus::Complete);
}

TEST_CASE("products of the two hospital base posets") {
  Hospital h;
  REQUIRE(h.b1.size() == 3);
  REQUIRE(h.b2.size() == 2);
  CHECK(score(h.b2) == PosetScore{2, 1});
  ProductOptions single;
  single.admissible = [](const Subtask& s) { return s.action.pos.size() <= 1; };
  auto r = poset_product(h.b1, h.b2, {}, single);
  REQUIRE(r.status == ProductStatus::Complete);
  auto merged_check = [&](const RPoset& p) {
    for (std::size_t i = 0; i < p.size(); ++i) {
      const auto& a = p.subtasks[i].action;
      if (a.pos == PropSet{h.c} && a.neg.contains(h.m) && a.neg.contains(h.g1)) return i;
    }
    return p.size();
  };
  const RPoset* merged = nullptr;
  const RPoset* separate = nullptr;
  for (const auto& p : r.posets) {
    if (p.size() == 4 && merged_check(p) < 4 && !merged) merged = &p;
    if (p.size() == 5 && !separate) separate = &p;
  }
  REQUIRE(merged);
  REQUIRE(separate);
  // The merged check subtask avoids disinfection beforehand, so it must come
  // before the disinfection subtask.
  const std::size_t wd = find_action(*merged, h.d), wc = merged_check(*merged);
  CHECK(precedes(*merged, wc, wd));
  CHECK(merged->subtasks[wc].avoid_before.contains(h.d));
  CHECK(r.posets.front().size() == 4);
  CHECK(merged == &r.posets.front());

  ChainOptions one_behavior;
  one_behavior.admissible = [](const Subtask& s) { return s.action.pos.size() <= 1; };
  ChainResult chain = product_chain({{h.b1}, {h.b2}}, {}, one_behavior);
  REQUIRE(chain.first);
  CHECK(chain.first->size() == 4);
  CHECK(precedes(*chain.first, find_action(*chain.first, h.c), find_action(*chain.first, h.d)));
  CHECK(chain.status == ProductStatus::Complete);
}

TEST_CASE("product soundness and completeness on random pairs") {
  std::mt19937_64 rng(41);
  auto symbols = testsupport::symbols_over(3);
  for (int i = 0; i < 40; ++i) {
    RPoset p1 = testsupport::random_poset(rng, 2, 3);
    RPoset p2 = testsupport::random_poset(rng, 2, 3);
    ProductOptions opts;
    opts.keep_pruned = true;
    auto r = poset_product(p1, p2, {}, opts);
    for_each_word(symbols, 4, [&](const Word& w) {
      const bool both = brute_force_satisfies(w, p1) && brute_force_satisfies(w, p2);
      bool some = false;
      for (const auto& p : r.posets) {
        if (brute_force_satisfies(w, p)) {
          REQUIRE(both);
          some = true;
        }
      }
      if (both && !some) {
        // Only the simultaneity corner pruned by closure may lose words.
        bool exempt = false;
        for (const auto& c : r.pruned) exempt = exempt || brute_force_satisfies(w, c);
        CHECK(exempt);
      }
    });
    for (const auto& p : r.posets) {
      auto reach = order_closure(p.size(), p.orders);
      for (auto [h, l] : p1.orders) CHECK(reach[h][l]);
    }
  }
}

TEST_CASE("product search is deterministic and anytime-monotone") {
  std::mt19937_64 rng(42);
  for (int i = 0; i < 20; ++i) {
    RPoset p1 = testsupport::random_poset(rng, 3, 3);
    RPoset p2 = testsupport::random_poset(rng, 3, 3);
    auto a = poset_product(p1, p2);
    auto b = poset_product(p1, p2);
    CHECK(a.posets == b.posets);
    auto small = poset_product(p1, p2, SearchBudget{5, std::nullopt});
    for (const auto& p : small.posets) {
      CHECK(std::find(a.posets.begin(), a.posets.end(), p) != a.posets.end());
    }
    if (small.status == ProductStatus::Complete) CHECK(small.posets == a.posets);
  }
}

TEST_CASE("committed subtasks are never merge targets") {
  RPoset p1, p2;
  p1.subtasks = {st({0}), st({1})};
  p2.subtasks = {st({0})};
  ProductOptions opts;
  opts.committed = {true, false};
  auto r = poset_product(p1, p2, {}, opts);
  bool appended = false;
  for (const auto& p : r.posets) {
    CHECK(p.subtasks[0] == st({0}));
    appended = appended || p.size() == 3;
  }
  CHECK(appended);
  auto free = poset_product(p1, p2);
  CHECK(free.posets.front().subtasks[0] == st({0}));
  CHECK(free.posets.front().size() == 2);
}

TEST_CASE("product chain over several sets") {
  std::mt19937_64 rng(43);
  std::vector<std::vector<RPoset>> sets;
  for (int i = 0; i < 4; ++i) sets.push_back({testsupport::random_poset(rng, 2, 4)});
  ChainResult r = product_chain(sets, SearchBudget{100000, std::nullopt}, {4, 3, nullptr});
  if (r.first) {
    auto symbols = testsupport::symbols_over(4);
    std::mt19937_64 wr(44);
    for (int k = 0; k < 2000; ++k) {
      Word w = testsupport::random_word(wr, 5, 4);
      if (!word_satisfies(w, *r.first)) continue;
      for (const auto& s : sets) CHECK(word_satisfies(w, s.front()));
    }
  } else {
    CHECK(r.infeasible_step.has_value());
  }
  ChainResult single = product_chain({{sets[0]}});
  REQUIRE(single.first);
  CHECK(*single.first == sets[0][0]);
}
