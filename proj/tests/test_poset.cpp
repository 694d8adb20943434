#include "doctest.h"
#include "support.hpp"

#include <algorithm>
#include <numeric>

using namespace rposet;
using testsupport::brute_force_satisfies;
using testsupport::for_each_word;
using testsupport::make_table;

namespace {

RPoset two_step() {
  RPoset p;
  p.subtasks.push_back({Term{{0}, {}}, {}});
  p.subtasks.push_back({Term{{1}, {}}, {0}});
  p.orders = {{0, 1}};
  return p;
}

std::size_t max_size(const std::vector<RPoset>& ps) {
  std::size_t m = 0;
  for (const auto& p : ps) m = std::max(m, p.size());
  return m;
}

// Every total order of the subtasks that respects ⪯, as index sequences.
std::vector<std::vector<std::size_t>> linear_extensions(const RPoset& p) {
  std::vector<std::size_t> perm(p.size());
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<std::vector<std::size_t>> out;
  do {
    std::vector<std::size_t> pos(p.size());
    for (std::size_t i = 0; i < perm.size(); ++i) pos[perm[i]] = i;
    bool ok = std::all_of(p.orders.begin(), p.orders.end(),
                          [&](auto pr) { return pos[pr.first] < pos[pr.second]; });
    if (ok) out.push_back(perm);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return out;
}

}  // namespace

TEST_CASE("word_satisfies on hand-checked instances") {
  RPoset p = two_step();
  // The second subtask forbids p0 at every earlier position, including the
  // position that served the first subtask.
  CHECK_FALSE(word_satisfies({{0}, {1}}, p));
  CHECK_FALSE(word_satisfies({{1}, {0}}, p));
  // avoid_before is strict: p0 at the subtask's own position is fine.
  CHECK(word_satisfies({{0, 1}}, p));

  RPoset q = two_step();
  q.subtasks[1].avoid_before = {2};
  CHECK(word_satisfies({{0}, {1}}, q));
  CHECK(word_satisfies({{0}, {1, 2}}, q));
  CHECK_FALSE(word_satisfies({{2}, {0}, {1}}, q));
  CHECK_FALSE(word_satisfies({{1}, {0}}, q));

  RPoset ex;
  ex.subtasks.push_back({Term{{0}, {}}, {}});
  ex.subtasks.push_back({Term{{1}, {}}, {}});
  ex.excludes = {{0, 1}};
  CHECK_FALSE(word_satisfies({{0, 1}}, ex));
  CHECK(word_satisfies({{0}, {1}}, ex));
  CHECK(word_satisfies({}, RPoset{}));
  CHECK_FALSE(word_satisfies({}, ex));
}

TEST_CASE("word_satisfies matches exhaustive placement search") {
  std::mt19937_64 rng(31);
  for (int i = 0; i < 300; ++i) {
    RPoset p = testsupport::random_poset(rng, 4, 3);
    for (int k = 0; k < 60; ++k) {
      Word w = testsupport::random_word(rng, 5, 3);
      REQUIRE(word_satisfies(w, p) == brute_force_satisfies(w, p));
    }
  }
}

TEST_CASE("language_included agrees with bounded enumeration") {
  std::mt19937_64 rng(32);
  auto symbols = testsupport::symbols_over(3);
  for (int i = 0; i < 60; ++i) {
    RPoset a = testsupport::random_poset(rng, 3, 3);
    RPoset b = testsupport::random_poset(rng, 2, 3);
    bool bounded = true;
    for_each_word(symbols, 4, [&](const Word& w) {
      if (brute_force_satisfies(w, a) && !brute_force_satisfies(w, b)) bounded = false;
    });
    // A bounded counterexample refutes inclusion; the converse needs the exact check.
    if (!bounded) CHECK_FALSE(language_included(a, b));
    if (language_included(a, b)) CHECK(bounded);
  }
}

TEST_CASE("canonicalize keeps covering pairs and minimal groups") {
  RPoset p;
  for (int i = 0; i < 3; ++i) p.subtasks.push_back({Term{{PropId(i)}, {}}, {}});
  p.orders = {{0, 1}, {1, 2}, {0, 2}};
  p.excludes = {{2, 1, 0}, {1, 0}, {0, 1}, {2}};
  canonicalize(p);
  CHECK(p.orders == std::vector<OrderPair>{{0, 1}, {1, 2}});
  CHECK(p.excludes == std::vector<std::vector<std::size_t>>{{0, 1}});
  CHECK(is_acyclic(3, p.orders));
  CHECK_FALSE(is_acyclic(2, {{0, 1}, {1, 0}}));
}

TEST_CASE("compute_posets on small formulas") {
  PropTable t = make_table(2);
  auto fab = compute_posets(normalize(translate(parse_formula("F p0 & F p1", t))).first);
  CHECK(fab.complete);
  bool unordered_pair = std::any_of(fab.posets.begin(), fab.posets.end(), [](const RPoset& p) {
    return p.size() == 2 && p.orders.empty();
  });
  CHECK(unordered_pair);

  auto top = compute_posets(normalize(translate(parse_formula("true", t))).first);
  REQUIRE(top.posets.size() == 1);
  CHECK(top.posets[0].size() == 0);
}

TEST_CASE("compute_posets on the disinfection formula") {
  PropTable t;
  const PropId d = t.intern("D_w7_w7"), c = t.intern("C_w7_w7"), m = t.intern("M_w7_w7");
  Formula f = parse_formula("F D_w7_w7 & F(C_w7_w7 & !M_w7_w7 & F M_w7_w7)", t);
  auto ex = compute_posets(normalize(translate(f)).first);
  const RPoset* single = testsupport::first_single_action(ex.posets);
  REQUIRE(single);
  const RPoset& best = *single;
  REQUIRE(best.size() == 3);
  auto find = [&](PropId p) {
    for (std::size_t i = 0; i < best.size(); ++i) {
      if (best.subtasks[i].action.pos == PropSet{p}) return i;
    }
    FAIL("missing subtask");
    return std::size_t(0);
  };
  const std::size_t wd = find(d), wc = find(c), wm = find(m);
  CHECK(best.subtasks[wc].action.neg == PropSet{m});
  CHECK(precedes(best, wc, wm));
  CHECK_FALSE(precedes(best, wd, wc));
  CHECK_FALSE(precedes(best, wc, wd));
  CHECK(score(best) == PosetScore{3, 1});
  CHECK(ex.complete);
}

TEST_CASE("compute_posets is sound and complete on random formulas") {
  std::mt19937_64 rng(33);
  auto symbols = testsupport::symbols_over(3);
  int complete_cases = 0;
  for (int i = 0; i < 60; ++i) {
    Formula f = testsupport::random_formula(rng, 7, 3);
    Nfa nfa = normalize(translate(f)).first;
    auto ex = compute_posets(nfa);
    const std::size_t len = max_size(ex.posets) + 2;
    for_each_word(symbols, std::min<std::size_t>(len, 4), [&](const Word& w) {
      bool covered = false;
      for (const auto& p : ex.posets) {
        if (word_satisfies(w, p)) {
          REQUIRE(evaluate(f, w));
          covered = true;
        }
      }
      if (ex.complete && evaluate(f, w)) REQUIRE(covered);
    });
    complete_cases += ex.complete;
    for (const auto& p : ex.posets) {
      for (const auto& order : linear_extensions(p)) {
        Word canonical;
        for (auto idx : order) canonical.push_back(p.subtasks[idx].action.pos);
        CHECK(accepts(nfa, canonical));
      }
    }
  }
  CHECK(complete_cases > 20);
}

TEST_CASE("score orders by subtasks then orders") {
  RPoset empty;
  CHECK(score(empty) == PosetScore{0, 0});
  CHECK(PosetScore{2, 1} < PosetScore{3, 0});
  CHECK(PosetScore{4, 2} < PosetScore{5, 1});
  std::vector<RPoset> ps{two_step(), empty};
  sort_by_score(ps);
  CHECK(ps.front().size() == 0);
}

TEST_CASE("dot and text serialization") {
  PropTable t = make_table(2);
  CHECK(to_dot(RPoset{}, t) == "digraph rposet {\n}\n");
  RPoset p = two_step();
  p.excludes = {{0, 1}};
  const std::string dot = to_dot(p, t);
  CHECK(dot.find("w0 -> w1;") != std::string::npos);
  CHECK(dot.find("color=red") != std::string::npos);
  CHECK(serialize(p, t) ==
        "subtasks 2\n"
        "subtask 0 pos={p0} neg={} avoid={}\n"
        "subtask 1 pos={p1} neg={} avoid={p0}\n"
        "order 0 1\n"
        "exclude 0 1\n");
}

TEST_CASE("saturate adds label-implied relations only") {
  std::mt19937_64 rng(34);
  auto symbols = testsupport::symbols_over(3);
  for (int i = 0; i < 80; ++i) {
    RPoset p = testsupport::random_poset(rng, 3, 3);
    RPoset s = p;
    saturate(s);
    CHECK(is_acyclic(s.size(), s.orders));
    for_each_word(symbols, 4, [&](const Word& w) {
      REQUIRE(word_satisfies(w, p) == word_satisfies(w, s));
    });
  }
}
