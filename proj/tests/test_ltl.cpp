#include "doctest.h"
#include "support.hpp"

using namespace rposet;
using testsupport::make_table;

TEST_CASE("parse builds the expected tree and node count") {
  PropTable t;
  for (const char* a : {"D_w7_w7", "C_w7_w7", "M_w7_w7"}) t.intern(a);
  Formula f = parse_formula("F D_w7_w7 & F(C_w7_w7 & !M_w7_w7 & F M_w7_w7)", t);
  REQUIRE(f.op() == Op::And);
  REQUIRE(f.children().size() == 2);
  CHECK(f.children()[0].op() == Op::Eventually);
  const Formula& inner = f.children()[1].children()[0];
  CHECK(inner.op() == Op::And);
  CHECK(inner.children().size() == 3);
  CHECK(inner.children()[1].op() == Op::NotAtom);
  CHECK(f.length() == 9);

  Formula tr = parse_formula("true", t);
  CHECK(tr.op() == Op::True);
  CHECK(tr.length() == 1);
}

TEST_CASE("precedence: F binds tighter than U, U tighter than &, & tighter than |") {
  PropTable t = make_table(3);
  Formula f = parse_formula("F p0 U p1 & p2 | p0", t);
  REQUIRE(f.op() == Op::Or);
  const Formula& lhs = f.children()[0];
  REQUIRE(lhs.op() == Op::And);
  REQUIRE(lhs.children()[0].op() == Op::Until);
  CHECK(lhs.children()[0].children()[0].op() == Op::Eventually);
}

TEST_CASE("parse errors carry their kind") {
  PropTable t = make_table(1);
  auto kind_of = [&](const char* text) {
    try {
      parse_formula(text, t);
    } catch (const ParseError& e) {
      return e.kind();
    }
    FAIL("expected a parse error");
    return ParseError::Kind::Syntax;
  };
  CHECK(kind_of("!(F p0)") == ParseError::Kind::NegatedNonAtom);
  CHECK(kind_of("!F p0") == ParseError::Kind::NegatedNonAtom);
  CHECK(kind_of("F q") == ParseError::Kind::UnknownAtom);
  CHECK(kind_of("(p0") == ParseError::Kind::Syntax);
  CHECK(kind_of("p0 &") == ParseError::Kind::Syntax);
  CHECK(kind_of("p0 # p0") == ParseError::Kind::Syntax);

  PropTable open;
  Formula f = parse_formula("F x & !y", open, AtomPolicy::Declare);
  CHECK(open.size() == 2);
  CHECK(f.length() == 4);
}

TEST_CASE("evaluate on hand-checked words") {
  PropTable t;
  const PropId a = t.intern("a"), b = t.intern("b");
  Formula fa = parse_formula("F a", t);
  CHECK(evaluate(fa, {{}, {a}}));
  CHECK_FALSE(evaluate(fa, {}));
  Formula until = parse_formula("!a U b", t);
  CHECK_FALSE(evaluate(until, {{a}, {b}}));
  CHECK(evaluate(until, {{}, {b}}));
  CHECK(evaluate(parse_formula("true", t), {}));
  CHECK_FALSE(evaluate(parse_formula("X true", t), {}));
  CHECK(evaluate(parse_formula("X true", t), {{}}));
  CHECK_FALSE(evaluate(parse_formula("X a", t), {{a}}));

  PropTable h;
  const PropId d = h.intern("D_w7_w7"), c = h.intern("C_w7_w7"), m = h.intern("M_w7_w7");
  Formula b1 = parse_formula("F D_w7_w7 & F(C_w7_w7 & !M_w7_w7 & F M_w7_w7)", h);
  CHECK(evaluate(b1, {{c}, {d}, {m}}));
  CHECK_FALSE(evaluate(b1, {{m}, {c}, {d}}));
}

TEST_CASE("print then parse is the identity on random trees") {
  std::mt19937_64 rng(11);
  PropTable t = make_table(4);
  for (int i = 0; i < 500; ++i) {
    Formula f = testsupport::random_formula(rng, 12, 4);
    const std::string text = to_string(f, t);
    Formula g = parse_formula(text, t);
    CHECK_MESSAGE(f == g, text);
    CHECK(to_string(g, t) == text);
  }
}

TEST_CASE("conjunction and eventually laws on random instances") {
  std::mt19937_64 rng(12);
  for (int i = 0; i < 1000; ++i) {
    Formula f1 = testsupport::random_formula(rng, 8, 3);
    Formula f2 = testsupport::random_formula(rng, 8, 3);
    Word w = testsupport::random_word(rng, 6, 3);
    CHECK(evaluate(Formula::conj({f1, f2}), w) == (evaluate(f1, w) && evaluate(f2, w)));
    // F needs a position to quantify over, so the empty word is excluded.
    if (!w.empty() && evaluate(f1, w)) {
      CHECK(evaluate(Formula::eventually(f1), w));
    }
  }
}

TEST_CASE("atoms collects every proposition") {
  PropTable t = make_table(4);
  Formula f = parse_formula("F(p0 & !p2) U X p3", t);
  CHECK(atoms(f) == PropSet{0, 2, 3});
}
