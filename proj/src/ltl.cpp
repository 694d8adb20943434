#include "rposet/ltl.hpp"

#include <cctype>
#include <functional>
#include <unordered_map>

namespace rposet {

struct Formula::Node {
  Op op = Op::True;
  PropId prop = 0;
  std::vector<Formula> children;
  std::size_t length = 1;
};

Formula::Formula() : node_(truth().node_) {}
Formula::Formula(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

Formula Formula::truth() {
  static const auto node = [] {
    auto n = std::make_shared<Node>();
    n->op = Op::True;
    return std::shared_ptr<const Node>(std::move(n));
  }();
  return Formula(node);
}

Formula Formula::atom(PropId p) {
  auto n = std::make_shared<Node>();
  n->op = Op::Atom;
  n->prop = p;
  return Formula(std::move(n));
}

Formula Formula::not_atom(PropId p) {
  auto n = std::make_shared<Node>();
  n->op = Op::NotAtom;
  n->prop = p;
  return Formula(std::move(n));
}

namespace {

template <typename NodeT>
std::shared_ptr<const NodeT> build(Op op, std::vector<Formula> children) {
  auto n = std::make_shared<NodeT>();
  n->op = op;
  n->length = 1;
  for (const auto& c : children) n->length += c.length();
  n->children = std::move(children);
  return n;
}

}  // namespace

Formula Formula::conj(std::vector<Formula> children) {
  if (children.empty()) return truth();
  if (children.size() == 1) return children.front();
  return Formula(build<Node>(Op::And, std::move(children)));
}

Formula Formula::disj(std::vector<Formula> children) {
  if (children.size() == 1) return children.front();
  if (children.empty()) throw std::invalid_argument("empty disjunction");
  return Formula(build<Node>(Op::Or, std::move(children)));
}

Formula Formula::next(Formula f) { return Formula(build<Node>(Op::Next, {std::move(f)})); }

Formula Formula::eventually(Formula f) {
  return Formula(build<Node>(Op::Eventually, {std::move(f)}));
}

Formula Formula::until(Formula lhs, Formula rhs) {
  return Formula(build<Node>(Op::Until, {std::move(lhs), std::move(rhs)}));
}

Op Formula::op() const { return node_->op; }
PropId Formula::prop() const { return node_->prop; }
const std::vector<Formula>& Formula::children() const { return node_->children; }
std::size_t Formula::length() const { return node_->length; }

bool operator==(const Formula& a, const Formula& b) {
  if (a.node_ == b.node_) return true;
  if (a.op() != b.op() || a.length() != b.length()) return false;
  if ((a.op() == Op::Atom || a.op() == Op::NotAtom) && a.prop() != b.prop()) return false;
  return a.children() == b.children();
}

ParseError::ParseError(Kind kind, std::size_t position, const std::string& what)
    : std::runtime_error(what + " at offset " + std::to_string(position)),
      kind_(kind),
      position_(position) {}

namespace {

enum class Tok { Ident, True, Not, And, Or, Until, Eventually, Next, LParen, RParen, End };

struct Token {
  Tok kind;
  std::string text;
  std::size_t pos;
};

std::vector<Token> lex(std::string_view s) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < s.size()) {
    const char c = s[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    const std::size_t start = i;
    switch (c) {
      case '!': out.push_back({Tok::Not, "!", start}); ++i; continue;
      case '&': out.push_back({Tok::And, "&", start}); ++i; continue;
      case '|': out.push_back({Tok::Or, "|", start}); ++i; continue;
      case '(': out.push_back({Tok::LParen, "(", start}); ++i; continue;
      case ')': out.push_back({Tok::RParen, ")", start}); ++i; continue;
      default: break;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      while (i < s.size() && (std::isalnum(static_cast<unsigned char>(s[i])) || s[i] == '_')) ++i;
      std::string word(s.substr(start, i - start));
      Tok kind = Tok::Ident;
      if (word == "true") kind = Tok::True;
      else if (word == "F") kind = Tok::Eventually;
      else if (word == "X") kind = Tok::Next;
      else if (word == "U") kind = Tok::Until;
      out.push_back({kind, std::move(word), start});
      continue;
    }
    throw ParseError(ParseError::Kind::Syntax, start,
                     std::string("unexpected character '") + c + "'");
  }
  out.push_back({Tok::End, "", s.size()});
  return out;
}

class Parser {
public:
  Parser(std::string_view text, PropTable& table, AtomPolicy policy)
      : tokens_(lex(text)), table_(table), policy_(policy) {}

  Formula parse() {
    Formula f = formula();
    if (peek().kind != Tok::End) fail("trailing input '" + peek().text + "'");
    return f;
  }

private:
  const Token& peek() const { return tokens_[pos_]; }
  const Token& take() { return tokens_[pos_++]; }

  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError(ParseError::Kind::Syntax, peek().pos, what);
  }

  Formula formula() {
    std::vector<Formula> parts{term()};
    while (peek().kind == Tok::Or) {
      take();
      parts.push_back(term());
    }
    return Formula::disj(std::move(parts));
  }

  Formula term() {
    std::vector<Formula> parts{factor()};
    while (peek().kind == Tok::And) {
      take();
      parts.push_back(factor());
    }
    return Formula::conj(std::move(parts));
  }

  Formula factor() {
    Formula lhs = unary();
    if (peek().kind == Tok::Until) {
      take();
      return Formula::until(std::move(lhs), unary());
    }
    return lhs;
  }

  Formula unary() {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::Not: {
        take();
        if (peek().kind != Tok::Ident) {
          throw ParseError(ParseError::Kind::NegatedNonAtom, peek().pos,
                           "negation may only precede an atom");
        }
        return Formula::not_atom(resolve(take()));
      }
      case Tok::Eventually: take(); return Formula::eventually(unary());
      case Tok::Next: take(); return Formula::next(unary());
      case Tok::LParen: {
        take();
        Formula inner = formula();
        if (peek().kind != Tok::RParen) fail("expected ')'");
        take();
        return inner;
      }
      case Tok::True: take(); return Formula::truth();
      case Tok::Ident: return Formula::atom(resolve(take()));
      case Tok::End: fail("unexpected end of input");
      default: fail("unexpected token '" + t.text + "'");
    }
  }

  PropId resolve(const Token& t) {
    if (policy_ == AtomPolicy::Declare) return table_.intern(t.text);
    if (auto id = table_.find(t.text)) return *id;
    throw ParseError(ParseError::Kind::UnknownAtom, t.pos, "unknown atom '" + t.text + "'");
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  PropTable& table_;
  AtomPolicy policy_;
};

void print(const Formula& f, const PropTable& table, std::string& out) {
  auto join = [&](const char* sep) {
    out += "(";
    for (std::size_t i = 0; i < f.children().size(); ++i) {
      if (i) out += sep;
      print(f.children()[i], table, out);
    }
    out += ")";
  };
  switch (f.op()) {
    case Op::True: out += "true"; break;
    case Op::Atom: out += table.name(f.prop()); break;
    case Op::NotAtom: out += "!" + table.name(f.prop()); break;
    case Op::And: join(" & "); break;
    case Op::Or: join(" | "); break;
    case Op::Next: out += "X "; print(f.children()[0], table, out); break;
    case Op::Eventually: out += "F "; print(f.children()[0], table, out); break;
    case Op::Until: join(" U "); break;
  }
}

}  // namespace

Formula parse_formula(std::string_view text, PropTable& table, AtomPolicy policy) {
  return Parser(text, table, policy).parse();
}

std::string to_string(const Formula& f, const PropTable& table) {
  std::string out;
  print(f, table, out);
  return out;
}

std::vector<bool> evaluate_suffixes(const Formula& f, const Word& w) {
  const std::size_t n = w.size();
  std::vector<bool> v(n + 1, false);
  switch (f.op()) {
    case Op::True:
      v.assign(n + 1, true);
      break;
    case Op::Atom:
      for (std::size_t i = 0; i < n; ++i) v[i] = w[i].contains(f.prop());
      break;
    case Op::NotAtom:
      for (std::size_t i = 0; i < n; ++i) v[i] = !w[i].contains(f.prop());
      break;
    case Op::And:
    case Op::Or: {
      const bool is_and = f.op() == Op::And;
      v.assign(n + 1, is_and);
      for (const auto& c : f.children()) {
        auto cv = evaluate_suffixes(c, w);
        for (std::size_t i = 0; i <= n; ++i) v[i] = is_and ? (v[i] && cv[i]) : (v[i] || cv[i]);
      }
      break;
    }
    case Op::Next: {
      auto cv = evaluate_suffixes(f.children()[0], w);
      for (std::size_t i = 0; i < n; ++i) v[i] = cv[i + 1];
      break;
    }
    case Op::Eventually: {
      auto cv = evaluate_suffixes(f.children()[0], w);
      bool seen = false;
      for (std::size_t i = n; i-- > 0;) {
        seen = seen || cv[i];
        v[i] = seen;
      }
      break;
    }
    case Op::Until: {
      auto lhs = evaluate_suffixes(f.children()[0], w);
      auto rhs = evaluate_suffixes(f.children()[1], w);
      bool holds = false;
      for (std::size_t i = n; i-- > 0;) {
        holds = rhs[i] || (lhs[i] && holds);
        v[i] = holds;
      }
      break;
    }
  }
  return v;
}

bool evaluate(const Formula& f, const Word& w) { return evaluate_suffixes(f, w)[0]; }

PropSet atoms(const Formula& f) {
  PropSet out;
  std::function<void(const Formula&)> walk = [&](const Formula& g) {
    if (g.op() == Op::Atom || g.op() == Op::NotAtom) out.insert(g.prop());
    for (const auto& c : g.children()) walk(c);
  };
  walk(f);
  return out;
}

}  // namespace rposet
