#include "rposet/automaton.hpp"
#include "rposet/inclusion.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <set>
#include <sstream>
#include <tuple>

namespace rposet {

Guard::Guard(std::vector<Term> terms) {
  std::erase_if(terms, [](const Term& t) { return !t.consistent(); });
  std::sort(terms.begin(), terms.end());
  terms.erase(std::unique(terms.begin(), terms.end()), terms.end());
  // Absorption: a term implying a different term adds nothing to the disjunction.
  for (std::size_t i = 0; i < terms.size(); ++i) {
    bool absorbed = false;
    for (std::size_t j = 0; j < terms.size() && !absorbed; ++j) {
      absorbed = i != j && terms[i].implies(terms[j]);
    }
    if (!absorbed) terms_.push_back(terms[i]);
  }
}

bool Guard::is_top() const { return terms_.size() == 1 && terms_.front().is_top(); }

bool Guard::satisfied_by(const PropSet& symbol) const {
  return std::any_of(terms_.begin(), terms_.end(),
                     [&](const Term& t) { return t.satisfied_by(symbol); });
}

bool Guard::term_implies(const Term& t) const {
  return std::any_of(terms_.begin(), terms_.end(), [&](const Term& u) { return t.implies(u); });
}

bool Guard::implies(const Guard& other) const {
  return std::all_of(terms_.begin(), terms_.end(),
                     [&](const Term& t) { return other.term_implies(t); });
}

Guard Guard::operator|(const Guard& other) const {
  std::vector<Term> all = terms_;
  all.insert(all.end(), other.terms_.begin(), other.terms_.end());
  return Guard(std::move(all));
}

StateId Nfa::add_state(bool accepting) {
  accepting_.push_back(accepting);
  out_.emplace_back();
  return static_cast<StateId>(accepting_.size() - 1);
}

void Nfa::add_edge(StateId src, const Guard& guard, StateId dst) {
  if (guard.unsatisfiable()) return;
  for (std::size_t idx : out_.at(src)) {
    if (edges_[idx].dst == dst) {
      edges_[idx].guard = edges_[idx].guard | guard;
      return;
    }
  }
  out_[src].push_back(edges_.size());
  edges_.push_back({src, guard, dst});
}

void Nfa::remove_edge(StateId src, StateId dst) {
  std::vector<Edge> kept;
  for (auto& e : edges_) {
    if (!(e.src == src && e.dst == dst)) kept.push_back(std::move(e));
  }
  edges_ = std::move(kept);
  for (auto& o : out_) o.clear();
  for (std::size_t i = 0; i < edges_.size(); ++i) out_[edges_[i].src].push_back(i);
}

const Guard* Nfa::self_loop(StateId s) const {
  for (std::size_t idx : out_.at(s)) {
    if (edges_[idx].dst == s) return &edges_[idx].guard;
  }
  return nullptr;
}

PropSet Nfa::alphabet() const {
  PropSet out;
  for (const auto& e : edges_) {
    for (const auto& t : e.guard.terms()) {
      out |= t.pos;
      out |= t.neg;
    }
  }
  return out;
}

Nfa Nfa::restricted(const std::vector<bool>& keep) const {
  Nfa out;
  std::vector<StateId> remap(state_count(), 0);
  for (StateId s = 0; s < state_count(); ++s) {
    if (keep[s]) remap[s] = out.add_state(accepting_[s]);
  }
  for (const auto& e : edges_) {
    if (keep[e.src] && keep[e.dst]) out.add_edge(remap[e.src], e.guard, remap[e.dst]);
  }
  std::vector<StateId> init;
  for (StateId s : initial_) {
    if (keep[s]) init.push_back(remap[s]);
  }
  out.set_initial(std::move(init));
  return out;
}

namespace {

// Hash-consed subformula closure; obligations are sets of closure indices.
struct Sub {
  Op op;
  PropId prop;
  std::vector<int> kids;
};

using Obligations = std::vector<int>;

struct Move {
  Term term;
  Obligations next;
  friend bool operator==(const Move&, const Move&) = default;
  friend auto operator<=>(const Move&, const Move&) = default;
};

Obligations merge(const Obligations& a, const Obligations& b) {
  Obligations out;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

class Tableau {
public:
  Tableau(const TranslateOptions& options) : options_(options) {}

  int add(const Formula& f) {
    std::vector<int> kids;
    for (const auto& c : f.children()) kids.push_back(add(c));
    const PropId prop = (f.op() == Op::Atom || f.op() == Op::NotAtom) ? f.prop() : 0;
    auto key = std::make_tuple(static_cast<int>(f.op()), prop, kids);
    if (auto it = index_.find(key); it != index_.end()) return it->second;
    const int id = static_cast<int>(subs_.size());
    subs_.push_back({f.op(), prop, std::move(kids)});
    index_.emplace(std::move(key), id);
    return id;
  }

  // Splits a conjunction of subformulas into disjunctive alternatives whose
  // members are literals or temporal operators.
  std::vector<Obligations> alternatives(const Obligations& in) {
    std::vector<Obligations> acc{{}};
    for (int s : in) acc = cross(acc, alternatives_of(s));
    return acc;
  }

  std::vector<Move> expand_state(const Obligations& state) {
    std::vector<Move> acc{{Term{}, {}}};
    for (int s : state) {
      acc = product(acc, expand(s));
      charge(acc.size());
    }
    return acc;
  }

  void charge(std::size_t amount) {
    work_ += amount;
    if (work_ > options_.max_work) throw TranslationBudgetExceeded("translation work budget exceeded");
  }

private:
  std::vector<Obligations> alternatives_of(int s) {
    const Sub& sub = subs_[s];
    switch (sub.op) {
      case Op::True:
        return {{}};
      case Op::And: {
        std::vector<Obligations> acc{{}};
        for (int k : sub.kids) acc = cross(acc, alternatives_of(k));
        return acc;
      }
      case Op::Or: {
        std::vector<Obligations> out;
        for (int k : sub.kids) {
          for (auto& alt : alternatives_of(k)) out.push_back(std::move(alt));
        }
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
        return out;
      }
      default:
        return {{s}};
    }
  }

  std::vector<Obligations> cross(const std::vector<Obligations>& a,
                                 const std::vector<Obligations>& b) {
    std::vector<Obligations> out;
    for (const auto& x : a) {
      for (const auto& y : b) out.push_back(merge(x, y));
    }
    charge(out.size());
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  std::vector<Move> product(const std::vector<Move>& a, const std::vector<Move>& b) {
    std::vector<Move> out;
    for (const auto& x : a) {
      for (const auto& y : b) {
        Term t = x.term & y.term;
        if (!t.consistent()) continue;
        out.push_back({std::move(t), merge(x.next, y.next)});
      }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  const std::vector<Move>& expand(int s) {
    if (auto it = memo_.find(s); it != memo_.end()) return it->second;
    const Sub sub = subs_[s];
    std::vector<Move> out;
    switch (sub.op) {
      case Op::True:
        out = {{Term{}, {}}};
        break;
      case Op::Atom:
        out = {{Term{PropSet{sub.prop}, {}}, {}}};
        break;
      case Op::NotAtom:
        out = {{Term{{}, PropSet{sub.prop}}, {}}};
        break;
      case Op::And: {
        out = {{Term{}, {}}};
        for (int k : sub.kids) out = product(out, expand(k));
        break;
      }
      case Op::Or:
        for (int k : sub.kids) {
          const auto& e = expand(k);
          out.insert(out.end(), e.begin(), e.end());
        }
        break;
      case Op::Next:
        out = {{Term{}, {sub.kids[0]}}};
        break;
      case Op::Eventually:
        out = expand(sub.kids[0]);
        out.push_back({Term{}, {s}});
        break;
      case Op::Until: {
        out = expand(sub.kids[1]);
        auto keep = product(expand(sub.kids[0]), {{Term{}, {s}}});
        out.insert(out.end(), keep.begin(), keep.end());
        break;
      }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    charge(out.size());
    return memo_.emplace(s, std::move(out)).first->second;
  }

  const TranslateOptions& options_;
  std::vector<Sub> subs_;
  std::map<std::tuple<int, PropId, std::vector<int>>, int> index_;
  std::map<int, std::vector<Move>> memo_;
  std::size_t work_ = 0;
};

std::vector<bool> useful_states(const Nfa& nfa) {
  const std::size_t n = nfa.state_count();
  std::vector<bool> fwd(n, false), bwd(n, false);
  std::vector<StateId> stack(nfa.initial().begin(), nfa.initial().end());
  for (StateId s : stack) fwd[s] = true;
  while (!stack.empty()) {
    StateId s = stack.back();
    stack.pop_back();
    for (std::size_t idx : nfa.out(s)) {
      StateId d = nfa.edges()[idx].dst;
      if (!fwd[d]) {
        fwd[d] = true;
        stack.push_back(d);
      }
    }
  }
  std::vector<std::vector<StateId>> preds(n);
  for (const auto& e : nfa.edges()) preds[e.dst].push_back(e.src);
  for (StateId s = 0; s < n; ++s) {
    if (nfa.accepting(s)) {
      bwd[s] = true;
      stack.push_back(s);
    }
  }
  while (!stack.empty()) {
    StateId s = stack.back();
    stack.pop_back();
    for (StateId p : preds[s]) {
      if (!bwd[p]) {
        bwd[p] = true;
        stack.push_back(p);
      }
    }
  }
  std::vector<bool> keep(n);
  for (std::size_t s = 0; s < n; ++s) keep[s] = fwd[s] && bwd[s];
  return keep;
}

// Replaces true-guard edges q -> r (r looping on true) by a true self-loop on
// q when q's remaining edges coincide with the union of the targets' exits;
// both automata then accept exactly Sigma^* followed by those exits.
bool collapse_true_edges(Nfa& nfa, std::size_t& removed) {
  for (StateId q = 0; q < nfa.state_count(); ++q) {
    if (nfa.accepting(q) || nfa.self_loop(q)) continue;
    std::set<StateId> targets;
    std::map<StateId, std::vector<Term>> rest;
    for (std::size_t idx : nfa.out(q)) {
      const Edge& e = nfa.edges()[idx];
      const Guard* loop = nfa.self_loop(e.dst);
      if (e.guard.is_top() && !nfa.accepting(e.dst) && loop && loop->is_top()) {
        targets.insert(e.dst);
      } else {
        rest[e.dst] = e.guard.terms();
      }
    }
    if (targets.empty()) continue;
    std::map<StateId, std::vector<Term>> exits;
    for (StateId r : targets) {
      for (std::size_t idx : nfa.out(r)) {
        const Edge& e = nfa.edges()[idx];
        if (e.dst == r) continue;
        auto& terms = exits[e.dst];
        terms.insert(terms.end(), e.guard.terms().begin(), e.guard.terms().end());
      }
    }
    if (exits.size() != rest.size()) continue;
    bool same = true;
    for (const auto& [dst, terms] : exits) {
      auto it = rest.find(dst);
      same = it != rest.end() && Guard(terms) == Guard(it->second);
      if (!same) break;
    }
    if (!same) continue;
    for (StateId r : targets) nfa.remove_edge(q, r);
    nfa.add_edge(q, Guard::top(), q);
    removed += targets.size();
    return true;
  }
  return false;
}

}  // namespace

Nfa translate(const Formula& phi, const TranslateOptions& options) {
  Tableau tab(options);
  const int root = tab.add(phi);
  Nfa nfa;
  std::map<Obligations, StateId> ids;
  std::deque<Obligations> queue;
  auto state_of = [&](const Obligations& o) {
    if (auto it = ids.find(o); it != ids.end()) return it->second;
    if (ids.size() >= options.max_states) {
      throw TranslationBudgetExceeded("translation state budget exceeded");
    }
    StateId s = nfa.add_state(o.empty());
    ids.emplace(o, s);
    queue.push_back(o);
    return s;
  };
  std::vector<StateId> init;
  for (const auto& alt : tab.alternatives({root})) init.push_back(state_of(alt));
  nfa.set_initial(init);
  while (!queue.empty()) {
    Obligations cur = std::move(queue.front());
    queue.pop_front();
    const StateId src = ids.at(cur);
    std::map<StateId, std::vector<Term>> out;
    for (const auto& mv : tab.expand_state(cur)) {
      for (const auto& alt : tab.alternatives(mv.next)) out[state_of(alt)].push_back(mv.term);
    }
    for (auto& [dst, terms] : out) nfa.add_edge(src, Guard(std::move(terms)), dst);
  }
  return nfa;
}

std::pair<Nfa, HarmonyReport> normalize(const Nfa& input) {
  Nfa nfa = input.restricted(useful_states(input));
  std::size_t removed = 0;
  while (collapse_true_edges(nfa, removed)) {
  }
  nfa = nfa.restricted(useful_states(nfa));
  HarmonyReport report = check_self_loop_harmonious(nfa);
  report.removed_true_edges = removed;
  return {std::move(nfa), std::move(report)};
}

bool accepts(const Nfa& nfa, const Word& w) {
  std::vector<bool> cur(nfa.state_count(), false);
  for (StateId s : nfa.initial()) cur[s] = true;
  for (const auto& symbol : w) {
    std::vector<bool> next(nfa.state_count(), false);
    for (const auto& e : nfa.edges()) {
      if (cur[e.src] && e.guard.satisfied_by(symbol)) next[e.dst] = true;
    }
    cur = std::move(next);
  }
  for (StateId s = 0; s < nfa.state_count(); ++s) {
    if (cur[s] && nfa.accepting(s)) return true;
  }
  return false;
}

HarmonyReport check_self_loop_harmonious(const Nfa& nfa) {
  HarmonyReport report;
  auto violate = [&](const Edge& e, std::string reason) {
    report.holds = false;
    report.witnesses.push_back({e.src, e.dst, std::move(reason)});
  };
  for (const auto& e : nfa.edges()) {
    if (e.src == e.dst || nfa.accepting(e.src)) continue;
    const Guard* from = nfa.self_loop(e.src);
    const Guard* to = nfa.self_loop(e.dst);
    if (!from) {
      violate(e, "source state has no self-loop");
    } else if (!to) {
      violate(e, "target state has no self-loop");
    } else if (!from->implies(*to)) {
      violate(e, "source self-loop does not imply target self-loop");
    } else if (!e.guard.implies(*to)) {
      violate(e, "edge guard does not imply target self-loop");
    }
  }
  return report;
}

std::string guard_to_string(const Guard& g, const PropTable& table) {
  if (g.unsatisfiable()) return "false";
  std::string out;
  for (std::size_t i = 0; i < g.terms().size(); ++i) {
    if (i) out += " | ";
    const Term& t = g.terms()[i];
    if (t.is_top()) {
      out += "true";
      continue;
    }
    bool first = true;
    for (PropId p : t.pos) {
      out += (first ? "" : " & ") + table.name(p);
      first = false;
    }
    for (PropId p : t.neg) {
      out += (first ? "!" : " & !") + table.name(p);
      first = false;
    }
  }
  return out;
}

std::string to_dot(const Nfa& nfa, const PropTable& table) {
  std::ostringstream os;
  os << "digraph nfa {\n  rankdir=LR;\n";
  for (StateId s = 0; s < nfa.state_count(); ++s) {
    os << "  q" << s << " [shape=" << (nfa.accepting(s) ? "doublecircle" : "circle") << "];\n";
  }
  for (StateId s : nfa.initial()) {
    os << "  init" << s << " [shape=point];\n  init" << s << " -> q" << s << ";\n";
  }
  for (const auto& e : nfa.edges()) {
    os << "  q" << e.src << " -> q" << e.dst << " [label=\"" << guard_to_string(e.guard, table)
       << "\"];\n";
  }
  os << "}\n";
  return os.str();
}

std::vector<NfaStepper::State> NfaStepper::initial() const {
  return {nfa->initial().begin(), nfa->initial().end()};
}

void NfaStepper::step(State s, const PropSet& symbol, std::vector<State>& out) const {
  for (std::size_t idx : nfa->out(static_cast<StateId>(s))) {
    const Edge& e = nfa->edges()[idx];
    if (e.guard.satisfied_by(symbol)) out.push_back(e.dst);
  }
}

std::vector<PropSet> all_symbols(const PropSet& props) {
  const auto& ids = props.ids();
  if (ids.size() > 20) throw std::invalid_argument("alphabet too large to enumerate");
  std::vector<PropSet> out;
  out.reserve(std::size_t(1) << ids.size());
  for (std::size_t mask = 0; mask < (std::size_t(1) << ids.size()); ++mask) {
    std::vector<PropId> sym;
    for (std::size_t i = 0; i < ids.size(); ++i) {
      if (mask >> i & 1) sym.push_back(ids[i]);
    }
    out.emplace_back(std::move(sym));
  }
  return out;
}

}  // namespace rposet
