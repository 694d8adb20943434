#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "rposet/ltl.hpp"
#include "rposet/prop.hpp"

namespace rposet {

/// Conjunction of literals: every `pos` prop present, every `neg` prop absent.
struct Term {
  PropSet pos;
  PropSet neg;

  bool consistent() const { return !pos.intersects(neg); }
  bool satisfied_by(const PropSet& symbol) const {
    return pos.subset_of(symbol) && !neg.intersects(symbol);
  }
  /// Syntactic implication: every literal of `weaker` appears here.
  bool implies(const Term& weaker) const {
    return weaker.pos.subset_of(pos) && weaker.neg.subset_of(neg);
  }
  bool is_top() const { return pos.empty() && neg.empty(); }
  Term operator&(const Term& other) const { return {pos | other.pos, neg | other.neg}; }

  friend bool operator==(const Term&, const Term&) = default;
  friend auto operator<=>(const Term&, const Term&) = default;
};

/// Transition guard in disjunctive normal form. No terms means unsatisfiable;
/// a single empty term means true.
class Guard {
public:
  Guard() = default;
  explicit Guard(std::vector<Term> terms);
  static Guard top() { return Guard({Term{}}); }

  const std::vector<Term>& terms() const { return terms_; }
  bool unsatisfiable() const { return terms_.empty(); }
  bool is_top() const;
  bool satisfied_by(const PropSet& symbol) const;

  /// Term-wise implication: each term here implies some term of `other`.
  bool implies(const Guard& other) const;
  bool term_implies(const Term& t) const;

  Guard operator|(const Guard& other) const;

  friend bool operator==(const Guard&, const Guard&) = default;

private:
  std::vector<Term> terms_;
};

using StateId = std::uint32_t;

struct Edge {
  StateId src;
  Guard guard;
  StateId dst;
};

/// Finite automaton over proposition-set symbols. At most one edge per
/// (src, dst) pair; parallel guards are merged into one DNF.
class Nfa {
public:
  StateId add_state(bool accepting = false);
  void add_edge(StateId src, const Guard& guard, StateId dst);
  void set_initial(std::vector<StateId> initial) { initial_ = std::move(initial); }
  void set_accepting(StateId s, bool accepting) { accepting_.at(s) = accepting; }

  std::size_t state_count() const { return accepting_.size(); }
  const std::vector<StateId>& initial() const { return initial_; }
  bool accepting(StateId s) const { return accepting_.at(s); }
  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<std::size_t>& out(StateId s) const { return out_.at(s); }

  /// Guard of the (s, s) edge, if any.
  const Guard* self_loop(StateId s) const;

  /// Union of all propositions mentioned by guards.
  PropSet alphabet() const;

  void remove_edge(StateId src, StateId dst);

  /// Keeps only states in `keep`, renumbered in ascending order.
  Nfa restricted(const std::vector<bool>& keep) const;

private:
  std::vector<bool> accepting_;
  std::vector<StateId> initial_;
  std::vector<Edge> edges_;
  std::vector<std::vector<std::size_t>> out_;
};

struct HarmonyWitness {
  StateId from;
  StateId to;
  std::string reason;
};

struct HarmonyReport {
  bool holds = true;
  std::vector<HarmonyWitness> witnesses;
  std::size_t removed_true_edges = 0;
};

struct TranslateOptions {
  std::size_t max_states = 1u << 20;
  std::size_t max_work = 1u << 26;
};

class TranslationBudgetExceeded : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Tableau translation to an automaton accepting exactly the finite words
/// that satisfy `phi`. Throws TranslationBudgetExceeded past the limits.
Nfa translate(const Formula& phi, const TranslateOptions& options = {});

/// Prunes useless states, collapses language-preserving true-guard edges into
/// self-loops, and reports the self-loop harmony condition on the result.
std::pair<Nfa, HarmonyReport> normalize(const Nfa& nfa);

bool accepts(const Nfa& nfa, const Word& w);

HarmonyReport check_self_loop_harmonious(const Nfa& nfa);

std::string guard_to_string(const Guard& g, const PropTable& table);
std::string to_dot(const Nfa& nfa, const PropTable& table);

/// Adapter exposing an Nfa to the generic inclusion engine.
struct NfaStepper {
  const Nfa* nfa;
  using State = std::uint64_t;
  std::vector<State> initial() const;
  void step(State s, const PropSet& symbol, std::vector<State>& out) const;
  bool accepting(State s) const { return nfa->accepting(static_cast<StateId>(s)); }
};

}  // namespace rposet
