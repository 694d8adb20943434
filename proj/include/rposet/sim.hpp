#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "rposet/assignment.hpp"
#include "rposet/ltl.hpp"
#include "rposet/online.hpp"
#include "rposet/poset.hpp"
#include "rposet/world.hpp"

namespace rposet {

class ScenarioError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Planning failure during a run, tagged with the phase it happened in.
class SimulationError : public std::runtime_error {
public:
  SimulationError(std::string phase, const std::string& cause, bool budget_exhausted = false)
      : std::runtime_error(phase + ": " + cause), phase_(std::move(phase)), budget_exhausted_(budget_exhausted) {}
  const std::string& phase() const { return phase_; }
  /// The search ran out of budget rather than proving infeasibility.
  bool budget_exhausted() const { return budget_exhausted_; }

private:
  std::string phase_;
  bool budget_exhausted_ = false;
};

/// A contingent object appearing at `object.appear` with goal region `goal`.
struct ObjectEvent {
  ObjectSpec object;
  RegionId goal = 0;
};

struct NamedFormula {
  std::string name;
  std::string text;
  Formula formula;
};

struct Scenario {
  std::string name;
  WorldModel world;
  PropTable table;
  std::vector<NamedFormula> base;
  /// Object type -> formula text with {u}, {i}, {j} placeholders.
  std::map<std::string, std::string> templates;
  /// Sorted by time, then object id.
  std::vector<ObjectEvent> events;
  std::uint64_t seed = 0;
  /// Relative jitter applied to edge and behavior durations (0 disables it).
  double noise = 0;
};

/// Binding implied by an atom name: `B_r1_r2` or `B<u>_r1_r2` for behavior B
/// (with object u) from r1 to r2, `X_r` for presence of agent or object type X
/// in r. Throws ScenarioError for names that fit neither form.
PropBinding resolve_atom(const std::string& name, const WorldModel& world);

/// Parses formula text, interning and binding its atoms.
Formula parse_bound_formula(const std::string& text, PropTable& table, const WorldModel& world);

/// Substitutes {u}, {i} and {j} in a contingent template.
std::string instantiate_template(std::string text, int object, const std::string& region,
                                 const std::string& goal);

/// `seed`, when given, replaces the file's seed for the noise jitter.
Scenario parse_scenario(const std::string& text, const std::string& source = "<scenario>",
                        std::optional<std::uint64_t> seed = std::nullopt);
Scenario load_scenario(const std::filesystem::path& path, std::optional<std::uint64_t> seed = std::nullopt);

/// One planning stage: the poset and plan in force from `time` on.
struct Stage {
  Time time = 0;
  std::string cause;
  RPoset poset;
  Plan plan;
};

struct ContingentRecord {
  int object = 0;
  Time release = 0;
  NamedFormula formula;
};

struct AdaptationRecord {
  Time time = 0;
  std::vector<int> objects;
  std::set<std::size_t> essential_conflicts;
  std::set<std::size_t> removed;
  std::size_t subtasks_before = 0;
  std::size_t subtasks_after = 0;
  double product_seconds = 0;
  double assignment_seconds = 0;
};

struct Trace {
  /// World at the end of the run, including contingent objects.
  WorldModel world;
  /// Prop table including the atoms of instantiated contingent formulas.
  PropTable table;
  Plan plan;
  RPoset final_poset;
  /// Instant each subtask entered the poset.
  std::vector<Time> release;
  Word word;
  std::vector<Time> word_times;
  std::vector<Stage> stages;
  std::vector<ContingentRecord> contingents;
  std::vector<AdaptationRecord> adaptations;
};

struct FormulaMetrics {
  std::string name;
  Time release = 0;
  bool satisfied = false;
  Time satisfied_at = 0;
  /// Publish-to-satisfaction duration.
  Time duration = 0;
  double efficiency = 0;
};

struct Metrics {
  Time makespan = 0;
  Time sequential_baseline = 0;
  std::size_t offline_subtasks = 0;
  std::size_t final_subtasks = 0;
  std::vector<FormulaMetrics> formulas;
  std::size_t adaptations = 0;
  double offline_product_seconds = 0;
  double offline_assignment_seconds = 0;
  double adapt_seconds = 0;
  /// Time to recompute the full product chain from scratch at every event.
  double recompute_seconds = 0;
};

struct RunOptions {
  SearchBudget budget;
  /// Also time a from-scratch product chain at every event.
  bool measure_recompute = false;
};

struct RunResult {
  Trace trace;
  Metrics metrics;
};

struct OfflinePlan {
  RPoset poset;
  Plan plan;
  double product_seconds = 0;
  double assignment_seconds = 0;
};

/// Product of the base formulas' plannable posets, scheduled by tbcn. Throws
/// SimulationError tagged "offline posets", "offline product" or
/// "offline assignment".
OfflinePlan plan_offline(const Scenario& sc, const SearchBudget& budget = {});

RunResult run(const Scenario& sc, const RunOptions& options = {});

struct VerifyReport {
  std::vector<Violation> formulas;
  std::vector<Violation> poset;
  std::vector<Violation> bans;
  std::vector<Violation> physical;
  bool ok() const { return formulas.empty() && poset.empty() && bans.empty() && physical.empty(); }
  std::string text() const;
};

/// Post-hoc check of a finished run: every formula on the emitted word
/// (contingent ones on the suffix after their release), the final poset on the
/// word, region bans stage by stage, and physical consistency.
VerifyReport verify_trace(const Trace& tr, const Scenario& sc);

/// Makespan when the plan's entries run one at a time in start order, every
/// crew travelling only after the previous entry completes.
Time sequential_baseline(const Trace& tr);

/// Rebuilds the word from the plan's completion instants.
void rebuild_word(Trace& tr);

enum class Fault { SwapCompletions, BanEntry };
/// Corrupts a trace for verifier demos; returns a description, or nullopt when
/// the trace offers no place for the fault.
std::optional<std::string> inject_fault(Trace& tr, const Scenario& sc, Fault fault);

/// Line-oriented records of the run; deterministic.
std::string trace_text(const Trace& tr, const Scenario& sc);
/// Deterministic metrics summary (no wall-clock figures).
std::string metrics_text(const Metrics& m);
/// Wall-clock figures, kept apart so the other outputs stay diff-stable.
std::string timings_text(const Metrics& m, const Trace& tr);

}  // namespace rposet
