#pragma once

#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "rposet/poset.hpp"
#include "rposet/prop.hpp"
#include "rposet/world.hpp"

namespace rposet {

/// A subtask's action resolved against the world: the behavior it executes,
/// the object it uses and its start/end regions.
struct BoundBehavior {
  const BehaviorSpec* spec = nullptr;
  std::string label;
  std::optional<int> object;
  RegionId from = 0;
  RegionId to = 0;
};

/// Resolves the single behavior prop of `s`. Returns nullopt for subtasks that
/// assert no behavior; throws std::invalid_argument for several behavior props
/// or unknown behavior/region/object references.
std::optional<BoundBehavior> bind_subtask(const Subtask& s, const PropTable& table,
                                          const WorldModel& world);

/// Agent motion: depart from route.regions[0] at `depart`.
struct Leg {
  std::size_t agent = 0;
  Time depart = 0;
  Route route;
  Time arrival() const { return depart + route.duration(); }
};

struct CrewSlot {
  std::size_t agent = 0;
  std::string action;
  Leg leg;
};

struct ScheduleEntry {
  std::size_t subtask = 0;
  std::string behavior;
  std::string label;
  std::optional<int> object;
  RegionId from = 0;
  RegionId to = 0;
  Time start = 0;
  Time end = 0;
  std::vector<CrewSlot> crew;
};

/// Timed assignment of subtasks to agents and objects.
struct Plan {
  std::vector<ScheduleEntry> entries;
  /// Agent motions not attached to an entry (e.g. finishing an abandoned leg).
  std::vector<Leg> moves;

  const ScheduleEntry* entry_for(std::size_t subtask) const;
  /// J_n: the entries agent n serves, by start time.
  std::vector<const ScheduleEntry*> agent_sequence(std::size_t agent) const;
  /// J^o_u: the entries using object u, by start time.
  std::vector<const ScheduleEntry*> object_sequence(int object) const;
  Time makespan() const;
};

struct LocalBound {
  std::size_t agent = 0;
  std::vector<std::string> actions;
  Time arrival = 0;
  Leg leg;
};

struct TimeBounds {
  Time global = 0;
  Time object = 0;
  std::vector<LocalBound> local;
};

/// A window in which entities of `entity_type` may not be in `region`.
struct RegionBan {
  std::string entity_type;
  RegionId region = 0;
  Time from = 0;
  Time until = kNever;
  std::size_t carrier = 0;
  /// Includes `until` itself (bans tied to the carrier's own completion).
  bool closed = false;
};

/// Where an entity is over [from, until).
struct Stay {
  RegionId region = 0;
  Time from = 0;
  Time until = kNever;
};

class PlanningError : public std::runtime_error {
public:
  PlanningError(const std::string& what, std::vector<std::size_t> blocking)
      : std::runtime_error(what), blocking_(std::move(blocking)) {}
  const std::vector<std::size_t>& blocking() const { return blocking_; }

private:
  std::vector<std::size_t> blocking_;
};

/// Subtasks in `unassigned` whose ⪯-predecessors are all in `assigned`.
std::set<std::size_t> feasible_subtasks(const std::set<std::size_t>& unassigned,
                                        const std::set<std::size_t>& assigned,
                                        const std::vector<OrderPair>& orders);

/// Everything tbcn needs about one planning call.
struct AssignmentContext {
  const RPoset& poset;
  const PropTable& table;
  const WorldModel& world;
  /// Nothing new departs or starts before this instant.
  Time now = 0;
};

/// Bans implied by presence props in the poset's labels under `plan`:
/// avoid_before props hold from `now` until the carrier completes (open-ended
/// while it is unscheduled); negated action props hold during its execution.
std::vector<RegionBan> region_bans(const AssignmentContext& ctx, const Plan& plan);

/// Region history of an agent under the plan, from time 0.
std::vector<Stay> agent_stays(const Plan& plan, const WorldModel& world, std::size_t agent);
/// Region history of an object under the plan, from its appearance.
std::vector<Stay> object_stays(const Plan& plan, const WorldModel& world, int object);

/// Global, object and local time bounds of subtask `w` against `plan`.
TimeBounds compute_time_bounds(std::size_t w, const AssignmentContext& ctx, const Plan& plan);

/// Time Bound Contract Net: extends `seed` until every subtask of the poset
/// has an entry. Throws PlanningError on deadlock.
Plan tbcn(const AssignmentContext& ctx, Plan seed = {});

struct Violation {
  Time time = 0;
  std::string what;
};

struct ValidationOptions {
  /// Require an entry for every subtask.
  bool complete = true;
  /// Ban windows are checked over [bans_from, bans_until).
  Time bans_from = 0;
  Time bans_until = kNever;
};

/// Independent plan checker: ⪯ on starts and ends, ≠ groups, crews, agent
/// and object continuity, travel times and region bans.
std::vector<Violation> validate_plan(const Plan& plan, const AssignmentContext& ctx,
                                     const ValidationOptions& options = {});

/// One line per (agent lane, entry): `lane subtask start end label`.
std::string gantt_text(const Plan& plan, const WorldModel& world);

}  // namespace rposet
