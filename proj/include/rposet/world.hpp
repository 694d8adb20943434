#pragma once

#include <limits>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace rposet {

using Time = double;
inline constexpr Time kNever = std::numeric_limits<Time>::infinity();
using RegionId = std::size_t;

struct AgentTypeSpec {
  std::string name;
  std::vector<std::string> actions;
};

struct AgentSpec {
  std::string name;
  std::string type;
  RegionId start = 0;
};

/// Collaborative behavior C_k: required (action, agent count) pairs and duration.
struct BehaviorSpec {
  std::string name;
  std::vector<std::pair<std::string, int>> crew;
  Time duration = 0;
  /// |L_k| * d_k, the work credited to the behavior in η.
  Time work() const { return static_cast<Time>(crew.size()) * duration; }
};

/// Interactive object o_u = (type, appear time, initial region).
struct ObjectSpec {
  int id = 0;
  std::string type;
  Time appear = 0;
  RegionId region = 0;
};

/// A path through the region graph; arrivals[i] is the offset at which
/// regions[i] is reached (arrivals[0] == 0).
struct Route {
  std::vector<RegionId> regions;
  std::vector<Time> arrivals;
  Time duration() const { return arrivals.empty() ? 0 : arrivals.back(); }
};

class WorldModel {
public:
  RegionId add_region(std::string name);
  /// Undirected transition with the given duration.
  void add_edge(RegionId a, RegionId b, Time duration);
  void add_agent_type(AgentTypeSpec spec);
  void add_agent(AgentSpec spec);
  void add_behavior(BehaviorSpec spec);
  void add_object(ObjectSpec spec);
  void add_object_type(std::string name);

  std::size_t region_count() const { return regions_.size(); }
  std::optional<RegionId> region(std::string_view name) const;
  const std::string& region_name(RegionId r) const { return regions_.at(r); }
  const std::vector<std::pair<RegionId, Time>>& neighbors(RegionId r) const { return adjacency_.at(r); }
  std::optional<Time> edge_duration(RegionId a, RegionId b) const;

  const std::vector<AgentSpec>& agents() const { return agents_; }
  const AgentTypeSpec* agent_type(std::string_view name) const;
  bool provides(std::size_t agent, std::string_view action) const;

  const BehaviorSpec* behavior(std::string_view name) const;
  const std::vector<BehaviorSpec>& behaviors() const { return behaviors_; }

  const std::vector<ObjectSpec>& objects() const { return objects_; }
  const ObjectSpec* object(int id) const;
  bool is_object_type(std::string_view name) const;
  bool is_agent_type(std::string_view name) const { return agent_type(name) != nullptr; }

  /// Shortest route avoiding `blocked` regions (the origin is exempt).
  /// Ties between equal-length routes go to the lexicographically smaller
  /// predecessor ids, so results are deterministic.
  std::optional<Route> shortest_route(RegionId from, RegionId to,
                                      const std::vector<bool>& blocked = {}) const;

private:
  std::vector<std::string> regions_;
  std::map<std::string, RegionId, std::less<>> region_index_;
  std::vector<std::vector<std::pair<RegionId, Time>>> adjacency_;
  std::vector<AgentTypeSpec> agent_types_;
  std::vector<AgentSpec> agents_;
  std::vector<BehaviorSpec> behaviors_;
  std::vector<ObjectSpec> objects_;
  std::vector<std::string> object_types_;
};

}  // namespace rposet
