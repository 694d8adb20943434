#include "rposet/world.hpp"

#include <algorithm>
#include <queue>
#include <stdexcept>

namespace rposet {

RegionId WorldModel::add_region(std::string name) {
  if (region_index_.count(name)) throw std::invalid_argument("duplicate region '" + name + "'");
  const RegionId id = regions_.size();
  region_index_.emplace(name, id);
  regions_.push_back(std::move(name));
  adjacency_.emplace_back();
  return id;
}

void WorldModel::add_edge(RegionId a, RegionId b, Time duration) {
  if (a >= regions_.size() || b >= regions_.size()) throw std::out_of_range("edge endpoint");
  if (duration < 0) throw std::invalid_argument("negative edge duration");
  auto set = [&](RegionId x, RegionId y) {
    auto& adj = adjacency_[x];
    auto it = std::find_if(adj.begin(), adj.end(), [&](const auto& e) { return e.first == y; });
    if (it != adj.end()) {
      it->second = std::min(it->second, duration);
    } else {
      adj.emplace_back(y, duration);
      std::sort(adj.begin(), adj.end());
    }
  };
  set(a, b);
  set(b, a);
}

void WorldModel::add_agent_type(AgentTypeSpec spec) {
  if (agent_type(spec.name)) throw std::invalid_argument("duplicate agent type '" + spec.name + "'");
  agent_types_.push_back(std::move(spec));
}

void WorldModel::add_agent(AgentSpec spec) {
  if (!agent_type(spec.type)) throw std::invalid_argument("unknown agent type '" + spec.type + "'");
  if (spec.start >= regions_.size()) throw std::out_of_range("agent start region");
  agents_.push_back(std::move(spec));
}

void WorldModel::add_behavior(BehaviorSpec spec) {
  if (behavior(spec.name)) throw std::invalid_argument("duplicate behavior '" + spec.name + "'");
  if (spec.duration < 0) throw std::invalid_argument("negative duration for '" + spec.name + "'");
  for (const auto& [action, count] : spec.crew) {
    if (count < 1) throw std::invalid_argument("crew count must be positive for '" + spec.name + "'");
  }
  behaviors_.push_back(std::move(spec));
}

void WorldModel::add_object(ObjectSpec spec) {
  if (object(spec.id)) throw std::invalid_argument("duplicate object id " + std::to_string(spec.id));
  if (spec.region >= regions_.size()) throw std::out_of_range("object region");
  if (!is_object_type(spec.type)) object_types_.push_back(spec.type);
  objects_.push_back(std::move(spec));
}

void WorldModel::add_object_type(std::string name) {
  if (!is_object_type(name)) object_types_.push_back(std::move(name));
}

std::optional<RegionId> WorldModel::region(std::string_view name) const {
  auto it = region_index_.find(name);
  if (it == region_index_.end()) return std::nullopt;
  return it->second;
}

std::optional<Time> WorldModel::edge_duration(RegionId a, RegionId b) const {
  for (const auto& [to, d] : adjacency_.at(a)) {
    if (to == b) return d;
  }
  return std::nullopt;
}

const AgentTypeSpec* WorldModel::agent_type(std::string_view name) const {
  for (const auto& t : agent_types_) {
    if (t.name == name) return &t;
  }
  return nullptr;
}

bool WorldModel::provides(std::size_t agent, std::string_view action) const {
  const AgentTypeSpec* t = agent_type(agents_.at(agent).type);
  return std::find(t->actions.begin(), t->actions.end(), action) != t->actions.end();
}

const BehaviorSpec* WorldModel::behavior(std::string_view name) const {
  for (const auto& b : behaviors_) {
    if (b.name == name) return &b;
  }
  return nullptr;
}

const ObjectSpec* WorldModel::object(int id) const {
  for (const auto& o : objects_) {
    if (o.id == id) return &o;
  }
  return nullptr;
}

bool WorldModel::is_object_type(std::string_view name) const {
  return std::find(object_types_.begin(), object_types_.end(), name) != object_types_.end();
}

std::optional<Route> WorldModel::shortest_route(RegionId from, RegionId to,
                                                const std::vector<bool>& blocked) const {
  const std::size_t n = regions_.size();
  auto is_blocked = [&](RegionId r) { return r != from && r < blocked.size() && blocked[r]; };
  if (is_blocked(to)) return std::nullopt;
  std::vector<Time> dist(n, kNever);
  std::vector<RegionId> prev(n, n);
  using Item = std::pair<Time, RegionId>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
  dist[from] = 0;
  queue.emplace(0, from);
  while (!queue.empty()) {
    auto [d, r] = queue.top();
    queue.pop();
    if (d > dist[r]) continue;
    if (r == to) break;
    for (const auto& [next, w] : adjacency_[r]) {
      if (is_blocked(next)) continue;
      const Time nd = d + w;
      if (nd < dist[next] || (nd == dist[next] && r < prev[next])) {
        dist[next] = nd;
        prev[next] = r;
        queue.emplace(nd, next);
      }
    }
  }
  if (dist[to] == kNever) return std::nullopt;
  Route route;
  for (RegionId r = to; r != from; r = prev[r]) route.regions.push_back(r);
  route.regions.push_back(from);
  std::reverse(route.regions.begin(), route.regions.end());
  for (RegionId r : route.regions) route.arrivals.push_back(dist[r]);
  return route;
}

}  // namespace rposet
