#pragma once

#include <cstdint>
#include <initializer_list>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

namespace rposet {

using PropId = std::uint32_t;

/// Sorted, duplicate-free set of proposition ids.
class PropSet {
public:
  PropSet() = default;
  PropSet(std::initializer_list<PropId> ids);
  explicit PropSet(std::vector<PropId> ids);

  bool contains(PropId p) const;
  bool empty() const { return ids_.empty(); }
  std::size_t size() const { return ids_.size(); }

  void insert(PropId p);
  void erase(PropId p);

  bool subset_of(const PropSet& other) const;
  bool intersects(const PropSet& other) const;

  PropSet operator|(const PropSet& other) const;
  PropSet operator&(const PropSet& other) const;
  PropSet operator-(const PropSet& other) const;
  PropSet& operator|=(const PropSet& other);

  auto begin() const { return ids_.begin(); }
  auto end() const { return ids_.end(); }
  const std::vector<PropId>& ids() const { return ids_; }

  friend bool operator==(const PropSet&, const PropSet&) = default;
  friend auto operator<=>(const PropSet&, const PropSet&) = default;

private:
  std::vector<PropId> ids_;
};

/// A finite word: one proposition set per position.
using Word = std::vector<PropSet>;

/// Behavior proposition (C_k)^u_{k1,k2}: behavior `behavior` executed with
/// optional object `object`, starting in `from` and ending in `to`.
struct BehaviorBinding {
  std::string behavior;
  std::optional<int> object;
  std::string from;
  std::string to;
  friend bool operator==(const BehaviorBinding&, const BehaviorBinding&) = default;
};

/// Presence proposition p^l_m: some entity of `entity_type` is in `region`.
struct PresenceBinding {
  std::string entity_type;
  std::string region;
  friend bool operator==(const PresenceBinding&, const PresenceBinding&) = default;
};

using PropBinding = std::variant<std::monostate, BehaviorBinding, PresenceBinding>;

/// Interned proposition table. Atoms are opaque names; a scenario may attach
/// a behavior or presence binding to each.
class PropTable {
public:
  /// Returns the id of `name`, adding it when absent.
  PropId intern(std::string_view name, PropBinding binding = {});
  std::optional<PropId> find(std::string_view name) const;

  const std::string& name(PropId id) const { return names_.at(id); }
  const PropBinding& binding(PropId id) const { return bindings_.at(id); }
  void bind(PropId id, PropBinding binding) { bindings_.at(id) = std::move(binding); }
  std::size_t size() const { return names_.size(); }

  const BehaviorBinding* behavior(PropId id) const;
  const PresenceBinding* presence(PropId id) const;

  std::string format(const PropSet& set) const;

private:
  std::vector<std::string> names_;
  std::vector<PropBinding> bindings_;
  std::unordered_map<std::string, PropId> index_;
};

}  // namespace rposet
