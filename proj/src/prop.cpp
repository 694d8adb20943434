#include "rposet/prop.hpp"

#include <algorithm>
#include <iterator>

namespace rposet {

PropSet::PropSet(std::initializer_list<PropId> ids) : ids_(ids) {
  std::sort(ids_.begin(), ids_.end());
  ids_.erase(std::unique(ids_.begin(), ids_.end()), ids_.end());
}

PropSet::PropSet(std::vector<PropId> ids) : ids_(std::move(ids)) {
  std::sort(ids_.begin(), ids_.end());
  ids_.erase(std::unique(ids_.begin(), ids_.end()), ids_.end());
}

bool PropSet::contains(PropId p) const {
  return std::binary_search(ids_.begin(), ids_.end(), p);
}

void PropSet::insert(PropId p) {
  auto it = std::lower_bound(ids_.begin(), ids_.end(), p);
  if (it == ids_.end() || *it != p) ids_.insert(it, p);
}

void PropSet::erase(PropId p) {
  auto it = std::lower_bound(ids_.begin(), ids_.end(), p);
  if (it != ids_.end() && *it == p) ids_.erase(it);
}

bool PropSet::subset_of(const PropSet& other) const {
  return std::includes(other.ids_.begin(), other.ids_.end(), ids_.begin(), ids_.end());
}

bool PropSet::intersects(const PropSet& other) const {
  auto a = ids_.begin();
  auto b = other.ids_.begin();
  while (a != ids_.end() && b != other.ids_.end()) {
    if (*a == *b) return true;
    if (*a < *b) ++a; else ++b;
  }
  return false;
}

PropSet PropSet::operator|(const PropSet& other) const {
  PropSet out;
  out.ids_.reserve(ids_.size() + other.ids_.size());
  std::set_union(ids_.begin(), ids_.end(), other.ids_.begin(), other.ids_.end(),
                 std::back_inserter(out.ids_));
  return out;
}

PropSet PropSet::operator&(const PropSet& other) const {
  PropSet out;
  std::set_intersection(ids_.begin(), ids_.end(), other.ids_.begin(), other.ids_.end(),
                        std::back_inserter(out.ids_));
  return out;
}

PropSet PropSet::operator-(const PropSet& other) const {
  PropSet out;
  std::set_difference(ids_.begin(), ids_.end(), other.ids_.begin(), other.ids_.end(),
                      std::back_inserter(out.ids_));
  return out;
}

PropSet& PropSet::operator|=(const PropSet& other) {
  *this = *this | other;
  return *this;
}

PropId PropTable::intern(std::string_view name, PropBinding binding) {
  std::string key(name);
  if (auto it = index_.find(key); it != index_.end()) {
    if (!std::holds_alternative<std::monostate>(binding)) bindings_[it->second] = std::move(binding);
    return it->second;
  }
  const auto id = static_cast<PropId>(names_.size());
  names_.push_back(key);
  bindings_.push_back(std::move(binding));
  index_.emplace(std::move(key), id);
  return id;
}

std::optional<PropId> PropTable::find(std::string_view name) const {
  if (auto it = index_.find(std::string(name)); it != index_.end()) return it->second;
  return std::nullopt;
}

const BehaviorBinding* PropTable::behavior(PropId id) const {
  return std::get_if<BehaviorBinding>(&bindings_.at(id));
}

const PresenceBinding* PropTable::presence(PropId id) const {
  return std::get_if<PresenceBinding>(&bindings_.at(id));
}

std::string PropTable::format(const PropSet& set) const {
  std::string out = "{";
  bool first = true;
  for (PropId p : set) {
    if (!first) out += ",";
    first = false;
    out += p < names_.size() ? names_[p] : "#" + std::to_string(p);
  }
  return out + "}";
}

}  // namespace rposet
