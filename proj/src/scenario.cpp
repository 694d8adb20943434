#include <algorithm>
#include <cctype>
#include <fstream>
#include <random>
#include <optional>
#include <sstream>

#include <toml.hpp>

#include "rposet/sim.hpp"

namespace rposet {

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ScenarioError(path + ": " + what);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

const toml::node& require(const toml::table& t, const std::string& key, const std::string& path) {
  const toml::node* n = t.get(key);
  if (!n) fail(path, "missing key '" + key + "'");
  return *n;
}

std::string get_string(const toml::node& n, const std::string& path) {
  if (auto v = n.value<std::string>()) return *v;
  fail(path, "expected a string");
}

double get_number(const toml::node& n, const std::string& path) {
  if (auto v = n.value<double>()) return *v;
  fail(path, "expected a number");
}

std::int64_t get_int(const toml::node& n, const std::string& path) {
  if (auto v = n.value<std::int64_t>()) return *v;
  fail(path, "expected an integer");
}

const toml::array& get_array(const toml::node& n, const std::string& path) {
  if (const auto* a = n.as_array()) return *a;
  fail(path, "expected an array");
}

const toml::table& get_table(const toml::node& n, const std::string& path) {
  if (const auto* t = n.as_table()) return *t;
  fail(path, "expected a table");
}

std::string index_path(const std::string& path, std::size_t i) {
  return path + "[" + std::to_string(i) + "]";
}

RegionId region_ref(const WorldModel& world, const toml::node& n, const std::string& path) {
  const std::string name = get_string(n, path);
  auto r = world.region(name);
  if (!r) fail(path, "unknown region '" + name + "'");
  return *r;
}

bool valid_name(const std::string& s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isalnum(c); });
}

void load_world(const toml::table& root, Scenario& sc, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  auto jitter = [&](double d) { return sc.noise > 0 ? d * (1.0 + sc.noise * unit(rng)) : d; };
  WorldModel& w = sc.world;

  const auto& world = get_table(require(root, "world", ""), "world");
  const auto& regions = get_array(require(world, "regions", "world"), "world.regions");
  for (std::size_t i = 0; i < regions.size(); ++i) {
    const std::string name = get_string(regions[i], index_path("world.regions", i));
    if (!valid_name(name)) fail(index_path("world.regions", i), "region names must be alphanumeric");
    if (w.region(name)) fail(index_path("world.regions", i), "duplicate region '" + name + "'");
    w.add_region(name);
  }
  const auto& edges = get_array(require(world, "edges", "world"), "world.edges");
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const std::string path = index_path("world.edges", i);
    const auto& e = get_array(edges[i], path);
    if (e.size() != 3) fail(path, "expected [region, region, duration]");
    const RegionId a = region_ref(w, e[0], path + "[0]");
    const RegionId b = region_ref(w, e[1], path + "[1]");
    const double d = get_number(e[2], path + "[2]");
    if (d <= 0) fail(path + "[2]", "durations must be positive");
    w.add_edge(a, b, jitter(d));
  }
  if (const auto* types = world.get("object_types")) {
    const auto& arr = get_array(*types, "world.object_types");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const std::string name = get_string(arr[i], index_path("world.object_types", i));
      if (!valid_name(name)) fail(index_path("world.object_types", i), "type names must be alphanumeric");
      w.add_object_type(name);
    }
  }

  const auto& types = get_table(require(root, "agent_types", ""), "agent_types");
  for (const auto& [key, node] : types) {
    const std::string name(key.str());
    const std::string path = "agent_types." + name;
    if (!valid_name(name)) fail(path, "type names must be alphanumeric");
    AgentTypeSpec spec{name, {}};
    const auto& acts = get_array(node, path);
    for (std::size_t i = 0; i < acts.size(); ++i) spec.actions.push_back(get_string(acts[i], index_path(path, i)));
    w.add_agent_type(std::move(spec));
  }

  std::map<std::string, int> per_type;
  const auto& agents = get_array(require(root, "agents", ""), "agents");
  for (std::size_t i = 0; i < agents.size(); ++i) {
    const std::string path = index_path("agents", i);
    const auto& a = get_table(agents[i], path);
    const std::string type = get_string(require(a, "type", path), path + ".type");
    if (!w.agent_type(type)) fail(path + ".type", "unknown agent type '" + type + "'");
    const RegionId start = region_ref(w, require(a, "start", path), path + ".start");
    std::int64_t count = 1;
    if (const auto* c = a.get("count")) count = get_int(*c, path + ".count");
    if (count < 1) fail(path + ".count", "must be positive");
    for (std::int64_t k = 0; k < count; ++k) w.add_agent({type + std::to_string(per_type[type]++), type, start});
  }

  const auto& behaviors = get_table(require(root, "behaviors", ""), "behaviors");
  for (const auto& [key, node] : behaviors) {
    const std::string name(key.str());
    const std::string path = "behaviors." + name;
    if (!std::all_of(name.begin(), name.end(), [](unsigned char c) { return std::isalpha(c); })) {
      fail(path, "behavior names must be alphabetic");
    }
    const auto& b = get_table(node, path);
    BehaviorSpec spec{name, {}, 0};
    const auto& crew = get_array(require(b, "crew", path), path + ".crew");
    for (std::size_t i = 0; i < crew.size(); ++i) {
      const std::string cp = index_path(path + ".crew", i);
      const auto& slot = get_array(crew[i], cp);
      if (slot.size() != 2) fail(cp, "expected [action, count]");
      const std::string action = get_string(slot[0], cp + "[0]");
      const auto n = get_int(slot[1], cp + "[1]");
      if (n < 1) fail(cp + "[1]", "must be positive");
      bool provided = false;
      for (std::size_t ag = 0; ag < w.agents().size(); ++ag) provided = provided || w.provides(ag, action);
      if (!provided) fail(cp + "[0]", "no agent provides action '" + action + "'");
      spec.crew.emplace_back(action, static_cast<int>(n));
    }
    spec.duration = get_number(require(b, "duration", path), path + ".duration");
    if (spec.duration < 0) fail(path + ".duration", "must not be negative");
    spec.duration = jitter(spec.duration);
    w.add_behavior(std::move(spec));
  }
}

ObjectSpec load_object(const toml::table& o, const std::string& path, const WorldModel& w, Time appear) {
  ObjectSpec spec;
  spec.id = static_cast<int>(get_int(require(o, "id", path), path + ".id"));
  spec.type = get_string(require(o, "type", path), path + ".type");
  if (!w.is_object_type(spec.type)) fail(path + ".type", "unknown object type '" + spec.type + "'");
  spec.region = region_ref(w, require(o, "region", path), path + ".region");
  spec.appear = appear;
  return spec;
}

}  // namespace

PropBinding resolve_atom(const std::string& name, const WorldModel& world) {
  auto parts = split(name, '_');
  auto need_region = [&](const std::string& r) {
    if (!world.region(r)) throw ScenarioError("atom '" + name + "': unknown region '" + r + "'");
  };
  if (parts.size() == 3) {
    std::string head = parts[0];
    std::size_t digits = head.size();
    while (digits > 0 && std::isdigit(static_cast<unsigned char>(head[digits - 1]))) --digits;
    BehaviorBinding b{head.substr(0, digits), std::nullopt, parts[1], parts[2]};
    if (digits < head.size()) b.object = std::stoi(head.substr(digits));
    if (!world.behavior(b.behavior)) {
      throw ScenarioError("atom '" + name + "': unknown behavior '" + b.behavior + "'");
    }
    need_region(b.from);
    need_region(b.to);
    return b;
  }
  if (parts.size() == 2) {
    if (!world.is_agent_type(parts[0]) && !world.is_object_type(parts[0])) {
      throw ScenarioError("atom '" + name + "': unknown agent or object type '" + parts[0] + "'");
    }
    need_region(parts[1]);
    return PresenceBinding{parts[0], parts[1]};
  }
  throw ScenarioError("atom '" + name + "' is neither Behavior[obj]_from_to nor Type_region");
}

Formula parse_bound_formula(const std::string& text, PropTable& table, const WorldModel& world) {
  PropTable scratch = table;
  Formula f = parse_formula(text, scratch, AtomPolicy::Declare);
  for (PropId p : atoms(f)) {
    PropBinding b = resolve_atom(scratch.name(p), world);
    if (p < table.size()) continue;
    table.intern(scratch.name(p), std::move(b));
  }
  return f;
}

std::string instantiate_template(std::string text, int object, const std::string& region,
                                 const std::string& goal) {
  const std::pair<std::string, std::string> subs[] = {
      {"{u}", std::to_string(object)}, {"{i}", region}, {"{j}", goal}};
  for (const auto& [key, value] : subs) {
    for (auto pos = text.find(key); pos != std::string::npos; pos = text.find(key, pos + value.size())) {
      text.replace(pos, key.size(), value);
    }
  }
  return text;
}

Scenario parse_scenario(const std::string& text, const std::string& source, std::optional<std::uint64_t> seed) {
  toml::table root;
  try {
    root = toml::parse(text, source);
  } catch (const toml::parse_error& e) {
    std::ostringstream os;
    os << source << ":" << e.source().begin.line << ":" << e.source().begin.column << ": "
       << e.description();
    throw ScenarioError(os.str());
  }
  Scenario sc;
  if (const auto* n = root.get("name")) sc.name = get_string(*n, "name");
  if (const auto* n = root.get("seed")) sc.seed = static_cast<std::uint64_t>(get_int(*n, "seed"));
  if (seed) sc.seed = *seed;
  if (const auto* n = root.get("noise")) sc.noise = get_number(*n, "noise");
  if (sc.noise < 0 || sc.noise >= 1) fail("noise", "must lie in [0, 1)");
  std::mt19937_64 rng(sc.seed);
  load_world(root, sc, rng);
  WorldModel& w = sc.world;

  std::set<int> ids;
  if (const auto* objs = root.get("objects")) {
    const auto& arr = get_array(*objs, "objects");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const std::string path = index_path("objects", i);
      ObjectSpec o = load_object(get_table(arr[i], path), path, w, 0);
      if (!ids.insert(o.id).second) fail(path + ".id", "duplicate object id " + std::to_string(o.id));
      w.add_object(o);
    }
  }

  if (const auto* tmpl = root.get("templates")) {
    for (const auto& [key, node] : get_table(*tmpl, "templates")) {
      const std::string type(key.str());
      if (!w.is_object_type(type)) fail("templates." + type, "unknown object type");
      sc.templates[type] = get_string(node, "templates." + type);
    }
  }

  if (const auto* evs = root.get("events")) {
    const auto& arr = get_array(*evs, "events");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const std::string path = index_path("events", i);
      const auto& t = get_table(arr[i], path);
      const double time = get_number(require(t, "time", path), path + ".time");
      if (time < 0) fail(path + ".time", "must not be negative");
      ObjectEvent ev{load_object(t, path, w, time), 0};
      ev.goal = region_ref(w, require(t, "goal", path), path + ".goal");
      if (!ids.insert(ev.object.id).second) fail(path + ".id", "duplicate object id " + std::to_string(ev.object.id));
      auto it = sc.templates.find(ev.object.type);
      if (it == sc.templates.end()) fail(path + ".type", "no template for object type '" + ev.object.type + "'");
      const std::string inst = instantiate_template(it->second, ev.object.id, w.region_name(ev.object.region),
                                                    w.region_name(ev.goal));
      if (inst.find('{') != std::string::npos) fail("templates." + ev.object.type, "unresolved placeholder");
      PropTable scratch = sc.table;
      try {
        parse_bound_formula(inst, scratch, w);
      } catch (const std::exception& e) {
        fail("templates." + ev.object.type, e.what());
      }
      sc.events.push_back(std::move(ev));
    }
    std::stable_sort(sc.events.begin(), sc.events.end(), [](const ObjectEvent& a, const ObjectEvent& b) {
      return a.object.appear != b.object.appear ? a.object.appear < b.object.appear : a.object.id < b.object.id;
    });
  }

  const auto& formulas = get_array(require(root, "formulas", ""), "formulas");
  for (std::size_t i = 0; i < formulas.size(); ++i) {
    const std::string path = index_path("formulas", i);
    const auto& f = get_table(formulas[i], path);
    NamedFormula nf;
    nf.name = get_string(require(f, "name", path), path + ".name");
    nf.text = get_string(require(f, "text", path), path + ".text");
    try {
      nf.formula = parse_bound_formula(nf.text, sc.table, w);
    } catch (const std::exception& e) {
      fail(path + ".text", e.what());
    }
    for (PropId p : atoms(nf.formula)) {
      const BehaviorBinding* b = sc.table.behavior(p);
      if (b && b->object && !ids.count(*b->object)) {
        fail(path + ".text", "atom '" + sc.table.name(p) + "' uses an undeclared object");
      }
    }
    sc.base.push_back(std::move(nf));
  }
  return sc;
}

Scenario load_scenario(const std::filesystem::path& path, std::optional<std::uint64_t> seed) {
  std::ifstream in(path);
  if (!in) throw ScenarioError(path.string() + ": cannot open scenario file");
  std::ostringstream os;
  os << in.rdbuf();
  Scenario sc = parse_scenario(os.str(), path.string(), seed);
  if (sc.name.empty()) sc.name = path.stem().string();
  return sc;
}

}  // namespace rposet
