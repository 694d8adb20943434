#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <memory>
#include <sstream>

#include "cli.hpp"
#include "rposet/automaton.hpp"
#include "rposet/bench.hpp"
#include "rposet/product.hpp"
#include "rposet/sim.hpp"

namespace py = pybind11;
using namespace rposet;

namespace {

using Table = std::shared_ptr<PropTable>;
using WordIn = std::vector<std::set<std::string>>;

struct PyPoset {
  Table table;
  RPoset poset;
};

std::vector<std::string> names(const PropSet& s, const PropTable& t) {
  std::vector<std::string> out;
  for (PropId p : s) out.push_back(t.name(p));
  return out;
}

// Props missing from the table cannot matter to any poset over it.
Word to_word(const WordIn& in, const PropTable& t) {
  Word w;
  for (const auto& sym : in) {
    PropSet s;
    for (const auto& name : sym) {
      if (auto id = t.find(name)) s.insert(*id);
    }
    w.push_back(s);
  }
  return w;
}

SearchBudget budget(std::size_t expansions, std::optional<double> seconds) { return {expansions, seconds}; }

class Session {
public:
  Session() : table_(std::make_shared<PropTable>()) {}

  Formula parse(const std::string& text) { return parse_formula(text, *table_, AtomPolicy::Declare); }

  std::vector<PyPoset> posets(const std::string& text, std::size_t expansions, std::optional<double> seconds) {
    Formula f = parse(text);
    PosetExtraction ex;
    {
      py::gil_scoped_release release;
      ex = compute_posets(normalize(translate(f)).first, budget(expansions, seconds));
    }
    std::vector<PyPoset> out;
    for (auto& p : ex.posets) out.push_back({table_, std::move(p)});
    return out;
  }

  bool evaluate(const std::string& text, const WordIn& w) {
    Formula f = parse(text);
    return rposet::evaluate(f, to_word(w, *table_));
  }

  bool accepts(const std::string& text, const WordIn& w) {
    Formula f = parse(text);
    return rposet::accepts(translate(f), to_word(w, *table_));
  }

  std::vector<PyPoset> product(const PyPoset& a, const PyPoset& b, std::size_t expansions,
                               std::optional<double> seconds) {
    check(a);
    check(b);
    ProductResult r;
    {
      py::gil_scoped_release release;
      r = poset_product(a.poset, b.poset, budget(expansions, seconds));
    }
    std::vector<PyPoset> out;
    for (auto& p : r.posets) out.push_back({table_, std::move(p)});
    return out;
  }

  std::optional<PyPoset> chain(const std::vector<std::vector<PyPoset>>& sets, std::size_t expansions,
                               std::optional<double> seconds) {
    std::vector<std::vector<RPoset>> raw;
    for (const auto& set : sets) {
      raw.emplace_back();
      for (const auto& p : set) {
        check(p);
        raw.back().push_back(p.poset);
      }
    }
    ChainOptions co;
    co.max_results = 1;
    ChainResult r;
    {
      py::gil_scoped_release release;
      r = product_chain(raw, budget(expansions, seconds), co);
    }
    if (!r.first) return std::nullopt;
    return PyPoset{table_, std::move(*r.first)};
  }

private:
  void check(const PyPoset& p) const {
    if (p.table != table_) throw py::value_error("poset belongs to another Session");
  }

  Table table_;
};

py::dict plan_dict(const Scenario& sc, const OfflinePlan& op) {
  py::list entries;
  for (const auto& e : op.plan.entries) {
    py::list crew;
    for (const auto& c : e.crew) crew.append(sc.world.agents()[c.agent].name);
    py::dict d;
    d["subtask"] = e.subtask;
    d["label"] = e.label;
    d["start"] = e.start;
    d["end"] = e.end;
    d["crew"] = crew;
    entries.append(d);
  }
  py::dict out;
  out["makespan"] = op.plan.makespan();
  out["subtasks"] = op.poset.size();
  out["entries"] = entries;
  out["gantt"] = gantt_text(op.plan, sc.world);
  out["poset_dot"] = to_dot(op.poset, sc.table);
  return out;
}

py::dict simulate(const std::filesystem::path& path, std::optional<std::uint64_t> seed, bool measure_recompute) {
  Scenario sc = load_scenario(path, seed);
  RunOptions o;
  o.measure_recompute = measure_recompute;
  RunResult r;
  VerifyReport report;
  {
    py::gil_scoped_release release;
    r = run(sc, o);
    report = verify_trace(r.trace, sc);
  }
  const Metrics& m = r.metrics;
  py::list formulas;
  for (const auto& f : m.formulas) {
    py::dict d;
    d["name"] = f.name;
    d["release"] = f.release;
    d["satisfied"] = f.satisfied;
    d["satisfied_at"] = f.satisfied_at;
    d["efficiency"] = f.efficiency;
    formulas.append(d);
  }
  py::dict metrics;
  metrics["makespan"] = m.makespan;
  metrics["sequential_baseline"] = m.sequential_baseline;
  metrics["offline_subtasks"] = m.offline_subtasks;
  metrics["final_subtasks"] = m.final_subtasks;
  metrics["adaptations"] = m.adaptations;
  metrics["adapt_seconds"] = m.adapt_seconds;
  metrics["recompute_seconds"] = m.recompute_seconds;
  metrics["formulas"] = formulas;
  py::dict out;
  out["metrics"] = metrics;
  out["verified"] = report.ok();
  out["verify"] = report.text();
  out["trace"] = trace_text(r.trace, sc);
  out["gantt"] = gantt_text(r.trace.plan, r.trace.world);
  out["metrics_text"] = metrics_text(m);
  return out;
}

py::list bench(const std::vector<int>& m_values, int length, int trials, std::uint64_t seed, double seconds,
               bool direct, bool complete) {
  BenchSpec spec;
  spec.m_values = m_values;
  spec.length = length;
  spec.trials = trials;
  spec.seed = seed;
  spec.budget.max_seconds = seconds;
  spec.direct = direct;
  spec.complete = complete;
  std::vector<BenchRecord> records;
  {
    py::gil_scoped_release release;
    records = run_bench(spec);
  }
  py::list out;
  for (const auto& r : records) {
    py::dict d;
    d["method"] = r.method;
    d["m"] = r.m;
    d["trial"] = r.trial;
    d["total_length"] = r.total_length;
    d["seconds"] = r.seconds;
    d["peak_kb"] = r.peak_kb;
    d["success"] = r.success;
    d["budget_exhausted"] = r.budget_exhausted;
    d["subtasks"] = r.subtasks;
    d["skipped"] = r.skipped;
    out.append(d);
  }
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "R-poset mission planning: posets, products, planning and simulation";

  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<ScenarioError>(m, "ScenarioError", PyExc_ValueError);
  py::register_exception<SimulationError>(m, "SimulationError", PyExc_RuntimeError);
  py::register_exception<TranslationBudgetExceeded>(m, "BudgetExceeded", PyExc_RuntimeError);

  py::class_<PyPoset>(m, "Poset")
      .def("__len__", [](const PyPoset& p) { return p.poset.size(); })
      .def_property_readonly("subtasks",
                             [](const PyPoset& p) {
                               py::list out;
                               for (const auto& s : p.poset.subtasks) {
                                 py::dict d;
                                 d["pos"] = names(s.action.pos, *p.table);
                                 d["neg"] = names(s.action.neg, *p.table);
                                 d["avoid_before"] = names(s.avoid_before, *p.table);
                                 out.append(d);
                               }
                               return out;
                             })
      .def_property_readonly("orders", [](const PyPoset& p) { return p.poset.orders; })
      .def_property_readonly("excludes", [](const PyPoset& p) { return p.poset.excludes; })
      .def("precedes", [](const PyPoset& p, std::size_t h, std::size_t l) { return precedes(p.poset, h, l); })
      .def("satisfied_by", [](const PyPoset& p, const WordIn& w) { return word_satisfies(to_word(w, *p.table), p.poset); },
           py::arg("word"))
      .def("to_dot", [](const PyPoset& p) { return to_dot(p.poset, *p.table); })
      .def("serialize", [](const PyPoset& p) { return serialize(p.poset, *p.table); })
      .def("__repr__", [](const PyPoset& p) {
        return "<Poset subtasks=" + std::to_string(p.poset.size()) + " orders=" +
               std::to_string(p.poset.orders.size()) + ">";
      });

  const std::size_t default_expansions = SearchBudget{}.max_expansions;
  py::class_<Session>(m, "Session")
      .def(py::init<>())
      .def("posets", &Session::posets, py::arg("formula"), py::arg("max_expansions") = default_expansions,
           py::arg("max_seconds") = py::none())
      .def("evaluate", &Session::evaluate, py::arg("formula"), py::arg("word"))
      .def("accepts", &Session::accepts, py::arg("formula"), py::arg("word"))
      .def("product", &Session::product, py::arg("a"), py::arg("b"), py::arg("max_expansions") = default_expansions,
           py::arg("max_seconds") = py::none())
      .def("chain", &Session::chain, py::arg("poset_sets"), py::arg("max_expansions") = default_expansions,
           py::arg("max_seconds") = py::none());

  m.def(
      "plan",
      [](const std::filesystem::path& path, std::optional<std::uint64_t> seed) {
        Scenario sc = load_scenario(path, seed);
        OfflinePlan op;
        {
          py::gil_scoped_release release;
          op = plan_offline(sc);
        }
        return plan_dict(sc, op);
      },
      py::arg("scenario"), py::arg("seed") = py::none());
  m.def("simulate", &simulate, py::arg("scenario"), py::arg("seed") = py::none(),
        py::arg("measure_recompute") = false);
  m.def("bench", &bench, py::arg("m_values") = std::vector<int>{2, 4}, py::arg("length") = 6, py::arg("trials") = 1,
        py::arg("seed") = 1, py::arg("max_seconds") = 10.0, py::arg("direct") = true, py::arg("complete") = true);
  m.def(
      "cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        int code = rposet::cli::run_cli(args, out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Runs the rposet command line; returns (exit_code, stdout, stderr).");
}
