#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "rposet/automaton.hpp"
#include "rposet/bench.hpp"
#include "rposet/poset.hpp"
#include "rposet/sim.hpp"

namespace rposet::cli {

namespace fs = std::filesystem;

namespace {

struct Common {
  std::size_t expansions = SearchBudget{}.max_expansions;
  std::optional<double> seconds;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  std::string format;

  SearchBudget budget() const { return {expansions, seconds}; }
};

class Failure : public std::runtime_error {
public:
  Failure(int code, const std::string& what) : std::runtime_error(what), code_(code) {}
  int code() const { return code_; }

private:
  int code_;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Failure(kError, path + ": cannot open file");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw Failure(kError, path.string() + ": cannot write file");
  out << text;
}

fs::path ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Failure(kError, dir + ": " + ec.message());
  return dir;
}

void add_common(CLI::App* cmd, Common& c, const std::vector<std::string>& formats) {
  cmd->add_option("--budget-expansions", c.expansions, "Search budget in node expansions")
      ->envname("RPOSET_BUDGET_EXPANSIONS");
  cmd->add_option("--budget-seconds", c.seconds, "Wall-clock cap per search in seconds")
      ->envname("RPOSET_BUDGET_SECONDS");
  cmd->add_option("--seed", c.seed, "Random seed")->envname("RPOSET_SEED");
  cmd->add_option("--out-dir", c.out_dir, "Directory for output files")->envname("RPOSET_OUT_DIR");
  cmd->add_option("--format", c.format, "Output format")
      ->check(CLI::IsMember(formats))
      ->envname("RPOSET_FORMAT");
}

Scenario load(const std::string& path, const Common& c) {
  try {
    return load_scenario(path, c.seed);
  } catch (const ScenarioError& e) {
    throw Failure(kParse, e.what());
  }
}

Failure planning_failure(const SimulationError& e) {
  return Failure(e.budget_exhausted() ? kBudget : kInfeasible, e.what());
}

std::string fmt(Time t) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", t);
  return buf;
}

std::string plan_csv(const Plan& plan, const WorldModel& world) {
  std::ostringstream os;
  os << "subtask,label,behavior,object,from,to,start,end,agents\n";
  auto entries = plan.entries;
  std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
    return std::tie(a.start, a.subtask) < std::tie(b.start, b.subtask);
  });
  for (const auto& e : entries) {
    os << e.subtask << ',' << e.label << ',' << e.behavior << ',' << (e.object ? std::to_string(*e.object) : "")
       << ',' << world.region_name(e.from) << ',' << world.region_name(e.to) << ',' << fmt(e.start) << ','
       << fmt(e.end) << ',';
    for (std::size_t i = 0; i < e.crew.size(); ++i) os << (i ? ";" : "") << world.agents()[e.crew[i].agent].name;
    os << '\n';
  }
  return os.str();
}

int cmd_poset(const std::string& file, const Common& c, bool all, std::ostream& out, std::ostream& err) {
  const std::string text = read_file(file);
  PropTable table;
  Formula f = [&] {
    try {
      return parse_formula(text, table, AtomPolicy::Declare);
    } catch (const ParseError& e) {
      throw Failure(kParse, file + ": " + e.what());
    }
  }();
  Nfa nfa;
  try {
    nfa = normalize(translate(f)).first;
  } catch (const TranslationBudgetExceeded& e) {
    throw Failure(kBudget, std::string("translation: ") + e.what());
  }
  PosetExtraction ex = compute_posets(nfa, c.budget());
  for (const auto& d : ex.diagnostics) err << "note: " << d << '\n';
  if (ex.posets.empty()) {
    if (ex.budget_exhausted) throw Failure(kBudget, "no R-poset found within the search budget");
    throw Failure(kInfeasible, "formula is unsatisfiable: no R-poset exists");
  }
  if (ex.budget_exhausted) err << "note: budget exhausted; the poset set may be incomplete\n";

  // Default pick: the best poset whose subtasks each assert one prop at most,
  // the form a single behavior can serve.
  std::size_t best = 0;
  for (std::size_t k = 0; k < ex.posets.size(); ++k) {
    const auto& sts = ex.posets[k].subtasks;
    if (std::all_of(sts.begin(), sts.end(), [](const Subtask& s) { return s.action.pos.size() <= 1; })) {
      best = k;
      break;
    }
  }
  std::vector<std::size_t> shown;
  if (all) {
    for (std::size_t k = 0; k < ex.posets.size(); ++k) shown.push_back(k);
  } else {
    shown.push_back(best);
  }
  if (c.format == "dot") {
    for (std::size_t k : shown) out << to_dot(ex.posets[k], table);
  } else if (c.format == "csv") {
    out << "poset,subtasks,orders,exclusion_groups,default\n";
    for (std::size_t k = 0; k < ex.posets.size(); ++k) {
      const RPoset& p = ex.posets[k];
      out << k << ',' << p.size() << ',' << p.orders.size() << ',' << p.excludes.size() << ',' << (k == best)
          << '\n';
    }
  } else {
    for (std::size_t k : shown) {
      out << "# poset " << k << '\n' << serialize(ex.posets[k], table);
    }
  }
  if (!c.out_dir.empty()) {
    fs::path dir = ensure_dir(c.out_dir);
    for (std::size_t k = 0; k < ex.posets.size(); ++k) {
      write_file(dir / ("poset_" + std::to_string(k) + ".dot"), to_dot(ex.posets[k], table));
      write_file(dir / ("poset_" + std::to_string(k) + ".txt"), serialize(ex.posets[k], table));
    }
  }
  return kOk;
}

int cmd_plan(const std::string& file, const Common& c, std::ostream& out, std::ostream& err) {
  Scenario sc = load(file, c);
  OfflinePlan op;
  try {
    op = plan_offline(sc, c.budget());
  } catch (const SimulationError& e) {
    throw planning_failure(e);
  }
  AssignmentContext ctx{op.poset, sc.table, sc.world};
  auto violations = validate_plan(op.plan, ctx);

  if (c.format == "dot") out << to_dot(op.poset, sc.table);
  else if (c.format == "csv") out << plan_csv(op.plan, sc.world);
  else out << gantt_text(op.plan, sc.world) << "makespan " << fmt(op.plan.makespan()) << '\n';

  if (!c.out_dir.empty()) {
    fs::path dir = ensure_dir(c.out_dir);
    write_file(dir / "poset.dot", to_dot(op.poset, sc.table));
    write_file(dir / "poset.txt", serialize(op.poset, sc.table));
    write_file(dir / "plan.csv", plan_csv(op.plan, sc.world));
    write_file(dir / "gantt.txt", gantt_text(op.plan, sc.world));
  }
  if (!violations.empty()) {
    for (const auto& v : violations) err << "violation at t=" << fmt(v.time) << ": " << v.what << '\n';
    throw Failure(kValidation, "plan failed validation");
  }
  return kOk;
}

struct SimulateFlags {
  std::string fault;
  bool measure_recompute = false;
};

int cmd_simulate(const std::string& file, const Common& c, const SimulateFlags& flags, std::ostream& out,
                 std::ostream& err) {
  Scenario sc = load(file, c);
  RunOptions ro;
  ro.budget = c.budget();
  ro.measure_recompute = flags.measure_recompute;
  RunResult r;
  try {
    r = run(sc, ro);
  } catch (const SimulationError& e) {
    throw planning_failure(e);
  }
  if (!flags.fault.empty()) {
    auto what = inject_fault(r.trace, sc, flags.fault == "swap" ? Fault::SwapCompletions : Fault::BanEntry);
    if (!what) throw Failure(kError, "the trace offers no place for fault '" + flags.fault + "'");
    err << "injected fault: " << *what << '\n';
  }
  VerifyReport report = verify_trace(r.trace, sc);

  const fs::path dir = ensure_dir(c.out_dir.empty() ? "." : c.out_dir);
  write_file(dir / "trace.log", trace_text(r.trace, sc));
  write_file(dir / "gantt.txt", gantt_text(r.trace.plan, r.trace.world));
  write_file(dir / "metrics.txt", metrics_text(r.metrics));
  write_file(dir / "timings.txt", timings_text(r.metrics, r.trace));
  write_file(dir / "verify.txt", report.text());
  for (std::size_t k = 0; k < r.trace.stages.size(); ++k) {
    write_file(dir / ("stage_" + std::to_string(k) + ".dot"), to_dot(r.trace.stages[k].poset, r.trace.table));
  }

  if (c.format == "csv") {
    out << "formula,release,satisfied,satisfied_at,duration,efficiency\n";
    for (const auto& f : r.metrics.formulas) {
      out << f.name << ',' << fmt(f.release) << ',' << (f.satisfied ? 1 : 0) << ',' << fmt(f.satisfied_at) << ','
          << fmt(f.duration) << ',' << fmt(f.efficiency) << '\n';
    }
  } else {
    out << metrics_text(r.metrics) << report.text();
  }
  if (!report.ok()) throw Failure(kValidation, "trace failed verification (see verify.txt)");
  return kOk;
}

struct BenchFlags {
  std::vector<int> m_values{BenchSpec{}.m_values};
  int length = BenchSpec{}.length;
  int trials = BenchSpec{}.trials;
  bool no_direct = false;
  bool no_complete = false;
};

int cmd_bench(const Common& c, const BenchFlags& flags, bool budget_given, std::ostream& out) {
  BenchSpec spec;
  spec.m_values = flags.m_values;
  spec.length = flags.length;
  spec.trials = flags.trials;
  spec.direct = !flags.no_direct;
  spec.complete = !flags.no_complete;
  if (c.seed) spec.seed = *c.seed;
  if (budget_given) spec.budget = c.budget();
  if (c.seconds) spec.budget.max_seconds = c.seconds;

  std::ofstream file;
  if (!c.out_dir.empty()) {
    fs::path path = ensure_dir(c.out_dir) / "bench.csv";
    file.open(path);
    if (!file) throw Failure(kError, path.string() + ": cannot write file");
    file << bench_csv_header() << '\n';
  }
  out << bench_csv_header() << '\n';
  run_bench(spec, [&](const BenchRecord& r) {
    out << bench_csv_row(r) << std::endl;
    if (file) file << bench_csv_row(r) << '\n';
  });
  return kOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Multi-agent mission planning with R-posets"};
  app.require_subcommand(1);

  Common c;
  std::string input;
  bool all = false;
  auto* poset = app.add_subcommand("poset", "Extract R-posets from a formula file");
  poset->add_option("formula-file", input, "File holding one sc-LTL formula")->required();
  poset->add_flag("--all", all, "Emit every poset, not only the best");
  add_common(poset, c, {"dot", "text", "csv"});

  auto* plan = app.add_subcommand("plan", "Plan a scenario offline and print the schedule");
  plan->add_option("scenario", input, "Scenario TOML file")->required();
  add_common(plan, c, {"text", "csv", "dot"});

  SimulateFlags sim;
  auto* simulate = app.add_subcommand("simulate", "Run a scenario with contingent events");
  simulate->add_option("scenario", input, "Scenario TOML file")->required();
  simulate->add_option("--inject-fault", sim.fault, "Corrupt the trace before verification")
      ->check(CLI::IsMember({"swap", "ban"}));
  simulate->add_flag("--measure-recompute", sim.measure_recompute,
                     "Also time a from-scratch product chain at every event");
  add_common(simulate, c, {"text", "csv"});

  BenchFlags bf;
  auto* bench = app.add_subcommand("bench", "Scalability sweep over random conjunctions (CSV)");
  bench->add_option("--m", bf.m_values, "Sub-formula counts")->delimiter(',')->capture_default_str();
  bench->add_option("--length", bf.length, "Node count of each sub-formula")->capture_default_str();
  bench->add_option("--trials", bf.trials, "Random conjunctions per m")->capture_default_str();
  bench->add_flag("--no-direct", bf.no_direct, "Skip translation of the whole conjunction");
  bench->add_flag("--no-complete", bf.no_complete, "Skip the exhaustive product");
  add_common(bench, c, {"csv"});

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "rposet: " << e.what() << '\n';
    return kUsage;
  }

  if (c.format.empty()) c.format = poset->parsed() ? "dot" : bench->parsed() ? "csv" : "text";
  try {
    if (poset->parsed()) return cmd_poset(input, c, all, out, err);
    if (plan->parsed()) return cmd_plan(input, c, out, err);
    if (simulate->parsed()) return cmd_simulate(input, c, sim, out, err);
    const bool budget_given = bench->count("--budget-expansions") > 0 || bench->count("--budget-seconds") > 0 ||
                              std::getenv("RPOSET_BUDGET_EXPANSIONS") || std::getenv("RPOSET_BUDGET_SECONDS");
    return cmd_bench(c, bf, budget_given, out);
  } catch (const Failure& e) {
    err << "rposet: " << e.what() << '\n';
    return e.code();
  } catch (const std::exception& e) {
    err << "rposet: " << e.what() << '\n';
    return kError;
  }
}

}  // namespace rposet::cli
