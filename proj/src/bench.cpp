#include "rposet/bench.hpp"

#include <poll.h>
#include <signal.h>
#include <sys/resource.h>
#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "rposet/product.hpp"

namespace rposet {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t) {
  return std::chrono::duration<double>(Clock::now() - t).count();
}

Formula gen(std::mt19937_64& rng, int budget, const std::vector<PropId>& props) {
  auto pick = [&](std::size_t n) { return static_cast<std::size_t>(rng() % n); };
  if (budget <= 1) {
    const PropId p = props[pick(props.size())];
    return pick(4) == 0 ? Formula::not_atom(p) : Formula::atom(p);
  }
  if (budget == 2) return Formula::eventually(gen(rng, 1, props));
  const int split = 1 + static_cast<int>(pick(static_cast<std::size_t>(budget - 2)));
  switch (pick(5)) {
    case 0:
    case 1:
      return Formula::eventually(gen(rng, budget - 1, props));
    case 2:
    case 3:
      return Formula::conj({gen(rng, split, props), gen(rng, budget - 1 - split, props)});
    default:
      return Formula::until(gen(rng, split, props), gen(rng, budget - 1 - split, props));
  }
}

}  // namespace

Formula random_task_formula(std::mt19937_64& rng, int length, const std::vector<PropId>& props) {
  for (;;) {
    Formula f = gen(rng, length, props);
    if (f.length() != static_cast<std::size_t>(length)) continue;
    if (f.op() != Op::Eventually && f.op() != Op::And && f.op() != Op::Until) continue;
    Nfa nfa = normalize(translate(f)).first;
    PosetExtraction ex = compute_posets(nfa, {200'000, std::nullopt});
    if (!ex.complete || ex.posets.empty() || ex.posets.front().size() == 0) continue;
    return f;
  }
}

std::vector<Formula> random_conjunction(std::mt19937_64& rng, int m, int length, PropTable& table) {
  std::vector<Formula> parts;
  for (int k = 0; k < m; ++k) {
    std::vector<PropId> props;
    for (int i = 0; i < 3; ++i) props.push_back(table.intern("p" + std::to_string(2 * k + i)));
    parts.push_back(random_task_formula(rng, length, props));
  }
  return parts;
}

void reset_peak_memory() {
  std::ofstream clear("/proc/self/clear_refs");
  if (clear) clear << "5";
}

std::size_t peak_memory_kb() {
  std::ifstream status("/proc/self/status");
  std::string line;
  while (std::getline(status, line)) {
    if (line.rfind("VmHWM:", 0) == 0) return std::stoul(line.substr(6));
  }
  rusage ru{};
  getrusage(RUSAGE_SELF, &ru);
  return static_cast<std::size_t>(ru.ru_maxrss);
}

BenchRecord bench_direct(const std::vector<Formula>& parts, const BenchSpec& spec) {
  BenchRecord r;
  r.method = "direct-translation";
  r.m = static_cast<int>(parts.size());
  Formula all = Formula::conj(parts);
  for (const auto& f : parts) r.total_length += f.length();
  reset_peak_memory();
  auto t0 = Clock::now();
  try {
    Nfa nfa = normalize(translate(all, spec.translate)).first;
    SearchBudget b = spec.budget;
    PosetExtraction ex = compute_posets(nfa, b);
    r.success = !ex.posets.empty();
    r.budget_exhausted = ex.budget_exhausted;
    if (r.success) r.subtasks = ex.posets.front().size();
  } catch (const TranslationBudgetExceeded&) {
    r.budget_exhausted = true;
  }
  r.seconds = seconds_since(t0);
  r.peak_kb = peak_memory_kb();
  return r;
}

BenchRecord bench_product(const std::vector<Formula>& parts, const BenchSpec& spec, bool exhaustive) {
  BenchRecord r;
  r.method = exhaustive ? "product-complete" : "product-first";
  r.m = static_cast<int>(parts.size());
  for (const auto& f : parts) r.total_length += f.length();
  reset_peak_memory();
  auto t0 = Clock::now();
  std::vector<std::vector<RPoset>> sets;
  bool ok = true;
  for (const auto& f : parts) {
    PosetExtraction ex = compute_posets(normalize(translate(f, spec.translate)).first, spec.budget);
    if (ex.posets.empty()) {
      ok = false;
      r.budget_exhausted = ex.budget_exhausted;
      break;
    }
    sets.push_back(std::move(ex.posets));
  }
  if (ok) {
    ChainOptions co;
    co.max_results = exhaustive ? 0 : 1;
    SearchBudget b = spec.budget;
    if (b.max_seconds) b.max_seconds = std::max(0.0, *b.max_seconds - seconds_since(t0));
    ChainResult cr = product_chain(sets, b, co);
    r.budget_exhausted = cr.status == ProductStatus::BudgetExhausted;
    r.success = cr.first.has_value() && (!exhaustive || !r.budget_exhausted);
    if (cr.first) r.subtasks = cr.first->size();
  }
  r.seconds = seconds_since(t0);
  r.peak_kb = peak_memory_kb();
  return r;
}

namespace {

// Runs `fn` in a child process killed after `seconds`, so an overrunning
// method cannot stall the sweep and peak memory is per record.
BenchRecord isolated(const std::function<BenchRecord()>& fn, BenchRecord fallback, double seconds) {
  int fds[2];
  if (pipe(fds) != 0) return fn();
  auto t0 = Clock::now();
  const pid_t pid = fork();
  if (pid < 0) {
    close(fds[0]);
    close(fds[1]);
    return fn();
  }
  if (pid == 0) {
    close(fds[0]);
    BenchRecord r = fn();
    const std::string row = bench_csv_row(r) + "\n";
    ssize_t n = write(fds[1], row.data(), row.size());
    (void)n;
    close(fds[1]);
    _exit(0);
  }
  close(fds[1]);
  std::string row;
  char buf[512];
  for (;;) {
    pollfd pfd{fds[0], POLLIN, 0};
    const double left = seconds - seconds_since(t0);
    if (left <= 0 || poll(&pfd, 1, static_cast<int>(left * 1000) + 1) == 0) {
      kill(pid, SIGKILL);
      break;
    }
    const ssize_t n = read(fds[0], buf, sizeof buf);
    if (n <= 0) break;
    row.append(buf, static_cast<std::size_t>(n));
  }
  close(fds[0]);
  int status = 0;
  waitpid(pid, &status, 0);
  BenchRecord r = fallback;
  std::istringstream in(row);
  std::string cell;
  std::vector<std::string> cells;
  while (std::getline(in, cell, ',')) cells.push_back(cell);
  if (cells.size() == 10) {
    r.seconds = std::stod(cells[4]);
    r.peak_kb = std::stoul(cells[5]);
    r.success = cells[6] == "1";
    r.budget_exhausted = cells[7] == "1";
    r.subtasks = std::stoul(cells[8]);
  } else {
    r.seconds = seconds_since(t0);
    r.success = false;
    r.budget_exhausted = true;
  }
  return r;
}

}  // namespace

std::vector<BenchRecord> run_bench(const BenchSpec& spec, const std::function<void(const BenchRecord&)>& on_record) {
  std::vector<BenchRecord> out;
  auto emit = [&](BenchRecord r, int trial) {
    r.trial = trial;
    if (on_record) on_record(r);
    out.push_back(std::move(r));
  };
  bool direct_hopeless = false;
  for (int m : spec.m_values) {
    bool direct_exhausted_all = true;
    for (int trial = 0; trial < spec.trials; ++trial) {
      std::mt19937_64 rng(spec.seed * 1'000'003ULL + static_cast<std::uint64_t>(m) * 1'009ULL +
                          static_cast<std::uint64_t>(trial));
      PropTable table;
      auto parts = random_conjunction(rng, m, spec.length, table);
      std::size_t total = 0;
      for (const auto& f : parts) total += f.length();
      auto run_one = [&](const std::string& method, const std::function<BenchRecord()>& fn) {
        if (!spec.isolate || !spec.budget.max_seconds) return fn();
        BenchRecord fallback;
        fallback.method = method;
        fallback.m = m;
        fallback.total_length = total;
        return isolated(fn, fallback, *spec.budget.max_seconds);
      };
      if (spec.direct && direct_hopeless) {
        BenchRecord skipped;
        skipped.method = "direct-translation";
        skipped.m = m;
        skipped.total_length = total;
        skipped.budget_exhausted = true;
        skipped.skipped = true;
        emit(skipped, trial);
      } else if (spec.direct) {
        BenchRecord r = run_one("direct-translation", [&] { return bench_direct(parts, spec); });
        direct_exhausted_all = direct_exhausted_all && r.budget_exhausted && !r.success;
        emit(r, trial);
      }
      emit(run_one("product-first", [&] { return bench_product(parts, spec, false); }), trial);
      if (spec.complete) emit(run_one("product-complete", [&] { return bench_product(parts, spec, true); }), trial);
    }
    if (spec.skip_hopeless_direct && spec.direct && spec.trials > 0 && direct_exhausted_all) direct_hopeless = true;
  }
  return out;
}

std::string bench_csv_header() {
  return "method,m,trial,total_length,seconds,peak_kb,success,budget_exhausted,subtasks,skipped";
}

std::string bench_csv_row(const BenchRecord& r) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%s,%d,%d,%zu,%.6f,%zu,%d,%d,%zu,%d", r.method.c_str(), r.m, r.trial,
                r.total_length, r.seconds, r.peak_kb, r.success ? 1 : 0, r.budget_exhausted ? 1 : 0, r.subtasks,
                r.skipped ? 1 : 0);
  return buf;
}

}  // namespace rposet
