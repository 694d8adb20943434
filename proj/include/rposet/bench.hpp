#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "rposet/automaton.hpp"
#include "rposet/ltl.hpp"
#include "rposet/poset.hpp"

namespace rposet {

struct BenchSpec {
  std::vector<int> m_values{2, 4, 6, 8, 10};
  /// Node count of every sub-formula.
  int length = 6;
  int trials = 3;
  std::uint64_t seed = 1;
  /// Per method and record.
  SearchBudget budget{2'000'000, 60.0};
  TranslateOptions translate{20'000, 1u << 24};
  bool direct = true;
  bool complete = true;
  /// Run each record in a child process killed at the time budget.
  bool isolate = true;
  /// Once direct translation exhausts its budget on every trial of some m,
  /// larger m are recorded as exhausted without running.
  bool skip_hopeless_direct = true;
};

struct BenchRecord {
  std::string method;
  int m = 0;
  int trial = 0;
  std::size_t total_length = 0;
  double seconds = 0;
  std::size_t peak_kb = 0;
  bool success = false;
  bool budget_exhausted = false;
  std::size_t subtasks = 0;
  bool skipped = false;
};

/// Random satisfiable sub-formula of exactly `length` nodes over `props`
/// whose R-posets cover its whole language.
Formula random_task_formula(std::mt19937_64& rng, int length, const std::vector<PropId>& props);

/// `m` sub-formulas; neighbours share one proposition.
std::vector<Formula> random_conjunction(std::mt19937_64& rng, int m, int length, PropTable& table);

/// Peak resident set since the last reset, in KiB (process-wide peak when
/// the kernel does not support resetting it).
void reset_peak_memory();
std::size_t peak_memory_kb();

BenchRecord bench_direct(const std::vector<Formula>& parts, const BenchSpec& spec);
BenchRecord bench_product(const std::vector<Formula>& parts, const BenchSpec& spec, bool exhaustive);

/// Runs the sweep in order; `on_record` sees each record as it completes.
std::vector<BenchRecord> run_bench(const BenchSpec& spec,
                                   const std::function<void(const BenchRecord&)>& on_record = {});

std::string bench_csv_header();
std::string bench_csv_row(const BenchRecord& r);

}  // namespace rposet
