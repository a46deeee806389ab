#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "condgrad/problems.hpp"
#include "condgrad/solvers.hpp"

namespace condgrad::harness {

enum class RowStatus { Converged, IterationCapReached, Error };
std::string_view to_string(RowStatus s);
std::optional<RowStatus> parse_row_status(std::string_view s);

struct RunRow {
  int series = 0;
  Method method = Method::Cgm;
  std::int64_t m = 0;  // 0 for series 1 and 2
  std::int64_t n = 0;
  std::int64_t it = 0;
  std::int64_t kf = 0;
  std::int64_t kg = 0;
  std::int64_t restarts = 0;
  double f_final = 0.0;
  double mu_final = 0.0;
  RowStatus status = RowStatus::Error;
  double wall_ms = 0.0;
  std::string error;  // diagnostic for Error rows; not serialized
};

enum class TableFormat { Csv, Markdown };
std::optional<TableFormat> parse_format(std::string_view s);

enum class Execution { Serial, Parallel };

struct BenchPlan {
  std::vector<ProblemSpec> cells;
  std::vector<Method> methods;
  SolverConfig config;
  TableFormat format = TableFormat::Csv;
  std::optional<std::filesystem::path> output;
  int repetitions = 1;

  void validate() const;
};

/// Series 1-2 with n in {5,10,20,50,100}; series 3-4 with (m,n) in
/// {(2,5),(5,10),(10,20),(25,50),(50,100)}; b = 10; the four tabulated methods.
BenchPlan default_plan(bool include_cgmil = false);

/// Runs one (cell, method) pair from the barycenter. Solver errors become
/// an Error row. `report` receives the full report when non-null.
RunRow run_single(const ProblemSpec& spec, Method method, const SolverConfig& cfg,
                  SolveReport* report = nullptr);

/// Rows ordered by (series, size, method). Parallel execution distributes
/// runs over OpenMP threads; counters do not depend on the execution mode.
std::vector<RunRow> run_plan(const BenchPlan& plan, Execution exec = Execution::Parallel);

inline constexpr std::string_view kCsvHeader =
    "series,method,m,n,it,kf,kg,restarts,f_final,mu_final,status,wall_ms";

void emit_table(const std::vector<RunRow>& rows, TableFormat format, std::ostream& out);
/// Writes to `path`; throws std::runtime_error naming the path on failure.
/// Empty rows are rejected before the file is created.
void emit_table(const std::vector<RunRow>& rows, TableFormat format,
                const std::filesystem::path& path);

/// CSV with the wall_ms column dropped, for determinism comparisons.
std::string deterministic_csv(const std::vector<RunRow>& rows);

std::vector<RunRow> parse_csv(std::istream& in);

/// One line per iterate: k,lambda,f,mu,stage,delta. Unknown values are empty.
void write_trace_csv(const SolveReport& report, std::ostream& out);

std::string describe(const SolverConfig& cfg);

}  // namespace condgrad::harness
