// condgrad: benchmark runner for the conditional gradient solvers.
//
//   condgrad solve --series 1 --n 5 --method cgms [--trace t.csv]
//   condgrad bench [--format md] [--out table.md] [--include-cgmil]
//   condgrad check
//
// Exit codes: 0 success, 1 solver/run error, 2 usage error.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "condgrad/acceptance.hpp"
#include "condgrad/harness.hpp"

namespace {

using namespace condgrad;

constexpr int kUsageError = 2;

struct ConfigFlags {
  SolverConfig cfg;
  std::optional<double> delta0;
  bool dump = false;

  void attach(CLI::App& app) {
    app.add_option("--eps", cfg.epsilon, "target gap");
    app.add_option("--beta", cfg.beta, "Armijo slope");
    app.add_option("--theta", cfg.theta, "backtracking ratio");
    app.add_option("--sigma", cfg.sigma, "step shrink factor");
    app.add_option("--nu", cfg.nu, "tolerance decrease per stage");
    app.add_option("--delta0", delta0, "initial tolerance (default max(eps, nu*mu(x0)))");
    app.add_option("--tau0", cfg.tau0, "initial step ceiling");
    app.add_option("--max-iter", cfg.max_iterations, "iteration cap");
    app.add_flag("--dump-config", dump, "print the resolved solver configuration");
  }

  SolverConfig resolve() const {
    SolverConfig out = cfg;
    out.delta0 = delta0;
    out.validate();
    return out;
  }
};

struct OutputFlags {
  std::string format = "csv";
  std::string out;

  void attach(CLI::App& app) {
    app.add_option("--format", format, "csv or md")->check(CLI::IsMember({"csv", "md", "markdown"}));
    app.add_option("--out", out, "output path (default stdout)");
  }

  void emit(const std::vector<harness::RunRow>& rows) const {
    const auto fmt = *harness::parse_format(format);
    if (out.empty()) {
      harness::emit_table(rows, fmt, std::cout);
    } else {
      harness::emit_table(rows, fmt, std::filesystem::path(out));
    }
  }
};

void report_errors(const std::vector<harness::RunRow>& rows) {
  for (const auto& r : rows) {
    if (r.status == harness::RowStatus::Error) {
      std::cerr << "error: series " << r.series << " n=" << r.n << " " << to_string(r.method)
                << ": " << r.error << '\n';
    }
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Conditional gradient benchmark runner"};
  app.require_subcommand(1);

  // solve
  auto* solve_cmd = app.add_subcommand("solve", "run one method on one problem");
  int series = 1;
  std::size_t rows_m = 0;
  std::size_t n = 5;
  std::string method_name = "cgm";
  std::string trace_path;
  ConfigFlags solve_cfg;
  OutputFlags solve_out;
  solve_cmd->add_option("--series", series, "problem series 1-4")->required();
  solve_cmd->add_option("--m", rows_m, "row dimension (series 3 and 4)");
  solve_cmd->add_option("--n", n, "number of variables")->required();
  solve_cmd->add_option("--method", method_name, "cgm, cgms, cgmi, cgmil or cgmis");
  solve_cmd->add_option("--trace", trace_path, "write a per-iterate CSV trace");
  solve_cfg.attach(*solve_cmd);
  solve_out.attach(*solve_cmd);

  // bench
  auto* bench_cmd = app.add_subcommand("bench", "run the benchmark plan");
  std::optional<int> bench_series;
  std::optional<std::size_t> bench_n;
  bool include_cgmil = false;
  bool serial = false;
  int repetitions = 1;
  ConfigFlags bench_cfg;
  OutputFlags bench_out;
  bench_cmd->add_option("--series", bench_series, "restrict to one series");
  bench_cmd->add_option("--n", bench_n, "restrict to one problem size");
  bench_cmd->add_flag("--include-cgmil", include_cgmil, "also run the fixed-step inexact method");
  bench_cmd->add_flag("--serial", serial, "run cells one after another");
  bench_cmd->add_option("--repetitions", repetitions, "timing repetitions per run");
  bench_cfg.attach(*bench_cmd);
  bench_out.attach(*bench_cmd);

  // check
  auto* check_cmd = app.add_subcommand("check", "run the acceptance suite");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsageError;
  }

  try {
    if (*solve_cmd) {
      SolverConfig cfg;
      ProblemSpec spec{series, rows_m, n, 10.0};
      const auto method = parse_method(method_name);
      try {
        cfg = solve_cfg.resolve();
        spec.validate();
        if (!method) throw std::invalid_argument("unknown method '" + method_name + "'");
      } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return kUsageError;
      }
      if (solve_cfg.dump) std::cout << harness::describe(cfg);
      if (!trace_path.empty()) cfg.trace = TraceLevel::Steps;
      SolveReport report;
      const auto row = harness::run_single(spec, *method, cfg, &report);
      if (row.status == harness::RowStatus::Error) {
        std::cerr << "error: " << row.error << '\n';
        return 1;
      }
      if (!trace_path.empty()) {
        std::ofstream trace(trace_path);
        if (!trace) {
          std::cerr << "error: cannot open " << trace_path << '\n';
          return 1;
        }
        harness::write_trace_csv(report, trace);
      }
      solve_out.emit({row});
      return 0;
    }

    if (*bench_cmd) {
      harness::BenchPlan plan = harness::default_plan(include_cgmil);
      try {
        plan.config = bench_cfg.resolve();
        plan.repetitions = repetitions;
        std::erase_if(plan.cells, [&](const ProblemSpec& c) {
          return (bench_series && c.series != *bench_series) || (bench_n && c.n != *bench_n);
        });
        plan.validate();
      } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return kUsageError;
      }
      if (bench_cfg.dump) std::cout << harness::describe(plan.config);
      const auto rows =
          harness::run_plan(plan, serial ? harness::Execution::Serial : harness::Execution::Parallel);
      bench_out.emit(rows);
      report_errors(rows);
      const bool any_error = std::any_of(rows.begin(), rows.end(), [](const auto& r) {
        return r.status == harness::RowStatus::Error;
      });
      return any_error ? 1 : 0;
    }

    if (*check_cmd) {
      const auto results = acceptance::run_all();
      for (const auto& r : results) std::cout << acceptance::format_line(r) << '\n';
      std::cout << (acceptance::suite_passed(results) ? "acceptance: PASSED" : "acceptance: FAILED")
                << '\n';
      return acceptance::suite_passed(results) ? 0 : 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
