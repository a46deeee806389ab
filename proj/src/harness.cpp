#include "condgrad/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include <fmt/format.h>
#include <fmt/ostream.h>

namespace condgrad::harness {

std::string_view to_string(RowStatus s) {
  switch (s) {
    case RowStatus::Converged: return "Converged";
    case RowStatus::IterationCapReached: return "IterationCapReached";
    case RowStatus::Error: return "Error";
  }
  return "?";
}

std::optional<RowStatus> parse_row_status(std::string_view s) {
  for (RowStatus r : {RowStatus::Converged, RowStatus::IterationCapReached, RowStatus::Error}) {
    if (to_string(r) == s) return r;
  }
  return std::nullopt;
}

std::optional<TableFormat> parse_format(std::string_view s) {
  if (s == "csv") return TableFormat::Csv;
  if (s == "md" || s == "markdown") return TableFormat::Markdown;
  return std::nullopt;
}

void BenchPlan::validate() const {
  if (cells.empty()) throw std::invalid_argument("bench plan has no problem cells");
  if (methods.empty()) throw std::invalid_argument("bench plan has no methods");
  if (repetitions < 1) throw std::invalid_argument("bench plan repetitions must be >= 1");
  for (const auto& c : cells) c.validate();
  config.validate();
}

BenchPlan default_plan(bool include_cgmil) {
  BenchPlan plan;
  for (int series : {1, 2}) {
    for (std::size_t n : {5, 10, 20, 50, 100}) plan.cells.push_back({series, 0, n, 10.0});
  }
  const std::pair<std::size_t, std::size_t> shapes[] = {{2, 5}, {5, 10}, {10, 20}, {25, 50}, {50, 100}};
  for (int series : {3, 4}) {
    for (auto [m, n] : shapes) plan.cells.push_back({series, m, n, 10.0});
  }
  plan.methods = {Method::Cgm, Method::Cgms, Method::Cgmi, Method::Cgmis};
  if (include_cgmil) plan.methods.push_back(Method::Cgmil);
  return plan;
}

RunRow run_single(const ProblemSpec& spec, Method method, const SolverConfig& cfg,
                  SolveReport* report) {
  RunRow row;
  row.series = spec.series;
  row.method = method;
  row.m = spec.series >= 3 ? static_cast<std::int64_t>(spec.rows) : 0;
  row.n = static_cast<std::int64_t>(spec.n);
  const auto start = std::chrono::steady_clock::now();
  try {
    auto f = make_objective(spec);
    const SimplexSet set = spec.feasible_set();
    std::optional<double> lipschitz;
    if (method == Method::Cgmil) lipschitz = lipschitz_upper_bound(spec, set);
    SolveReport rep = solve(method, *f, set, cfg, set.barycenter(), lipschitz);
    row.it = rep.counters.it;
    row.kf = rep.counters.kf;
    row.kg = rep.counters.kg;
    row.restarts = rep.counters.restarts;
    row.f_final = rep.value;
    row.mu_final = rep.gap;
    row.status = rep.status == SolveStatus::Converged ? RowStatus::Converged
                                                      : RowStatus::IterationCapReached;
    if (report) *report = std::move(rep);
  } catch (const std::exception& e) {
    row.status = RowStatus::Error;
    row.error = e.what();
  }
  row.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
                    .count();
  return row;
}

std::vector<RunRow> run_plan(const BenchPlan& plan, Execution exec) {
  plan.validate();
  std::vector<ProblemSpec> cells = plan.cells;
  std::stable_sort(cells.begin(), cells.end(), [](const ProblemSpec& a, const ProblemSpec& b) {
    return std::tie(a.series, a.n, a.rows) < std::tie(b.series, b.n, b.rows);
  });
  const std::size_t methods = plan.methods.size();
  const std::int64_t total = static_cast<std::int64_t>(cells.size() * methods);
  std::vector<RunRow> rows(static_cast<std::size_t>(total));

  auto run_job = [&](std::int64_t job) {
    const auto& spec = cells[static_cast<std::size_t>(job) / methods];
    const Method method = plan.methods[static_cast<std::size_t>(job) % methods];
    RunRow best = run_single(spec, method, plan.config);
    for (int r = 1; r < plan.repetitions; ++r) {
      const RunRow again = run_single(spec, method, plan.config);
      best.wall_ms = std::min(best.wall_ms, again.wall_ms);
    }
    rows[static_cast<std::size_t>(job)] = std::move(best);
  };

  if (exec == Execution::Serial) {
    for (std::int64_t job = 0; job < total; ++job) run_job(job);
  } else {
    // Runs are independent and own their oracles; slots are preassigned so
    // the output order does not depend on scheduling.
#pragma omp parallel for schedule(dynamic, 1)
    for (std::int64_t job = 0; job < total; ++job) run_job(job);
  }
  return rows;
}

namespace {

std::string format_real(double v) { return fmt::format("{:.6g}", v); }

void write_csv_row(const RunRow& r, std::ostream& out, bool with_wall) {
  fmt::print(out, "{},{},{},{},{},{},{},{},{},{},{}", r.series, to_string(r.method), r.m, r.n, r.it,
             r.kf, r.kg, r.restarts, format_real(r.f_final), format_real(r.mu_final),
             to_string(r.status));
  if (with_wall) fmt::print(out, ",{}", format_real(r.wall_ms));
  out << '\n';
}

void write_markdown(const std::vector<RunRow>& rows, std::ostream& out) {
  std::vector<int> series_order;
  for (const auto& r : rows) {
    if (std::find(series_order.begin(), series_order.end(), r.series) == series_order.end()) {
      series_order.push_back(r.series);
    }
  }
  bool first_table = true;
  for (int series : series_order) {
    std::vector<Method> methods;
    std::vector<std::pair<std::int64_t, std::int64_t>> sizes;
    std::map<std::tuple<std::int64_t, std::int64_t, Method>, const RunRow*> cell;
    for (const auto& r : rows) {
      if (r.series != series) continue;
      if (std::find(methods.begin(), methods.end(), r.method) == methods.end()) {
        methods.push_back(r.method);
      }
      const std::pair<std::int64_t, std::int64_t> size{r.m, r.n};
      if (std::find(sizes.begin(), sizes.end(), size) == sizes.end()) sizes.push_back(size);
      cell[{r.m, r.n, r.method}] = &r;
    }
    const bool with_m = series >= 3;
    if (!first_table) out << '\n';
    first_table = false;
    fmt::print(out, "### Series {}\n\n|", series);
    if (with_m) out << " m |";
    out << " n |";
    for (Method m : methods) fmt::print(out, " {0} it | {0} kf | {0} kg |", to_string(m));
    out << "\n|";
    const std::size_t columns = (with_m ? 2 : 1) + 3 * methods.size();
    for (std::size_t c = 0; c < columns; ++c) out << "---:|";
    out << '\n';
    for (auto [m, n] : sizes) {
      out << '|';
      if (with_m) fmt::print(out, " {} |", m);
      fmt::print(out, " {} |", n);
      for (Method method : methods) {
        const auto it = cell.find({m, n, method});
        if (it == cell.end()) {
          out << " | | |";
        } else if (it->second->status != RowStatus::Converged) {
          fmt::print(out, " {} | | |", to_string(it->second->status));
        } else {
          fmt::print(out, " {} | {} | {} |", it->second->it, it->second->kf, it->second->kg);
        }
      }
      out << '\n';
    }
  }
}

}  // namespace

void emit_table(const std::vector<RunRow>& rows, TableFormat format, std::ostream& out) {
  if (rows.empty()) throw std::invalid_argument("emit_table: no rows to emit");
  if (format == TableFormat::Csv) {
    out << kCsvHeader << '\n';
    for (const auto& r : rows) write_csv_row(r, out, true);
  } else {
    write_markdown(rows, out);
  }
}

void emit_table(const std::vector<RunRow>& rows, TableFormat format,
                const std::filesystem::path& path) {
  if (rows.empty()) throw std::invalid_argument("emit_table: no rows to emit");
  std::ofstream file(path);
  if (!file) throw std::runtime_error("cannot open " + path.string() + " for writing");
  emit_table(rows, format, file);
  file.flush();
  if (!file) throw std::runtime_error("error writing " + path.string());
}

std::string deterministic_csv(const std::vector<RunRow>& rows) {
  std::ostringstream out;
  out << kCsvHeader.substr(0, kCsvHeader.rfind(',')) << '\n';
  for (const auto& r : rows) write_csv_row(r, out, false);
  return out.str();
}

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

}  // namespace

std::vector<RunRow> parse_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) {
    throw std::runtime_error("parse_csv: missing or unexpected header");
  }
  std::vector<RunRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split(line);
    if (f.size() != 12) throw std::runtime_error("parse_csv: expected 12 fields in: " + line);
    RunRow r;
    r.series = std::stoi(f[0]);
    const auto method = parse_method(f[1]);
    const auto status = parse_row_status(f[10]);
    if (!method || !status) throw std::runtime_error("parse_csv: bad method or status in: " + line);
    r.method = *method;
    r.m = std::stoll(f[2]);
    r.n = std::stoll(f[3]);
    r.it = std::stoll(f[4]);
    r.kf = std::stoll(f[5]);
    r.kg = std::stoll(f[6]);
    r.restarts = std::stoll(f[7]);
    r.f_final = std::stod(f[8]);
    r.mu_final = std::stod(f[9]);
    r.status = *status;
    r.wall_ms = std::stod(f[11]);
    rows.push_back(std::move(r));
  }
  return rows;
}

void write_trace_csv(const SolveReport& report, std::ostream& out) {
  auto real = [](double v) { return std::isnan(v) ? std::string() : fmt::format("{:.17g}", v); };
  out << "k,lambda,f,mu,stage,delta\n";
  for (const auto& rec : report.trace) {
    fmt::print(out, "{},{},{},{},{},{}\n", rec.k, real(rec.step), real(rec.value), real(rec.gap),
               rec.stage, real(rec.tolerance));
  }
}

std::string describe(const SolverConfig& cfg) {
  return fmt::format(
      "beta={}\ntheta={}\nsigma={}\nnu={}\nepsilon={}\ndelta0={}\ntau0={}\nmax_iterations={}\n"
      "max_stages={}\n",
      cfg.beta, cfg.theta, cfg.sigma, cfg.nu, cfg.epsilon,
      cfg.delta0 ? fmt::format("{}", *cfg.delta0) : std::string("auto(max(epsilon, nu*mu(x0)))"),
      cfg.tau0, cfg.max_iterations, cfg.max_stages);
}

}  // namespace condgrad::harness
