#include "condgrad/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <random>

#include <fmt/format.h>

#include "condgrad/harness.hpp"
#include "condgrad/oracle.hpp"
#include "condgrad/problems.hpp"
#include "condgrad/solvers.hpp"

namespace condgrad::acceptance {

namespace {

using harness::RowStatus;
using harness::RunRow;
using Clock = std::chrono::steady_clock;

constexpr double kMassTol = 1e-9;
constexpr double kCoordFloor = -1e-12;
constexpr double kDescentSlack = 1e-9;

struct RunAnalysis {
  RunRow row;
  bool monotone = true;
  std::int64_t armijo_checked = 0;
  std::int64_t armijo_violations = 0;
  std::int64_t descent_checked = 0;
  std::int64_t descent_violations = 0;
  double worst_descent_margin = std::numeric_limits<double>::infinity();
  std::int64_t iterates_checked = 0;
  std::int64_t infeasible = 0;
};

bool uses_armijo(Method m) { return m == Method::Cgm || m == Method::Cgmi; }

RunAnalysis analyze_run(const ProblemSpec& spec, Method method, const SolverConfig& base) {
  SolverConfig cfg = base;
  cfg.trace = TraceLevel::Points;
  SolveReport rep;
  RunAnalysis a;
  a.row = harness::run_single(spec, method, cfg, &rep);
  if (a.row.status == RowStatus::Error) return a;

  const SimplexSet set = spec.feasible_set();
  const double b = set.mass();
  auto probe = make_objective(spec);
  Vector trial(spec.n);
  const auto& tr = rep.trace;

  for (std::size_t k = 0; k < tr.size(); ++k) {
    const auto& rec = tr[k];
    ++a.iterates_checked;
    double sum = 0.0;
    double lo = std::numeric_limits<double>::infinity();
    for (double v : rec.point) {
      sum += v;
      lo = std::min(lo, v);
    }
    if (std::abs(sum - b) > kMassTol || lo < kCoordFloor) ++a.infeasible;

    if (!uses_armijo(method) || std::isnan(rec.step)) continue;
    const auto& next = tr[k + 1];
    if (next.value > rec.value) a.monotone = false;

    // Minimality of m: the previous trial step theta^(m-1) must fail.
    if (rec.trials >= 2) {
      const double wider = rec.step / cfg.theta;
      step_toward_vertex(rec.point, static_cast<std::size_t>(rec.vertex), b, wider, trial);
      const double f_wide = probe->value(trial);
      ++a.armijo_checked;
      if (f_wide <= rec.value - cfg.beta * wider * rec.descent) ++a.armijo_violations;
    }
    if (method == Method::Cgmi) {
      const double decrease = rec.value - next.value;
      const double required = cfg.beta * rec.step * rec.tolerance;
      ++a.descent_checked;
      a.worst_descent_margin = std::min(a.worst_descent_margin, decrease - required);
      if (decrease < required - kDescentSlack) ++a.descent_violations;
    }
  }
  return a;
}

struct CellKey {
  int series;
  std::int64_t m, n;
  auto operator<=>(const CellKey&) const = default;
};

CriterionResult make(int id, std::string name, bool passed, std::string detail,
                     bool advisory = false) {
  return {id, std::move(name), passed, advisory, std::move(detail)};
}

std::string cell_name(const RunRow& r) {
  return r.series >= 3 ? fmt::format("s{} m={} n={} {}", r.series, r.m, r.n, to_string(r.method))
                       : fmt::format("s{} n={} {}", r.series, r.n, to_string(r.method));
}

CriterionResult check_theorem_bound() {
  std::vector<std::string> lines;
  bool ok = true;
  for (std::size_t n : {5, 10}) {
    const ProblemSpec spec{1, 0, n, 10.0};
    const SimplexSet set = spec.feasible_set();
    const double lipschitz = lipschitz_upper_bound(spec, set);
    const double fstar = oracle::reference_fstar(spec, 1e-6);
    double mu0 = 0.0;
    {
      auto f = make_objective(spec);
      const Vector x0 = set.barycenter();
      mu0 = gap(x0, f->gradient(x0), set);
    }
    for (double delta0 : {1.0, mu0 / 2.0}) {
      SolverConfig cfg;
      cfg.delta0 = delta0;
      auto f = make_objective(spec);
      const SolveReport rep = solve_cgmil(*f, set, cfg, set.barycenter(), lipschitz);
      std::int64_t counted = 0;
      for (const auto& st : rep.stages) {
        if (st.end_value - fstar >= cfg.epsilon) counted += st.iterations;
      }
      const double bound = cgmil_complexity_bound(cfg.beta, cfg.nu, delta0, cfg.epsilon, lipschitz,
                                                  set.diameter());
      const bool cell_ok = rep.status == SolveStatus::Converged && counted <= bound;
      ok = ok && cell_ok;
      lines.push_back(fmt::format("n={} delta0={:.4g}: N={} bound={:.1f}", n, delta0, counted, bound));
    }
  }
  std::string detail;
  for (const auto& l : lines) detail += (detail.empty() ? "" : "; ") + l;
  return make(8, "CGMIL complexity bound", ok, detail);
}

CriterionResult check_oracles() {
  std::mt19937_64 rng(20240601);
  double worst_gap = 0.0;
  double worst_fd = 0.0;
  std::int64_t gap_points = 0;
  std::int64_t fd_points = 0;
  for (int series = 1; series <= 4; ++series) {
    for (std::size_t n : {2, 5, 10}) {
      const ProblemSpec spec{series, series >= 3 ? std::max<std::size_t>(1, n / 2) : 0, n, 10.0};
      const SimplexSet set = spec.feasible_set();
      auto f = make_objective(spec);
      for (int i = 0; i < 200; ++i) {
        const Vector x = oracle::random_simplex_point(set, rng);
        const double core = gap(x, f->gradient(x), set);
        const double brute = oracle::brute_force_gap(*f, set, x);
        worst_gap = std::max(worst_gap, std::abs(core - brute));
        ++gap_points;
        if (i < 100) {
          const Vector fd = oracle::fd_gradient(*f, x);
          worst_fd = std::max(worst_fd, oracle::relative_error(fd, f->gradient(x)));
          ++fd_points;
        }
      }
    }
  }
  const bool ok = worst_gap <= 1e-12 && worst_fd <= 1e-5;
  return make(9, "oracle equivalence", ok,
              fmt::format("gap |core-brute| max {:.3g} over {} points (tol 1e-12); FD rel err max "
                          "{:.3g} over {} points (tol 1e-5)",
                          worst_gap, gap_points, worst_fd, fd_points));
}

}  // namespace

std::vector<CriterionResult> run_all(const Options& options) {
  const auto suite_start = Clock::now();
  std::vector<CriterionResult> results;
  auto emit = [&](CriterionResult r) {
    if (options.on_result) options.on_result(r);
    results.push_back(std::move(r));
  };

  const harness::BenchPlan plan = harness::default_plan();
  std::vector<ProblemSpec> cells = plan.cells;
  std::stable_sort(cells.begin(), cells.end(), [](const ProblemSpec& a, const ProblemSpec& b) {
    return std::tie(a.series, a.n, a.rows) < std::tie(b.series, b.n, b.rows);
  });
  const std::size_t methods = plan.methods.size();
  const std::int64_t total = static_cast<std::int64_t>(cells.size() * methods);
  std::vector<RunAnalysis> runs(static_cast<std::size_t>(total));
#pragma omp parallel for schedule(dynamic, 1)
  for (std::int64_t job = 0; job < total; ++job) {
    const auto idx = static_cast<std::size_t>(job);
    runs[idx] = analyze_run(cells[idx / methods], plan.methods[idx % methods], plan.config);
  }
  std::vector<RunRow> rows;
  for (const auto& r : runs) rows.push_back(r.row);

  // 2 and 3: counter identities
  {
    std::vector<std::string> bad;
    std::int64_t checked = 0;
    for (const auto& r : rows) {
      if (r.method != Method::Cgm && r.method != Method::Cgms) continue;
      ++checked;
      if (r.status == RowStatus::Error || r.kg != r.n * r.it) bad.push_back(cell_name(r));
    }
    emit(make(2, "kg = n*it for CGM and CGMS", bad.empty() && checked == 40,
              fmt::format("{} runs checked, {} violations{}", checked, bad.size(),
                          bad.empty() ? "" : " (first: " + bad.front() + ")")));
  }
  {
    std::vector<std::string> bad;
    std::int64_t checked = 0;
    for (const auto& r : rows) {
      if (r.method != Method::Cgms && r.method != Method::Cgmis) continue;
      ++checked;
      if (r.status == RowStatus::Error || r.kf != r.it) bad.push_back(cell_name(r));
    }
    emit(make(3, "kf = it for CGMS and CGMIS", bad.empty() && checked == 40,
              fmt::format("{} runs checked, {} violations{}", checked, bad.size(),
                          bad.empty() ? "" : " (first: " + bad.front() + ")")));
  }
  // 4: inexact methods save partial derivatives
  {
    std::vector<std::string> bad;
    std::int64_t checked = 0;
    for (const auto& r : rows) {
      if ((r.method != Method::Cgmi && r.method != Method::Cgmis) ||
          (r.series != 1 && r.series != 3)) {
        continue;
      }
      ++checked;
      if (r.status == RowStatus::Error || !(r.kg < r.n * r.it)) {
        bad.push_back(fmt::format("{} kg={} n*it={}", cell_name(r), r.kg, r.n * r.it));
      }
    }
    emit(make(4, "kg < n*it for CGMI and CGMIS on series 1 and 3", bad.empty() && checked == 20,
              fmt::format("{} runs checked, {} violations{}", checked, bad.size(),
                          bad.empty() ? "" : " (first: " + bad.front() + ")")));
  }
  // 5: line-search-free variants use fewer function values
  {
    std::map<CellKey, std::map<Method, std::int64_t>> kf;
    for (const auto& r : rows) {
      if (r.status != RowStatus::Error) kf[{r.series, r.m, r.n}][r.method] = r.kf;
    }
    int cgms_wins = 0;
    int cgmis_wins = 0;
    for (auto& [cell, by] : kf) {
      if (by.count(Method::Cgms) && by.count(Method::Cgm) && by[Method::Cgms] <= by[Method::Cgm]) {
        ++cgms_wins;
      }
      if (by.count(Method::Cgmis) && by.count(Method::Cgmi) &&
          by[Method::Cgmis] <= by[Method::Cgmi]) {
        ++cgmis_wins;
      }
    }
    emit(make(5, "kf(CGMS) <= kf(CGM) and kf(CGMIS) <= kf(CGMI) on >= 16/20 cells",
              cgms_wins >= 16 && cgmis_wins >= 16,
              fmt::format("CGMS wins {}/20, CGMIS wins {}/20", cgms_wins, cgmis_wins)));
  }
  // 6: Armijo descent and minimality
  {
    std::int64_t checked = 0, violations = 0;
    std::vector<std::string> non_monotone;
    for (const auto& a : runs) {
      if (!uses_armijo(a.row.method)) continue;
      checked += a.armijo_checked;
      violations += a.armijo_violations;
      if (!a.monotone || a.row.status == RowStatus::Error) non_monotone.push_back(cell_name(a.row));
    }
    emit(make(6, "Armijo descent and step minimality (CGM, CGMI)",
              non_monotone.empty() && violations == 0 && checked >= 100,
              fmt::format("{} non-monotone runs; {} backtracked steps re-checked at theta^(m-1), {} "
                          "violations",
                          non_monotone.size(), checked, violations)));
  }
  // 7: per-step decrease bound for CGMI
  {
    std::int64_t checked = 0, violations = 0;
    double worst = std::numeric_limits<double>::infinity();
    for (const auto& a : runs) {
      if (a.row.method != Method::Cgmi) continue;
      checked += a.descent_checked;
      violations += a.descent_violations;
      worst = std::min(worst, a.worst_descent_margin);
    }
    emit(make(7, "CGMI step decrease >= beta*lambda*delta_p - 1e-9", violations == 0 && checked > 0,
              fmt::format("{} steps checked, {} violations, worst margin {:.3g}", checked,
                          violations, worst)));
  }
  emit(check_theorem_bound());
  emit(check_oracles());
  // 10: feasibility of every recorded iterate
  {
    std::int64_t checked = 0, infeasible = 0;
    for (const auto& a : runs) {
      checked += a.iterates_checked;
      infeasible += a.infeasible;
    }
    emit(make(10, "feasibility of every iterate", infeasible == 0 && checked > 0,
              fmt::format("{} iterates checked, {} infeasible", checked, infeasible)));
  }
  // 11: determinism across reruns and execution modes
  const auto plan_start = Clock::now();
  const auto parallel_rows = harness::run_plan(plan, harness::Execution::Parallel);
  const double plan_seconds = std::chrono::duration<double>(Clock::now() - plan_start).count();
  const auto serial_rows = harness::run_plan(plan, harness::Execution::Serial);
  {
    const std::string traced = harness::deterministic_csv(rows);
    const std::string par = harness::deterministic_csv(parallel_rows);
    const std::string ser = harness::deterministic_csv(serial_rows);
    emit(make(11, "byte-identical CSV on rerun (excluding wall_ms)", traced == par && par == ser,
              fmt::format("traced/parallel/serial reruns: {}",
                          traced == par && par == ser ? "identical" : "DIFFER")));
  }
  // 12: order-of-magnitude iteration counts on series 1, n = 5
  {
    std::int64_t cgm_it = -1, cgms_it = -1;
    for (const auto& r : rows) {
      if (r.series != 1 || r.n != 5) continue;
      if (r.method == Method::Cgm) cgm_it = r.it;
      if (r.method == Method::Cgms) cgms_it = r.it;
    }
    const bool ok = cgm_it >= 50 && cgm_it <= 2000 && cgms_it >= 20 && cgms_it <= 2000;
    emit(make(12, "series 1 n=5 iteration counts in reference brackets", ok,
              fmt::format("CGM it={} (bracket [50,2000]), CGMS it={} (bracket [20,2000])", cgm_it,
                          cgms_it),
              true));
  }
  // 1: coverage and runtime, judged last so the runtime covers the whole suite
  {
    std::vector<std::string> bad;
    for (const auto& r : parallel_rows) {
      if (r.status != RowStatus::Converged) {
        bad.push_back(fmt::format("{} {}{}", cell_name(r), to_string(r.status),
                                  r.error.empty() ? "" : ": " + r.error));
      }
    }
    const double seconds = std::chrono::duration<double>(Clock::now() - suite_start).count();
    emit(make(1, "all 80 default-plan runs converge; suite under 5 minutes",
              bad.empty() && parallel_rows.size() == 80 && seconds < 300.0,
              fmt::format("{}/{} converged; plan {:.1f} s, suite {:.1f} s{}",
                          parallel_rows.size() - bad.size(), parallel_rows.size(), plan_seconds,
                          seconds, bad.empty() ? "" : " (first failure: " + bad.front() + ")")));
  }
  std::sort(results.begin(), results.end(),
            [](const CriterionResult& a, const CriterionResult& b) { return a.id < b.id; });
  return results;
}

bool suite_passed(const std::vector<CriterionResult>& results) {
  return std::all_of(results.begin(), results.end(),
                     [](const CriterionResult& r) { return r.passed || r.advisory; });
}

std::string format_line(const CriterionResult& r) {
  const char* tag = r.passed ? "PASS" : (r.advisory ? "WARN" : "FAIL");
  return fmt::format("[{}] criterion {:>2}: {} -- {}", tag, r.id, r.name, r.detail);
}

}  // namespace condgrad::acceptance
