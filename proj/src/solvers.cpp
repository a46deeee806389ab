#include "condgrad/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace condgrad {

std::string_view to_string(Method m) {
  switch (m) {
    case Method::Cgm: return "cgm";
    case Method::Cgms: return "cgms";
    case Method::Cgmi: return "cgmi";
    case Method::Cgmil: return "cgmil";
    case Method::Cgmis: return "cgmis";
  }
  return "?";
}

std::optional<Method> parse_method(std::string_view name) {
  for (Method m : {Method::Cgm, Method::Cgms, Method::Cgmi, Method::Cgmil, Method::Cgmis}) {
    if (to_string(m) == name) return m;
  }
  return std::nullopt;
}

std::string_view to_string(SolveStatus s) {
  return s == SolveStatus::Converged ? "Converged" : "IterationCapReached";
}

namespace {

bool in_open_unit(double v) { return v > 0.0 && v < 1.0; }

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument("solver config: " + what);
}

}  // namespace

void SolverConfig::validate() const {
  require(in_open_unit(beta), "beta must lie in (0, 1)");
  require(in_open_unit(theta), "theta must lie in (0, 1)");
  require(in_open_unit(sigma), "sigma must lie in (0, 1)");
  require(in_open_unit(nu), "nu must lie in (0, 1)");
  require(in_open_unit(tau0), "tau0 must lie in (0, 1)");
  require(epsilon > 0.0 && std::isfinite(epsilon), "epsilon must be positive");
  require(!delta0 || (*delta0 > 0.0 && std::isfinite(*delta0)), "delta0 must be positive");
  require(max_iterations >= 0, "max_iterations must be non-negative");
  require(max_stages >= 1, "max_stages must be at least 1");
}

// ---------------------------------------------------------------------------
// Inexact direction search

void DirectionScanner::move_to(SmoothObjective& f, std::span<const double> x) {
  if (have_point_ && std::equal(x.begin(), x.end(), point_.begin(), point_.end())) return;
  const std::size_t n = x.size();
  point_.assign(x.begin(), x.end());
  have_point_ = true;
  partials_.assign(n, 0.0);
  if (auto fast = f.gradient_dot_point(x)) {
    grad_dot_x_ = *fast;
    known_.assign(n, 0);
  } else {
    f.gradient(x, partials_);
    grad_dot_x_ = dot(partials_, x);
    known_.assign(n, 1);
  }
  if (cursor_ >= n) cursor_ = 0;
}

double DirectionScanner::partial(SmoothObjective& f, std::span<const double> x, std::size_t i) {
  if (!known_[i]) {
    partials_[i] = f.partial(x, i);
    known_[i] = 1;
  }
  return partials_[i];
}

DirectionScanner::Result DirectionScanner::scan(SmoothObjective& f, const SimplexSet& set,
                                                std::span<const double> x, double tolerance) {
  if (x.size() != set.dimension() || f.dimension() != set.dimension()) {
    throw std::invalid_argument("inexact_direction: dimension mismatch");
  }
  move_to(f, x);
  const std::size_t n = x.size();
  const double b = set.mass();
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < n; ++t) {
    const std::size_t i = (cursor_ + t) % n;
    // <f'(x), x - b e_i>
    const double descent = grad_dot_x_ - b * partial(f, x, i);
    if (descent >= tolerance) {
      cursor_ = (i + 1) % n;
      return Found{i, descent};
    }
    best = std::max(best, descent);
  }
  return Exhausted{best};
}

InexactDirection inexact_direction(SmoothObjective& f, const SimplexSet& set,
                                   std::span<const double> x, double tolerance,
                                   std::size_t cursor) {
  DirectionScanner scanner(cursor);
  auto result = scanner.scan(f, set, x, tolerance);
  return {result, scanner.cursor()};
}

// ---------------------------------------------------------------------------
// Shared run state

namespace {

class Run {
 public:
  Run(Method method, SmoothObjective& f, const SimplexSet& set, const SolverConfig& cfg,
      std::span<const double> x0)
      : f_(f), set_(set), cfg_(cfg) {
    cfg.validate();
    if (f.dimension() != set.dimension() || x0.size() != set.dimension()) {
      throw std::invalid_argument("solve: dimension mismatch between objective, set and x0");
    }
    if (!set.contains(x0)) throw std::invalid_argument("solve: starting point is not feasible");
    report_.method = method;
    report_.point.assign(x0.begin(), x0.end());
  }

  Vector& x() { return report_.point; }
  SolveReport& report() { return report_; }
  Counters& counters() { return report_.counters; }

  // Counters measure the work after this call.
  void start_accounting() {
    kf0_ = f_.function_evals();
    kg0_ = f_.partial_evals();
  }

  bool at_iteration_cap() const { return report_.counters.it >= cfg_.max_iterations; }

  void record(IterateRecord rec) {
    if (cfg_.trace == TraceLevel::None) return;
    if (cfg_.trace == TraceLevel::Points) rec.point = report_.point;
    report_.trace.push_back(std::move(rec));
  }

  SolveReport finish(SolveStatus status, double value, double gap) {
    report_.status = status;
    report_.value = value;
    report_.gap = gap;
    report_.counters.kf = f_.function_evals() - kf0_;
    report_.counters.kg = f_.partial_evals() - kg0_;
    return std::move(report_);
  }

  // Gap at the current point without charging the counters.
  double diagnostic_gap() {
    SmoothObjective::UncountedScope quiet(f_);
    const Vector g = f_.gradient(report_.point);
    return gap(report_.point, g, set_);
  }

  double diagnostic_value() {
    SmoothObjective::UncountedScope quiet(f_);
    return f_.value(report_.point);
  }

 private:
  SmoothObjective& f_;
  const SimplexSet& set_;
  const SolverConfig& cfg_;
  SolveReport report_;
  std::int64_t kf0_ = 0;
  std::int64_t kg0_ = 0;
};

ArmijoParams armijo_params(const SolverConfig& cfg) { return {cfg.beta, cfg.theta, 60}; }

double stage_tolerance(const SolverConfig& cfg, double delta0, int p) {
  return std::pow(cfg.nu, p) * delta0;
}

}  // namespace

// ---------------------------------------------------------------------------
// Exact-direction methods

SolveReport solve_cgm(SmoothObjective& f, const SimplexSet& set, const SolverConfig& cfg,
                      std::span<const double> x0) {
  Run run(Method::Cgm, f, set, cfg, x0);
  const std::size_t n = set.dimension();
  const double b = set.mass();
  Vector& x = run.x();
  Vector g(n), next(n);
  double fx = 0.0;
  {
    SmoothObjective::UncountedScope setup(f);
    fx = f.value(x);
    f.gradient(x, g);
  }
  run.start_accounting();

  for (;;) {
    const std::size_t vertex = lmo_index(g);
    const double mu = gap(x, g, set);
    IterateRecord rec{.k = run.counters().it, .value = fx, .gap = mu};
    if (mu <= cfg.epsilon) {
      run.record(std::move(rec));
      return run.finish(SolveStatus::Converged, fx, mu);
    }
    if (run.at_iteration_cap()) {
      run.record(std::move(rec));
      return run.finish(SolveStatus::IterationCapReached, fx, mu);
    }
    // <f'(x), y - x> = -mu for the exact minimizer y.
    const ArmijoResult step = detail::backtrack(
        [&](double lambda) {
          step_toward_vertex(x, vertex, b, lambda, next);
          return f.value(next);
        },
        fx, -mu, armijo_params(cfg));
    rec.step = step.step;
    rec.vertex = static_cast<std::int64_t>(vertex);
    rec.descent = mu;
    rec.trials = step.trials;
    run.record(std::move(rec));

    x.swap(next);
    fx = step.value;
    ++run.counters().it;
    f.gradient(x, g);
  }
}

SolveReport solve_cgms(SmoothObjective& f, const SimplexSet& set, const SolverConfig& cfg,
                       std::span<const double> x0) {
  Run run(Method::Cgms, f, set, cfg, x0);
  const std::size_t n = set.dimension();
  const double b = set.mass();
  Vector& x = run.x();
  Vector g(n), next(n);
  double fx = 0.0;
  {
    SmoothObjective::UncountedScope setup(f);
    fx = f.value(x);
    f.gradient(x, g);
  }
  run.start_accounting();

  double lambda = cfg.tau0;
  int failures = 0;
  for (;;) {
    const std::size_t vertex = lmo_index(g);
    const double mu = gap(x, g, set);
    IterateRecord rec{.k = run.counters().it, .value = fx, .gap = mu, .failures = failures};
    if (mu <= cfg.epsilon) {
      run.record(std::move(rec));
      return run.finish(SolveStatus::Converged, fx, mu);
    }
    if (run.at_iteration_cap()) {
      run.record(std::move(rec));
      return run.finish(SolveStatus::IterationCapReached, fx, mu);
    }
    // The step is always taken; the test only steers the next step size.
    step_toward_vertex(x, vertex, b, lambda, next);
    const double f_next = f.value(next);
    const bool accepted = f_next <= fx - cfg.beta * lambda * mu;
    rec.step = lambda;
    rec.vertex = static_cast<std::int64_t>(vertex);
    rec.descent = mu;
    rec.accepted = accepted;
    run.record(std::move(rec));

    x.swap(next);
    fx = f_next;
    ++run.counters().it;
    if (!accepted) {
      ++failures;
      lambda *= cfg.sigma;
    }
    f.gradient(x, g);
  }
}

// ---------------------------------------------------------------------------
// Inexact-direction methods

namespace {

enum class StepRule { Armijo, Fixed, Adaptive };

struct InexactOptions {
  StepRule rule;
  double base_step = 0.0;  // Fixed rule: lambda_k = min(1, base_step * delta_p)
};

SolveReport solve_inexact(Method method, SmoothObjective& f, const SimplexSet& set,
                          const SolverConfig& cfg, std::span<const double> x0,
                          const InexactOptions& opts) {
  Run run(method, f, set, cfg, x0);
  const std::size_t n = set.dimension();
  const double b = set.mass();
  const bool needs_values = opts.rule != StepRule::Fixed;
  Vector& x = run.x();
  Vector next(n);

  double fx = kUnknown;
  if (needs_values) {
    SmoothObjective::UncountedScope setup(f);
    fx = f.value(x);
  }
  run.start_accounting();

  SolveReport& rep = run.report();
  if (cfg.delta0) {
    rep.delta0 = *cfg.delta0;
  } else {
    const Vector g0 = f.gradient(x);
    rep.delta0 = std::max(cfg.epsilon, cfg.nu * gap(x, g0, set));
  }

  int p = 1;
  double delta = stage_tolerance(cfg, rep.delta0, p);
  double lambda = cfg.tau0;  // Adaptive rule: current step
  int failures = 0;
  double known_gap = kUnknown;  // mu at the current point, if a scan exhausted there
  DirectionScanner scanner;
  StageRecord stage{.stage = p, .tolerance = delta, .initial_step = lambda};
  if (opts.rule != StepRule::Adaptive) stage.initial_step = kUnknown;

  auto close_stage = [&](double mu, bool restarted) {
    stage.end_gap = mu;
    stage.end_value = needs_values ? fx : run.diagnostic_value();
    stage.restarted = restarted;
    if (opts.rule == StepRule::Adaptive) stage.final_step = lambda;
    rep.stages.push_back(stage);
  };
  auto final_record = [&]() {
    IterateRecord rec{.k = rep.counters.it, .value = fx, .gap = known_gap, .stage = p,
                      .tolerance = delta, .failures = failures};
    run.record(std::move(rec));
  };

  for (;;) {
    const auto found = scanner.scan(f, set, x, delta);
    if (const auto* ex = std::get_if<DirectionScanner::Exhausted>(&found)) {
      known_gap = ex->gap;
      if (ex->gap <= cfg.epsilon) {
        close_stage(ex->gap, false);
        final_record();
        const double value = needs_values ? fx : run.diagnostic_value();
        return run.finish(SolveStatus::Converged, value, ex->gap);
      }
      close_stage(ex->gap, true);
      ++rep.counters.restarts;
      ++p;
      if (p > cfg.max_stages) {
        throw SolverError(std::string(to_string(method)) + ": stage cap " +
                          std::to_string(cfg.max_stages) + " exceeded at gap " +
                          std::to_string(ex->gap));
      }
      delta = stage_tolerance(cfg, rep.delta0, p);
      stage = StageRecord{.stage = p, .tolerance = delta};
      if (opts.rule == StepRule::Adaptive) {
        lambda = std::min(cfg.tau0, lambda / cfg.sigma);
        failures = 0;
        stage.initial_step = lambda;
      }
      continue;
    }

    const auto [vertex, descent] = std::get<DirectionScanner::Found>(found);
    if (run.at_iteration_cap()) {
      close_stage(known_gap, false);
      final_record();
      const double value = needs_values ? fx : run.diagnostic_value();
      return run.finish(SolveStatus::IterationCapReached, value, run.diagnostic_gap());
    }

    IterateRecord rec{.k = rep.counters.it, .value = fx, .gap = known_gap, .stage = p,
                      .tolerance = delta, .vertex = static_cast<std::int64_t>(vertex),
                      .descent = descent, .failures = failures};
    double f_next = kUnknown;
    bool accepted = true;
    switch (opts.rule) {
      case StepRule::Armijo: {
        const ArmijoResult step = detail::backtrack(
            [&](double lam) {
              step_toward_vertex(x, vertex, b, lam, next);
              return f.value(next);
            },
            fx, -descent, armijo_params(cfg));
        rec.step = step.step;
        rec.trials = step.trials;
        f_next = step.value;
        break;
      }
      case StepRule::Fixed: {
        rec.step = std::min(1.0, opts.base_step * delta);
        step_toward_vertex(x, vertex, b, rec.step, next);
        if (cfg.check_descent) {
          SmoothObjective::UncountedScope quiet(f);
          if (std::isnan(fx)) fx = f.value(x);
          rec.value = fx;
          f_next = f.value(next);
          const double bound = fx - cfg.beta * rec.step * descent;
          if (f_next > bound + 1e-12 * (1.0 + std::abs(fx))) {
            throw SolverError("cgmil: sufficient decrease violated (f_next=" +
                              std::to_string(f_next) + ", bound=" + std::to_string(bound) +
                              "); the Lipschitz constant is too small");
          }
        }
        break;
      }
      case StepRule::Adaptive: {
        rec.step = lambda;
        step_toward_vertex(x, vertex, b, lambda, next);
        f_next = f.value(next);
        accepted = f_next <= fx - cfg.beta * lambda * descent;
        rec.accepted = accepted;
        break;
      }
    }
    run.record(std::move(rec));

    x.swap(next);
    fx = f_next;
    known_gap = kUnknown;
    ++rep.counters.it;
    ++stage.iterations;
    if (!accepted) {
      ++failures;
      lambda *= cfg.sigma;
    }
  }
}

}  // namespace

SolveReport solve_cgmi(SmoothObjective& f, const SimplexSet& set, const SolverConfig& cfg,
                       std::span<const double> x0) {
  return solve_inexact(Method::Cgmi, f, set, cfg, x0, {StepRule::Armijo});
}

SolveReport solve_cgmil(SmoothObjective& f, const SimplexSet& set, const SolverConfig& cfg,
                        std::span<const double> x0, double lipschitz) {
  if (!(lipschitz > 0.0) || !std::isfinite(lipschitz)) {
    throw std::invalid_argument("cgmil: Lipschitz constant must be positive");
  }
  cfg.validate();
  return solve_inexact(Method::Cgmil, f, set, cfg, x0,
                       {StepRule::Fixed, cgmil_base_step(cfg.beta, lipschitz, set.diameter())});
}

SolveReport solve_cgmis(SmoothObjective& f, const SimplexSet& set, const SolverConfig& cfg,
                        std::span<const double> x0) {
  return solve_inexact(Method::Cgmis, f, set, cfg, x0, {StepRule::Adaptive});
}

SolveReport solve(Method method, SmoothObjective& f, const SimplexSet& set,
                  const SolverConfig& cfg, std::span<const double> x0,
                  std::optional<double> lipschitz) {
  switch (method) {
    case Method::Cgm: return solve_cgm(f, set, cfg, x0);
    case Method::Cgms: return solve_cgms(f, set, cfg, x0);
    case Method::Cgmi: return solve_cgmi(f, set, cfg, x0);
    case Method::Cgmis: return solve_cgmis(f, set, cfg, x0);
    case Method::Cgmil:
      if (!lipschitz) throw std::invalid_argument("cgmil needs a Lipschitz constant");
      return solve_cgmil(f, set, cfg, x0, *lipschitz);
  }
  throw std::invalid_argument("unknown method");
}

double cgmil_base_step(double beta, double lipschitz, double diameter) {
  return 2.0 * (1.0 - beta) / (lipschitz * diameter * diameter);
}

double cgmil_complexity_bound(double beta, double nu, double delta0, double epsilon,
                              double lipschitz, double diameter) {
  const double c1 = diameter * diameter * lipschitz / (2.0 * beta * (1.0 - beta) * delta0);
  return c1 * nu * ((delta0 / epsilon) - 1.0) / (1.0 - nu);
}

}  // namespace condgrad
