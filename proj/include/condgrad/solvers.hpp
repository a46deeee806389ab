#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "condgrad/core.hpp"

namespace condgrad {

enum class Method { Cgm, Cgms, Cgmi, Cgmil, Cgmis };

std::string_view to_string(Method m);
std::optional<Method> parse_method(std::string_view name);

enum class TraceLevel {
  None,    // counters and stage records only
  Steps,   // one record per iterate
  Points,  // per-iterate records including the iterate itself
};

struct SolverConfig {
  double beta = 0.5;    // Armijo / acceptance slope
  double theta = 0.5;   // backtracking ratio
  double sigma = 0.9;   // step shrink factor after a failed acceptance test
  double nu = 0.5;      // tolerance decrease per stage
  double epsilon = 0.1; // target gap
  /// Initial tolerance. Empty selects max(epsilon, nu * mu(x0)).
  std::optional<double> delta0;
  double tau0 = 0.9;    // initial step ceiling, also the initial step
  std::int64_t max_iterations = 1'000'000;
  int max_stages = 60;
  TraceLevel trace = TraceLevel::None;
  /// CGMIL only: evaluate f after each step (uncharged) and check sufficient decrease.
  bool check_descent = false;

  void validate() const;
};

enum class SolveStatus { Converged, IterationCapReached };
std::string_view to_string(SolveStatus s);

inline constexpr double kUnknown = std::numeric_limits<double>::quiet_NaN();

/// Record for iterate x^k and the step that leaves it (if any).
struct IterateRecord {
  std::int64_t k = 0;
  double value = kUnknown;        // f(x^k)
  double gap = kUnknown;          // mu(x^k), when the method computed it
  int stage = 0;                  // p, 0 for single-stage methods
  double tolerance = kUnknown;    // delta_p
  double step = kUnknown;         // lambda_k; unknown at the last iterate
  std::int64_t vertex = -1;       // index of the vertex stepped toward
  double descent = kUnknown;      // <f'(x^k), x^k - z^k>
  int trials = 0;                 // Armijo trial count (m + 1)
  int failures = 0;               // l at the time of the step
  bool accepted = true;           // acceptance test outcome for step-control methods
  Vector point;                   // only with TraceLevel::Points
};

struct StageRecord {
  int stage = 0;
  double tolerance = 0.0;
  std::int64_t iterations = 0;
  double initial_step = kUnknown;  // lambda_0 of the stage (CGMIS)
  double final_step = kUnknown;    // current lambda when the stage ended (CGMIS)
  double end_value = kUnknown;     // f(w^p)
  double end_gap = kUnknown;       // mu(w^p)
  bool restarted = false;          // ended by a restart rather than by convergence/cap
};

struct SolveReport {
  Method method = Method::Cgm;
  Vector point;
  double value = 0.0;
  double gap = 0.0;
  Counters counters;
  SolveStatus status = SolveStatus::IterationCapReached;
  double delta0 = kUnknown;
  std::vector<StageRecord> stages;
  std::vector<IterateRecord> trace;
};

/// Cyclic vertex search for the inexact direction step. Partials are
/// memoized per point, so a restart at an unchanged point costs nothing.
class DirectionScanner {
 public:
  struct Found {
    std::size_t vertex;
    double descent;
  };
  struct Exhausted {
    double gap;
  };
  using Result = std::variant<Found, Exhausted>;

  explicit DirectionScanner(std::size_t cursor = 0) : cursor_(cursor) {}

  Result scan(SmoothObjective& f, const SimplexSet& set, std::span<const double> x,
              double tolerance);
  std::size_t cursor() const { return cursor_; }

 private:
  void move_to(SmoothObjective& f, std::span<const double> x);
  double partial(SmoothObjective& f, std::span<const double> x, std::size_t i);

  std::size_t cursor_;
  Vector point_;
  bool have_point_ = false;
  double grad_dot_x_ = 0.0;
  Vector partials_;
  std::vector<char> known_;
};

struct InexactDirection {
  DirectionScanner::Result result;
  std::size_t cursor;
};

InexactDirection inexact_direction(SmoothObjective& f, const SimplexSet& set,
                                   std::span<const double> x, double tolerance,
                                   std::size_t cursor);

SolveReport solve_cgm(SmoothObjective& f, const SimplexSet& set, const SolverConfig& cfg,
                      std::span<const double> x0);
SolveReport solve_cgms(SmoothObjective& f, const SimplexSet& set, const SolverConfig& cfg,
                       std::span<const double> x0);
SolveReport solve_cgmi(SmoothObjective& f, const SimplexSet& set, const SolverConfig& cfg,
                       std::span<const double> x0);
SolveReport solve_cgmil(SmoothObjective& f, const SimplexSet& set, const SolverConfig& cfg,
                        std::span<const double> x0, double lipschitz);
SolveReport solve_cgmis(SmoothObjective& f, const SimplexSet& set, const SolverConfig& cfg,
                        std::span<const double> x0);

/// Dispatch by method. `lipschitz` is required for CGMIL only.
SolveReport solve(Method method, SmoothObjective& f, const SimplexSet& set,
                  const SolverConfig& cfg, std::span<const double> x0,
                  std::optional<double> lipschitz = {});

/// 2 (1 - beta) / (L rho^2)
double cgmil_base_step(double beta, double lipschitz, double diameter);

/// C1 nu ((delta0 / eps) - 1) / (1 - nu), C1 = rho^2 L / (2 beta (1 - beta) delta0)
double cgmil_complexity_bound(double beta, double nu, double delta0, double epsilon,
                              double lipschitz, double diameter);

}  // namespace condgrad
