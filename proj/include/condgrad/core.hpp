#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace condgrad {

using Vector = std::vector<double>;

/// Oracle call tallies. `it` counts steps taken, `kf` function values,
/// `kg` scalar partial derivatives (a full gradient costs n).
struct Counters {
  std::int64_t it = 0;
  std::int64_t kf = 0;
  std::int64_t kg = 0;
  std::int64_t restarts = 0;

  friend bool operator==(const Counters&, const Counters&) = default;
};

class LineSearchError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Smooth objective with oracle accounting.
///
/// The public entry points charge the counters and dispatch to the
/// protected `do_*` hooks. Implementations must make `do_gradient(x)[i]`
/// bit-identical to `do_partial(x, i)`.
class SmoothObjective {
 public:
  explicit SmoothObjective(std::size_t dimension);
  virtual ~SmoothObjective() = default;

  SmoothObjective(const SmoothObjective&) = delete;
  SmoothObjective& operator=(const SmoothObjective&) = delete;

  std::size_t dimension() const { return dimension_; }

  double value(std::span<const double> x);
  void gradient(std::span<const double> x, std::span<double> out);
  Vector gradient(std::span<const double> x);
  double partial(std::span<const double> x, std::size_t i);

  /// <f'(x), x> from value/residual state. Never charged. Empty when the
  /// objective has no cheap route; callers then fall back to a gradient.
  std::optional<double> gradient_dot_point(std::span<const double> x);

  std::int64_t function_evals() const { return kf_; }
  std::int64_t partial_evals() const { return kg_; }
  void reset_counters() { kf_ = kg_ = 0; }

  /// While alive, oracle calls are not charged. Used for setup work and
  /// diagnostics that are not part of an algorithm's oracle cost.
  class UncountedScope {
   public:
    explicit UncountedScope(SmoothObjective& f) : f_(f), prev_(f.counting_) {
      f_.counting_ = false;
    }
    ~UncountedScope() { f_.counting_ = prev_; }
    UncountedScope(const UncountedScope&) = delete;
    UncountedScope& operator=(const UncountedScope&) = delete;

   private:
    SmoothObjective& f_;
    bool prev_;
  };

 protected:
  virtual double do_value(std::span<const double> x) = 0;
  virtual void do_gradient(std::span<const double> x, std::span<double> out) = 0;
  virtual double do_partial(std::span<const double> x, std::size_t i) = 0;
  virtual std::optional<double> do_gradient_dot_point(std::span<const double>) {
    return std::nullopt;
  }

 private:
  void check_dimension(std::span<const double> x) const;

  std::size_t dimension_;
  std::int64_t kf_ = 0;
  std::int64_t kg_ = 0;
  bool counting_ = true;
};

/// D = { x >= 0, sum x = b } in R^n.
class SimplexSet {
 public:
  static constexpr double kMassTolerance = 1e-9;
  static constexpr double kCoordinateFloor = -1e-12;

  SimplexSet(std::size_t dimension, double mass);

  std::size_t dimension() const { return dimension_; }
  double mass() const { return mass_; }
  double diameter() const;

  bool contains(std::span<const double> x) const;
  Vector vertex(std::size_t i) const;
  Vector barycenter() const;

 private:
  std::size_t dimension_;
  double mass_;
};

struct LmoResult {
  std::size_t index;
  Vector vertex;
};

/// Exact linear minimization over the simplex. Ties go to the lowest index.
LmoResult exact_lmo(std::span<const double> gradient, const SimplexSet& set);

/// Index part of `exact_lmo` without materializing the vertex.
std::size_t lmo_index(std::span<const double> gradient);

/// mu(x) = max_{y in D} <g, x - y>.
double gap(std::span<const double> x, std::span<const double> gradient, const SimplexSet& set);

struct ArmijoParams {
  double beta = 0.5;
  double theta = 0.5;
  int max_halvings = 60;
};

struct ArmijoResult {
  double step;
  int trials;
  double value;  // f at the accepted point
};

namespace detail {

// Shared backtracking loop. `trial(step)` must return f at the trial point.
template <class Trial>
ArmijoResult backtrack(Trial&& trial, double f_x, double directional_derivative,
                       const ArmijoParams& params) {
  if (!(directional_derivative < 0.0)) {
    throw std::invalid_argument("armijo: directional derivative must be negative, got " +
                                std::to_string(directional_derivative));
  }
  double step = 1.0;
  for (int m = 0; m <= params.max_halvings; ++m) {
    const double f_trial = trial(step);
    if (f_trial <= f_x + params.beta * step * directional_derivative) {
      return {step, m + 1, f_trial};
    }
    step *= params.theta;
  }
  throw LineSearchError("armijo: no acceptable step after " +
                        std::to_string(params.max_halvings + 1) + " trials (directional derivative " +
                        std::to_string(directional_derivative) + ")");
}

}  // namespace detail

/// Armijo rule along x + step * d. `f_x` is the cached f(x); only trial
/// points are charged to kf.
ArmijoResult armijo_step(SmoothObjective& f, std::span<const double> x, std::span<const double> d,
                         double f_x, double directional_derivative, const ArmijoParams& params);

double dot(std::span<const double> a, std::span<const double> b);

/// out = (1 - step) * x + step * b * e_vertex
void step_toward_vertex(std::span<const double> x, std::size_t vertex, double mass, double step,
                        std::span<double> out);

}  // namespace condgrad
