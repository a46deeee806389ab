#pragma once

// Reference computations for tests. Nothing here goes through the solver
// fast paths: gaps enumerate vertices, gradients use finite differences.

#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>

#include "condgrad/core.hpp"
#include "condgrad/problems.hpp"

namespace condgrad::oracle {

struct FDSettings {
  double relative_step = 1e-6;  // h_i = relative_step * max(1, |x_i|)
  double tolerance = 1e-5;

  void validate() const;
};

double brute_force_gap(SmoothObjective& f, const SimplexSet& set, std::span<const double> x);

Vector fd_gradient(SmoothObjective& f, std::span<const double> x, const FDSettings& settings = {});

/// max_i |a_i - b_i| / max(1, max_i |b_i|)
double relative_error(std::span<const double> a, std::span<const double> b);

class FStarError : public std::runtime_error {
 public:
  FStarError(const std::string& what, double best_value, double best_gap)
      : std::runtime_error(what), best_value(best_value), best_gap(best_gap) {}
  double best_value;
  double best_gap;
};

/// Upper bound on f* from a high-accuracy CGM run; f(x) - f* <= target_gap.
double reference_fstar(const ProblemSpec& spec, double target_gap = 1e-6,
                       std::int64_t max_iterations = 10'000'000);

/// Uniform point of the simplex (normalized exponentials).
Vector random_simplex_point(const SimplexSet& set, std::mt19937_64& rng);

}  // namespace condgrad::oracle
