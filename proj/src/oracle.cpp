#include "condgrad/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "condgrad/solvers.hpp"

namespace condgrad::oracle {

void FDSettings::validate() const {
  if (!(relative_step > 0.0)) throw std::invalid_argument("fd: step must be positive");
  if (!(tolerance > 0.0)) throw std::invalid_argument("fd: tolerance must be positive");
}

double brute_force_gap(SmoothObjective& f, const SimplexSet& set, std::span<const double> x) {
  const Vector g = f.gradient(x);
  const std::size_t n = set.dimension();
  double best = -std::numeric_limits<double>::infinity();
  Vector diff(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) diff[j] = x[j] - (i == j ? set.mass() : 0.0);
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) s += g[j] * diff[j];
    best = std::max(best, s);
  }
  return best;
}

Vector fd_gradient(SmoothObjective& f, std::span<const double> x, const FDSettings& settings) {
  settings.validate();
  Vector probe(x.begin(), x.end());
  Vector out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double h = settings.relative_step * std::max(1.0, std::abs(x[i]));
    probe[i] = x[i] + h;
    const double up = f.value(probe);
    probe[i] = x[i] - h;
    const double down = f.value(probe);
    probe[i] = x[i];
    out[i] = (up - down) / (2.0 * h);
  }
  return out;
}

double relative_error(std::span<const double> a, std::span<const double> b) {
  double num = 0.0;
  double scale = 1.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num = std::max(num, std::abs(a[i] - b[i]));
    scale = std::max(scale, std::abs(b[i]));
  }
  return num / scale;
}

double reference_fstar(const ProblemSpec& spec, double target_gap, std::int64_t max_iterations) {
  auto f = make_objective(spec);
  const SimplexSet set = spec.feasible_set();
  SolverConfig cfg;
  cfg.epsilon = target_gap;
  cfg.max_iterations = max_iterations;
  const SolveReport rep = solve_cgm(*f, set, cfg, set.barycenter());
  if (rep.status != SolveStatus::Converged) {
    throw FStarError("reference_fstar: " + spec.label() + " did not reach gap " +
                         std::to_string(target_gap),
                     rep.value, rep.gap);
  }
  return rep.value;
}

Vector random_simplex_point(const SimplexSet& set, std::mt19937_64& rng) {
  std::exponential_distribution<double> expo(1.0);
  Vector x(set.dimension());
  double sum = 0.0;
  for (double& v : x) {
    v = expo(rng);
    sum += v;
  }
  for (double& v : x) v *= set.mass() / sum;
  return x;
}

}  // namespace condgrad::oracle
