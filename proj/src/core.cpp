#include "condgrad/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace condgrad {

SmoothObjective::SmoothObjective(std::size_t dimension) : dimension_(dimension) {
  if (dimension == 0) {
    throw std::invalid_argument("objective dimension must be positive");
  }
}

void SmoothObjective::check_dimension(std::span<const double> x) const {
  if (x.size() != dimension_) {
    throw std::invalid_argument("objective: point has length " + std::to_string(x.size()) +
                                ", expected " + std::to_string(dimension_));
  }
}

double SmoothObjective::value(std::span<const double> x) {
  check_dimension(x);
  if (counting_) ++kf_;
  return do_value(x);
}

void SmoothObjective::gradient(std::span<const double> x, std::span<double> out) {
  check_dimension(x);
  if (out.size() != dimension_) {
    throw std::invalid_argument("objective: gradient buffer has wrong length");
  }
  if (counting_) kg_ += static_cast<std::int64_t>(dimension_);
  do_gradient(x, out);
}

Vector SmoothObjective::gradient(std::span<const double> x) {
  Vector g(dimension_);
  gradient(x, g);
  return g;
}

double SmoothObjective::partial(std::span<const double> x, std::size_t i) {
  check_dimension(x);
  if (i >= dimension_) {
    throw std::invalid_argument("objective: partial index out of range");
  }
  if (counting_) ++kg_;
  return do_partial(x, i);
}

std::optional<double> SmoothObjective::gradient_dot_point(std::span<const double> x) {
  check_dimension(x);
  return do_gradient_dot_point(x);
}

SimplexSet::SimplexSet(std::size_t dimension, double mass) : dimension_(dimension), mass_(mass) {
  if (dimension == 0) throw std::invalid_argument("simplex dimension must be positive");
  if (!(mass > 0.0) || !std::isfinite(mass)) {
    throw std::invalid_argument("simplex mass must be positive and finite");
  }
}

double SimplexSet::diameter() const {
  // Edge length b*sqrt(2). Also used for n = 1, where it is an upper bound.
  return mass_ * std::sqrt(2.0);
}

bool SimplexSet::contains(std::span<const double> x) const {
  if (x.size() != dimension_) return false;
  double sum = 0.0;
  for (double v : x) {
    if (!std::isfinite(v) || v < kCoordinateFloor) return false;
    sum += v;
  }
  return std::abs(sum - mass_) <= kMassTolerance;
}

Vector SimplexSet::vertex(std::size_t i) const {
  if (i >= dimension_) throw std::invalid_argument("simplex vertex index out of range");
  Vector v(dimension_, 0.0);
  v[i] = mass_;
  return v;
}

Vector SimplexSet::barycenter() const {
  return Vector(dimension_, mass_ / static_cast<double>(dimension_));
}

std::size_t lmo_index(std::span<const double> gradient) {
  if (gradient.empty()) throw std::invalid_argument("lmo: empty gradient");
  // min_element returns the first minimum, which is the tie-break we want.
  return static_cast<std::size_t>(std::min_element(gradient.begin(), gradient.end()) -
                                  gradient.begin());
}

LmoResult exact_lmo(std::span<const double> gradient, const SimplexSet& set) {
  if (gradient.size() != set.dimension()) {
    throw std::invalid_argument("lmo: gradient length " + std::to_string(gradient.size()) +
                                " does not match set dimension " +
                                std::to_string(set.dimension()));
  }
  const std::size_t i = lmo_index(gradient);
  return {i, set.vertex(i)};
}

double gap(std::span<const double> x, std::span<const double> gradient, const SimplexSet& set) {
  if (gradient.size() != set.dimension()) {
    throw std::invalid_argument("gap: gradient length does not match set dimension");
  }
  if (!set.contains(x)) throw std::invalid_argument("gap: point is not feasible");
  const double g_min = gradient[lmo_index(gradient)];
  // <g, x> - b*g_min written as a sum of non-negative terms plus the mass
  // residual, so rounding cannot push a feasible point's gap far below zero.
  double spread = 0.0;
  double mass = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    spread += x[i] * (gradient[i] - g_min);
    mass += x[i];
  }
  return spread + g_min * (mass - set.mass());
}

ArmijoResult armijo_step(SmoothObjective& f, std::span<const double> x, std::span<const double> d,
                         double f_x, double directional_derivative, const ArmijoParams& params) {
  if (x.size() != d.size()) throw std::invalid_argument("armijo: x and d lengths differ");
  if (!(params.beta > 0.0 && params.beta < 1.0) || !(params.theta > 0.0 && params.theta < 1.0)) {
    throw std::invalid_argument("armijo: beta and theta must lie in (0, 1)");
  }
  Vector trial_point(x.size());
  return detail::backtrack(
      [&](double step) {
        for (std::size_t i = 0; i < x.size(); ++i) trial_point[i] = x[i] + step * d[i];
        return f.value(trial_point);
      },
      f_x, directional_derivative, params);
}

double dot(std::span<const double> a, std::span<const double> b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

void step_toward_vertex(std::span<const double> x, std::size_t vertex, double mass, double step,
                        std::span<double> out) {
  const double keep = 1.0 - step;
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = keep * x[i];
  out[vertex] += step * mass;
}

}  // namespace condgrad
