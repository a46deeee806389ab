#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "condgrad/core.hpp"
#include "condgrad/oracle.hpp"
#include "condgrad/problems.hpp"
#include "test_support.hpp"

using namespace condgrad;
using condgrad::testing::LinearObjective;
using condgrad::testing::ScalarObjective;

namespace {

// Value of <g, b e_j> for every j, minimized by enumeration.
std::size_t enumerate_argmin(const Vector& g, const SimplexSet& set) {
  std::size_t best = 0;
  double best_val = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < set.dimension(); ++j) {
    const Vector v = set.vertex(j);
    double s = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) s += g[i] * v[i];
    if (s < best_val) {
      best_val = s;
      best = j;
    }
  }
  return best;
}

}  // namespace

TEST_CASE("simplex set basics") {
  const SimplexSet set(3, 10.0);
  CHECK(set.diameter() == doctest::Approx(10.0 * std::sqrt(2.0)));
  CHECK(set.contains(Vector{10.0 / 3, 10.0 / 3, 10.0 / 3}));
  CHECK(set.contains(Vector{0.0, 10.0, 0.0}));
  CHECK_FALSE(set.contains(Vector{5.0, 5.0, 1.0}));
  CHECK_FALSE(set.contains(Vector{11.0, -1.0, 0.0}));
  CHECK_FALSE(set.contains(Vector{5.0, 5.0}));
  CHECK(set.vertex(1) == Vector{0.0, 10.0, 0.0});
  CHECK_THROWS_AS(set.vertex(3), std::invalid_argument);
  CHECK_THROWS_AS(SimplexSet(0, 10.0), std::invalid_argument);
  CHECK_THROWS_AS(SimplexSet(2, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(SimplexSet(2, -1.0), std::invalid_argument);
}

TEST_CASE("exact lmo picks the smallest gradient component") {
  const SimplexSet set(3, 10.0);
  const auto r = exact_lmo(Vector{3.0, -1.0, 2.0}, set);
  CHECK(r.index == 1);
  CHECK(r.vertex == Vector{0.0, 10.0, 0.0});
}

TEST_CASE("exact lmo breaks ties toward the lowest index") {
  const SimplexSet set(3, 10.0);
  for (double c : {-2.5, 0.0, 7.0}) {
    const auto r = exact_lmo(Vector{c, c, c}, set);
    CHECK(r.index == 0);
    CHECK(r.vertex == Vector{10.0, 0.0, 0.0});
  }
  CHECK(lmo_index(Vector{4.0, 1.0, 1.0}) == 1);
}

TEST_CASE("exact lmo agrees with vertex enumeration") {
  const ProblemSpec spec{1, 0, 5, 10.0};
  const SimplexSet set = spec.feasible_set();
  auto f = make_objective(spec);
  const Vector g = f->gradient(Vector(5, 2.0));
  CHECK(exact_lmo(g, set).index == enumerate_argmin(g, set));

  std::mt19937_64 rng(7);
  std::normal_distribution<double> normal;
  for (int t = 0; t < 500; ++t) {
    Vector h(6);
    for (double& v : h) v = normal(rng);
    const SimplexSet s6(6, 10.0);
    const auto r = exact_lmo(h, s6);
    REQUIRE(r.index == enumerate_argmin(h, s6));
    CHECK(r.vertex == s6.vertex(r.index));
  }
}

TEST_CASE("exact lmo rejects dimension mismatch") {
  CHECK_THROWS_AS(exact_lmo(Vector{1.0, 2.0}, SimplexSet(3, 10.0)), std::invalid_argument);
}

TEST_CASE("gap values") {
  const SimplexSet set(3, 10.0);
  const Vector g{3.0, -1.0, 2.0};
  CHECK(gap(Vector(3, 10.0 / 3), g, set) == doctest::Approx(40.0 / 3 + 10.0).epsilon(1e-14));
  CHECK(gap(set.vertex(1), g, set) == doctest::Approx(0.0));
  CHECK_THROWS_AS(gap(Vector{5.0, 5.0, 5.0}, g, set), std::invalid_argument);
  CHECK_THROWS_AS(gap(Vector{5.0, 5.0}, g, set), std::invalid_argument);
}

TEST_CASE("gap is non-negative on the problem families") {
  std::mt19937_64 rng(11);
  for (int series = 1; series <= 4; ++series) {
    const ProblemSpec spec{series, series >= 3 ? 3u : 0u, 6, 10.0};
    const SimplexSet set = spec.feasible_set();
    auto f = make_objective(spec);
    for (int i = 0; i < 200; ++i) {
      const Vector x = oracle::random_simplex_point(set, rng);
      REQUIRE(gap(x, f->gradient(x), set) >= -1e-12);
    }
    for (std::size_t j = 0; j < set.dimension(); ++j) {
      const Vector v = set.vertex(j);
      REQUIRE(gap(v, f->gradient(v), set) >= -1e-12);
    }
  }
}

TEST_CASE("armijo on scalar examples") {
  ArmijoParams params;
  SUBCASE("t^2 accepts the unit step") {
    ScalarObjective f([](double t) { return t * t; }, [](double t) { return 2 * t; });
    const Vector x{1.0}, d{-1.0};
    const auto r = armijo_step(f, x, d, 1.0, -2.0, params);
    CHECK(r.step == 1.0);
    CHECK(r.trials == 1);
    CHECK(r.value == 0.0);
    CHECK(f.function_evals() == 1);
  }
  SUBCASE("t^4 needs two halvings") {
    ScalarObjective f([](double t) { return t * t * t * t; },
                      [](double t) { return 4 * t * t * t; });
    const Vector x{1.0}, d{-1.0};
    const auto r = armijo_step(f, x, d, 1.0, -4.0, params);
    CHECK(r.step == 0.25);
    CHECK(r.trials == 3);
    CHECK(f.function_evals() == 3);
  }
}

TEST_CASE("armijo step is the largest acceptable power of theta") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> coef(0.5, 20.0);
  for (int t = 0; t < 200; ++t) {
    const double a = coef(rng);
    const double p = 2.0 + std::floor(coef(rng) / 4.0);
    auto fn = [=](double s) { return a * std::pow(std::abs(s), p); };
    ScalarObjective f(fn, [=](double s) { return a * p * std::pow(std::abs(s), p - 1) * (s < 0 ? -1 : 1); });
    const Vector x{1.0}, d{-1.0};
    const double fx = fn(1.0);
    const double dd = -a * p;
    ArmijoParams params{0.5, 0.5, 60};
    const auto r = armijo_step(f, x, d, fx, dd, params);
    CHECK(fn(1.0 - r.step) <= fx + params.beta * r.step * dd);
    if (r.step < 1.0) {
      const double wider = r.step / params.theta;
      CHECK(fn(1.0 - wider) > fx + params.beta * wider * dd);
    }
  }
}

TEST_CASE("armijo contract errors") {
  ScalarObjective f([](double t) { return t * t; }, [](double t) { return 2 * t; });
  const Vector x{1.0}, d{-1.0};
  CHECK_THROWS_AS(armijo_step(f, x, d, 1.0, 0.0, {}), std::invalid_argument);
  CHECK_THROWS_AS(armijo_step(f, x, d, 1.0, 2.0, {}), std::invalid_argument);

  // A stale f_x below every trial value never admits a step.
  ScalarObjective flat([](double) { return 1.0; }, [](double) { return 0.0; });
  CHECK_THROWS_AS(armijo_step(flat, x, d, 0.0, -1.0, {}), LineSearchError);
  CHECK(flat.function_evals() == 61);
}

TEST_CASE("counters charge value, gradient and partial exactly") {
  LinearObjective f(Vector{1.0, 2.0, 3.0, 4.0});
  const Vector x{1.0, 1.0, 1.0, 1.0};
  f.value(x);
  f.value(x);
  f.gradient(x);
  f.partial(x, 2);
  f.gradient_dot_point(x);
  CHECK(f.function_evals() == 2);
  CHECK(f.partial_evals() == 5);
  {
    SmoothObjective::UncountedScope quiet(f);
    f.value(x);
    f.gradient(x);
    f.partial(x, 0);
  }
  CHECK(f.function_evals() == 2);
  CHECK(f.partial_evals() == 5);
  f.value(x);
  CHECK(f.function_evals() == 3);
  f.reset_counters();
  CHECK(f.function_evals() == 0);
  CHECK(f.partial_evals() == 0);
  CHECK_THROWS_AS(f.partial(x, 4), std::invalid_argument);
  CHECK_THROWS_AS(f.value(Vector{1.0}), std::invalid_argument);
}

TEST_CASE("step toward vertex is a convex combination") {
  const Vector x{2.0, 3.0, 5.0};
  Vector out(3);
  step_toward_vertex(x, 2, 10.0, 0.5, out);
  CHECK(out[0] == doctest::Approx(1.0));
  CHECK(out[1] == doctest::Approx(1.5));
  CHECK(out[2] == doctest::Approx(7.5));
  step_toward_vertex(x, 0, 10.0, 1.0, out);
  CHECK(out == Vector{10.0, 0.0, 0.0});
}
