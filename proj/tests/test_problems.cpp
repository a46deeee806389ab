#include <doctest.h>

#include <cmath>
#include <random>

#include "condgrad/oracle.hpp"
#include "condgrad/problems.hpp"

using namespace condgrad;

namespace {

double norm_diff(const Vector& a, const Vector& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

ProblemSpec spec_for(int series, std::size_t n) {
  return {series, series >= 3 ? std::max<std::size_t>(1, n / 2) : 0, n, 10.0};
}

}  // namespace

TEST_CASE("phi1 matrix, small sizes") {
  const DenseMatrix p1 = build_phi1_matrix(1);
  REQUIRE(p1.rows() == 1);
  CHECK(p1(0, 0) == 1.0);

  const DenseMatrix p2 = build_phi1_matrix(2);
  const double off = std::sin(1.0) * std::cos(2.0);
  CHECK(p2(0, 1) == doctest::Approx(-0.350175).epsilon(1e-6));
  CHECK(p2(0, 1) == doctest::Approx(off).epsilon(1e-15));
  CHECK(p2(1, 0) == p2(0, 1));
  CHECK(p2(0, 0) == doctest::Approx(1.350175).epsilon(1e-6));
  CHECK(p2(1, 1) == doctest::Approx(std::abs(off) + 1.0).epsilon(1e-15));
  CHECK_THROWS_AS(build_phi1_matrix(0), std::invalid_argument);
}

TEST_CASE("phi1 matrix is symmetric and strictly diagonally dominant") {
  for (std::size_t n : {3, 5, 20, 100}) {
    const DenseMatrix p = build_phi1_matrix(n);
    for (std::size_t i = 0; i < n; ++i) {
      double off = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        REQUIRE(std::isfinite(p(i, j)));
        REQUIRE(p(i, j) == p(j, i));
        if (j != i) off += std::abs(p(i, j));
      }
      REQUIRE(p(i, i) > off);
    }
  }
}

TEST_CASE("barrier terms") {
  const BarrierTerms t = build_phi2_terms(50);
  CHECK(t.c[0] == doctest::Approx(2.841471).epsilon(1e-6));
  CHECK(t.d == 5.0);
  for (double c : t.c) {
    CHECK(c >= 1.0);
    CHECK(c <= 3.0);
  }
}

TEST_CASE("least squares data") {
  const LeastSquaresData one = build_phi3_data(1, 1, 10.0);
  const double p11 = std::log(2.0) * std::sin(1.0) / 2.0 + 2.0;
  CHECK(one.p(0, 0) == doctest::Approx(p11).epsilon(1e-15));
  CHECK(one.p(0, 0) == doctest::Approx(2.2916316).epsilon(1e-7));
  CHECK(one.q[0] == doctest::Approx(10.0 * p11).epsilon(1e-15));

  const LeastSquaresData d = build_phi3_data(10, 20, 10.0);
  for (std::size_t i = 0; i < 10; ++i) {
    const double i1 = static_cast<double>(i + 1);
    CHECK(d.p(i, i) == doctest::Approx(std::log(2.0) * std::sin(1.0) / (2.0 * i1) + 2.0));
    CHECK(d.p(i, i) > 2.0);
  }
  Vector pb(10);
  d.p.multiply(Vector(20, 10.0), pb);
  for (std::size_t i = 0; i < 10; ++i) CHECK(d.q[i] == doctest::Approx(pb[i]).epsilon(1e-14));
  CHECK_THROWS_AS(build_phi3_data(0, 3, 10.0), std::invalid_argument);
}

TEST_CASE("objective values at hand-checkable points") {
  SUBCASE("series 1, n = 1") {
    auto f = make_objective({1, 0, 1, 10.0});
    CHECK(f->value(Vector{10.0}) == doctest::Approx(50.0));
    CHECK(f->gradient(Vector{10.0})[0] == doctest::Approx(10.0));
  }
  SUBCASE("series 3 vanishes at the all-b vector") {
    for (auto [m, n] : {std::pair<std::size_t, std::size_t>{1, 1}, {2, 5}, {5, 10}}) {
      auto f = make_objective({3, m, n, 10.0});
      CHECK(f->value(Vector(n, 10.0)) == doctest::Approx(0.0).epsilon(1e-20));
    }
  }
  SUBCASE("series 2, n = 2, x = (5, 5)") {
    auto f = make_objective({2, 0, 2, 10.0});
    const double c1 = 2.0 + std::sin(1.0), c2 = 2.0 + std::sin(2.0);
    const DenseMatrix p = build_phi1_matrix(2);
    const double quad = 0.5 * 25.0 * (p(0, 0) + 2 * p(0, 1) + p(1, 1));
    CHECK(f->value(Vector{5.0, 5.0}) ==
          doctest::Approx(quad + 1.0 / (5.0 * (c1 + c2) + 5.0)).epsilon(1e-14));
  }
}

TEST_CASE("spec validation") {
  CHECK_THROWS_AS(make_objective({0, 0, 5, 10.0}), std::invalid_argument);
  CHECK_THROWS_AS(make_objective({5, 0, 5, 10.0}), std::invalid_argument);
  CHECK_THROWS_AS(make_objective({1, 0, 0, 10.0}), std::invalid_argument);
  CHECK_THROWS_AS(make_objective({3, 0, 5, 10.0}), std::invalid_argument);
  CHECK_THROWS_AS(make_objective({1, 0, 5, 0.0}), std::invalid_argument);
  CHECK_NOTHROW(make_objective({1, 0, 5, 10.0}));
}

TEST_CASE("analytic gradients match finite differences") {
  std::mt19937_64 rng(5);
  for (int series = 1; series <= 4; ++series) {
    for (std::size_t n : {1, 3, 8}) {
      const ProblemSpec spec = spec_for(series, n);
      const SimplexSet set = spec.feasible_set();
      auto f = make_objective(spec);
      for (int t = 0; t < 20; ++t) {
        const Vector x = oracle::random_simplex_point(set, rng);
        REQUIRE(oracle::relative_error(oracle::fd_gradient(*f, x), f->gradient(x)) <= 1e-5);
      }
    }
  }
}

TEST_CASE("full gradient and partials agree bit for bit") {
  std::mt19937_64 rng(9);
  for (int series = 1; series <= 4; ++series) {
    const ProblemSpec spec = spec_for(series, 7);
    const SimplexSet set = spec.feasible_set();
    auto f = make_objective(spec);
    const Vector x = oracle::random_simplex_point(set, rng);
    const Vector g = f->gradient(x);
    for (std::size_t i = 0; i < 7; ++i) REQUIRE(f->partial(x, i) == g[i]);
  }
}

TEST_CASE("gradient dot point fast path is consistent") {
  std::mt19937_64 rng(13);
  for (int series = 1; series <= 4; ++series) {
    const ProblemSpec spec = spec_for(series, 10);
    const SimplexSet set = spec.feasible_set();
    auto f = make_objective(spec);
    for (int t = 0; t < 50; ++t) {
      const Vector x = oracle::random_simplex_point(set, rng);
      const auto fast = f->gradient_dot_point(x);
      REQUIRE(fast.has_value());
      const double slow = dot(f->gradient(x), x);
      REQUIRE(std::abs(*fast - slow) <= 1e-9 * std::max(1.0, std::abs(slow)));
    }
    f->reset_counters();
    f->gradient_dot_point(set.barycenter());
    CHECK(f->partial_evals() == 0);
    CHECK(f->function_evals() == 0);
  }
}

TEST_CASE("objectives are deterministic") {
  for (int series = 1; series <= 4; ++series) {
    const ProblemSpec spec = spec_for(series, 10);
    auto a = make_objective(spec);
    auto b = make_objective(spec);
    const Vector x = spec.feasible_set().barycenter();
    CHECK(a->value(x) == b->value(x));
    CHECK(a->gradient(x) == b->gradient(x));
  }
  CHECK(build_phi1_matrix(30) == build_phi1_matrix(30));
}

TEST_CASE("convexity witness along random segments") {
  std::mt19937_64 rng(17);
  for (int series = 1; series <= 4; ++series) {
    const ProblemSpec spec = spec_for(series, 6);
    const SimplexSet set = spec.feasible_set();
    auto f = make_objective(spec);
    for (int t = 0; t < 100; ++t) {
      const Vector x = oracle::random_simplex_point(set, rng);
      const Vector y = oracle::random_simplex_point(set, rng);
      Vector diff(x.size());
      for (std::size_t i = 0; i < x.size(); ++i) diff[i] = y[i] - x[i];
      const double lhs = f->value(y);
      const double rhs = f->value(x) + dot(f->gradient(x), diff);
      REQUIRE(lhs >= rhs - 1e-9 * std::max(1.0, std::abs(lhs)));
    }
  }
}

TEST_CASE("lipschitz bounds") {
  SUBCASE("series 1, n = 1") {
    const ProblemSpec spec{1, 0, 1, 10.0};
    CHECK(lipschitz_upper_bound(spec, spec.feasible_set()) == 1.0);
  }
  SUBCASE("series 1, n = 2 dominates the largest eigenvalue") {
    const ProblemSpec spec{1, 0, 2, 10.0};
    const DenseMatrix p = build_phi1_matrix(2);
    // symmetric 2x2 with equal diagonal: eigenvalues a +- |b|
    const double lambda_max = p(0, 0) + std::abs(p(0, 1));
    const double l = lipschitz_upper_bound(spec, spec.feasible_set());
    CHECK(l == doctest::Approx(p.max_abs_row_sum()));
    CHECK(l >= lambda_max - 1e-12);
  }
  SUBCASE("every series dominates sampled gradient ratios") {
    std::mt19937_64 rng(19);
    for (int series = 1; series <= 4; ++series) {
      for (std::size_t n : {2, 5, 10}) {
        const ProblemSpec spec = spec_for(series, n);
        const SimplexSet set = spec.feasible_set();
        const double l = lipschitz_upper_bound(spec, set);
        auto f = make_objective(spec);
        double worst = 0.0;
        for (int t = 0; t < 1000; ++t) {
          const Vector x = oracle::random_simplex_point(set, rng);
          const Vector y = oracle::random_simplex_point(set, rng);
          const double dx = norm_diff(x, y);
          if (dx < 1e-9) continue;
          worst = std::max(worst, norm_diff(f->gradient(x), f->gradient(y)) / dx);
        }
        INFO("series " << series << " n=" << n);
        // n = 2 makes the row-sum bound exact, so allow rounding
        REQUIRE(worst <= l * (1.0 + 1e-9));
      }
    }
  }
  CHECK_THROWS_AS(lipschitz_upper_bound({1, 0, 3, 10.0}, SimplexSet(4, 10.0)), std::invalid_argument);
}
