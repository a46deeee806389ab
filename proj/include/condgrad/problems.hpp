#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "condgrad/core.hpp"

namespace condgrad {

/// Row-major dense matrix.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> data() const { return data_; }

  /// out = A x
  void multiply(std::span<const double> x, std::span<double> out) const;
  /// <column j, v>
  double column_dot(std::size_t j, std::span<const double> v) const;
  /// max_i sum_j |a_ij|
  double max_abs_row_sum() const;
  DenseMatrix gram() const;  // A^T A

  friend bool operator==(const DenseMatrix&, const DenseMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Benchmark instance. `rows` is only meaningful for series 3 and 4.
struct ProblemSpec {
  int series = 1;
  std::size_t rows = 0;
  std::size_t n = 5;
  double mass = 10.0;

  void validate() const;
  SimplexSet feasible_set() const { return {n, mass}; }
  std::string label() const;
};

DenseMatrix build_phi1_matrix(std::size_t n);

struct BarrierTerms {
  Vector c;
  double d;
};
BarrierTerms build_phi2_terms(std::size_t n);

struct LeastSquaresData {
  DenseMatrix p;
  Vector q;
};
LeastSquaresData build_phi3_data(std::size_t m, std::size_t n, double mass);

/// 1 / (<c, x> + d)
class ReciprocalBarrier {
 public:
  explicit ReciprocalBarrier(BarrierTerms terms);

  double value(std::span<const double> x) const;
  double partial(std::span<const double> x, std::size_t i) const;
  void add_gradient(std::span<const double> x, std::span<double> out) const;
  /// <grad, x>, computed from data only.
  double gradient_dot_point(std::span<const double> x) const;
  /// Hessian norm bound over {<c, x> >= 0}: 2 |c|^2 / d^3.
  double lipschitz_bound() const;
  const BarrierTerms& terms() const { return terms_; }

 private:
  double denominator(std::span<const double> x) const;
  BarrierTerms terms_;
};

/// 0.5 <P x, x> (+ optional barrier), P symmetric.
class QuadraticObjective final : public SmoothObjective {
 public:
  explicit QuadraticObjective(DenseMatrix p, std::optional<ReciprocalBarrier> barrier = {});
  const DenseMatrix& matrix() const { return p_; }

 protected:
  double do_value(std::span<const double> x) override;
  void do_gradient(std::span<const double> x, std::span<double> out) override;
  double do_partial(std::span<const double> x, std::size_t i) override;
  std::optional<double> do_gradient_dot_point(std::span<const double> x) override;

 private:
  double quadratic_partial(std::span<const double> x, std::size_t i) const;
  double quadratic_form(std::span<const double> x) const;

  DenseMatrix p_;
  std::optional<ReciprocalBarrier> barrier_;
};

/// 0.5 |P x - q|^2 (+ optional barrier). Keeps the residual of the last
/// evaluated point, so partials at an unchanged point cost O(m).
class LeastSquaresObjective final : public SmoothObjective {
 public:
  LeastSquaresObjective(LeastSquaresData data, std::optional<ReciprocalBarrier> barrier = {});

 protected:
  double do_value(std::span<const double> x) override;
  void do_gradient(std::span<const double> x, std::span<double> out) override;
  double do_partial(std::span<const double> x, std::size_t i) override;
  std::optional<double> do_gradient_dot_point(std::span<const double> x) override;

 private:
  const Vector& residual(std::span<const double> x);

  LeastSquaresData data_;
  std::optional<ReciprocalBarrier> barrier_;
  Vector cached_x_;
  Vector cached_residual_;
  Vector cached_px_;
  bool cache_valid_ = false;
};

std::unique_ptr<SmoothObjective> make_objective(const ProblemSpec& spec);

/// Upper bound on the gradient Lipschitz constant over the simplex.
double lipschitz_upper_bound(const ProblemSpec& spec, const SimplexSet& region);

}  // namespace condgrad
