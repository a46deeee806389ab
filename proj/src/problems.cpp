#include "condgrad/problems.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace condgrad {

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

void DenseMatrix::multiply(std::span<const double> x, std::span<double> out) const {
  for (std::size_t i = 0; i < rows_; ++i) out[i] = dot(row(i), x);
}

double DenseMatrix::column_dot(std::size_t j, std::span<const double> v) const {
  double s = 0.0;
  for (std::size_t i = 0; i < rows_; ++i) s += data_[i * cols_ + j] * v[i];
  return s;
}

double DenseMatrix::max_abs_row_sum() const {
  double best = 0.0;
  for (std::size_t i = 0; i < rows_; ++i) {
    double s = 0.0;
    for (double v : row(i)) s += std::abs(v);
    best = std::max(best, s);
  }
  return best;
}

DenseMatrix DenseMatrix::gram() const {
  DenseMatrix g(cols_, cols_);
  for (std::size_t a = 0; a < cols_; ++a) {
    for (std::size_t b = a; b < cols_; ++b) {
      double s = 0.0;
      for (std::size_t r = 0; r < rows_; ++r) s += (*this)(r, a) * (*this)(r, b);
      g(a, b) = s;
      g(b, a) = s;
    }
  }
  return g;
}

void ProblemSpec::validate() const {
  if (series < 1 || series > 4) {
    throw std::invalid_argument("problem series must be 1, 2, 3 or 4, got " +
                                std::to_string(series));
  }
  if (n < 1) throw std::invalid_argument("problem dimension n must be at least 1");
  if ((series == 3 || series == 4) && rows < 1) {
    throw std::invalid_argument("series 3 and 4 need a row dimension m >= 1");
  }
  if (!(mass > 0.0) || !std::isfinite(mass)) {
    throw std::invalid_argument("simplex mass b must be positive");
  }
}

std::string ProblemSpec::label() const {
  std::string s = "series " + std::to_string(series);
  if (series >= 3) s += " m=" + std::to_string(rows);
  return s + " n=" + std::to_string(n);
}

// Index arithmetic below is 1-based to match the generating formulas.

DenseMatrix build_phi1_matrix(std::size_t n) {
  if (n < 1) throw std::invalid_argument("build_phi1_matrix: n must be at least 1");
  DenseMatrix p(n, n);
  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = 1; j <= n; ++j) {
      const double di = static_cast<double>(i);
      const double dj = static_cast<double>(j);
      if (i < j) p(i - 1, j - 1) = std::sin(di) * std::cos(dj);
      if (i > j) p(i - 1, j - 1) = std::sin(dj) * std::cos(di);
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    double off = 0.0;
    for (std::size_t s = 0; s < n; ++s) {
      if (s != i) off += std::abs(p(i, s));
    }
    p(i, i) = off + 1.0;
  }
  return p;
}

BarrierTerms build_phi2_terms(std::size_t n) {
  if (n < 1) throw std::invalid_argument("build_phi2_terms: n must be at least 1");
  BarrierTerms t{Vector(n), 5.0};
  for (std::size_t i = 1; i <= n; ++i) t.c[i - 1] = 2.0 + std::sin(static_cast<double>(i));
  return t;
}

LeastSquaresData build_phi3_data(std::size_t m, std::size_t n, double mass) {
  if (m < 1 || n < 1) throw std::invalid_argument("build_phi3_data: m and n must be at least 1");
  if (!(mass > 0.0)) throw std::invalid_argument("build_phi3_data: mass must be positive");
  LeastSquaresData data{DenseMatrix(m, n), Vector(m)};
  for (std::size_t i = 1; i <= m; ++i) {
    for (std::size_t j = 1; j <= n; ++j) {
      const double r = static_cast<double>(i) / static_cast<double>(j);
      double v = std::log(1.0 + r) * std::sin(r) / static_cast<double>(i + j);
      if (i == j) v += 2.0;
      data.p(i - 1, j - 1) = v;
    }
  }
  for (std::size_t i = 0; i < m; ++i) {
    double s = 0.0;
    for (double v : data.p.row(i)) s += v;
    data.q[i] = mass * s;
  }
  return data;
}

ReciprocalBarrier::ReciprocalBarrier(BarrierTerms terms) : terms_(std::move(terms)) {
  if (!(terms_.d > 0.0)) throw std::invalid_argument("barrier offset d must be positive");
}

double ReciprocalBarrier::denominator(std::span<const double> x) const {
  return dot(terms_.c, x) + terms_.d;
}

double ReciprocalBarrier::value(std::span<const double> x) const { return 1.0 / denominator(x); }

double ReciprocalBarrier::partial(std::span<const double> x, std::size_t i) const {
  const double u = denominator(x);
  return -terms_.c[i] / (u * u);
}

void ReciprocalBarrier::add_gradient(std::span<const double> x, std::span<double> out) const {
  const double u = denominator(x);
  const double u2 = u * u;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += -terms_.c[i] / u2;
}

double ReciprocalBarrier::gradient_dot_point(std::span<const double> x) const {
  const double cx = dot(terms_.c, x);
  const double u = cx + terms_.d;
  return -cx / (u * u);
}

double ReciprocalBarrier::lipschitz_bound() const {
  const double d = terms_.d;
  return 2.0 * dot(terms_.c, terms_.c) / (d * d * d);
}

QuadraticObjective::QuadraticObjective(DenseMatrix p, std::optional<ReciprocalBarrier> barrier)
    : SmoothObjective(p.cols()), p_(std::move(p)), barrier_(std::move(barrier)) {
  if (p_.rows() != p_.cols()) throw std::invalid_argument("quadratic objective needs square P");
  if (barrier_ && barrier_->terms().c.size() != p_.cols()) {
    throw std::invalid_argument("barrier dimension does not match P");
  }
}

double QuadraticObjective::quadratic_partial(std::span<const double> x, std::size_t i) const {
  return dot(p_.row(i), x);
}

double QuadraticObjective::quadratic_form(std::span<const double> x) const {
  // Extended accumulation: near a solution the per-step decrease of f is far
  // below the rounding error of a plain double sum of n^2 terms.
  long double s = 0.0L;
  for (std::size_t i = 0; i < x.size(); ++i) {
    long double row = 0.0L;
    for (std::size_t j = 0; j < x.size(); ++j) row += static_cast<long double>(p_(i, j)) * x[j];
    s += static_cast<long double>(x[i]) * row;
  }
  return static_cast<double>(s);
}

double QuadraticObjective::do_value(std::span<const double> x) {
  double v = 0.5 * quadratic_form(x);
  if (barrier_) v += barrier_->value(x);
  return v;
}

void QuadraticObjective::do_gradient(std::span<const double> x, std::span<double> out) {
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = do_partial(x, i);
}

double QuadraticObjective::do_partial(std::span<const double> x, std::size_t i) {
  double g = quadratic_partial(x, i);
  if (barrier_) g += barrier_->partial(x, i);
  return g;
}

std::optional<double> QuadraticObjective::do_gradient_dot_point(std::span<const double> x) {
  // <Px, x> = 2 * phi1(x)
  double s = quadratic_form(x);
  if (barrier_) s += barrier_->gradient_dot_point(x);
  return s;
}

LeastSquaresObjective::LeastSquaresObjective(LeastSquaresData data,
                                             std::optional<ReciprocalBarrier> barrier)
    : SmoothObjective(data.p.cols()), data_(std::move(data)), barrier_(std::move(barrier)) {
  if (data_.q.size() != data_.p.rows()) {
    throw std::invalid_argument("least squares: q length must equal row count of P");
  }
  if (barrier_ && barrier_->terms().c.size() != data_.p.cols()) {
    throw std::invalid_argument("barrier dimension does not match P");
  }
  cached_residual_.resize(data_.p.rows());
  cached_px_.resize(data_.p.rows());
}

const Vector& LeastSquaresObjective::residual(std::span<const double> x) {
  if (cache_valid_ && std::equal(x.begin(), x.end(), cached_x_.begin(), cached_x_.end())) {
    return cached_residual_;
  }
  cached_x_.assign(x.begin(), x.end());
  for (std::size_t r = 0; r < data_.p.rows(); ++r) {
    long double px = 0.0L;
    const auto row = data_.p.row(r);
    for (std::size_t j = 0; j < row.size(); ++j) px += static_cast<long double>(row[j]) * x[j];
    cached_px_[r] = static_cast<double>(px);
    cached_residual_[r] = static_cast<double>(px - data_.q[r]);
  }
  cache_valid_ = true;
  return cached_residual_;
}

double LeastSquaresObjective::do_value(std::span<const double> x) {
  long double sq = 0.0L;
  for (double r : residual(x)) sq += static_cast<long double>(r) * r;
  double v = 0.5 * static_cast<double>(sq);
  if (barrier_) v += barrier_->value(x);
  return v;
}

void LeastSquaresObjective::do_gradient(std::span<const double> x, std::span<double> out) {
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = do_partial(x, i);
}

double LeastSquaresObjective::do_partial(std::span<const double> x, std::size_t i) {
  double g = data_.p.column_dot(i, residual(x));
  if (barrier_) g += barrier_->partial(x, i);
  return g;
}

std::optional<double> LeastSquaresObjective::do_gradient_dot_point(std::span<const double> x) {
  // <P^T r, x> = <r, P x>
  double s = dot(residual(x), cached_px_);
  if (barrier_) s += barrier_->gradient_dot_point(x);
  return s;
}

std::unique_ptr<SmoothObjective> make_objective(const ProblemSpec& spec) {
  spec.validate();
  std::optional<ReciprocalBarrier> barrier;
  if (spec.series == 2 || spec.series == 4) barrier.emplace(build_phi2_terms(spec.n));
  if (spec.series <= 2) {
    return std::make_unique<QuadraticObjective>(build_phi1_matrix(spec.n), std::move(barrier));
  }
  return std::make_unique<LeastSquaresObjective>(build_phi3_data(spec.rows, spec.n, spec.mass),
                                                 std::move(barrier));
}

double lipschitz_upper_bound(const ProblemSpec& spec, const SimplexSet& region) {
  spec.validate();
  if (region.dimension() != spec.n) {
    throw std::invalid_argument("lipschitz_upper_bound: region dimension mismatch");
  }
  // Gershgorin: for symmetric H, lambda_max(H) <= max absolute row sum.
  double bound = spec.series <= 2 ? build_phi1_matrix(spec.n).max_abs_row_sum()
                                  : build_phi3_data(spec.rows, spec.n, spec.mass).p.gram().max_abs_row_sum();
  if (spec.series == 2 || spec.series == 4) {
    bound += ReciprocalBarrier(build_phi2_terms(spec.n)).lipschitz_bound();
  }
  return bound;
}

}  // namespace condgrad
