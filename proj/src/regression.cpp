#include "fenc/regression.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "fenc/error.hpp"

namespace fenc {

namespace {

constexpr double kMinReciprocalCondition = 1e-12;

// Reciprocal condition number of R'R from the singular values of R.
double gram_rcond(const Matrix& r) {
  Eigen::JacobiSVD<Matrix> svd(r);
  const Vector& sv = svd.singularValues();
  if (sv.size() == 0 || sv(0) == 0.0) return 0.0;
  const double ratio = sv(sv.size() - 1) / sv(0);
  return ratio * ratio;
}

}  // namespace

TimeSeriesMatrix::TimeSeriesMatrix(Matrix values) : values_(std::move(values)) {
  if (values_.rows() < 1) fail(ErrorCode::EmptyInput, "time series matrix needs at least one period");
  if (!values_.allFinite()) fail(ErrorCode::InvalidArgument, "time series matrix has non-finite entries");
}

OlsFit solve_ols(const Matrix& X, const Vector& y) {
  if (X.rows() != y.size()) {
    fail(ErrorCode::InvalidArgument, "solve_ols: X has " + std::to_string(X.rows()) +
                                         " rows but y has " + std::to_string(y.size()));
  }
  if (X.cols() < 1) fail(ErrorCode::InvalidArgument, "solve_ols: no regressors");
  if (X.rows() < X.cols()) {
    fail(ErrorCode::InsufficientData, "solve_ols: fewer observations than regressors");
  }
  Eigen::HouseholderQR<Matrix> qr(X);
  const Index k = X.cols();
  Matrix r = qr.matrixQR().topLeftCorner(k, k).triangularView<Eigen::Upper>();
  if (gram_rcond(r) < kMinReciprocalCondition) {
    fail(ErrorCode::RankDeficient, "solve_ols: cross-product matrix is singular to working precision");
  }
  OlsFit fit;
  fit.coefficients = qr.solve(y);
  fit.residuals = y - X * fit.coefficients;
  fit.ssr = fit.residuals.squaredNorm();
  return fit;
}

DirectDesign::DirectDesign(Matrix predictors, Vector target, int horizon, Index first_row)
    : predictors_(std::move(predictors)),
      target_(std::move(target)),
      horizon_(horizon),
      first_row_(first_row) {
  if (horizon_ < 1) fail(ErrorCode::InvalidArgument, "direct design: horizon must be >= 1");
  if (predictors_.rows() != target_.size()) {
    fail(ErrorCode::InvalidArgument, "direct design: predictor rows and target length differ");
  }
  if (predictors_.cols() < 1) fail(ErrorCode::InvalidArgument, "direct design: no predictor columns");
  if (first_row_ < 0 || first_row_ >= predictors_.rows()) {
    fail(ErrorCode::InvalidArgument, "direct design: first usable row out of range");
  }
  const Index used = predictors_.rows() - first_row_;
  if (!predictors_.bottomRows(used).allFinite()) {
    fail(ErrorCode::InvalidArgument, "direct design: non-finite predictor after the first usable row");
  }
  if (!(predictors_.col(0).tail(used).array() == 1.0).all()) {
    fail(ErrorCode::InvalidArgument, "direct design: first predictor column must be the intercept");
  }
  const Index first_target = first_row_ + horizon_;
  if (first_target < target_.size() &&
      !target_.tail(target_.size() - first_target).allFinite()) {
    fail(ErrorCode::InvalidArgument, "direct design: non-finite target in the estimation range");
  }
}

DirectDesign DirectDesign::leading_columns(Index k) const {
  if (k < 1 || k > parameters()) fail(ErrorCode::InvalidArgument, "leading_columns: bad column count");
  return DirectDesign(predictors_.leftCols(k), target_, horizon_, first_row_);
}

Matrix DirectDesign::stacked_regressors(Index last_target) const {
  const Index first = first_row_ + horizon_;
  const Index rows = std::max<Index>(0, last_target - first + 1);
  return predictors_.middleRows(first_row_, rows);
}

Vector DirectDesign::stacked_targets(Index last_target) const {
  const Index first = first_row_ + horizon_;
  const Index rows = std::max<Index>(0, last_target - first + 1);
  return target_.segment(first, rows);
}

RecursiveFitState::RecursiveFitState(Index dim)
    : r_(Matrix::Zero(dim, dim)), qty_(Vector::Zero(dim)) {}

void RecursiveFitState::absorb(const Eigen::Ref<const Vector>& x, double y) {
  const Index k = dim();
  // Small fixed buffer keeps the hot path allocation free for typical sizes.
  double stack_row[16];
  std::vector<double> heap_row;
  double* row = stack_row;
  if (k > 16) {
    heap_row.resize(static_cast<std::size_t>(k));
    row = heap_row.data();
  }
  for (Index j = 0; j < k; ++j) row[j] = x(j);

  for (Index i = 0; i < k; ++i) {
    const double b = row[i];
    if (b == 0.0) continue;
    const double a = r_(i, i);
    const double rho = std::hypot(a, b);
    const double c = a / rho;
    const double s = b / rho;
    r_(i, i) = rho;
    for (Index j = i + 1; j < k; ++j) {
      const double rij = r_(i, j);
      r_(i, j) = c * rij + s * row[j];
      row[j] = -s * rij + c * row[j];
    }
    const double zi = qty_(i);
    qty_(i) = c * zi + s * y;
    y = -s * zi + c * y;
  }
  ++count_;
}

Matrix RecursiveFitState::gram() const {
  const auto upper = r_.triangularView<Eigen::Upper>();
  return upper.transpose() * Matrix(upper);
}

Vector RecursiveFitState::cross() const {
  return r_.triangularView<Eigen::Upper>().transpose() * qty_;
}

Vector RecursiveFitState::coefficients() const {
  Vector out(dim());
  coefficients_into(out);
  return out;
}

void RecursiveFitState::coefficients_into(Vector& out) const {
  if (count_ < dim()) {
    fail(ErrorCode::InsufficientData, "recursive fit: " + std::to_string(count_) +
                                          " observations for " + std::to_string(dim()) +
                                          " parameters");
  }
  // Cheap screen first: the diagonal ratio bounds the true ratio from above.
  double dmin = std::numeric_limits<double>::infinity();
  double dmax = 0.0;
  for (Index i = 0; i < dim(); ++i) {
    const double d = std::abs(r_(i, i));
    dmin = std::min(dmin, d);
    dmax = std::max(dmax, d);
  }
  if (dmax == 0.0 || (dmin / dmax) * (dmin / dmax) < kMinReciprocalCondition ||
      gram_rcond(r_) < kMinReciprocalCondition) {
    fail(ErrorCode::RankDeficient, "recursive fit: cross-product matrix is singular to working precision");
  }
  out = r_.triangularView<Eigen::Upper>().solve(qty_);
}

Index first_origin(Index periods, double pi0) {
  if (!(pi0 > 0.0 && pi0 < 1.0)) fail(ErrorCode::InvalidArgument, "pi0 must lie in (0, 1)");
  // The small offset keeps exact products such as 1000 * 0.25 from rounding down.
  return static_cast<Index>(std::floor(static_cast<double>(periods) * pi0 + 1e-9));
}

namespace {

void check_origin(const DirectDesign& design, Index k0) {
  const Index periods = design.periods();
  const Index h = design.horizon();
  if (k0 < 1 || k0 > periods - h) {
    fail(ErrorCode::InsufficientData, "first origin k0 = " + std::to_string(k0) +
                                          " leaves no forecasts for T = " + std::to_string(periods) +
                                          ", h = " + std::to_string(h));
  }
  const Index first_fit = k0 - h - design.first_row();
  if (first_fit < design.parameters()) {
    fail(ErrorCode::InsufficientData, "first origin k0 = " + std::to_string(k0) + " gives " +
                                          std::to_string(std::max<Index>(first_fit, 0)) +
                                          " observations for " +
                                          std::to_string(design.parameters()) + " parameters");
  }
}

// Absorbs every pair whose target date is <= origin (0-based).
template <typename Visit>
void walk_origins(const DirectDesign& design, Index k0, Visit&& visit) {
  const Index h = design.horizon();
  const Index last_origin = design.periods() - h - 1;
  Index next_target = design.first_row() + h;
  for (Index origin = k0 - 1; origin <= last_origin; ++origin) {
    for (; next_target <= origin; ++next_target) {
      visit.absorb(design.predictors().row(next_target - h).transpose(),
                   design.target()(next_target));
    }
    try {
      visit.at_origin(origin);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::RankDeficient) {
        fail(ErrorCode::RankDeficient,
             std::string(e.what()) + " (origin t = " + std::to_string(origin + 1) + ")");
      }
      throw;
    }
  }
}

}  // namespace

std::vector<Vector> expanding_window_coefficients(const DirectDesign& design, Index k0) {
  check_origin(design, k0);
  struct Visitor {
    RecursiveFitState state;
    std::vector<Vector> path;
    void absorb(const Vector& x, double y) { state.absorb(x, y); }
    void at_origin(Index) { path.push_back(state.coefficients()); }
  } visitor{RecursiveFitState(design.parameters()), {}};
  walk_origins(design, k0, visitor);
  return std::move(visitor.path);
}

Vector recursive_forecast_errors(const DirectDesign& design, Index k0) {
  return nested_forecast_errors(design, design.parameters(), k0).large;
}

NestedErrors nested_forecast_errors(const DirectDesign& large, Index benchmark_columns, Index k0) {
  if (benchmark_columns < 1 || benchmark_columns > large.parameters()) {
    fail(ErrorCode::InvalidArgument, "nested_forecast_errors: bad benchmark column count");
  }
  check_origin(large, k0);
  const Index n = large.periods() - large.horizon() - k0 + 1;
  const Index k1 = benchmark_columns;
  const Index k2 = large.parameters();
  const bool same = k1 == k2;

  struct Visitor {
    const DirectDesign& design;
    Index k1;
    bool same;
    RecursiveFitState small;
    RecursiveFitState big;
    Vector theta_small;
    Vector theta_big;
    NestedErrors out;
    Index i = 0;

    void absorb(const Vector& x, double y) {
      big.absorb(x, y);
      if (!same) small.absorb(x.head(k1), y);
    }
    void at_origin(Index origin) {
      const auto x = design.predictors().row(origin);
      const double actual = design.target()(origin + design.horizon());
      big.coefficients_into(theta_big);
      out.large(i) = actual - x.dot(theta_big);
      if (same) {
        out.benchmark(i) = out.large(i);
      } else {
        small.coefficients_into(theta_small);
        out.benchmark(i) = actual - x.head(k1).dot(theta_small);
      }
      ++i;
    }
  } visitor{large, k1, same, RecursiveFitState(k1), RecursiveFitState(k2), Vector(k1), Vector(k2),
            NestedErrors{Vector(n), Vector(n)}};
  walk_origins(large, k0, visitor);
  return std::move(visitor.out);
}

namespace {

Index first_finite(std::span<const double> v) {
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (std::isfinite(v[i])) return static_cast<Index>(i);
  }
  return static_cast<Index>(v.size());
}

}  // namespace

int bic_select_lag(std::span<const double> target, std::span<const double> predictor, int h,
                   int p_max) {
  if (h < 1) fail(ErrorCode::InvalidArgument, "bic_select_lag: horizon must be >= 1");
  if (p_max < 0) fail(ErrorCode::InvalidArgument, "bic_select_lag: p_max must be >= 0");
  if (target.size() != predictor.size()) {
    fail(ErrorCode::InvalidArgument, "bic_select_lag: target and predictor lengths differ");
  }
  const Index len = static_cast<Index>(target.size());
  const Index start = std::max(first_finite(target), first_finite(predictor) + h + p_max);
  const Index n_eff = len - start;
  if (len < p_max + h + 10 || n_eff < p_max + 12) {
    fail(ErrorCode::InsufficientData, "bic_select_lag: " + std::to_string(n_eff) +
                                          " usable observations for p_max = " +
                                          std::to_string(p_max));
  }

  Vector y(n_eff);
  for (Index i = 0; i < n_eff; ++i) y(i) = target[static_cast<std::size_t>(start + i)];

  int best = -1;
  double best_bic = std::numeric_limits<double>::infinity();
  const double log_n = std::log(static_cast<double>(n_eff));
  for (int p = 0; p <= p_max; ++p) {
    Matrix X(n_eff, p + 2);
    X.col(0).setOnes();
    for (Index i = 0; i < n_eff; ++i) {
      const Index s = start + i;
      for (int j = 0; j <= p; ++j) X(i, j + 1) = predictor[static_cast<std::size_t>(s - h - j)];
    }
    double ssr = 0.0;
    try {
      ssr = solve_ols(X, y).ssr;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::RankDeficient) throw;
      continue;
    }
    const double bic = static_cast<double>(n_eff) * std::log(ssr / static_cast<double>(n_eff)) +
                       static_cast<double>(p + 2) * log_n;
    if (best < 0 || bic < best_bic) {
      best = p;
      best_bic = bic;
    }
  }
  if (best < 0) fail(ErrorCode::RankDeficient, "bic_select_lag: every candidate lag order is rank deficient");
  return best;
}

int bic_select_lag(std::span<const double> y, int h, int p_max) {
  return bic_select_lag(y, y, h, p_max);
}

}  // namespace fenc
