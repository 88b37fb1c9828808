#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace fenc {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Observations on a common time index; row t holds period t.
class TimeSeriesMatrix {
 public:
  explicit TimeSeriesMatrix(Matrix values);

  const Matrix& values() const { return values_; }
  Index periods() const { return values_.rows(); }
  Index columns() const { return values_.cols(); }
  Vector column(Index j) const { return values_.col(j); }

 private:
  Matrix values_;
};

struct OlsFit {
  Vector coefficients;
  Vector residuals;
  double ssr = 0.0;
};

/// Householder-QR least squares. Throws RankDeficient when the reciprocal
/// condition number of X'X drops below 1e-12.
OlsFit solve_ols(const Matrix& X, const Vector& y);

/// Regression layout for direct h-step forecasts.
///
/// Row t of `predictors` is the regressor vector known at date t (intercept in
/// column 0). The target dated s is paired with predictor row s - h, so every
/// estimation pair only uses information dated h periods before its target.
/// Rows before `first_row` are not usable (lags not yet available).
class DirectDesign {
 public:
  DirectDesign(Matrix predictors, Vector target, int horizon, Index first_row = 0);

  const Matrix& predictors() const { return predictors_; }
  const Vector& target() const { return target_; }
  int horizon() const { return horizon_; }
  Index first_row() const { return first_row_; }
  Index periods() const { return target_.size(); }
  Index parameters() const { return predictors_.cols(); }

  /// The nested design built from the first `k` predictor columns.
  DirectDesign leading_columns(Index k) const;

  /// Stacked (regressor, target) pairs for all targets dated up to `last_target`
  /// (0-based, inclusive).
  Matrix stacked_regressors(Index last_target) const;
  Vector stacked_targets(Index last_target) const;

 private:
  Matrix predictors_;
  Vector target_;
  int horizon_;
  Index first_row_;
};

/// Running least-squares state updated one observation at a time through
/// Givens rotations of the triangular factor, so that R'R equals the running
/// cross-product matrix without ever forming it.
class RecursiveFitState {
 public:
  explicit RecursiveFitState(Index dim);

  void absorb(const Eigen::Ref<const Vector>& x, double y);

  Index dim() const { return r_.rows(); }
  Index count() const { return count_; }
  Matrix gram() const;
  Vector cross() const;

  /// Current coefficients. Throws InsufficientData or RankDeficient.
  Vector coefficients() const;
  void coefficients_into(Vector& out) const;

 private:
  Matrix r_;
  Vector qty_;
  Index count_ = 0;
};

/// First forecast origin k0 = floor(T * pi0), in 1-based period units.
Index first_origin(Index periods, double pi0);

/// Coefficient paths for origins t = k0, ..., T - h (1-based). Entry i is the
/// fit on every usable pair whose target is dated at or before k0 + i.
std::vector<Vector> expanding_window_coefficients(const DirectDesign& design, Index k0);

/// Pseudo out-of-sample errors y_{t+h} - theta_t' x_t for t = k0, ..., T - h.
Vector recursive_forecast_errors(const DirectDesign& design, Index k0);

/// Paired errors for a design and its nested benchmark made of the first
/// `benchmark_columns` columns, computed in one pass.
struct NestedErrors {
  Vector benchmark;
  Vector large;
};
NestedErrors nested_forecast_errors(const DirectDesign& large, Index benchmark_columns,
                                    Index k0);

/// BIC lag choice for the direct regression of `target` on an intercept and
/// predictor lags t-h-j, j = 0..p. All candidates share the sample implied by
/// p_max. Missing leading values are encoded as NaN. Ties go to the smaller p.
int bic_select_lag(std::span<const double> target, std::span<const double> predictor, int h,
                   int p_max);

/// Autoregressive special case: predictor and target are the same series.
int bic_select_lag(std::span<const double> y, int h, int p_max);

}  // namespace fenc
