#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "fenc/error.hpp"
#include "fenc/regression.hpp"
#include "oracles.hpp"

using fenc::DirectDesign;
using fenc::ErrorCode;
using fenc::Index;
using fenc::Matrix;
using fenc::Vector;

namespace {

template <typename F>
ErrorCode error_code_of(F&& f) {
  try {
    f();
  } catch (const fenc::Error& e) {
    return e.code();
  }
  FAIL("expected fenc::Error");
  return ErrorCode::InvalidArgument;
}

struct RandomDesign {
  Matrix predictors;
  Vector target;
  int h;
  Index first_row;
  Index k0;
};

RandomDesign random_design(std::mt19937_64& rng) {
  std::normal_distribution<double> z;
  const Index T = std::uniform_int_distribution<Index>(60, 240)(rng);
  const Index k = std::uniform_int_distribution<Index>(1, 5)(rng);
  const int h = std::uniform_int_distribution<int>(1, 4)(rng);
  const Index first_row = std::uniform_int_distribution<Index>(0, 3)(rng);
  Matrix X(T, k);
  X.col(0).setOnes();
  for (Index j = 1; j < k; ++j) {
    double prev = 0.0;
    const double rho = std::uniform_real_distribution<double>(0.0, 0.95)(rng);
    for (Index t = 0; t < T; ++t) X(t, j) = prev = rho * prev + z(rng);
  }
  Vector y(T);
  for (Index t = 0; t < T; ++t) y(t) = t >= h ? 0.5 + 0.3 * X(t - h, k - 1) + z(rng) : z(rng);
  const Index k0 = first_row + h + k + std::uniform_int_distribution<Index>(2, 30)(rng);
  return {X, y, h, first_row, k0};
}

}  // namespace

TEST_CASE("solve_ols matches the normal equations") {
  std::mt19937_64 rng(21);
  std::normal_distribution<double> z;
  for (int c = 0; c < 100; ++c) {
    const Index n = std::uniform_int_distribution<Index>(10, 200)(rng);
    const Index k = std::uniform_int_distribution<Index>(1, 6)(rng);
    Matrix X(n, k);
    Vector y(n);
    for (Index i = 0; i < n; ++i) {
      for (Index j = 0; j < k; ++j) X(i, j) = z(rng);
      y(i) = z(rng);
    }
    const auto fit = fenc::solve_ols(X, y);
    CHECK((fit.coefficients - oracle::ols_normal_equations(X, y)).cwiseAbs().maxCoeff() < 1e-9);
    CHECK(fit.ssr == doctest::Approx(fit.residuals.squaredNorm()));
    CHECK((X.transpose() * fit.residuals).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("solve_ols rejects collinear and short designs") {
  Matrix X(5, 2);
  X << 1, 2, 1, 2, 1, 2, 1, 2, 1, 2;
  CHECK(error_code_of([&] { fenc::solve_ols(X, Vector::Ones(5)); }) == ErrorCode::RankDeficient);
  CHECK(error_code_of([] { fenc::solve_ols(Matrix::Ones(1, 2), Vector::Ones(1)); }) == ErrorCode::InsufficientData);
  CHECK(error_code_of([] { fenc::solve_ols(Matrix::Ones(3, 1), Vector::Ones(2)); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("expanding-window coefficients match batch refits") {
  std::mt19937_64 rng(22);
  for (int c = 0; c < 100; ++c) {
    const RandomDesign d = random_design(rng);
    const DirectDesign design(d.predictors, d.target, d.h, d.first_row);
    const auto path = fenc::expanding_window_coefficients(design, d.k0);
    REQUIRE(static_cast<Index>(path.size()) == design.periods() - d.h - d.k0 + 1);
    for (std::size_t i = 0; i < path.size(); ++i) {
      const Index origin = d.k0 - 1 + static_cast<Index>(i);
      const Vector expected = oracle::batch_refit(d.predictors, d.target, d.h, d.first_row, origin);
      CHECK((path[i] - expected).cwiseAbs().maxCoeff() < 1e-8);
    }
  }
}

TEST_CASE("recursive errors use the coefficients of their origin") {
  std::mt19937_64 rng(23);
  for (int c = 0; c < 20; ++c) {
    const RandomDesign d = random_design(rng);
    const DirectDesign design(d.predictors, d.target, d.h, d.first_row);
    const Vector errors = fenc::recursive_forecast_errors(design, d.k0);
    const auto path = fenc::expanding_window_coefficients(design, d.k0);
    for (Index i = 0; i < errors.size(); ++i) {
      const Index origin = d.k0 - 1 + i;
      const double expected = d.target(origin + d.h) - d.predictors.row(origin).dot(path[static_cast<std::size_t>(i)]);
      CHECK(errors(i) == doctest::Approx(expected).epsilon(1e-10));
    }
  }
}

TEST_CASE("nested errors equal separate recursive fits") {
  std::mt19937_64 rng(24);
  for (int c = 0; c < 20; ++c) {
    const RandomDesign d = random_design(rng);
    const DirectDesign design(d.predictors, d.target, d.h, d.first_row);
    const Index k1 = std::uniform_int_distribution<Index>(1, design.parameters())(rng);
    const auto nested = fenc::nested_forecast_errors(design, k1, d.k0);
    CHECK((nested.large - fenc::recursive_forecast_errors(design, d.k0)).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((nested.benchmark - fenc::recursive_forecast_errors(design.leading_columns(k1), d.k0))
              .cwiseAbs()
              .maxCoeff() < 1e-12);
  }
}

TEST_CASE("forecasts never use targets dated after their origin") {
  std::mt19937_64 rng(25);
  const RandomDesign d = random_design(rng);
  const DirectDesign design(d.predictors, d.target, d.h, d.first_row);
  const Vector base = fenc::recursive_forecast_errors(design, d.k0);
  const Index n = base.size();
  // Perturbing the target at date s may change error i only when s <= origin_i + h.
  for (Index s = d.k0 + d.h - 1; s < d.target.size(); s += 7) {
    Vector y = d.target;
    y(s) += 100.0;
    const Vector bumped = fenc::recursive_forecast_errors(DirectDesign(d.predictors, y, d.h, d.first_row), d.k0);
    for (Index i = 0; i < n; ++i) {
      const Index origin = d.k0 - 1 + i;
      if (s > origin + d.h) CHECK(bumped(i) == base(i));
    }
  }
}

TEST_CASE("recursive fit state") {
  fenc::RecursiveFitState state(2);
  CHECK(error_code_of([&] { state.coefficients(); }) == ErrorCode::InsufficientData);
  state.absorb((Vector(2) << 1, 0).finished(), 1.0);
  state.absorb((Vector(2) << 1, 1).finished(), 3.0);
  state.absorb((Vector(2) << 1, 2).finished(), 5.0);
  CHECK(state.count() == 3);
  CHECK(state.coefficients().isApprox((Vector(2) << 1, 2).finished()));
  CHECK(state.gram().isApprox((Matrix(2, 2) << 3, 3, 3, 5).finished()));
  fenc::RecursiveFitState flat(2);
  for (int i = 0; i < 5; ++i) flat.absorb((Vector(2) << 1, 1).finished(), 1.0);
  CHECK(error_code_of([&] { flat.coefficients(); }) == ErrorCode::RankDeficient);
}

TEST_CASE("first origin") {
  CHECK(fenc::first_origin(1000, 0.25) == 250);
  CHECK(fenc::first_origin(250, 0.25) == 62);
  CHECK(fenc::first_origin(100, 0.3) == 30);
  CHECK(error_code_of([] { fenc::first_origin(100, 1.0); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("origin checks") {
  std::mt19937_64 rng(26);
  const RandomDesign d = random_design(rng);
  const DirectDesign design(d.predictors, d.target, d.h, d.first_row);
  CHECK(error_code_of([&] { fenc::recursive_forecast_errors(design, 0); }) == ErrorCode::InsufficientData);
  CHECK(error_code_of([&] { fenc::recursive_forecast_errors(design, design.periods()); }) ==
        ErrorCode::InsufficientData);
  CHECK(error_code_of([&] { fenc::recursive_forecast_errors(design, d.first_row + d.h + 1); }) ==
        ErrorCode::InsufficientData);
  Matrix no_intercept = d.predictors;
  no_intercept(5, 0) = 2.0;
  CHECK(error_code_of([&] { DirectDesign(no_intercept, d.target, d.h, 0); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("stacked pairs pair each target with its lagged row") {
  Matrix X(6, 2);
  X.col(0).setOnes();
  X.col(1) << 10, 11, 12, 13, 14, 15;
  const Vector y = (Vector(6) << 0, 1, 2, 3, 4, 5).finished();
  const DirectDesign design(X, y, 2, 1);
  const Matrix R = design.stacked_regressors(4);
  const Vector t = design.stacked_targets(4);
  REQUIRE(R.rows() == 2);
  CHECK(R(0, 1) == 11.0);
  CHECK(t(0) == 3.0);
  CHECK(R(1, 1) == 12.0);
  CHECK(t(1) == 4.0);
}

TEST_CASE("BIC lag selection") {
  std::mt19937_64 rng(27);
  std::normal_distribution<double> z;
  const Index T = 2000;
  std::vector<double> ar2(T), noise(T);
  for (Index t = 0; t < T; ++t) {
    ar2[t] = (t >= 2 ? 0.5 * ar2[t - 1] + 0.3 * ar2[t - 2] : 0.0) + z(rng);
    noise[t] = z(rng);
  }
  // p counts lags beyond the first.
  CHECK(fenc::bic_select_lag(ar2, 1, 8) == 1);
  CHECK(fenc::bic_select_lag(noise, 1, 8) == 0);
  std::vector<double> with_gap = ar2;
  with_gap[0] = std::nan("");
  CHECK(fenc::bic_select_lag(with_gap, 1, 8) == 1);
  const std::vector<double> short_series(15, 1.0);
  CHECK(error_code_of([&] { fenc::bic_select_lag(short_series, 1, 8); }) == ErrorCode::InsufficientData);
}
