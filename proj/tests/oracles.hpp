#pragma once

// Slow reference implementations written directly from the definitions.
// They share no code with the library.

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

// Least squares through the normal equations.
inline Vector ols_normal_equations(const Matrix& X, const Vector& y) {
  const Matrix xtx = X.transpose() * X;
  const Vector xty = X.transpose() * y;
  return xtx.ldlt().solve(xty);
}

// Batch refit at 0-based origin o: targets s = first_row + h, ..., o paired
// with predictor row s - h.
inline Vector batch_refit(const Matrix& predictors, const Vector& target, int h, Index first_row, Index origin) {
  std::vector<Index> rows;
  for (Index s = first_row + h; s <= origin; ++s) rows.push_back(s);
  Matrix X(static_cast<Index>(rows.size()), predictors.cols());
  Vector y(static_cast<Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    X.row(static_cast<Index>(i)) = predictors.row(rows[i] - h);
    y(static_cast<Index>(i)) = target(rows[i]);
  }
  return ols_normal_equations(X, y);
}

// (1/n) sum q_t^2 + (2/n) sum_{l=1}^{M} (1 - l/M) sum_{t=l+1}^{n} q_t q_{t-l}.
inline double bartlett_double_loop(const std::vector<double>& q, Index M) {
  const Index n = static_cast<Index>(q.size());
  double total = 0.0;
  for (Index t = 0; t < n; ++t) total += q[t] * q[t];
  for (Index l = 1; l <= M; ++l) {
    double gamma = 0.0;
    for (Index t = l; t < n; ++t) gamma += q[t] * q[t - l];
    total += 2.0 * (1.0 - static_cast<double>(l) / static_cast<double>(M)) * gamma;
  }
  return total / static_cast<double>(n);
}

// Full-sample mean of e1^2 minus the average of the two segment means of e1 e2.
inline double split_moment_direct(const Vector& e1, const Vector& e2, Index m0) {
  const Index n = e1.size();
  double sq = 0.0, first = 0.0, second = 0.0;
  for (Index t = 0; t < n; ++t) sq += e1(t) * e1(t);
  for (Index t = 0; t < m0; ++t) first += e1(t) * e2(t);
  for (Index t = m0; t < n; ++t) second += e1(t) * e2(t);
  return sq / static_cast<double>(n) -
         0.5 * (first / static_cast<double>(m0) + second / static_cast<double>(n - m0));
}

// Per-period terms d_t with weights n/m0 and n/(n - m0) on e1 e2.
inline std::vector<double> moment_terms_direct(const Vector& e1, const Vector& e2, Index m0) {
  const Index n = e1.size();
  std::vector<double> d(static_cast<std::size_t>(n));
  for (Index t = 0; t < n; ++t) {
    const double w = t < m0 ? static_cast<double>(n) / static_cast<double>(m0)
                            : static_cast<double>(n) / static_cast<double>(n - m0);
    d[static_cast<std::size_t>(t)] = e1(t) * e1(t) - 0.5 * w * e1(t) * e2(t);
  }
  return d;
}

struct Statistic {
  double dbar;
  double omega2;
  double value;
};

// The studentized statistic from the definitions; `segment` demeans each
// segment separately, otherwise the full-sample mean is removed.
inline Statistic statistic_direct(const Vector& e1, const Vector& e2, double mu0, Index M, bool segment) {
  const Index n = e1.size();
  const Index m0 = static_cast<Index>(std::floor(static_cast<double>(n) * mu0 + 1e-9));
  const std::vector<double> d = moment_terms_direct(e1, e2, m0);
  double dbar = 0.0, mean1 = 0.0, mean2 = 0.0;
  for (Index t = 0; t < n; ++t) {
    dbar += d[t];
    (t < m0 ? mean1 : mean2) += d[t];
  }
  dbar /= static_cast<double>(n);
  mean1 /= static_cast<double>(m0);
  mean2 /= static_cast<double>(n - m0);
  std::vector<double> q(d.size());
  for (Index t = 0; t < n; ++t) q[t] = d[t] - (segment ? (t < m0 ? mean1 : mean2) : dbar);
  const double omega2 = bartlett_double_loop(q, M);
  return {dbar, omega2, std::sqrt(static_cast<double>(n)) * dbar / std::sqrt(omega2)};
}

// Sup distance between the empirical CDF of `x` and the standard normal CDF.
inline double ks_distance_normal(std::vector<double> x) {
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double cdf = 0.5 * std::erfc(-x[i] / std::sqrt(2.0));
    worst = std::max({worst, std::abs(cdf - static_cast<double>(i) / n), std::abs(static_cast<double>(i + 1) / n - cdf)});
  }
  return worst;
}

}  // namespace oracle
