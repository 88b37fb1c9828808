#pragma once

#include <cstdint>
#include <random>

#include <Eigen/Dense>

namespace fenc {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Reproducible random stream. Identical (base_seed, stream_id) pairs give
/// bit-identical sequences; distinct pairs seed the engine through seed_seq
/// with different inputs.
class RngStream {
 public:
  RngStream(std::uint64_t base_seed, std::uint64_t stream_id)
      : base_seed_(base_seed), stream_id_(stream_id) {}

  std::uint64_t base_seed() const { return base_seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  std::mt19937_64 engine() const;

 private:
  std::uint64_t base_seed_;
  std::uint64_t stream_id_;
};

/// Stream id for replication `rep` of the experiment identified by `key`.
std::uint64_t replication_stream(std::uint64_t key, std::uint64_t rep);

/// Predictive regression with one extra predictor:
///   y_t = beta1 y_{t-h} + beta2 x_{t-h} + w_t,  x_t = rho x_{t-1} + v_t,
///   w_t = sum_{j<h} theta^j eps_{t-j},  (eps_t, v_t) ~ NID(0, sigma).
struct Dgp1Spec {
  double beta1 = 0.3;
  double beta2 = 0.0;
  double rho = 0.25;
  double theta = 0.5;
  Eigen::Matrix2d sigma = (Eigen::Matrix2d() << 1.0, 0.0, 0.0, 0.25).finished();
  Index T = 1000;
  int h = 1;
  Index burn_in = 200;

  void validate() const;
};

/// Uncorrelated shocks, Var(v) = 0.25.
Eigen::Matrix2d sigma_uncorrelated();
/// Shock correlation of -0.8, Var(v) = 0.25.
Eigen::Matrix2d sigma_correlated();

struct Dgp1Path {
  Vector y;
  Vector x;
};

Dgp1Path simulate_dgp1(const Dgp1Spec& spec, const RngStream& rng);

/// Factor-augmented regression:
///   y_t = alpha + beta1 y_{t-h} + beta2 f_{t-h} + w_t,  w_t = sum_{j<h} theta^j v_{t-j},
///   X_it = lambda_i f_t + e_it,  f_t = alpha1 f_{t-1} + u_t,  e_it = rho_i e_{i,t-1} + eps_it.
struct Dgp2Spec {
  double alpha = 0.0;
  double beta1 = 0.3;
  double beta2 = 0.0;
  double theta = 0.5;
  Index N = 100;
  Index T = 250;
  int h = 1;
  double alpha1 = 0.5;
  double rho_i = 0.5;
  double loading_std = 1.0;
  double idio_std = 1.0;
  Index burn_in = 200;

  void validate() const;
};

struct Dgp2Path {
  Vector y;
  Matrix X;       // T x N panel
  Vector f_true;  // latent factor
  Vector loadings;
};

Dgp2Path simulate_dgp2(const Dgp2Spec& spec, const RngStream& rng);

/// First principal component of the column-demeaned panel, scaled so that
/// sum f_t^2 / T = 1 and signed so that it covaries non-negatively with the
/// first column. Throws DegenerateSpectrum when the top eigenvalue is not simple.
Vector estimate_factor(const Matrix& X);

/// Mildly integrated VAR x_t = diag(1 - b_i / T^alpha) x_{t-1} + v_t.
struct Dgp3Spec {
  Vector b = Vector::Constant(2, 1.0);
  double alpha_exp = 0.5;
  Matrix innovation_cov = Matrix::Identity(2, 2);
  Index T = 500;
  Index burn_in = 200;

  Index dim() const { return b.size(); }
  Vector ar_coefficients() const;
  void validate() const;
};

Matrix simulate_mild_var(const Dgp3Spec& spec, const RngStream& rng);

}  // namespace fenc
