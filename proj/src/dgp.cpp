#include "fenc/dgp.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "fenc/error.hpp"

namespace fenc {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Lower Cholesky factor; throws InvalidSpec unless cov is symmetric positive definite.
Matrix cholesky_factor(const Matrix& cov, const char* what) {
  if (cov.rows() != cov.cols() || (cov - cov.transpose()).cwiseAbs().maxCoeff() > 1e-12) {
    fail(ErrorCode::InvalidSpec, std::string(what) + " must be a symmetric matrix");
  }
  Eigen::LLT<Matrix> llt(cov);
  if (llt.info() != Eigen::Success) {
    fail(ErrorCode::InvalidSpec, std::string(what) + " must be positive definite");
  }
  return llt.matrixL();
}

}  // namespace

std::mt19937_64 RngStream::engine() const {
  std::seed_seq seq{static_cast<std::uint32_t>(base_seed_), static_cast<std::uint32_t>(base_seed_ >> 32),
                    static_cast<std::uint32_t>(stream_id_), static_cast<std::uint32_t>(stream_id_ >> 32)};
  return std::mt19937_64(seq);
}

std::uint64_t replication_stream(std::uint64_t key, std::uint64_t rep) {
  return splitmix64(key ^ splitmix64(rep));
}

Eigen::Matrix2d sigma_uncorrelated() { return (Eigen::Matrix2d() << 1.0, 0.0, 0.0, 0.25).finished(); }

Eigen::Matrix2d sigma_correlated() { return (Eigen::Matrix2d() << 1.0, -0.4, -0.4, 0.25).finished(); }

void Dgp1Spec::validate() const {
  if (!(std::abs(beta1) < 1.0)) fail(ErrorCode::InvalidSpec, "dgp1: |beta1| must be < 1");
  if (!(std::abs(rho) < 1.0)) fail(ErrorCode::InvalidSpec, "dgp1: rho must lie in (-1, 1)");
  if (T < 50) fail(ErrorCode::InvalidSpec, "dgp1: T must be >= 50");
  if (h < 1) fail(ErrorCode::InvalidSpec, "dgp1: h must be >= 1");
  if (burn_in < 0) fail(ErrorCode::InvalidSpec, "dgp1: burn_in must be >= 0");
  if (!std::isfinite(beta2) || !std::isfinite(theta)) fail(ErrorCode::InvalidSpec, "dgp1: non-finite coefficient");
  cholesky_factor(sigma, "dgp1: sigma");
}

Dgp1Path simulate_dgp1(const Dgp1Spec& spec, const RngStream& rng) {
  spec.validate();
  const Eigen::Matrix2d chol = cholesky_factor(spec.sigma, "dgp1: sigma");
  auto engine = rng.engine();
  std::normal_distribution<double> normal;

  const Index total = spec.burn_in + spec.T;
  const int h = spec.h;
  std::vector<double> eps(static_cast<std::size_t>(total));
  std::vector<double> x(static_cast<std::size_t>(total));
  std::vector<double> y(static_cast<std::size_t>(total));

  double x_prev = 0.0;
  for (Index t = 0; t < total; ++t) {
    const double z1 = normal(engine);
    const double z2 = normal(engine);
    const double e = chol(0, 0) * z1;
    const double v = chol(1, 0) * z1 + chol(1, 1) * z2;
    eps[static_cast<std::size_t>(t)] = e;
    x_prev = spec.rho * x_prev + v;
    x[static_cast<std::size_t>(t)] = x_prev;

    double w = 0.0;
    double power = 1.0;
    for (int j = 0; j < h && j <= t; ++j) {
      w += power * eps[static_cast<std::size_t>(t - j)];
      power *= spec.theta;
    }
    if (t < h) {
      y[static_cast<std::size_t>(t)] = w;
    } else {
      const auto lag = static_cast<std::size_t>(t - h);
      y[static_cast<std::size_t>(t)] = spec.beta1 * y[lag] + spec.beta2 * x[lag] + w;
    }
  }

  Dgp1Path path;
  path.y = Eigen::Map<const Vector>(y.data() + spec.burn_in, spec.T);
  path.x = Eigen::Map<const Vector>(x.data() + spec.burn_in, spec.T);
  return path;
}

void Dgp2Spec::validate() const {
  if (!(std::abs(alpha1) < 1.0)) fail(ErrorCode::InvalidSpec, "dgp2: |alpha1| must be < 1");
  if (!(std::abs(rho_i) < 1.0)) fail(ErrorCode::InvalidSpec, "dgp2: |rho_i| must be < 1");
  if (!(std::abs(beta1) < 1.0)) fail(ErrorCode::InvalidSpec, "dgp2: |beta1| must be < 1");
  if (N < 10) fail(ErrorCode::InvalidSpec, "dgp2: N must be >= 10");
  if (T < 50) fail(ErrorCode::InvalidSpec, "dgp2: T must be >= 50");
  if (h < 1) fail(ErrorCode::InvalidSpec, "dgp2: h must be >= 1");
  if (burn_in < 0) fail(ErrorCode::InvalidSpec, "dgp2: burn_in must be >= 0");
  if (!(loading_std >= 0.0) || !(idio_std > 0.0)) fail(ErrorCode::InvalidSpec, "dgp2: bad scale parameter");
}

Dgp2Path simulate_dgp2(const Dgp2Spec& spec, const RngStream& rng) {
  spec.validate();
  auto engine = rng.engine();
  std::normal_distribution<double> normal;

  const Index total = spec.burn_in + spec.T;
  const Index N = spec.N;
  const int h = spec.h;

  Dgp2Path path;
  path.loadings.resize(N);
  for (Index i = 0; i < N; ++i) path.loadings(i) = spec.loading_std * normal(engine);

  std::vector<double> f(static_cast<std::size_t>(total));
  std::vector<double> v(static_cast<std::size_t>(total));
  std::vector<double> y(static_cast<std::size_t>(total));
  Vector e = Vector::Zero(N);
  path.X.resize(spec.T, N);

  double f_prev = 0.0;
  for (Index t = 0; t < total; ++t) {
    const auto ts = static_cast<std::size_t>(t);
    f_prev = spec.alpha1 * f_prev + normal(engine);
    f[ts] = f_prev;
    v[ts] = normal(engine);
    for (Index i = 0; i < N; ++i) e(i) = spec.rho_i * e(i) + spec.idio_std * normal(engine);
    if (t >= spec.burn_in) path.X.row(t - spec.burn_in) = (path.loadings * f_prev + e).transpose();

    double w = 0.0;
    double power = 1.0;
    for (int j = 0; j < h && j <= t; ++j) {
      w += power * v[static_cast<std::size_t>(t - j)];
      power *= spec.theta;
    }
    if (t < h) {
      y[ts] = w;
    } else {
      const auto lag = static_cast<std::size_t>(t - h);
      y[ts] = spec.alpha + spec.beta1 * y[lag] + spec.beta2 * f[lag] + w;
    }
  }
  path.y = Eigen::Map<const Vector>(y.data() + spec.burn_in, spec.T);
  path.f_true = Eigen::Map<const Vector>(f.data() + spec.burn_in, spec.T);
  return path;
}

Vector estimate_factor(const Matrix& X) {
  const Index T = X.rows();
  const Index N = X.cols();
  if (T < 2 || N < 2) fail(ErrorCode::InvalidArgument, "estimate_factor: need T >= 2 and N >= 2");
  if (!X.allFinite()) fail(ErrorCode::InvalidArgument, "estimate_factor: non-finite panel entries");

  const Matrix centered = X.rowwise() - X.colwise().mean();
  // Work with whichever Gram matrix is smaller; both share the non-zero spectrum.
  const bool time_side = T <= N;
  const Matrix gram = time_side ? Matrix(centered * centered.transpose())
                                : Matrix(centered.transpose() * centered);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(gram);
  if (eig.info() != Eigen::Success) fail(ErrorCode::DegenerateSpectrum, "estimate_factor: eigensolver failed");
  const Vector& values = eig.eigenvalues();  // ascending
  const Index top = values.size() - 1;
  const double lead = values(top);
  const double next = values(top - 1);
  if (!(lead > 0.0) || lead - next <= 1e-10 * lead) {
    fail(ErrorCode::DegenerateSpectrum, "estimate_factor: leading eigenvalue is not simple");
  }
  Vector f = time_side ? Vector(eig.eigenvectors().col(top)) : Vector(centered * eig.eigenvectors().col(top));
  f *= std::sqrt(static_cast<double>(T)) / f.norm();
  if (f.dot(centered.col(0)) < 0.0) f = -f;
  return f;
}

Vector Dgp3Spec::ar_coefficients() const {
  const double scale = std::pow(static_cast<double>(T), alpha_exp);
  return (1.0 - b.array() / scale).matrix();
}

void Dgp3Spec::validate() const {
  if (b.size() < 1) fail(ErrorCode::InvalidSpec, "dgp3: need at least one component");
  if (!(b.array() > 0.0).all()) fail(ErrorCode::InvalidSpec, "dgp3: localization constants must be positive");
  if (!(alpha_exp >= 0.0 && alpha_exp < 1.0)) fail(ErrorCode::InvalidSpec, "dgp3: alpha must lie in [0, 1)");
  if (T < 2) fail(ErrorCode::InvalidSpec, "dgp3: T must be >= 2");
  if (burn_in < 0) fail(ErrorCode::InvalidSpec, "dgp3: burn_in must be >= 0");
  if (innovation_cov.rows() != b.size()) fail(ErrorCode::InvalidSpec, "dgp3: innovation covariance has the wrong size");
  const Vector a = ar_coefficients();
  if (!((a.array() > 0.0).all() && (a.array() < 1.0).all())) {
    fail(ErrorCode::InvalidSpec, "dgp3: autoregressive roots 1 - b/T^alpha must lie in (0, 1)");
  }
  cholesky_factor(innovation_cov, "dgp3: innovation covariance");
}

Matrix simulate_mild_var(const Dgp3Spec& spec, const RngStream& rng) {
  spec.validate();
  const Matrix chol = cholesky_factor(spec.innovation_cov, "dgp3: innovation covariance");
  const Vector a = spec.ar_coefficients();
  auto engine = rng.engine();
  std::normal_distribution<double> normal;

  const Index dim = spec.dim();
  Vector state = Vector::Zero(dim);
  Vector z(dim);
  Matrix out(spec.T, dim);
  for (Index t = 0; t < spec.burn_in + spec.T; ++t) {
    for (Index i = 0; i < dim; ++i) z(i) = normal(engine);
    state = a.cwiseProduct(state) + chol * z;
    if (t >= spec.burn_in) out.row(t - spec.burn_in) = state.transpose();
  }
  return out;
}

}  // namespace fenc
