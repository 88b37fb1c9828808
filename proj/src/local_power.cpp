#include "fenc/local_power.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fenc/encompassing.hpp"
#include "fenc/error.hpp"
#include "fenc/normal.hpp"

namespace fenc {

namespace {

void check_shapes(const LocalPowerInput& in) {
  const auto k1 = in.b11.rows();
  const auto k2 = in.b22.rows();
  if (in.b11.cols() != k1 || in.b22.cols() != k2 || in.b12.rows() != k1 || in.b12.cols() != k2 ||
      in.b21.rows() != k2 || in.b21.cols() != k1 || in.c.size() != k2 || k1 < 1 || k2 < 1) {
    fail(ErrorCode::InvalidArgument, "local power: inconsistent block dimensions");
  }
  const double scale = 1.0 + std::max({in.b11.cwiseAbs().maxCoeff(), in.b12.cwiseAbs().maxCoeff(),
                                       in.b22.cwiseAbs().maxCoeff()});
  const double tol = 1e-10 * scale;
  if ((in.b11 - in.b11.transpose()).cwiseAbs().maxCoeff() > tol) {
    fail(ErrorCode::InvalidArgument, "local power: B11 is not symmetric");
  }
  if ((in.b22 - in.b22.transpose()).cwiseAbs().maxCoeff() > tol) {
    fail(ErrorCode::InvalidArgument, "local power: B22 is not symmetric");
  }
  if ((in.b12 - in.b21.transpose()).cwiseAbs().maxCoeff() > tol) {
    fail(ErrorCode::InvalidArgument, "local power: B21 must equal B12'");
  }
  if (!(in.phi2 > 0.0)) fail(ErrorCode::InvalidArgument, "local power: phi2 must be positive");
  if (!(in.pi0 > 0.0 && in.pi0 < 1.0)) fail(ErrorCode::InvalidArgument, "local power: pi0 must lie in (0, 1)");
  if (!(in.level > 0.0 && in.level < 1.0)) fail(ErrorCode::InvalidArgument, "local power: level must lie in (0, 1)");
  SplitSpec::validate_fraction(in.mu0);
}

LocalPower evaluate(const LocalPowerInput& in) {
  check_shapes(in);
  Eigen::FullPivLU<Eigen::MatrixXd> lu(in.b11);
  if (!lu.isInvertible() || lu.rcond() < 1e-12) {
    fail(ErrorCode::SingularBlock, "local power: B11 is not invertible");
  }
  const Eigen::MatrixXd schur = in.b22 - in.b21 * lu.solve(in.b12);
  const double quad = in.c.dot(schur * in.c);
  const double a = 1.0 - 2.0 * in.mu0;
  const double factor = std::sqrt(4.0 * in.mu0 * (1.0 - in.mu0) / (a * a * in.phi2));

  LocalPower out;
  out.drift = std::sqrt(1.0 - in.pi0) * factor * quad;
  // With no drift the limit is the null itself.
  out.power = out.drift == 0.0 ? in.level : normal_sf(normal_quantile(1.0 - in.level) - out.drift);
  return out;
}

}  // namespace

LocalPower local_power_stationary(const LocalPowerInput& input) { return evaluate(input); }

LocalPower local_power_mild(const LocalPowerInput& input) { return evaluate(input); }

}  // namespace fenc
