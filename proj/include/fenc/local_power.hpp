#pragma once

#include <Eigen/Dense>

namespace fenc {

/// Inputs for the asymptotic local power of the split-sample statistic.
///
/// The same algebra covers stationary predictors (blocks of Q, drift rate
/// T^{-1/4}) and mildly integrated predictors (blocks of V^b, drift rate
/// T^{-1/4-alpha/2}); only the interpretation of the blocks changes.
struct LocalPowerInput {
  Eigen::VectorXd c;    // local drift direction, one entry per extra predictor
  Eigen::MatrixXd b11;  // benchmark block (intercept and shared predictors)
  Eigen::MatrixXd b12;
  Eigen::MatrixXd b21;
  Eigen::MatrixXd b22;  // block of the extra predictors
  double phi2 = 1.0;    // long-run variance of the demeaned squared errors
  double mu0 = 0.45;
  double pi0 = 0.25;
  double level = 0.10;
};

struct LocalPower {
  double drift = 0.0;
  double power = 0.0;
};

/// sqrt(1 - pi0) * sqrt(4 mu0 (1 - mu0) / ((1 - 2 mu0)^2 phi2)) * c'(B22 - B21 B11^-1 B12)c
/// and the rejection probability 1 - Phi(z_{1-level} - drift).
LocalPower local_power_stationary(const LocalPowerInput& input);
LocalPower local_power_mild(const LocalPowerInput& input);

}  // namespace fenc
