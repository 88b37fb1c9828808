#pragma once

#include <span>
#include <string_view>
#include <variant>

#include <Eigen/Dense>

namespace fenc {

using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// The n paired h-step pseudo out-of-sample errors of a benchmark (e1) and a
/// larger nesting model (e2). Position i refers to target date k0 + h + i - 1.
class ForecastErrorSet {
 public:
  static constexpr Index kMinSize = 10;

  ForecastErrorSet(Vector e1, Vector e2, int h = 1, Index k0 = 1);

  const Vector& e1() const { return e1_; }
  const Vector& e2() const { return e2_; }
  int h() const { return h_; }
  Index k0() const { return k0_; }
  Index n() const { return e1_.size(); }

 private:
  Vector e1_;
  Vector e2_;
  int h_;
  Index k0_;
};

/// Sample split fraction mu0 and location m0 = floor(n * mu0).
///
/// mu0 must lie in [0.10, 0.90] and stay at least 0.02 away from 1/2; at 1/2 the
/// split mean coincides with the full-sample mean and the statistic degenerates.
class SplitSpec {
 public:
  static constexpr double kLowest = 0.10;
  static constexpr double kHighest = 0.90;
  static constexpr double kHalfExclusion = 0.02;

  SplitSpec(double mu0, Index n);

  /// Throws InvalidSplit when mu0 itself is inadmissible, whatever n is.
  static void validate_fraction(double mu0);

  double mu0() const { return mu0_; }
  Index m0() const { return m0_; }
  Index n() const { return n_; }

 private:
  double mu0_;
  Index m0_;
  Index n_;
};

/// Bartlett bandwidth, either fixed or M = max(1, floor(c * n^(1/3))), and
/// the centering of the moment terms before the kernel sum.
///
/// Segment centering subtracts each segment's own mean from d_t. The two
/// segments weight e1*e2 differently, so their means differ by a constant even
/// under the null; full-sample centering leaves that step in q_t and the
/// Bartlett sum then grows with M instead of estimating the null variance.
class HacConfig {
 public:
  enum class Centering { Segment, Full };

  struct Fixed {
    Index lags;
  };
  struct Automatic {
    double c;
  };

  HacConfig() : mode_(Automatic{1.0}) {}
  static HacConfig fixed(Index lags);
  static HacConfig automatic(double c = 1.0);

  bool is_fixed() const { return std::holds_alternative<Fixed>(mode_); }
  Centering centering() const { return centering_; }
  HacConfig with_centering(Centering centering) const {
    HacConfig copy = *this;
    copy.centering_ = centering;
    return copy;
  }
  double constant() const;

  /// Resolved bandwidth for n terms; throws BandwidthOutOfRange unless 1 <= M < n.
  Index bandwidth(Index n) const;

 private:
  explicit HacConfig(std::variant<Fixed, Automatic> mode) : mode_(mode) {}
  std::variant<Fixed, Automatic> mode_;
  Centering centering_ = Centering::Segment;
};

std::string_view centering_name(HacConfig::Centering centering);
/// Accepts "segment" and "full".
HacConfig::Centering parse_centering(std::string_view name);

struct EncompassingResult {
  double dbar = 0.0;
  double omega2 = 0.0;
  double statistic = 0.0;
  double p_value = 0.5;
  double mse1 = 0.0;
  double mse2 = 0.0;
  double classic_moment = 0.0;
  Index n = 0;
  Index m0 = 0;
  Index bandwidth = 0;
  double mu0 = 0.0;
};

double sample_mse(std::span<const double> errors);
double sample_mse(const Vector& errors);

/// (1/n) sum e1^2 - (1/n) sum e1 e2: the conventional encompassing moment.
double classic_moment(const ForecastErrorSet& errors);

/// Per-period terms whose mean is the split-sample moment: the first m0 terms
/// weight e1*e2 by n/m0 and the remaining n - m0 terms by n/(n - m0).
Vector split_moment_terms(const Vector& e1, const Vector& e2, Index m0);
Vector split_moment_terms(const ForecastErrorSet& errors, const SplitSpec& split);

/// Full-sample mean of e1^2 minus the average of the two segment means of
/// e1*e2, evaluated directly.
double split_sample_moment(const Vector& e1, const Vector& e2, Index m0);

/// Bartlett-kernel long-run variance of an already demeaned sequence:
/// (1/n) sum q_t^2 + (2/n) sum_{l=1}^{M} (1 - l/M) sum_{t>l} q_t q_{t-l}.
double bartlett_lrv(std::span<const double> q, Index bandwidth);
double bartlett_lrv(const Vector& q, Index bandwidth);

/// q_t: the moment terms d_t centered as `centering` prescribes.
Vector centered_moment_terms(const Vector& d, Index m0, HacConfig::Centering centering);

/// The studentized split-sample encompassing statistic, one-sided right.
/// Throws DegenerateVariance when omega^2 <= 1e-14 (1 + dbar^2).
EncompassingResult encompassing_test(const ForecastErrorSet& errors, const SplitSpec& split,
                                     const HacConfig& hac);

/// Convenience overload that builds the split from mu0.
EncompassingResult encompassing_test(const ForecastErrorSet& errors, double mu0,
                                     const HacConfig& hac = HacConfig());

/// Null limit of Var(sqrt(n) dbar): (1 - 2 mu0)^2 / (4 mu0 (1 - mu0)) times the
/// long-run variance of the demeaned squared errors.
double limiting_variance(double mu0, double lrv_eta);

}  // namespace fenc
