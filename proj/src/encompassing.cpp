#include "fenc/encompassing.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "fenc/error.hpp"
#include "fenc/normal.hpp"

namespace fenc {

namespace {

constexpr double kDegenerateVariance = 1e-14;

std::string num(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

// Mean taken around the first element so constant input returns that constant
// exactly.
template <typename Term>
double shifted_mean(Index begin, Index end, double anchor, Term term) {
  double acc = 0.0;
  for (Index i = begin; i < end; ++i) acc += term(i) - anchor;
  return anchor + acc / static_cast<double>(end - begin);
}

}  // namespace

ForecastErrorSet::ForecastErrorSet(Vector e1, Vector e2, int h, Index k0)
    : e1_(std::move(e1)), e2_(std::move(e2)), h_(h), k0_(k0) {
  if (e1_.size() != e2_.size()) {
    fail(ErrorCode::InvalidArgument, "forecast errors: e1 has " + std::to_string(e1_.size()) +
                                         " entries, e2 has " + std::to_string(e2_.size()));
  }
  if (e1_.size() < kMinSize) {
    fail(ErrorCode::InsufficientData, "forecast errors: need at least " + std::to_string(kMinSize) +
                                          " pairs, got " + std::to_string(e1_.size()));
  }
  if (!e1_.allFinite() || !e2_.allFinite()) {
    fail(ErrorCode::InvalidArgument, "forecast errors: non-finite entries");
  }
  if (h_ < 1) fail(ErrorCode::InvalidArgument, "forecast errors: horizon must be >= 1");
  if (k0_ < 1) fail(ErrorCode::InvalidArgument, "forecast errors: k0 must be >= 1");
}

void SplitSpec::validate_fraction(double mu0) {
  if (!std::isfinite(mu0) || mu0 < kLowest - 1e-12 || mu0 > kHighest + 1e-12) {
    fail(ErrorCode::InvalidSplit,
         "mu0 = " + num(mu0) + " is outside [0.10, 0.90]; the split fraction must be bounded away from 0 and 1");
  }
  if (std::abs(mu0 - 0.5) < kHalfExclusion - 1e-12) {
    fail(ErrorCode::InvalidSplit,
         "mu0 = " + num(mu0) +
             " is within 0.02 of 1/2; the split fraction must be bounded away from 1/2 "
             "(at 1/2 the statistic has a degenerate variance)");
  }
}

SplitSpec::SplitSpec(double mu0, Index n) : mu0_(mu0), n_(n) {
  validate_fraction(mu0);
  m0_ = static_cast<Index>(std::floor(static_cast<double>(n) * mu0 + 1e-9));
  if (m0_ < 2 || m0_ > n - 2) {
    fail(ErrorCode::InvalidSplit, "split location m0 = " + std::to_string(m0_) + " for n = " +
                                      std::to_string(n) + " leaves a segment with fewer than 2 terms");
  }
}

HacConfig HacConfig::fixed(Index lags) {
  if (lags < 1) fail(ErrorCode::BandwidthOutOfRange, "bandwidth must be >= 1");
  return HacConfig(Fixed{lags});
}

HacConfig HacConfig::automatic(double c) {
  if (!(c > 0.0) || !std::isfinite(c)) {
    fail(ErrorCode::BandwidthOutOfRange, "bandwidth constant c must be positive");
  }
  return HacConfig(Automatic{c});
}

double HacConfig::constant() const {
  if (const auto* a = std::get_if<Automatic>(&mode_)) return a->c;
  return 0.0;
}

Index HacConfig::bandwidth(Index n) const {
  Index m = 0;
  if (const auto* f = std::get_if<Fixed>(&mode_)) {
    m = f->lags;
  } else {
    const double c = std::get<Automatic>(mode_).c;
    m = std::max<Index>(1, static_cast<Index>(std::floor(c * std::cbrt(static_cast<double>(n)) + 1e-9)));
  }
  if (m < 1 || m >= n) {
    fail(ErrorCode::BandwidthOutOfRange,
         "bandwidth M = " + std::to_string(m) + " must satisfy 1 <= M < n = " + std::to_string(n));
  }
  return m;
}

double sample_mse(std::span<const double> errors) {
  if (errors.empty()) fail(ErrorCode::EmptyInput, "sample_mse: empty input");
  double acc = 0.0;
  for (double e : errors) acc += e * e;
  return acc / static_cast<double>(errors.size());
}

double sample_mse(const Vector& errors) {
  return sample_mse(std::span<const double>(errors.data(), static_cast<std::size_t>(errors.size())));
}

double classic_moment(const ForecastErrorSet& errors) {
  const Vector& e1 = errors.e1();
  const Vector& e2 = errors.e2();
  return (e1.array() * (e1 - e2).array()).mean();
}

Vector split_moment_terms(const Vector& e1, const Vector& e2, Index m0) {
  const Index n = e1.size();
  if (e2.size() != n) fail(ErrorCode::InvalidArgument, "split_moment_terms: length mismatch");
  if (m0 < 1 || m0 > n - 1) {
    fail(ErrorCode::InvalidSplit, "split_moment_terms: m0 = " + std::to_string(m0) +
                                      " must leave both segments non-empty for n = " +
                                      std::to_string(n));
  }
  const double w_first = 0.5 * static_cast<double>(n) / static_cast<double>(m0);
  const double w_second = 0.5 * static_cast<double>(n) / static_cast<double>(n - m0);
  Vector d(n);
  for (Index i = 0; i < n; ++i) {
    const double w = i < m0 ? w_first : w_second;
    d(i) = e1(i) * e1(i) - w * e1(i) * e2(i);
  }
  return d;
}

Vector split_moment_terms(const ForecastErrorSet& errors, const SplitSpec& split) {
  if (split.n() != errors.n()) {
    fail(ErrorCode::InvalidSplit, "split was built for n = " + std::to_string(split.n()) +
                                      " but there are " + std::to_string(errors.n()) + " errors");
  }
  return split_moment_terms(errors.e1(), errors.e2(), split.m0());
}

double split_sample_moment(const Vector& e1, const Vector& e2, Index m0) {
  const Index n = e1.size();
  if (e2.size() != n || n < 2) fail(ErrorCode::InvalidArgument, "split_sample_moment: bad input");
  if (m0 < 1 || m0 > n - 1) fail(ErrorCode::InvalidSplit, "split_sample_moment: bad m0");
  const double sq0 = e1(0) * e1(0);
  const double cross0 = e1(0) * e2(0);
  const double full = shifted_mean(0, n, sq0, [&](Index i) { return e1(i) * e1(i); });
  const double first = shifted_mean(0, m0, cross0, [&](Index i) { return e1(i) * e2(i); });
  const double second = shifted_mean(m0, n, cross0, [&](Index i) { return e1(i) * e2(i); });
  return full - 0.5 * (first + second);
}

std::string_view centering_name(HacConfig::Centering centering) {
  return centering == HacConfig::Centering::Segment ? "segment" : "full";
}

HacConfig::Centering parse_centering(std::string_view name) {
  if (name == "segment") return HacConfig::Centering::Segment;
  if (name == "full") return HacConfig::Centering::Full;
  fail(ErrorCode::InvalidArgument, "centering must be \"segment\" or \"full\", got \"" + std::string(name) + "\"");
}

Vector centered_moment_terms(const Vector& d, Index m0, HacConfig::Centering centering) {
  const Index n = d.size();
  if (m0 < 1 || m0 > n - 1) fail(ErrorCode::InvalidSplit, "centered_moment_terms: bad m0");
  Vector q(n);
  if (centering == HacConfig::Centering::Full) {
    const double mean = shifted_mean(0, n, d(0), [&](Index i) { return d(i); });
    q = d.array() - mean;
    return q;
  }
  const double first = shifted_mean(0, m0, d(0), [&](Index i) { return d(i); });
  const double second = shifted_mean(m0, n, d(m0), [&](Index i) { return d(i); });
  q.head(m0) = d.head(m0).array() - first;
  q.tail(n - m0) = d.tail(n - m0).array() - second;
  return q;
}

double bartlett_lrv(std::span<const double> q, Index bandwidth) {
  const Index n = static_cast<Index>(q.size());
  if (bandwidth < 1 || bandwidth >= n) {
    fail(ErrorCode::BandwidthOutOfRange, "bartlett_lrv: bandwidth M = " + std::to_string(bandwidth) +
                                             " must satisfy 1 <= M < n = " + std::to_string(n));
  }
  double gamma0 = 0.0;
  for (double v : q) gamma0 += v * v;
  double weighted = 0.0;
  const double m = static_cast<double>(bandwidth);
  for (Index lag = 1; lag < bandwidth; ++lag) {
    double gamma = 0.0;
    for (Index t = lag; t < n; ++t) gamma += q[static_cast<std::size_t>(t)] * q[static_cast<std::size_t>(t - lag)];
    weighted += (1.0 - static_cast<double>(lag) / m) * gamma;
  }
  // The l = M term carries zero weight.
  const double value = (gamma0 + 2.0 * weighted) / static_cast<double>(n);
  return std::max(0.0, value);
}

double bartlett_lrv(const Vector& q, Index bandwidth) {
  return bartlett_lrv(std::span<const double>(q.data(), static_cast<std::size_t>(q.size())), bandwidth);
}

EncompassingResult encompassing_test(const ForecastErrorSet& errors, const SplitSpec& split,
                                     const HacConfig& hac) {
  const Index n = errors.n();
  const Index m = hac.bandwidth(n);
  const Vector d = split_moment_terms(errors, split);

  EncompassingResult out;
  out.n = n;
  out.m0 = split.m0();
  out.mu0 = split.mu0();
  out.bandwidth = m;
  out.dbar = split_sample_moment(errors.e1(), errors.e2(), split.m0());
  const Vector q = centered_moment_terms(d, split.m0(), hac.centering());
  out.omega2 = bartlett_lrv(q, m);
  out.mse1 = sample_mse(errors.e1());
  out.mse2 = sample_mse(errors.e2());
  out.classic_moment = classic_moment(errors);

  if (!(out.omega2 > kDegenerateVariance * (1.0 + out.dbar * out.dbar))) {
    fail(ErrorCode::DegenerateVariance,
         "long-run variance estimate " + num(out.omega2) + " is numerically zero");
  }
  out.statistic = std::sqrt(static_cast<double>(n)) * out.dbar / std::sqrt(out.omega2);
  out.p_value = std::clamp(normal_sf(out.statistic), 0.0, 1.0);
  return out;
}

EncompassingResult encompassing_test(const ForecastErrorSet& errors, double mu0, const HacConfig& hac) {
  return encompassing_test(errors, SplitSpec(mu0, errors.n()), hac);
}

double limiting_variance(double mu0, double lrv_eta) {
  SplitSpec::validate_fraction(mu0);
  if (!(lrv_eta >= 0.0)) fail(ErrorCode::InvalidArgument, "limiting_variance: long-run variance must be >= 0");
  const double a = 1.0 - 2.0 * mu0;
  return a * a / (4.0 * mu0 * (1.0 - mu0)) * lrv_eta;
}

}  // namespace fenc
