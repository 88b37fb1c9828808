#include "fenc/error.hpp"

namespace fenc {

std::string_view error_code_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::InsufficientData: return "InsufficientData";
    case ErrorCode::InvalidSplit: return "InvalidSplit";
    case ErrorCode::BandwidthOutOfRange: return "BandwidthOutOfRange";
    case ErrorCode::DegenerateVariance: return "DegenerateVariance";
    case ErrorCode::SingularBlock: return "SingularBlock";
    case ErrorCode::InvalidSpec: return "InvalidSpec";
    case ErrorCode::DegenerateSpectrum: return "DegenerateSpectrum";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::CoverageError: return "CoverageError";
    case ErrorCode::NonPositivePrice: return "NonPositivePrice";
    case ErrorCode::EmptyQuarter: return "EmptyQuarter";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

bool is_numerical(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::RankDeficient:
    case ErrorCode::DegenerateVariance:
    case ErrorCode::SingularBlock:
    case ErrorCode::DegenerateSpectrum:
      return true;
    default:
      return false;
  }
}

}  // namespace fenc
