#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace fenc {

enum class ErrorCode {
  InvalidArgument,
  EmptyInput,
  RankDeficient,
  InsufficientData,
  InvalidSplit,
  BandwidthOutOfRange,
  DegenerateVariance,
  SingularBlock,
  InvalidSpec,
  DegenerateSpectrum,
  ParseError,
  CoverageError,
  NonPositivePrice,
  EmptyQuarter,
  ConfigError,
  IoError,
};

std::string_view error_code_name(ErrorCode code) noexcept;

// True for failures caused by the numbers themselves rather than by bad input.
bool is_numerical(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace fenc
