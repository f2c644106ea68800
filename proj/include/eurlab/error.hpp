#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace eurlab {

enum class ErrorCode {
  NotHermitian,
  NoConvergence,
  InvalidState,
  NotPSD,
  DomainError,
  EmptyCounts,
  RankDeficient,
  MissingSetting,
  SingularSystem,
  ZeroTrace,
  StatisticFailure,
  NoRoot,
  ParseError,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NotHermitian: return "NotHermitian";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::InvalidState: return "InvalidState";
    case ErrorCode::NotPSD: return "NotPSD";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::EmptyCounts: return "EmptyCounts";
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::MissingSetting: return "MissingSetting";
    case ErrorCode::SingularSystem: return "SingularSystem";
    case ErrorCode::ZeroTrace: return "ZeroTrace";
    case ErrorCode::StatisticFailure: return "StatisticFailure";
    case ErrorCode::NoRoot: return "NoRoot";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

  /// True for failures caused by bad inputs rather than by the numerics.
  bool is_usage_error() const noexcept {
    return code_ == ErrorCode::DomainError || code_ == ErrorCode::ParseError ||
           code_ == ErrorCode::MissingSetting || code_ == ErrorCode::EmptyCounts || code_ == ErrorCode::NoRoot;
  }

 private:
  ErrorCode code_;
};

}  // namespace eurlab
