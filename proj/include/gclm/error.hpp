#pragma once

#include <stdexcept>
#include <string>

namespace gclm {

enum class ErrorCode {
  InvalidArgument,
  PastCollapse,
  NotCollapsing,
  SpectrumTooClean,
  NoCollapseSignal,
  BadBracket,
  HigherOrderUnknown,
  Validation,
  Io,
};

inline const char* to_string(ErrorCode c) {
  switch (c) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::PastCollapse: return "PastCollapse";
    case ErrorCode::NotCollapsing: return "NotCollapsing";
    case ErrorCode::SpectrumTooClean: return "SpectrumTooClean";
    case ErrorCode::NoCollapseSignal: return "NoCollapseSignal";
    case ErrorCode::BadBracket: return "BadBracket";
    case ErrorCode::HigherOrderUnknown: return "HigherOrderUnknown";
    case ErrorCode::Validation: return "Validation";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace gclm
