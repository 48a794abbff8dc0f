#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cosshell {

enum class ErrorCode {
  DegenerateMetric,
  OutOfDomain,
  StepUnderflow,
  NotSPD,
  SingularF,
  GridTooCoarse,
  NoConvergence,
  InvalidMaterial,
  InvalidConfig,
  Io,
};

std::string_view to_string(ErrorCode code);

// Single exception type for the library; the code selects the CLI exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

  // True for failures caused by user input rather than numerics.
  bool is_config_error() const noexcept {
    return code_ == ErrorCode::InvalidMaterial || code_ == ErrorCode::InvalidConfig ||
           code_ == ErrorCode::Io;
  }

 private:
  ErrorCode code_;
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DegenerateMetric: return "DegenerateMetric";
    case ErrorCode::OutOfDomain: return "OutOfDomain";
    case ErrorCode::StepUnderflow: return "StepUnderflow";
    case ErrorCode::NotSPD: return "NotSPD";
    case ErrorCode::SingularF: return "SingularF";
    case ErrorCode::GridTooCoarse: return "GridTooCoarse";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::InvalidMaterial: return "InvalidMaterial";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

}  // namespace cosshell
