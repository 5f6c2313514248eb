#pragma once

#include <stdexcept>
#include <string>

namespace bvmlab {

enum class ErrorCode {
  InvalidArgument,
  BasisMismatch,
  RankDeficient,
  HypothesisViolated,
  GridTooCoarse,
  SupportViolation,
  NotPositiveDefinite,
  InvalidLfd,
  TailRule,
  ConfigInvalid,
  Io,
};

const char* to_string(ErrorCode code);

// Every failure raised by the library carries a machine-readable code; the
// CLI maps codes to exit statuses.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& message);

}  // namespace bvmlab
