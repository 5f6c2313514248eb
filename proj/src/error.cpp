#include "bvmlab/error.hpp"

namespace bvmlab {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "INVALID_ARGUMENT";
    case ErrorCode::BasisMismatch: return "BASIS_MISMATCH";
    case ErrorCode::RankDeficient: return "RANK_DEFICIENT";
    case ErrorCode::HypothesisViolated: return "HYPOTHESIS_VIOLATED";
    case ErrorCode::GridTooCoarse: return "GRID_TOO_COARSE";
    case ErrorCode::SupportViolation: return "SUPPORT_VIOLATION";
    case ErrorCode::NotPositiveDefinite: return "NOT_POSITIVE_DEFINITE";
    case ErrorCode::InvalidLfd: return "INVALID_LFD";
    case ErrorCode::TailRule: return "TAIL_RULE";
    case ErrorCode::ConfigInvalid: return "CONFIG_INVALID";
    case ErrorCode::Io: return "IO";
  }
  return "UNKNOWN";
}

void fail(ErrorCode code, const std::string& message) { throw Error(code, message); }

}  // namespace bvmlab
