#include "vmlab/types.hpp"

namespace vmlab {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DegenerateRadius: return "DegenerateRadius";
    case ErrorCode::MasslessZeroVelocity: return "MasslessZeroVelocity";
    case ErrorCode::QuadratureNotConverged: return "QuadratureNotConverged";
    case ErrorCode::HypothesisViolated: return "HypothesisViolated";
    case ErrorCode::NoRootInBracket: return "NoRootInBracket";
    case ErrorCode::StepSizeUnderflow: return "StepSizeUnderflow";
    case ErrorCode::NonZeroMeanSource: return "NonZeroMeanSource";
    case ErrorCode::BoxTooSmall: return "BoxTooSmall";
    case ErrorCode::CFLViolation: return "CFLViolation";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::IoFailure: return "IoFailure";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

}  // namespace vmlab
