#include "rsmkit/errors.hpp"

namespace rsm {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::Io: return "Io";
    case ErrorCode::Parse: return "Parse";
    case ErrorCode::InsufficientData: return "InsufficientData";
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::NotConvex: return "NotConvex";
    case ErrorCode::HardCase: return "HardCase";
    case ErrorCode::SingularJacobian: return "SingularJacobian";
    case ErrorCode::StrictComplementarityViolated: return "StrictComplementarityViolated";
    case ErrorCode::StatusFlip: return "StatusFlip";
    case ErrorCode::Internal: return "Internal";
  }
  return "Unknown";
}

}  // namespace rsm
