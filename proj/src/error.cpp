#include "slitcap/error.hpp"

namespace slitcap {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::OutOfRange: return "OutOfRange";
    case ErrorKind::ConvergenceFailure: return "ConvergenceFailure";
    case ErrorKind::PoleProximity: return "PoleProximity";
    case ErrorKind::NoRootInRegion: return "NoRootInRegion";
    case ErrorKind::DegenerateGeometry: return "DegenerateGeometry";
    case ErrorKind::BracketFailure: return "BracketFailure";
    case ErrorKind::StepSizeUnderflow: return "StepSizeUnderflow";
    case ErrorKind::DefectBlowup: return "DefectBlowup";
    case ErrorKind::SingularPinch: return "SingularPinch";
    case ErrorKind::QuadratureFailure: return "QuadratureFailure";
    case ErrorKind::PathBlocked: return "PathBlocked";
    case ErrorKind::NonConvergence: return "NonConvergence";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

}  // namespace slitcap
