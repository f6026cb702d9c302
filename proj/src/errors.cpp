#include "tospec/errors.hpp"

namespace tospec {

const char* error_name(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::NewtonDivergence: return "NewtonDivergence";
    case ErrorKind::NotExpanding: return "NotExpanding";
    case ErrorKind::BranchExplosion: return "BranchExplosion";
    case ErrorKind::EmptyProbeSet: return "EmptyProbeSet";
    case ErrorKind::DegenerateLead: return "DegenerateLead";
    case ErrorKind::NearSingular: return "NearSingular";
    case ErrorKind::ContourTooClose: return "ContourTooClose";
    case ErrorKind::MatchFailure: return "MatchFailure";
    case ErrorKind::DegenerateFit: return "DegenerateFit";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& detail)
    : std::runtime_error(std::string(error_name(kind)) + ": " + detail), kind_(kind) {}

}  // namespace tospec
