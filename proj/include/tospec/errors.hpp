#pragma once

#include <stdexcept>
#include <string>

namespace tospec {

/// Named failure modes raised by the numerical modules. The CLI reports the
/// name on standard error and maps every kind to exit code 3.
enum class ErrorKind {
  InvalidArgument,
  NewtonDivergence,
  NotExpanding,
  BranchExplosion,
  EmptyProbeSet,
  DegenerateLead,
  NearSingular,
  ContourTooClose,
  MatchFailure,
  DegenerateFit,
};

const char* error_name(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& detail);

  ErrorKind kind() const noexcept { return kind_; }
  const char* name() const noexcept { return error_name(kind_); }

 private:
  ErrorKind kind_;
};

}  // namespace tospec
