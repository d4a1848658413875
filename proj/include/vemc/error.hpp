#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace vemc {

/// Failure categories raised by the library. Each operation documents which
/// kinds it can raise; callers that recover (e.g. coarsening rollback) switch
/// on the kind rather than on message text.
enum class ErrorKind {
  InvalidMesh,
  DegenerateInput,
  DegeneratePolygon,
  OnVertex,
  OutsidePolygon,
  EmptySeedSet,
  SamplingExhausted,
  TessellationFailure,
  DegenerateElement,
  SingularFit,
  UnconstrainedSystem,
  SolverBreakdown,
  RecoveryFailure,
  ReferenceUnavailable,
  OutOfDomain,
  ZeroLengthChain,
  TooFewNeighbors,
  CoarseningAborted,
  NoEligiblePatches,
  UnknownProblem,
  IoError,
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidMesh:
      return "InvalidMesh";
    case ErrorKind::DegenerateInput:
      return "DegenerateInput";
    case ErrorKind::DegeneratePolygon:
      return "DegeneratePolygon";
    case ErrorKind::OnVertex:
      return "OnVertex";
    case ErrorKind::OutsidePolygon:
      return "OutsidePolygon";
    case ErrorKind::EmptySeedSet:
      return "EmptySeedSet";
    case ErrorKind::SamplingExhausted:
      return "SamplingExhausted";
    case ErrorKind::TessellationFailure:
      return "TessellationFailure";
    case ErrorKind::DegenerateElement:
      return "DegenerateElement";
    case ErrorKind::SingularFit:
      return "SingularFit";
    case ErrorKind::UnconstrainedSystem:
      return "UnconstrainedSystem";
    case ErrorKind::SolverBreakdown:
      return "SolverBreakdown";
    case ErrorKind::RecoveryFailure:
      return "RecoveryFailure";
    case ErrorKind::ReferenceUnavailable:
      return "ReferenceUnavailable";
    case ErrorKind::OutOfDomain:
      return "OutOfDomain";
    case ErrorKind::ZeroLengthChain:
      return "ZeroLengthChain";
    case ErrorKind::TooFewNeighbors:
      return "TooFewNeighbors";
    case ErrorKind::CoarseningAborted:
      return "CoarseningAborted";
    case ErrorKind::NoEligiblePatches:
      return "NoEligiblePatches";
    case ErrorKind::UnknownProblem:
      return "UnknownProblem";
    case ErrorKind::IoError:
      return "IoError";
  }
  return "Unknown";
}

}  // namespace vemc
