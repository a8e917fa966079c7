#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace crystal {

enum class ErrorKind {
  InvalidFaceConfiguration,
  DegenerateFace,
  GridTooCoarse,
  GridCoverage,
  NotStrictlyStable,
  UnboundedWulffSet,
  NotAFacet,
  InvalidEnergy,
  Domain,
  Coverage,
  UnsupportedCollapse,
  DegenerateState,
  InternalConsistency,
  StepRejected,
  EventLocalization,
  Configuration,
  InvalidProfile,
  Io,
};

std::string_view to_string(ErrorKind kind);

/// Every failure raised by the library carries a machine-checkable kind.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidFaceConfiguration: return "invalid-face-configuration";
    case ErrorKind::DegenerateFace: return "degenerate-face";
    case ErrorKind::GridTooCoarse: return "grid-too-coarse";
    case ErrorKind::GridCoverage: return "grid-coverage";
    case ErrorKind::NotStrictlyStable: return "not-strictly-stable";
    case ErrorKind::UnboundedWulffSet: return "unbounded-wulff-set";
    case ErrorKind::NotAFacet: return "not-a-facet";
    case ErrorKind::InvalidEnergy: return "invalid-energy";
    case ErrorKind::Domain: return "domain";
    case ErrorKind::Coverage: return "coverage";
    case ErrorKind::UnsupportedCollapse: return "unsupported-collapse";
    case ErrorKind::DegenerateState: return "degenerate-state";
    case ErrorKind::InternalConsistency: return "internal-consistency";
    case ErrorKind::StepRejected: return "step-rejected";
    case ErrorKind::EventLocalization: return "event-localization";
    case ErrorKind::Configuration: return "configuration";
    case ErrorKind::InvalidProfile: return "invalid-profile";
    case ErrorKind::Io: return "io";
  }
  return "unknown";
}

}  // namespace crystal
