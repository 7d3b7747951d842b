#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace pwalk {

enum class Errc {
  // input validation
  kNotNormalized,
  kNegativeWeight,
  kNotSymmetric,
  kNotAntisymmetric,
  kPeriodic,
  kReducible,
  kDimensionMismatch,
  kUnperturbed,
  kParse,
  kInvalidArgument,
  // numerical preconditions
  kGridTooSmall,
  kOrderTooHigh,
  kDegreeTooLarge,
  kCoeffOrderMismatch,
  kSingularCovariance,
  kOriginUndefined,
  kNoConvergence,
  // resources
  kResourceLimit,
  // an internal cross-check between independent routes failed
  kCrossCheck,
};

constexpr std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::kNotNormalized: return "NotNormalized";
    case Errc::kNegativeWeight: return "NegativeWeight";
    case Errc::kNotSymmetric: return "NotSymmetric";
    case Errc::kNotAntisymmetric: return "NotAntisymmetric";
    case Errc::kPeriodic: return "Periodic";
    case Errc::kReducible: return "Reducible";
    case Errc::kDimensionMismatch: return "DimensionMismatch";
    case Errc::kUnperturbed: return "Unperturbed";
    case Errc::kParse: return "ParseError";
    case Errc::kInvalidArgument: return "InvalidArgument";
    case Errc::kGridTooSmall: return "GridTooSmall";
    case Errc::kOrderTooHigh: return "OrderTooHigh";
    case Errc::kDegreeTooLarge: return "DegreeTooLarge";
    case Errc::kCoeffOrderMismatch: return "CoeffOrderMismatch";
    case Errc::kSingularCovariance: return "SingularCovariance";
    case Errc::kOriginUndefined: return "OriginUndefined";
    case Errc::kNoConvergence: return "NoConvergence";
    case Errc::kResourceLimit: return "ResourceLimit";
    case Errc::kCrossCheck: return "CrossCheckFailed";
  }
  return "Unknown";
}

/// Exception carried by every failing operation in the library.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

/// Process exit status for the command-line contract:
/// 1 validation, 2 resource limit, 3 failed internal cross-check.
constexpr int exit_code(Errc code) noexcept {
  switch (code) {
    case Errc::kResourceLimit: return 2;
    case Errc::kCrossCheck:
    case Errc::kNoConvergence: return 3;
    default: return 1;
  }
}

}  // namespace pwalk
