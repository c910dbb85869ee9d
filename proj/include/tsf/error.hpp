#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace tsf {

enum class ErrorCode {
  InvalidArgument,
  // container
  ShapeMismatch,
  DuplicateComponentName,
  EmptySeries,
  NonUniformTimeGrid,
  DuplicateCell,
  OutOfRange,
  EmptyResult,
  SeriesTooShort,
  DeterministicInput,
  QOutOfRange,
  IndexMismatch,
  BroadcastError,
  NonContiguousAppend,
  ParseError,
  IoError,
  // transforms
  NaNInput,
  NonPositiveForBoxCox,
  AllNaNComponent,
  NotFitted,
  NotInvertible,
  // datasets
  UnknownDataset,
  CorruptBundle,
  // windowing
  CovariateCoverageError,
  LengthMismatch,
  WindowTooLong,
  // models
  UnsupportedMultivariate,
  UnsupportedCovariates,
  NonPositiveForMultiplicative,
  NonPositiveSeasonal,
  KTooLarge,
  SingularSystem,
  VersionMismatch,
  // likelihoods
  TooFewResiduals,
  Unsupported,
  // filters
  DimensionMismatch,
  NonInvertibleInnovation,
  BadWindow,
  // evaluation
  EmptyIntersection,
  ZeroDenominator,
  MissingInsample,
  PlanInfeasible,
  EmptyGrid,
  AllCombinationsFailed,
  // ensembles
  MemberFailure,
  DegenerateSplit,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure raised by the library carries a machine-readable code.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

/// Non-fatal diagnostics (division by zero, degenerate scales, ...) are routed
/// here. The default sink writes one line to stderr; the sink is thread-safe.
using WarningSink = void (*)(std::string_view message);
void warn(std::string_view message);
WarningSink set_warning_sink(WarningSink sink);

}  // namespace tsf
