#include "tsf/error.hpp"

#include <iostream>
#include <mutex>

namespace tsf {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::DuplicateComponentName: return "DuplicateComponentName";
    case ErrorCode::EmptySeries: return "EmptySeries";
    case ErrorCode::NonUniformTimeGrid: return "NonUniformTimeGrid";
    case ErrorCode::DuplicateCell: return "DuplicateCell";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::EmptyResult: return "EmptyResult";
    case ErrorCode::SeriesTooShort: return "SeriesTooShort";
    case ErrorCode::DeterministicInput: return "DeterministicInput";
    case ErrorCode::QOutOfRange: return "QOutOfRange";
    case ErrorCode::IndexMismatch: return "IndexMismatch";
    case ErrorCode::BroadcastError: return "BroadcastError";
    case ErrorCode::NonContiguousAppend: return "NonContiguousAppend";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::NaNInput: return "NaNInput";
    case ErrorCode::NonPositiveForBoxCox: return "NonPositiveForBoxCox";
    case ErrorCode::AllNaNComponent: return "AllNaNComponent";
    case ErrorCode::NotFitted: return "NotFitted";
    case ErrorCode::NotInvertible: return "NotInvertible";
    case ErrorCode::UnknownDataset: return "UnknownDataset";
    case ErrorCode::CorruptBundle: return "CorruptBundle";
    case ErrorCode::CovariateCoverageError: return "CovariateCoverageError";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::WindowTooLong: return "WindowTooLong";
    case ErrorCode::UnsupportedMultivariate: return "UnsupportedMultivariate";
    case ErrorCode::UnsupportedCovariates: return "UnsupportedCovariates";
    case ErrorCode::NonPositiveForMultiplicative: return "NonPositiveForMultiplicative";
    case ErrorCode::NonPositiveSeasonal: return "NonPositiveSeasonal";
    case ErrorCode::KTooLarge: return "KTooLarge";
    case ErrorCode::SingularSystem: return "SingularSystem";
    case ErrorCode::VersionMismatch: return "VersionMismatch";
    case ErrorCode::TooFewResiduals: return "TooFewResiduals";
    case ErrorCode::Unsupported: return "Unsupported";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NonInvertibleInnovation: return "NonInvertibleInnovation";
    case ErrorCode::BadWindow: return "BadWindow";
    case ErrorCode::EmptyIntersection: return "EmptyIntersection";
    case ErrorCode::ZeroDenominator: return "ZeroDenominator";
    case ErrorCode::MissingInsample: return "MissingInsample";
    case ErrorCode::PlanInfeasible: return "PlanInfeasible";
    case ErrorCode::EmptyGrid: return "EmptyGrid";
    case ErrorCode::AllCombinationsFailed: return "AllCombinationsFailed";
    case ErrorCode::MemberFailure: return "MemberFailure";
    case ErrorCode::DegenerateSplit: return "DegenerateSplit";
  }
  return "Unknown";
}

namespace {

void stderr_sink(std::string_view message) {
  std::cerr << "warning: " << message << '\n';
}

std::mutex& sink_mutex() {
  static std::mutex m;
  return m;
}

WarningSink g_sink = &stderr_sink;

}  // namespace

void warn(std::string_view message) {
  std::lock_guard lock(sink_mutex());
  if (g_sink != nullptr) g_sink(message);
}

WarningSink set_warning_sink(WarningSink sink) {
  std::lock_guard lock(sink_mutex());
  WarningSink previous = g_sink;
  g_sink = sink;
  return previous;
}

}  // namespace tsf
