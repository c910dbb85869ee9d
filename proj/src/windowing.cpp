#include "tsf/windowing.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "tsf/error.hpp"

namespace tsf {

namespace {

enum class Side { Past, Future };

const char* side_name(Side s) { return s == Side::Past ? "past" : "future"; }

std::int64_t alignment_offset(const TimeSeries& target, const TimeSeries& cov, Side side, std::size_t sid) {
  const auto off = cov.index().same_grid(target.index()) ? cov.index().offset_of(target.index().front())
                                                         : std::nullopt;
  if (!off)
    fail(ErrorCode::CovariateCoverageError, std::string(side_name(side)) + " covariates of series " +
                                                std::to_string(sid) + " are not on the target's time grid");
  return *off;
}

/// Requires cov to cover target-relative positions [begin, end).
void require_coverage(const TimeSeries& target, const TimeSeries& cov, std::int64_t offset, std::int64_t begin,
                      std::int64_t end, Side side, std::size_t sid) {
  const auto avail = static_cast<std::int64_t>(cov.length());
  const std::int64_t cb = begin + offset, ce = end + offset;
  const auto& idx = target.index();
  std::string prefix = std::string(side_name(side)) + " covariates of series " + std::to_string(sid);
  if (cb < 0)
    fail(ErrorCode::CovariateCoverageError,
         prefix + " are missing " + std::to_string(-cb) + " step(s) at the start: needed from " +
             idx.at(begin).to_string() + ", available from " + cov.index().front().to_string());
  if (ce > avail)
    fail(ErrorCode::CovariateCoverageError,
         prefix + " are missing " + std::to_string(ce - avail) + " step(s) at the end: needed through " +
             idx.at(end - 1).to_string() + ", available through " + cov.index().back().to_string() + " (" +
             std::to_string(std::max<std::int64_t>(0, avail - cb)) + " of " + std::to_string(end - begin) +
             " rows available)");
}

void require_finite(const TimeSeries& s, std::int64_t begin, std::int64_t end, const std::string& what) {
  for (auto t = begin; t < end; ++t)
    for (double v : s.row(static_cast<std::size_t>(t)))
      if (std::isnan(v))
        fail(ErrorCode::NaNInput, what + " contains NaN at " + s.index().at(t).to_string());
}

}  // namespace

std::size_t origin_count(std::size_t length, const WindowSpec& spec) {
  if (length < spec.input_length + spec.output_length) return 0;
  return (length - spec.input_length - spec.output_length) / spec.stride + 1;
}

SampleSequence build_samples(const std::vector<TimeSeries>& targets,
                             const std::optional<std::vector<TimeSeries>>& past_covariates,
                             const std::optional<std::vector<TimeSeries>>& future_covariates,
                             const WindowSpec& spec) {
  if (spec.input_length == 0 || spec.output_length == 0 || spec.stride == 0)
    fail(ErrorCode::InvalidArgument, "window lengths and stride must be positive");
  if (targets.empty()) fail(ErrorCode::InvalidArgument, "no target series given");
  if (past_covariates && past_covariates->size() != targets.size())
    fail(ErrorCode::LengthMismatch, "past covariate list length differs from the target list length");
  if (future_covariates && future_covariates->size() != targets.size())
    fail(ErrorCode::LengthMismatch, "future covariate list length differs from the target list length");

  SampleSequence seq;
  seq.spec_ = spec;
  seq.offsets_.push_back(0);
  const auto L_in = static_cast<std::int64_t>(spec.input_length);
  const auto L_out = static_cast<std::int64_t>(spec.output_length);

  for (std::size_t i = 0; i < targets.size(); ++i) {
    SampleSequence::SeriesSlot slot{targets[i], std::nullopt, std::nullopt, 0, 0, 0};
    const auto& target = slot.target;
    const auto T = static_cast<std::int64_t>(target.length());
    if (!target.is_deterministic()) fail(ErrorCode::InvalidArgument, "training series must be deterministic");
    if (T < L_in + L_out)
      fail(ErrorCode::WindowTooLong, "series " + std::to_string(i) + " has length " + std::to_string(T) +
                                         " < input_length + output_length = " + std::to_string(L_in + L_out));
    std::size_t count = origin_count(target.length(), spec);
    if (spec.max_per_series) count = std::min(count, *spec.max_per_series);
    slot.last_origin = static_cast<std::size_t>(T - L_out);
    if (count > 0) {
      const std::int64_t p_max = T - L_out;
      const std::int64_t p_min = p_max - static_cast<std::int64_t>((count - 1) * spec.stride);
      require_finite(target, p_min - L_in, p_max + L_out, "target series " + std::to_string(i));
      if (past_covariates) {
        slot.past = (*past_covariates)[i];
        if (!slot.past->is_deterministic()) fail(ErrorCode::InvalidArgument, "covariates must be deterministic");
        slot.past_offset = alignment_offset(target, *slot.past, Side::Past, i);
        require_coverage(target, *slot.past, slot.past_offset, p_min - L_in, p_max, Side::Past, i);
        require_finite(*slot.past, p_min - L_in + slot.past_offset, p_max + slot.past_offset,
                       "past covariates of series " + std::to_string(i));
      }
      if (future_covariates) {
        slot.future = (*future_covariates)[i];
        if (!slot.future->is_deterministic()) fail(ErrorCode::InvalidArgument, "covariates must be deterministic");
        slot.future_offset = alignment_offset(target, *slot.future, Side::Future, i);
        require_coverage(target, *slot.future, slot.future_offset, p_min, p_max + L_out, Side::Future, i);
        require_finite(*slot.future, p_min + slot.future_offset, p_max + L_out + slot.future_offset,
                       "future covariates of series " + std::to_string(i));
      }
    }
    seq.series_.push_back(std::move(slot));
    seq.offsets_.push_back(seq.offsets_.back() + count);
  }
  return seq;
}

SampleOrigin SampleSequence::origin(std::size_t i) const {
  if (i >= size()) fail(ErrorCode::OutOfRange, "sample index " + std::to_string(i) + " out of range");
  const auto it = std::upper_bound(offsets_.begin(), offsets_.end(), i);
  const auto s = static_cast<std::size_t>(it - offsets_.begin()) - 1;
  const std::size_t k = i - offsets_[s];
  return {s, series_[s].last_origin - k * spec_.stride};
}

TrainingSample SampleSequence::operator[](std::size_t i) const {
  const SampleOrigin o = origin(i);
  const auto& slot = series_[o.series];
  const std::size_t p = o.position, L_in = spec_.input_length, L_out = spec_.output_length;
  TrainingSample sample{slot.target.slice_positions(p - L_in, p), std::nullopt, std::nullopt,
                        slot.target.slice_positions(p, p + L_out), o};
  if (slot.past) {
    const auto b = static_cast<std::size_t>(static_cast<std::int64_t>(p - L_in) + slot.past_offset);
    sample.past_covariates = slot.past->slice_positions(b, b + L_in);
  }
  if (slot.future) {
    const auto b = static_cast<std::size_t>(static_cast<std::int64_t>(p) + slot.future_offset);
    sample.future_covariates = slot.future->slice_positions(b, b + L_out);
  }
  return sample;
}

InferenceWindow extract_inference_window(const TimeSeries& target, const std::optional<TimeSeries>& past_covariates,
                                         const std::optional<TimeSeries>& future_covariates,
                                         std::size_t input_length, std::size_t n, std::size_t output_length) {
  if (n == 0) fail(ErrorCode::InvalidArgument, "forecast horizon n must be >= 1");
  if (input_length == 0 || output_length == 0)
    fail(ErrorCode::InvalidArgument, "window lengths must be positive");
  if (target.length() < input_length)
    fail(ErrorCode::SeriesTooShort, "series of length " + std::to_string(target.length()) +
                                        " is shorter than input_length " + std::to_string(input_length));
  const auto T = static_cast<std::int64_t>(target.length());
  const auto L_in = static_cast<std::int64_t>(input_length);
  const auto L_out = static_cast<std::int64_t>(output_length);
  const std::size_t rounds = (n + output_length - 1) / output_length;
  const auto R = static_cast<std::int64_t>(rounds);

  InferenceWindow w{target.slice_positions(static_cast<std::size_t>(T - L_in), static_cast<std::size_t>(T)),
                    std::nullopt, std::nullopt, rounds};
  if (past_covariates) {
    const auto off = alignment_offset(target, *past_covariates, Side::Past, 0);
    const std::int64_t begin = T - L_in, end = T + (R - 1) * L_out;
    require_coverage(target, *past_covariates, off, begin, end, Side::Past, 0);
    w.past_covariates = past_covariates->slice_positions(static_cast<std::size_t>(begin + off),
                                                         static_cast<std::size_t>(end + off));
  }
  if (future_covariates) {
    const auto off = alignment_offset(target, *future_covariates, Side::Future, 0);
    const std::int64_t begin = T, end = T + R * L_out;
    require_coverage(target, *future_covariates, off, begin, end, Side::Future, 0);
    w.future_covariates = future_covariates->slice_positions(static_cast<std::size_t>(begin + off),
                                                             static_cast<std::size_t>(end + off));
  }
  return w;
}

}  // namespace tsf
