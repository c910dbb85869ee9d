#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "tsf/timeseries.hpp"

namespace tsf {

struct WindowSpec {
  std::size_t input_length = 1;   // L_in
  std::size_t output_length = 1;  // L_out
  std::size_t stride = 1;
  std::optional<std::size_t> max_per_series;
};

/// Identifies a sample: `position` is the index (in the target) of the first
/// forecast step, i.e. the number of target points before the origin.
struct SampleOrigin {
  std::size_t series = 0;
  std::size_t position = 0;

  friend bool operator==(const SampleOrigin&, const SampleOrigin&) = default;
};

/// All members are read-views into the parent series.
struct TrainingSample {
  TimeSeries past_target;
  std::optional<TimeSeries> past_covariates;
  std::optional<TimeSeries> future_covariates;
  TimeSeries future_target;
  SampleOrigin origin;
};

/// Lazy random-access collection of training samples. Samples of series i
/// precede those of series i+1; within a series the most recent origin comes
/// first. Read-only after construction.
class SampleSequence {
 public:
  std::size_t size() const { return offsets_.empty() ? 0 : offsets_.back(); }
  TrainingSample operator[](std::size_t i) const;
  SampleOrigin origin(std::size_t i) const;
  std::size_t series_count() const { return series_.size(); }
  std::size_t samples_in_series(std::size_t s) const { return offsets_[s + 1] - offsets_[s]; }
  const WindowSpec& spec() const { return spec_; }

 private:
  friend SampleSequence build_samples(const std::vector<TimeSeries>&, const std::optional<std::vector<TimeSeries>>&,
                                      const std::optional<std::vector<TimeSeries>>&, const WindowSpec&);

  struct SeriesSlot {
    TimeSeries target;
    std::optional<TimeSeries> past;
    std::optional<TimeSeries> future;
    std::int64_t past_offset = 0;    // covariate position of target position 0
    std::int64_t future_offset = 0;
    std::size_t last_origin = 0;
  };

  WindowSpec spec_;
  std::vector<SeriesSlot> series_;
  std::vector<std::size_t> offsets_;  // prefix sums of per-series counts
};

/// Slices targets (and optional covariates paired by list position) into
/// training samples. Origins p satisfy L_in <= p <= T - L_out and are
/// enumerated backwards from T - L_out in steps of `stride`. Covariates are
/// aligned by timestamp; any emitted window not covered is an error.
SampleSequence build_samples(const std::vector<TimeSeries>& targets,
                             const std::optional<std::vector<TimeSeries>>& past_covariates,
                             const std::optional<std::vector<TimeSeries>>& future_covariates,
                             const WindowSpec& spec);

/// Number of origins per series, before any cap.
std::size_t origin_count(std::size_t length, const WindowSpec& spec);

struct InferenceWindow {
  TimeSeries past_target;                      // last L_in target points
  std::optional<TimeSeries> past_covariates;   // target-relative [T - L_in, T + (R-1) * L_out)
  std::optional<TimeSeries> future_covariates; // target-relative [T, T + R * L_out)
  std::size_t rounds = 0;                      // R = ceil(n / L_out)
};

/// Covariate blocks needed to forecast `n` steps past the end of `target`
/// with `ceil(n / L_out)` autoregressive rounds.
InferenceWindow extract_inference_window(const TimeSeries& target, const std::optional<TimeSeries>& past_covariates,
                                         const std::optional<TimeSeries>& future_covariates,
                                         std::size_t input_length, std::size_t n, std::size_t output_length);

}  // namespace tsf
