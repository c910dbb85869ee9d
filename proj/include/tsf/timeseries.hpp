#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "tsf/time_index.hpp"

namespace tsf {

/// A location on a series: a timestamp on its index, a fraction in (0,1),
/// or an integer position (negative positions count from the end).
struct Fraction {
  double value;
};
struct Position {
  std::int64_t value;
};
using SlicePoint = std::variant<TimeStamp, Fraction, Position>;

/// Immutable (time, component, sample) tensor over a uniform time index.
///
/// Storage is time-major: element (t, c, s) lives at ((t * C) + c) * S + s.
/// Slicing along time returns views that share the parent's buffer.
class TimeSeries {
 public:
  /// Validates shape and names; `values` must hold T*C*S entries.
  static TimeSeries build(TimeIndex index, std::vector<double> values, std::size_t components,
                          std::size_t samples, std::vector<std::string> component_names);
  static TimeSeries univariate(TimeIndex index, std::vector<double> values, std::string name = "0");
  /// Same shape and names as `like`, new values over `index`.
  static TimeSeries like(const TimeSeries& like, TimeIndex index, std::vector<double> values);

  const TimeIndex& index() const { return index_; }
  std::size_t length() const { return index_.length(); }
  std::size_t n_components() const { return components_; }
  std::size_t n_samples() const { return samples_; }
  bool is_deterministic() const { return samples_ == 1; }
  const std::vector<std::string>& component_names() const { return *names_; }

  double at(std::size_t t, std::size_t c = 0, std::size_t s = 0) const {
    return (*data_)[offset_ + (t * components_ + c) * samples_ + s];
  }
  /// Contiguous view over all T*C*S values of this series.
  std::span<const double> values() const {
    return {data_->data() + offset_, length() * components_ * samples_};
  }
  /// The C*S block of one time step.
  std::span<const double> row(std::size_t t) const {
    return values().subspan(t * components_ * samples_, components_ * samples_);
  }
  std::vector<double> component_values(std::size_t c = 0, std::size_t s = 0) const;
  bool has_nan() const;
  /// True when both series share one buffer region (views of each other).
  bool shares_buffer_with(const TimeSeries& other) const { return data_ == other.data_; }

  std::size_t resolve(const SlicePoint& p) const;
  /// Positions [begin, end), as a view.
  TimeSeries slice_positions(std::size_t begin, std::size_t end) const;
  /// Inclusive slice between two resolved points.
  TimeSeries slice(const SlicePoint& from, const SlicePoint& to) const;
  std::pair<TimeSeries, TimeSeries> split_after(const SlicePoint& p) const;

  TimeSeries diff(int order = 1, int lag = 1) const;
  TimeSeries cumsum() const;
  TimeSeries quantile(double q) const;
  TimeSeries map(const std::function<double(double)>& f) const;
  TimeSeries stack(const TimeSeries& other) const;
  TimeSeries append(const TimeSeries& other) const;
  /// One component as a univariate series (all samples kept).
  TimeSeries component(std::size_t c) const;
  TimeSeries with_index(TimeIndex index) const;
  TimeSeries with_names(std::vector<std::string> names) const;

  friend TimeSeries operator+(const TimeSeries& a, const TimeSeries& b);
  friend TimeSeries operator-(const TimeSeries& a, const TimeSeries& b);
  friend TimeSeries operator*(const TimeSeries& a, const TimeSeries& b);
  /// Division by zero yields NaN and emits a warning.
  friend TimeSeries operator/(const TimeSeries& a, const TimeSeries& b);

 private:
  TimeSeries(TimeIndex index, std::shared_ptr<const std::vector<double>> data, std::size_t offset,
             std::size_t components, std::size_t samples,
             std::shared_ptr<const std::vector<std::string>> names);

  TimeIndex index_;
  std::shared_ptr<const std::vector<double>> data_;
  std::size_t offset_ = 0;
  std::size_t components_ = 1;
  std::size_t samples_ = 1;
  std::shared_ptr<const std::vector<std::string>> names_;
};

enum class BinaryOp { Add, Subtract, Multiply, Divide };
TimeSeries zip_apply(const TimeSeries& a, const TimeSeries& b, BinaryOp op);

/// Linear interpolation between order statistics (type 7).
double empirical_quantile(std::vector<double> values, double q);
double empirical_quantile_sorted(std::span<const double> sorted, double q);

}  // namespace tsf
