#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace tsf {

enum class IndexKind { Datetime, Range };

/// A point on a time axis. Datetime points are stored as days since
/// 1970-01-01; range points as the raw integer label.
struct TimeStamp {
  IndexKind kind = IndexKind::Range;
  std::int64_t value = 0;

  static TimeStamp integer(std::int64_t v) { return {IndexKind::Range, v}; }
  static TimeStamp date(std::chrono::year_month_day ymd);
  static TimeStamp date(int year, unsigned month, unsigned day);
  /// Accepts `YYYY-MM-DD` or a (possibly signed) bare integer.
  static TimeStamp parse(std::string_view text);

  std::chrono::year_month_day as_date() const;
  std::string to_string() const;

  friend bool operator==(const TimeStamp&, const TimeStamp&) = default;
  friend auto operator<=>(const TimeStamp&, const TimeStamp&) = default;
};

enum class StepUnit { Integer, Day, Month };

struct TimeStep {
  StepUnit unit = StepUnit::Integer;
  std::int64_t count = 1;

  static TimeStep integer(std::int64_t n) { return {StepUnit::Integer, n}; }
  static TimeStep days(std::int64_t n) { return {StepUnit::Day, n}; }
  static TimeStep months(std::int64_t n) { return {StepUnit::Month, n}; }

  std::string to_string() const;
  friend bool operator==(const TimeStep&, const TimeStep&) = default;
};

/// Uniform time axis generated from (start, step, length). Points are never
/// stored. Month steps use calendar arithmetic; the day of month is clipped
/// to the month's last day, relative to the grid's anchor day.
class TimeIndex {
 public:
  static TimeIndex range(std::int64_t start, std::size_t length, std::int64_t step = 1);
  static TimeIndex dates(std::chrono::year_month_day start, TimeStep step, std::size_t length);
  static TimeIndex from(TimeStamp start, TimeStep step, std::size_t length);

  IndexKind kind() const { return kind_; }
  const TimeStep& step() const { return step_; }
  std::size_t length() const { return length_; }

  TimeStamp at(std::int64_t i) const;
  TimeStamp front() const { return at(0); }
  TimeStamp back() const { return at(static_cast<std::int64_t>(length_) - 1); }

  /// Signed offset of `t` relative to position 0 on this grid (may lie
  /// outside [0, length)). nullopt when `t` is not a grid point.
  std::optional<std::int64_t> offset_of(TimeStamp t) const;
  /// Position of `t` when it lies inside the index.
  std::optional<std::size_t> position_of(TimeStamp t) const;

  /// The same grid starting `offset` steps later with a new length.
  TimeIndex sub(std::int64_t offset, std::size_t length) const;
  TimeIndex with_length(std::size_t length) const { return sub(0, length); }

  /// True when both axes lie on one grid (same kind, step, and alignment).
  bool same_grid(const TimeIndex& other) const;

  friend bool operator==(const TimeIndex& a, const TimeIndex& b);

 private:
  TimeIndex(IndexKind kind, TimeStep step, std::int64_t origin, std::int64_t start_offset,
            std::size_t length);

  IndexKind kind_;
  TimeStep step_;
  // Range / Day: origin is the value of grid point 0.
  // Month: origin encodes the anchor as year*12+month-1 and anchor_day_.
  std::int64_t origin_;
  unsigned anchor_day_ = 1;
  std::int64_t start_offset_;
  std::size_t length_;
};

}  // namespace tsf
