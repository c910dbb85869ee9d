#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tsf/timeseries.hpp"

namespace tsf {

/// One long-format cell: (time, component[, sample], value).
struct TableRecord {
  TimeStamp time;
  std::string component;
  std::size_t sample = 0;
  double value = 0.0;

  friend bool operator==(const TableRecord&, const TableRecord&) = default;
};

/// Builds a series from long-format records. Components keep their order of
/// first appearance. Missing grid cells become NaN. When `step` is not given
/// it is inferred from the smallest spacing between distinct times (month
/// steps for dates sharing one day of month).
TimeSeries from_table(std::span<const TableRecord> rows, std::optional<TimeStep> step = std::nullopt);
/// All finite-or-infinite cells; NaN cells are skipped.
std::vector<TableRecord> to_table(const TimeSeries& series);

/// Shortest decimal representation that parses back to the same double.
std::string format_double(double v);

/// Header `time,component,value` (deterministic) or
/// `time,component,sample,value` (stochastic).
TimeSeries read_csv(std::istream& in, std::optional<TimeStep> step = std::nullopt);
TimeSeries read_csv_file(const std::filesystem::path& path, std::optional<TimeStep> step = std::nullopt);
void write_csv(std::ostream& out, const TimeSeries& series);
void write_csv_file(const std::filesystem::path& path, const TimeSeries& series);

}  // namespace tsf
