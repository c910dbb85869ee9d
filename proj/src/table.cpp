#include "tsf/table.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>

#include "tsf/error.hpp"

namespace tsf {

namespace chr = std::chrono;

namespace {

std::int64_t month_serial(TimeStamp t) {
  const auto ymd = t.as_date();
  return static_cast<std::int64_t>(static_cast<int>(ymd.year())) * 12 + static_cast<unsigned>(ymd.month()) - 1;
}

TimeStep infer_step(const std::vector<TimeStamp>& times) {
  const bool dates = times.front().kind == IndexKind::Datetime;
  if (times.size() == 1) return dates ? TimeStep::days(1) : TimeStep::integer(1);
  if (dates) {
    const auto day0 = times.front().as_date().day();
    const bool same_day = std::all_of(times.begin(), times.end(), [&](TimeStamp t) { return t.as_date().day() == day0; });
    std::int64_t min_gap_days = std::numeric_limits<std::int64_t>::max();
    for (std::size_t i = 1; i < times.size(); ++i) min_gap_days = std::min(min_gap_days, times[i].value - times[i - 1].value);
    if (same_day && min_gap_days >= 28) {
      std::int64_t min_months = std::numeric_limits<std::int64_t>::max();
      for (std::size_t i = 1; i < times.size(); ++i)
        min_months = std::min(min_months, month_serial(times[i]) - month_serial(times[i - 1]));
      return TimeStep::months(min_months);
    }
    return TimeStep::days(min_gap_days);
  }
  std::int64_t gap = std::numeric_limits<std::int64_t>::max();
  for (std::size_t i = 1; i < times.size(); ++i) gap = std::min(gap, times[i].value - times[i - 1].value);
  return TimeStep::integer(gap);
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

double parse_double(std::string_view s, std::size_t line_no) {
  if (s == "nan" || s == "NaN" || s.empty()) return std::numeric_limits<double>::quiet_NaN();
  double v = 0.0;
  auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc{} || r.ptr != s.data() + s.size())
    fail(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": bad number '" + std::string(s) + "'");
  return v;
}

}  // namespace

TimeSeries from_table(std::span<const TableRecord> rows, std::optional<TimeStep> step) {
  if (rows.empty()) fail(ErrorCode::EmptySeries, "table has no records");
  const IndexKind kind = rows.front().time.kind;
  std::vector<std::string> names;
  std::map<std::string, std::size_t> comp_pos;
  std::size_t samples = 1;
  std::vector<TimeStamp> times;
  for (const auto& r : rows) {
    if (r.time.kind != kind) fail(ErrorCode::NonUniformTimeGrid, "table mixes dates and integer times");
    if (comp_pos.emplace(r.component, names.size()).second) names.push_back(r.component);
    samples = std::max(samples, r.sample + 1);
    times.push_back(r.time);
  }
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end()), times.end());

  const TimeStep st = step ? *step : infer_step(times);
  if (st.count <= 0) fail(ErrorCode::NonUniformTimeGrid, "time step must be positive");
  if ((kind == IndexKind::Range) != (st.unit == StepUnit::Integer))
    fail(ErrorCode::NonUniformTimeGrid, "step unit does not match the time kind");
  const TimeIndex probe = TimeIndex::from(times.front(), st, 1);
  const auto last = probe.offset_of(times.back());
  if (!last) fail(ErrorCode::NonUniformTimeGrid, "time " + times.back().to_string() + " is off the inferred grid");
  const TimeIndex index = probe.with_length(static_cast<std::size_t>(*last) + 1);

  const std::size_t C = names.size(), S = samples;
  std::vector<double> values(index.length() * C * S, std::numeric_limits<double>::quiet_NaN());
  std::vector<bool> filled(values.size(), false);
  for (const auto& r : rows) {
    const auto pos = index.position_of(r.time);
    if (!pos) fail(ErrorCode::NonUniformTimeGrid, "time " + r.time.to_string() + " is off the inferred grid");
    const std::size_t k = (*pos * C + comp_pos.at(r.component)) * S + r.sample;
    if (filled[k])
      fail(ErrorCode::DuplicateCell, "duplicate cell (" + r.time.to_string() + ", " + r.component + ", " +
                                         std::to_string(r.sample) + ")");
    filled[k] = true;
    values[k] = r.value;
  }
  return TimeSeries::build(index, std::move(values), C, S, std::move(names));
}

std::vector<TableRecord> to_table(const TimeSeries& series) {
  std::vector<TableRecord> out;
  out.reserve(series.values().size());
  const auto& names = series.component_names();
  for (std::size_t t = 0; t < series.length(); ++t) {
    const TimeStamp ts = series.index().at(static_cast<std::int64_t>(t));
    for (std::size_t c = 0; c < series.n_components(); ++c)
      for (std::size_t s = 0; s < series.n_samples(); ++s) {
        const double v = series.at(t, c, s);
        if (!std::isnan(v)) out.push_back({ts, names[c], s, v});
      }
  }
  return out;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

TimeSeries read_csv(std::istream& in, std::optional<TimeStep> step) {
  std::string line;
  if (!std::getline(in, line)) fail(ErrorCode::ParseError, "empty CSV input");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  bool stochastic = false;
  if (line == "time,component,sample,value") {
    stochastic = true;
  } else if (line != "time,component,value") {
    fail(ErrorCode::ParseError, "unexpected CSV header '" + line + "'");
  }
  std::vector<TableRecord> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = split_fields(line);
    if (f.size() != (stochastic ? 4u : 3u))
      fail(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": wrong field count");
    TableRecord r;
    r.time = TimeStamp::parse(f[0]);
    r.component = std::string(f[1]);
    if (stochastic) {
      auto res = std::from_chars(f[2].data(), f[2].data() + f[2].size(), r.sample);
      if (res.ec != std::errc{} || res.ptr != f[2].data() + f[2].size())
        fail(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": bad sample id");
    }
    r.value = parse_double(f.back(), line_no);
    rows.push_back(std::move(r));
  }
  return from_table(rows, step);
}

TimeSeries read_csv_file(const std::filesystem::path& path, std::optional<TimeStep> step) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::IoError, "cannot open '" + path.string() + "'");
  return read_csv(in, step);
}

void write_csv(std::ostream& out, const TimeSeries& series) {
  const bool stochastic = !series.is_deterministic();
  out << (stochastic ? "time,component,sample,value\n" : "time,component,value\n");
  for (const auto& r : to_table(series)) {
    out << r.time.to_string() << ',' << r.component << ',';
    if (stochastic) out << r.sample << ',';
    out << format_double(r.value) << '\n';
  }
}

void write_csv_file(const std::filesystem::path& path, const TimeSeries& series) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::IoError, "cannot write '" + path.string() + "'");
  write_csv(out, series);
}

}  // namespace tsf
