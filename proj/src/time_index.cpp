#include "tsf/time_index.hpp"

#include <charconv>
#include <cstdio>

#include "tsf/error.hpp"

namespace tsf {

namespace chr = std::chrono;

namespace {

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

std::int64_t month_serial(chr::year_month_day ymd) {
  return static_cast<std::int64_t>(static_cast<int>(ymd.year())) * 12 +
         static_cast<unsigned>(ymd.month()) - 1;
}

chr::year_month_day from_month_serial(std::int64_t serial, unsigned anchor_day) {
  const auto y = static_cast<int>(floor_div(serial, 12));
  const auto m = static_cast<unsigned>(serial - static_cast<std::int64_t>(y) * 12 + 1);
  const chr::year_month ym{chr::year{y}, chr::month{m}};
  const unsigned last = static_cast<unsigned>(chr::year_month_day_last{ym.year(), chr::month_day_last{ym.month()}}.day());
  return {ym.year(), ym.month(), chr::day{anchor_day < last ? anchor_day : last}};
}

}  // namespace

TimeStamp TimeStamp::date(chr::year_month_day ymd) {
  if (!ymd.ok()) fail(ErrorCode::ParseError, "invalid calendar date");
  return {IndexKind::Datetime, chr::sys_days{ymd}.time_since_epoch().count()};
}

TimeStamp TimeStamp::date(int year, unsigned month, unsigned day) {
  return date(chr::year_month_day{chr::year{year}, chr::month{month}, chr::day{day}});
}

TimeStamp TimeStamp::parse(std::string_view text) {
  const auto bad = [&] { fail(ErrorCode::ParseError, "cannot parse time '" + std::string(text) + "'"); };
  if (text.empty()) bad();
  // ISO date: YYYY-MM-DD (the year may carry more than four digits).
  const auto dash = text.find('-', 1);
  if (dash != std::string_view::npos) {
    int y = 0;
    unsigned m = 0, d = 0;
    const char* end = text.data() + text.size();
    auto r1 = std::from_chars(text.data(), text.data() + dash, y);
    if (r1.ec != std::errc{} || r1.ptr != text.data() + dash) bad();
    const auto rest = text.substr(dash + 1);
    if (rest.size() != 5 || rest[2] != '-') bad();
    auto r2 = std::from_chars(rest.data(), rest.data() + 2, m);
    auto r3 = std::from_chars(rest.data() + 3, end, d);
    if (r2.ec != std::errc{} || r3.ec != std::errc{} || r3.ptr != end) bad();
    const chr::year_month_day ymd{chr::year{y}, chr::month{m}, chr::day{d}};
    if (!ymd.ok()) bad();
    return date(ymd);
  }
  std::int64_t v = 0;
  auto r = std::from_chars(text.data(), text.data() + text.size(), v);
  if (r.ec != std::errc{} || r.ptr != text.data() + text.size()) bad();
  return integer(v);
}

chr::year_month_day TimeStamp::as_date() const {
  return chr::year_month_day{chr::sys_days{chr::days{value}}};
}

std::string TimeStamp::to_string() const {
  if (kind == IndexKind::Range) return std::to_string(value);
  const auto ymd = as_date();
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
  return buf;
}

std::string TimeStep::to_string() const {
  switch (unit) {
    case StepUnit::Integer: return std::to_string(count);
    case StepUnit::Day: return std::to_string(count) + "D";
    case StepUnit::Month: return std::to_string(count) + "M";
  }
  return "?";
}

TimeIndex::TimeIndex(IndexKind kind, TimeStep step, std::int64_t origin, std::int64_t start_offset,
                     std::size_t length)
    : kind_(kind), step_(step), origin_(origin), start_offset_(start_offset), length_(length) {
  if (length_ == 0) fail(ErrorCode::EmptySeries, "time index length must be >= 1");
  if (step_.count <= 0) fail(ErrorCode::InvalidArgument, "time step must be strictly positive");
}

TimeIndex TimeIndex::range(std::int64_t start, std::size_t length, std::int64_t step) {
  return TimeIndex(IndexKind::Range, TimeStep::integer(step), start, 0, length);
}

TimeIndex TimeIndex::dates(chr::year_month_day start, TimeStep step, std::size_t length) {
  if (!start.ok()) fail(ErrorCode::InvalidArgument, "invalid start date");
  if (step.unit == StepUnit::Integer)
    fail(ErrorCode::InvalidArgument, "datetime index needs a day or month step");
  if (step.unit == StepUnit::Day) {
    return TimeIndex(IndexKind::Datetime, step, TimeStamp::date(start).value, 0, length);
  }
  TimeIndex idx(IndexKind::Datetime, step, month_serial(start), 0, length);
  idx.anchor_day_ = static_cast<unsigned>(start.day());
  return idx;
}

TimeIndex TimeIndex::from(TimeStamp start, TimeStep step, std::size_t length) {
  if (start.kind == IndexKind::Range) {
    if (step.unit != StepUnit::Integer)
      fail(ErrorCode::InvalidArgument, "integer index needs an integer step");
    return range(start.value, length, step.count);
  }
  return dates(start.as_date(), step, length);
}

TimeStamp TimeIndex::at(std::int64_t i) const {
  const std::int64_t k = start_offset_ + i;
  switch (step_.unit) {
    case StepUnit::Integer: return TimeStamp::integer(origin_ + k * step_.count);
    case StepUnit::Day: return TimeStamp{IndexKind::Datetime, origin_ + k * step_.count};
    case StepUnit::Month: return TimeStamp::date(from_month_serial(origin_ + k * step_.count, anchor_day_));
  }
  return {};
}

std::optional<std::int64_t> TimeIndex::offset_of(TimeStamp t) const {
  if (t.kind != kind_) return std::nullopt;
  std::int64_t k = 0;
  if (step_.unit == StepUnit::Month) {
    const std::int64_t diff = month_serial(t.as_date()) - origin_;
    if (diff % step_.count != 0) return std::nullopt;
    k = diff / step_.count;
  } else {
    const std::int64_t diff = t.value - origin_;
    if (diff % step_.count != 0) return std::nullopt;
    k = diff / step_.count;
  }
  const std::int64_t offset = k - start_offset_;
  if (at(offset) != t) return std::nullopt;
  return offset;
}

std::optional<std::size_t> TimeIndex::position_of(TimeStamp t) const {
  const auto off = offset_of(t);
  if (!off || *off < 0 || *off >= static_cast<std::int64_t>(length_)) return std::nullopt;
  return static_cast<std::size_t>(*off);
}

TimeIndex TimeIndex::sub(std::int64_t offset, std::size_t length) const {
  TimeIndex idx = *this;
  idx.start_offset_ += offset;
  if (length == 0) fail(ErrorCode::EmptyResult, "sub-index would be empty");
  idx.length_ = length;
  return idx;
}

bool TimeIndex::same_grid(const TimeIndex& other) const {
  if (kind_ != other.kind_ || step_ != other.step_) return false;
  if (step_.unit == StepUnit::Month && anchor_day_ != other.anchor_day_) {
    // Anchors 29..31 can coincide on every point only if identical.
    return false;
  }
  return other.offset_of(front()).has_value();
}

bool operator==(const TimeIndex& a, const TimeIndex& b) {
  return a.same_grid(b) && a.length_ == b.length_ && a.front() == b.front();
}

}  // namespace tsf
