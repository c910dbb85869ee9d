#include "tsf/timeseries.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "tsf/error.hpp"

namespace tsf {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void check_names(const std::vector<std::string>& names, std::size_t components) {
  if (names.size() != components)
    fail(ErrorCode::ShapeMismatch, "expected " + std::to_string(components) + " component names, got " +
                                       std::to_string(names.size()));
  std::set<std::string> seen;
  for (const auto& n : names) {
    if (!seen.insert(n).second) fail(ErrorCode::DuplicateComponentName, "duplicate component name '" + n + "'");
  }
}

}  // namespace

TimeSeries::TimeSeries(TimeIndex index, std::shared_ptr<const std::vector<double>> data, std::size_t offset,
                       std::size_t components, std::size_t samples,
                       std::shared_ptr<const std::vector<std::string>> names)
    : index_(std::move(index)),
      data_(std::move(data)),
      offset_(offset),
      components_(components),
      samples_(samples),
      names_(std::move(names)) {}

TimeSeries TimeSeries::build(TimeIndex index, std::vector<double> values, std::size_t components,
                             std::size_t samples, std::vector<std::string> component_names) {
  if (components == 0 || samples == 0 || values.empty())
    fail(ErrorCode::EmptySeries, "a series needs at least one time step, component and sample");
  const std::size_t expected = index.length() * components * samples;
  if (values.size() != expected)
    fail(ErrorCode::ShapeMismatch, "values hold " + std::to_string(values.size()) + " entries but shape (" +
                                       std::to_string(index.length()) + "," + std::to_string(components) + "," +
                                       std::to_string(samples) + ") needs " + std::to_string(expected));
  check_names(component_names, components);
  return TimeSeries(std::move(index), std::make_shared<const std::vector<double>>(std::move(values)), 0,
                    components, samples,
                    std::make_shared<const std::vector<std::string>>(std::move(component_names)));
}

TimeSeries TimeSeries::univariate(TimeIndex index, std::vector<double> values, std::string name) {
  return build(std::move(index), std::move(values), 1, 1, {std::move(name)});
}

TimeSeries TimeSeries::like(const TimeSeries& like, TimeIndex index, std::vector<double> values) {
  return build(std::move(index), std::move(values), like.components_, like.samples_, *like.names_);
}

std::vector<double> TimeSeries::component_values(std::size_t c, std::size_t s) const {
  if (c >= components_ || s >= samples_) fail(ErrorCode::OutOfRange, "component/sample out of range");
  std::vector<double> out(length());
  for (std::size_t t = 0; t < out.size(); ++t) out[t] = at(t, c, s);
  return out;
}

bool TimeSeries::has_nan() const {
  return std::any_of(values().begin(), values().end(), [](double v) { return std::isnan(v); });
}

std::size_t TimeSeries::resolve(const SlicePoint& p) const {
  const auto T = static_cast<std::int64_t>(length());
  return std::visit(
      [&](const auto& v) -> std::size_t {
        using V = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<V, TimeStamp>) {
          const auto pos = index_.position_of(v);
          if (!pos) fail(ErrorCode::OutOfRange, "time " + v.to_string() + " is not in the series index");
          return *pos;
        } else if constexpr (std::is_same_v<V, Fraction>) {
          if (!(v.value > 0.0 && v.value < 1.0))
            fail(ErrorCode::OutOfRange, "fractional point must lie in (0,1)");
          const auto k = static_cast<std::int64_t>(std::floor(v.value * static_cast<double>(T))) - 1;
          return static_cast<std::size_t>(std::clamp<std::int64_t>(k, 0, T - 1));
        } else {
          const std::int64_t k = v.value < 0 ? T + v.value : v.value;
          if (k < 0 || k >= T) fail(ErrorCode::OutOfRange, "position " + std::to_string(v.value) + " out of range");
          return static_cast<std::size_t>(k);
        }
      },
      p);
}

TimeSeries TimeSeries::slice_positions(std::size_t begin, std::size_t end) const {
  if (end > length() || begin > end) fail(ErrorCode::OutOfRange, "slice bounds out of range");
  if (begin == end) fail(ErrorCode::EmptyResult, "slice would be empty");
  return TimeSeries(index_.sub(static_cast<std::int64_t>(begin), end - begin), data_,
                    offset_ + begin * components_ * samples_, components_, samples_, names_);
}

TimeSeries TimeSeries::slice(const SlicePoint& from, const SlicePoint& to) const {
  const std::size_t a = resolve(from);
  const std::size_t b = resolve(to);
  if (a > b) fail(ErrorCode::OutOfRange, "slice start lies after slice end");
  return slice_positions(a, b + 1);
}

std::pair<TimeSeries, TimeSeries> TimeSeries::split_after(const SlicePoint& p) const {
  std::size_t k = resolve(p);
  if (std::holds_alternative<Fraction>(p)) k = std::min(k, length() >= 2 ? length() - 2 : 0);
  if (k + 1 >= length()) fail(ErrorCode::OutOfRange, "split point must lie strictly inside the series");
  return {slice_positions(0, k + 1), slice_positions(k + 1, length())};
}

TimeSeries TimeSeries::diff(int order, int lag) const {
  if (order < 1 || lag < 1) fail(ErrorCode::InvalidArgument, "diff order and lag must be positive");
  const auto shrink = static_cast<std::size_t>(order) * static_cast<std::size_t>(lag);
  if (length() <= shrink)
    fail(ErrorCode::SeriesTooShort, "series of length " + std::to_string(length()) + " is too short for diff(order=" +
                                        std::to_string(order) + ", lag=" + std::to_string(lag) + ")");
  const std::size_t width = components_ * samples_;
  std::vector<double> cur(values().begin(), values().end());
  std::size_t len = length();
  const auto L = static_cast<std::size_t>(lag);
  for (int o = 0; o < order; ++o) {
    std::vector<double> next((len - L) * width);
    for (std::size_t t = 0; t + L < len; ++t)
      for (std::size_t j = 0; j < width; ++j) next[t * width + j] = cur[(t + L) * width + j] - cur[t * width + j];
    cur = std::move(next);
    len -= L;
  }
  return like(*this, index_.sub(static_cast<std::int64_t>(shrink), len), std::move(cur));
}

TimeSeries TimeSeries::cumsum() const {
  const std::size_t width = components_ * samples_;
  std::vector<double> out(values().begin(), values().end());
  for (std::size_t t = 1; t < length(); ++t)
    for (std::size_t j = 0; j < width; ++j) out[t * width + j] += out[(t - 1) * width + j];
  return like(*this, index_, std::move(out));
}

double empirical_quantile_sorted(std::span<const double> sorted, double q) {
  if (sorted.empty()) fail(ErrorCode::EmptySeries, "quantile of an empty set");
  const double h = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

double empirical_quantile(std::vector<double> values, double q) {
  if (!(q >= 0.0 && q <= 1.0)) fail(ErrorCode::QOutOfRange, "quantile level must lie in [0,1]");
  std::sort(values.begin(), values.end());
  return empirical_quantile_sorted(values, q);
}

TimeSeries TimeSeries::quantile(double q) const {
  if (!(q >= 0.0 && q <= 1.0)) fail(ErrorCode::QOutOfRange, "quantile level must lie in [0,1]");
  if (samples_ < 2) fail(ErrorCode::DeterministicInput, "quantile requires a stochastic series (S > 1)");
  std::vector<double> out(length() * components_);
  std::vector<double> buf(samples_);
  for (std::size_t t = 0; t < length(); ++t) {
    for (std::size_t c = 0; c < components_; ++c) {
      for (std::size_t s = 0; s < samples_; ++s) buf[s] = at(t, c, s);
      std::sort(buf.begin(), buf.end());
      out[t * components_ + c] = empirical_quantile_sorted(buf, q);
    }
  }
  return build(index_, std::move(out), components_, 1, *names_);
}

TimeSeries TimeSeries::map(const std::function<double(double)>& f) const {
  std::vector<double> out(values().begin(), values().end());
  for (double& v : out) v = f(v);
  return like(*this, index_, std::move(out));
}

TimeSeries TimeSeries::stack(const TimeSeries& other) const {
  if (!(index_ == other.index_)) fail(ErrorCode::IndexMismatch, "stack requires identical time indices");
  if (samples_ != other.samples_ && samples_ != 1 && other.samples_ != 1)
    fail(ErrorCode::BroadcastError, "sample counts cannot be broadcast");
  const std::size_t S = std::max(samples_, other.samples_);
  const std::size_t C = components_ + other.components_;
  std::vector<double> out(length() * C * S);
  for (std::size_t t = 0; t < length(); ++t) {
    for (std::size_t c = 0; c < C; ++c) {
      for (std::size_t s = 0; s < S; ++s) {
        const double v = c < components_ ? at(t, c, samples_ == 1 ? 0 : s)
                                         : other.at(t, c - components_, other.samples_ == 1 ? 0 : s);
        out[(t * C + c) * S + s] = v;
      }
    }
  }
  std::vector<std::string> names = *names_;
  names.insert(names.end(), other.names_->begin(), other.names_->end());
  return build(index_, std::move(out), C, S, std::move(names));
}

TimeSeries TimeSeries::append(const TimeSeries& other) const {
  const auto next = index_.at(static_cast<std::int64_t>(length()));
  if (!index_.same_grid(other.index_) || other.index_.front() != next)
    fail(ErrorCode::NonContiguousAppend, "appended series must start at " + next.to_string() + " on the same grid");
  if (components_ != other.components_ || samples_ != other.samples_)
    fail(ErrorCode::ShapeMismatch, "appended series must have the same component and sample counts");
  std::vector<double> out(values().begin(), values().end());
  out.insert(out.end(), other.values().begin(), other.values().end());
  return like(*this, index_.with_length(length() + other.length()), std::move(out));
}

TimeSeries TimeSeries::component(std::size_t c) const {
  if (c >= components_) fail(ErrorCode::OutOfRange, "component index out of range");
  std::vector<double> out(length() * samples_);
  for (std::size_t t = 0; t < length(); ++t)
    for (std::size_t s = 0; s < samples_; ++s) out[t * samples_ + s] = at(t, c, s);
  return build(index_, std::move(out), 1, samples_, {(*names_)[c]});
}

TimeSeries TimeSeries::with_index(TimeIndex index) const {
  if (index.length() != length()) fail(ErrorCode::ShapeMismatch, "new index must have the same length");
  return TimeSeries(std::move(index), data_, offset_, components_, samples_, names_);
}

TimeSeries TimeSeries::with_names(std::vector<std::string> names) const {
  check_names(names, components_);
  return TimeSeries(index_, data_, offset_, components_, samples_,
                    std::make_shared<const std::vector<std::string>>(std::move(names)));
}

TimeSeries zip_apply(const TimeSeries& a, const TimeSeries& b, BinaryOp op) {
  if (!(a.index() == b.index())) fail(ErrorCode::IndexMismatch, "operands must share the same time index");
  if (a.n_components() != b.n_components())
    fail(ErrorCode::BroadcastError, "operands must have the same number of components");
  const std::size_t Sa = a.n_samples(), Sb = b.n_samples();
  if (Sa != Sb && Sa != 1 && Sb != 1) fail(ErrorCode::BroadcastError, "sample counts cannot be broadcast");
  const std::size_t S = std::max(Sa, Sb), C = a.n_components();
  std::vector<double> out(a.length() * C * S);
  bool div_zero = false;
  for (std::size_t t = 0; t < a.length(); ++t) {
    for (std::size_t c = 0; c < C; ++c) {
      for (std::size_t s = 0; s < S; ++s) {
        const double x = a.at(t, c, Sa == 1 ? 0 : s);
        const double y = b.at(t, c, Sb == 1 ? 0 : s);
        double r = 0.0;
        switch (op) {
          case BinaryOp::Add: r = x + y; break;
          case BinaryOp::Subtract: r = x - y; break;
          case BinaryOp::Multiply: r = x * y; break;
          case BinaryOp::Divide:
            if (y == 0.0) {
              r = kNaN;
              div_zero = true;
            } else {
              r = x / y;
            }
            break;
        }
        out[(t * C + c) * S + s] = r;
      }
    }
  }
  if (div_zero) warn("division by zero produced NaN cells");
  return TimeSeries::build(a.index(), std::move(out), C, S, a.component_names());
}

TimeSeries operator+(const TimeSeries& a, const TimeSeries& b) { return zip_apply(a, b, BinaryOp::Add); }
TimeSeries operator-(const TimeSeries& a, const TimeSeries& b) { return zip_apply(a, b, BinaryOp::Subtract); }
TimeSeries operator*(const TimeSeries& a, const TimeSeries& b) { return zip_apply(a, b, BinaryOp::Multiply); }
TimeSeries operator/(const TimeSeries& a, const TimeSeries& b) { return zip_apply(a, b, BinaryOp::Divide); }

}  // namespace tsf
