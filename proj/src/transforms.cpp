#include "tsf/transforms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "tsf/error.hpp"

namespace tsf {

namespace {

std::vector<double> column(const TimeSeries& s, std::size_t c) {
  std::vector<double> out;
  out.reserve(s.length() * s.n_samples());
  for (std::size_t t = 0; t < s.length(); ++t)
    for (std::size_t k = 0; k < s.n_samples(); ++k) out.push_back(s.at(t, c, k));
  return out;
}

void reject_nan(const TimeSeries& s) {
  if (s.has_nan()) fail(ErrorCode::NaNInput, "transformer input contains NaN; apply a MissingFiller first");
}

TimeSeries apply_per_component(const TimeSeries& s, auto&& f) {
  std::vector<double> out(s.values().begin(), s.values().end());
  const std::size_t C = s.n_components(), S = s.n_samples();
  for (std::size_t t = 0; t < s.length(); ++t)
    for (std::size_t c = 0; c < C; ++c)
      for (std::size_t k = 0; k < S; ++k) {
        double& v = out[(t * C + c) * S + k];
        v = f(c, v);
      }
  return TimeSeries::like(s, s.index(), std::move(out));
}

double box_cox(double x, double lambda) { return lambda == 0.0 ? std::log(x) : (std::pow(x, lambda) - 1.0) / lambda; }

double box_cox_inverse(double y, double lambda) {
  return lambda == 0.0 ? std::exp(y) : std::pow(lambda * y + 1.0, 1.0 / lambda);
}

TimeSeries fill_missing(const TimeSeries& s) {
  const std::size_t T = s.length(), C = s.n_components(), S = s.n_samples();
  std::vector<double> out(s.values().begin(), s.values().end());
  for (std::size_t c = 0; c < C; ++c) {
    for (std::size_t k = 0; k < S; ++k) {
      auto at = [&](std::size_t t) -> double& { return out[(t * C + c) * S + k]; };
      std::vector<std::size_t> finite;
      for (std::size_t t = 0; t < T; ++t)
        if (!std::isnan(at(t))) finite.push_back(t);
      if (finite.empty())
        fail(ErrorCode::AllNaNComponent, "component '" + s.component_names()[c] + "' has no finite value");
      for (std::size_t t = 0; t < finite.front(); ++t) at(t) = at(finite.front());
      for (std::size_t t = finite.back() + 1; t < T; ++t) at(t) = at(finite.back());
      for (std::size_t i = 0; i + 1 < finite.size(); ++i) {
        const std::size_t a = finite[i], b = finite[i + 1];
        const double va = at(a), vb = at(b);
        for (std::size_t t = a + 1; t < b; ++t)
          at(t) = va + (vb - va) * static_cast<double>(t - a) / static_cast<double>(b - a);
      }
    }
  }
  return TimeSeries::like(s, s.index(), std::move(out));
}

}  // namespace

std::vector<double> box_cox_lambda_grid() {
  std::vector<double> grid;
  for (int k = -20; k <= 20; ++k) grid.push_back(static_cast<double>(k) / 10.0);
  return grid;
}

double box_cox_log_likelihood(std::span<const double> x, double lambda) {
  const auto n = static_cast<double>(x.size());
  double mean = 0.0, log_sum = 0.0;
  std::vector<double> y(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    y[i] = box_cox(x[i], lambda);
    mean += y[i];
    log_sum += std::log(x[i]);
  }
  mean /= n;
  double var = 0.0;
  for (double v : y) var += (v - mean) * (v - mean);
  var /= n;
  if (var <= 0.0) return -std::numeric_limits<double>::infinity();
  return -0.5 * n * std::log(var) + (lambda - 1.0) * log_sum;
}

void Transformer::fit(const TimeSeries& series) {
  const std::size_t C = series.n_components();
  loc_.assign(C, 0.0);
  scale_.assign(C, 1.0);
  switch (kind_) {
    case TransformerKind::MissingFiller:
      break;
    case TransformerKind::MinMaxScaler:
      reject_nan(series);
      for (std::size_t c = 0; c < C; ++c) {
        const auto col = column(series, c);
        const auto [lo, hi] = std::minmax_element(col.begin(), col.end());
        loc_[c] = *lo;
        // A constant component maps to 0 with unit range.
        scale_[c] = *hi > *lo ? *hi - *lo : 1.0;
      }
      break;
    case TransformerKind::StandardScaler:
      reject_nan(series);
      for (std::size_t c = 0; c < C; ++c) {
        const auto col = column(series, c);
        double mean = 0.0;
        for (double v : col) mean += v;
        mean /= static_cast<double>(col.size());
        double var = 0.0;
        for (double v : col) var += (v - mean) * (v - mean);
        var /= static_cast<double>(col.size());
        loc_[c] = mean;
        scale_[c] = var > 0.0 ? std::sqrt(var) : 1.0;
      }
      break;
    case TransformerKind::BoxCox:
      reject_nan(series);
      for (std::size_t c = 0; c < C; ++c) {
        const auto col = column(series, c);
        if (std::any_of(col.begin(), col.end(), [](double v) { return v <= 0.0; }))
          fail(ErrorCode::NonPositiveForBoxCox, "Box-Cox requires strictly positive values");
        double best = -std::numeric_limits<double>::infinity();
        double best_lambda = 1.0;
        for (double lambda : box_cox_lambda_grid()) {
          const double ll = box_cox_log_likelihood(col, lambda);
          if (ll > best) {
            best = ll;
            best_lambda = lambda;
          }
        }
        loc_[c] = best_lambda;
      }
      break;
  }
  fitted_ = true;
}

void Transformer::require_fitted(const TimeSeries& series) const {
  if (!fitted_) fail(ErrorCode::NotFitted, "transformer must be fitted first");
  if (series.n_components() != loc_.size())
    fail(ErrorCode::ShapeMismatch, "series has a different component count than the fitted transformer");
}

TimeSeries Transformer::transform(const TimeSeries& series) const {
  require_fitted(series);
  switch (kind_) {
    case TransformerKind::MissingFiller:
      return fill_missing(series);
    case TransformerKind::MinMaxScaler:
    case TransformerKind::StandardScaler:
      reject_nan(series);
      return apply_per_component(series, [&](std::size_t c, double v) { return (v - loc_[c]) / scale_[c]; });
    case TransformerKind::BoxCox:
      reject_nan(series);
      for (double v : series.values())
        if (v <= 0.0) fail(ErrorCode::NonPositiveForBoxCox, "Box-Cox requires strictly positive values");
      return apply_per_component(series, [&](std::size_t c, double v) { return box_cox(v, loc_[c]); });
  }
  return series;
}

TimeSeries Transformer::fit_transform(const TimeSeries& series) {
  fit(series);
  return transform(series);
}

TimeSeries Transformer::inverse_transform(const TimeSeries& series) const {
  if (!fitted_) fail(ErrorCode::NotFitted, "transformer must be fitted first");
  if (!invertible()) fail(ErrorCode::NotInvertible, "missing-value filling cannot be inverted");
  require_fitted(series);
  if (kind_ == TransformerKind::BoxCox)
    return apply_per_component(series, [&](std::size_t c, double v) { return box_cox_inverse(v, loc_[c]); });
  return apply_per_component(series, [&](std::size_t c, double v) { return v * scale_[c] + loc_[c]; });
}

bool Pipeline::invertible() const {
  return std::all_of(stages_.begin(), stages_.end(), [](const Transformer& t) { return t.invertible(); });
}

TimeSeries Pipeline::fit_transform(const TimeSeries& series) {
  TimeSeries cur = series;
  for (auto& stage : stages_) cur = stage.fit_transform(cur);
  return cur;
}

TimeSeries Pipeline::transform(const TimeSeries& series) const {
  TimeSeries cur = series;
  for (const auto& stage : stages_) cur = stage.transform(cur);
  return cur;
}

TimeSeries Pipeline::inverse_transform(const TimeSeries& series) const {
  if (!invertible()) fail(ErrorCode::NotInvertible, "pipeline contains a non-invertible stage");
  TimeSeries cur = series;
  for (auto it = stages_.rbegin(); it != stages_.rend(); ++it) cur = it->inverse_transform(cur);
  return cur;
}

}  // namespace tsf
