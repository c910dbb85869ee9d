#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>

#include "tsf/timeseries.hpp"

namespace tsf {

struct Covariates {
  std::optional<TimeSeries> past;
  std::optional<TimeSeries> future;

  bool empty() const { return !past && !future; }
};

/// Uniform fit/predict contract shared by every model.
///
/// `fit` validates the training series (deterministic, NaN-free, univariate
/// unless the model says otherwise) and replaces any prior state. `predict(n)`
/// returns exactly n points on the training grid, starting one step after
/// the training series' last point.
class ForecastingModel {
 public:
  virtual ~ForecastingModel() = default;

  virtual std::string name() const = 0;
  virtual bool supports_multivariate() const { return false; }
  virtual bool supports_covariates() const { return false; }
  /// Shortest training series the model accepts.
  virtual std::size_t min_train_length() const { return 1; }

  /// True when a fitted model can forecast from a history other than its
  /// training series (needed to backtest without retraining).
  virtual bool supports_history() const { return false; }

  void fit(const TimeSeries& series, const Covariates& covariates = {});
  TimeSeries predict(std::size_t n, const Covariates& covariates = {}) const;
  /// Forecasts n steps after the end of `history` with the fitted state.
  TimeSeries predict_from(const TimeSeries& history, std::size_t n, const Covariates& covariates = {}) const;

  bool fitted() const { return training_.has_value(); }
  const TimeSeries& training_series() const;

 protected:
  virtual void do_fit(const TimeSeries& series, const Covariates& covariates) = 0;
  /// Returns the n point forecasts (time-major, C values per step).
  virtual std::vector<double> do_predict(std::size_t n, const Covariates& covariates) const = 0;
  virtual std::vector<double> do_predict_from(const TimeSeries& history, std::size_t n,
                                              const Covariates& covariates) const;

 private:
  std::optional<TimeSeries> training_;
};

using ModelFactory = std::function<std::unique_ptr<ForecastingModel>()>;

/// Index of the n steps following `series`.
TimeIndex forecast_index(const TimeSeries& series, std::size_t n);

}  // namespace tsf
