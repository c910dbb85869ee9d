#include "tsf/forecasting_model.hpp"

#include "tsf/error.hpp"

namespace tsf {

TimeIndex forecast_index(const TimeSeries& series, std::size_t n) {
  if (n == 0) fail(ErrorCode::InvalidArgument, "forecast horizon n must be >= 1");
  return series.index().sub(static_cast<std::int64_t>(series.length()), n);
}

void ForecastingModel::fit(const TimeSeries& series, const Covariates& covariates) {
  if (!series.is_deterministic())
    fail(ErrorCode::InvalidArgument, name() + ": training series must be deterministic");
  if (series.n_components() > 1 && !supports_multivariate())
    fail(ErrorCode::UnsupportedMultivariate, name() + " is univariate; got " +
                                                 std::to_string(series.n_components()) + " components");
  if (!covariates.empty() && !supports_covariates())
    fail(ErrorCode::UnsupportedCovariates, name() + " does not accept covariates");
  if (series.has_nan()) fail(ErrorCode::NaNInput, name() + ": training series contains NaN");
  if (series.length() < min_train_length())
    fail(ErrorCode::SeriesTooShort, name() + " needs at least " + std::to_string(min_train_length()) +
                                        " points, got " + std::to_string(series.length()));
  training_.reset();
  do_fit(series, covariates);
  training_ = series;
}

TimeSeries ForecastingModel::predict(std::size_t n, const Covariates& covariates) const {
  if (!training_) fail(ErrorCode::NotFitted, name() + ": predict called before fit");
  if (!covariates.empty() && !supports_covariates())
    fail(ErrorCode::UnsupportedCovariates, name() + " does not accept covariates");
  auto index = forecast_index(*training_, n);
  auto values = do_predict(n, covariates);
  return TimeSeries::build(std::move(index), std::move(values), training_->n_components(), 1,
                           training_->component_names());
}

TimeSeries ForecastingModel::predict_from(const TimeSeries& history, std::size_t n, const Covariates& covariates) const {
  if (!training_) fail(ErrorCode::NotFitted, name() + ": predict called before fit");
  if (!covariates.empty() && !supports_covariates())
    fail(ErrorCode::UnsupportedCovariates, name() + " does not accept covariates");
  if (history.n_components() != training_->n_components())
    fail(ErrorCode::ShapeMismatch, name() + ": history has a different number of components than the training series");
  auto index = forecast_index(history, n);
  auto values = do_predict_from(history, n, covariates);
  return TimeSeries::build(std::move(index), std::move(values), history.n_components(), 1, history.component_names());
}

std::vector<double> ForecastingModel::do_predict_from(const TimeSeries&, std::size_t, const Covariates&) const {
  fail(ErrorCode::Unsupported, name() + " can only forecast from the end of its training series; use retraining");
}

const TimeSeries& ForecastingModel::training_series() const {
  if (!training_) fail(ErrorCode::NotFitted, name() + " is not fitted");
  return *training_;
}

}  // namespace tsf
