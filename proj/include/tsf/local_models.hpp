#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "tsf/forecasting_model.hpp"

namespace tsf {

/// Repeats the last K observations: step h forecasts s[T - K + ((h-1) mod K)].
class NaiveSeasonal final : public ForecastingModel {
 public:
  explicit NaiveSeasonal(std::size_t K = 1);
  std::string name() const override { return "NaiveSeasonal"; }
  std::size_t min_train_length() const override { return K_; }

 protected:
  void do_fit(const TimeSeries& series, const Covariates&) override;
  std::vector<double> do_predict(std::size_t n, const Covariates&) const override;

 private:
  std::size_t K_;
  std::vector<double> tail_;
};

/// Extends the line through the first and last observations.
class NaiveDrift final : public ForecastingModel {
 public:
  std::string name() const override { return "NaiveDrift"; }
  std::size_t min_train_length() const override { return 2; }

 protected:
  void do_fit(const TimeSeries& series, const Covariates&) override;
  std::vector<double> do_predict(std::size_t n, const Covariates&) const override;

 private:
  double last_ = 0.0;
  double slope_ = 0.0;
};

// ---------------------------------------------------------------------------
// Exponential smoothing (Holt-Winters)

enum class TrendKind { None, Additive };
enum class SeasonalKind { None, Additive, Multiplicative };

struct ESConfig {
  TrendKind trend = TrendKind::None;
  SeasonalKind seasonal = SeasonalKind::None;
  std::size_t season_length = 1;
};

struct ESState {
  double level = 0.0;
  double trend = 0.0;
  std::vector<double> seasonal;  // indices for the next m steps, in order
};

/// Initial components: level = mean of the first season (or first value),
/// trend = (mean of season 2 - mean of season 1) / m (or 0), seasonal indices
/// from the first season, normalized to sum 0 / mean 1.
ESState es_initial_state(std::span<const double> y, const ESConfig& cfg);
/// Runs the recursion with smoothing parameters {alpha[, beta][, gamma]}.
/// Returns the one-step in-sample SSE and writes the final state.
double es_sse(std::span<const double> y, const ESConfig& cfg, std::span<const double> params, ESState* final_state);

class ExponentialSmoothing final : public ForecastingModel {
 public:
  explicit ExponentialSmoothing(ESConfig cfg = {});
  std::string name() const override { return "ExponentialSmoothing"; }
  std::size_t min_train_length() const override;

  const std::vector<double>& parameters() const { return params_; }
  double sse() const { return sse_; }

 protected:
  void do_fit(const TimeSeries& series, const Covariates&) override;
  std::vector<double> do_predict(std::size_t n, const Covariates&) const override;

 private:
  ESConfig cfg_;
  std::vector<double> params_;
  double sse_ = 0.0;
  ESState state_;
};

/// Simple exponential smoothing with alpha chosen like ExponentialSmoothing.
struct SESFit {
  double alpha = 0.0;
  double level = 0.0;
  double sse = 0.0;
};
SESFit fit_ses(std::span<const double> y);

// ---------------------------------------------------------------------------
// Theta

std::vector<double> autocorrelation(std::span<const double> y, std::size_t max_lag);
/// True when |r_m| > 1.645 * sqrt((1 + 2 * sum_{k<m} r_k^2) / T).
bool seasonality_test(std::span<const double> y, std::size_t m);
/// Classical multiplicative decomposition: m seasonal indices with mean 1,
/// indexed by position mod m.
std::vector<double> multiplicative_seasonal_indices(std::span<const double> y, std::size_t m);

class Theta final : public ForecastingModel {
 public:
  explicit Theta(std::size_t season_length = 1, double theta = 2.0);
  std::string name() const override { return "Theta"; }
  std::size_t min_train_length() const override { return 3; }

  bool seasonal() const { return !seasonal_.empty(); }
  double alpha() const { return ses_.alpha; }

 protected:
  void do_fit(const TimeSeries& series, const Covariates&) override;
  std::vector<double> do_predict(std::size_t n, const Covariates&) const override;

 private:
  std::size_t m_;
  double theta_;
  std::vector<double> seasonal_;
  double intercept_ = 0.0, slope_ = 0.0;
  std::size_t length_ = 0;
  SESFit ses_;
};

// ---------------------------------------------------------------------------
// FFT

class FFTModel final : public ForecastingModel {
 public:
  FFTModel(int trend_degree = 0, std::size_t top_k = 3);
  std::string name() const override { return "FFT"; }
  std::size_t min_train_length() const override { return 8; }

 protected:
  void do_fit(const TimeSeries& series, const Covariates&) override;
  std::vector<double> do_predict(std::size_t n, const Covariates&) const override;

 private:
  int degree_;
  std::size_t top_k_;
  std::vector<double> trend_coef_;  // in scaled time u = t / T
  std::vector<double> filtered_;
};

// ---------------------------------------------------------------------------
// ARIMA

struct ARIMAOrder {
  std::size_t p = 1, d = 0, q = 0;
};

/// Conditional sum of squares of an ARMA(p,q) on `w`: pre-sample residuals
/// are zero and the first p observations are burn-in.
double arma_css(std::span<const double> w, std::span<const double> ar, std::span<const double> ma,
                std::vector<double>* residuals = nullptr);
/// AR coefficients from the sample autocovariances (Yule-Walker equations).
std::vector<double> yule_walker(std::span<const double> w, std::size_t p);

class ARIMA final : public ForecastingModel {
 public:
  explicit ARIMA(ARIMAOrder order = {});
  std::string name() const override { return "ARIMA"; }
  std::size_t min_train_length() const override { return order_.p + order_.d + order_.q + 2; }

  const std::vector<double>& ar() const { return ar_; }
  const std::vector<double>& ma() const { return ma_; }
  double mean() const { return mean_; }
  double css() const { return css_; }
  double initial_css() const { return initial_css_; }
  /// Set when the optimizer failed from the Yule-Walker start and was rerun from zero.
  bool used_fallback_init() const { return fallback_; }

 protected:
  void do_fit(const TimeSeries& series, const Covariates&) override;
  std::vector<double> do_predict(std::size_t n, const Covariates&) const override;

 private:
  ARIMAOrder order_;
  std::vector<double> ar_, ma_;
  double mean_ = 0.0;
  double css_ = 0.0, initial_css_ = 0.0;
  bool fallback_ = false;
  std::vector<double> w_tail_, e_tail_;
  std::vector<double> diff_anchors_;  // last value of each differencing level
};

}  // namespace tsf
