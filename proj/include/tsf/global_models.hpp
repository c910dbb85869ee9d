#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "tsf/forecasting_model.hpp"
#include "tsf/likelihoods.hpp"
#include "tsf/windowing.hpp"

namespace tsf {

struct LaggedRegressionConfig {
  std::size_t input_length = 1;   // L_in
  std::size_t output_length = 1;  // L_out
  std::vector<std::size_t> target_lags;    // empty: 1..L_in
  std::vector<std::size_t> past_cov_lags;  // empty: 1..L_in when past covariates are given
  bool use_future_covariates = false;
  double ridge_lambda = 0.0;
  std::optional<LikelihoodKind> likelihood;
  std::size_t stride = 1;
};

/// Sizes that fix the order of the feature vector:
/// [target lags ascending x components] ++ [past-covariate lags x components]
/// ++ [future covariates at each of the L_out steps x components].
struct FeatureLayout {
  std::vector<std::size_t> target_lags;
  std::vector<std::size_t> past_cov_lags;
  std::size_t target_components = 0;
  std::size_t past_components = 0;
  std::size_t future_components = 0;
  std::size_t output_length = 0;

  std::size_t size() const {
    return target_lags.size() * target_components + past_cov_lags.size() * past_components +
           output_length * future_components;
  }
};

inline constexpr int kModelFormatVersion = 1;

/// Direct multi-output ridge regression on lagged windows, trained on any
/// number of series at once and extended autoregressively at predict time.
class LaggedRegression {
 public:
  explicit LaggedRegression(LaggedRegressionConfig cfg);

  void fit(const std::vector<TimeSeries>& targets,
           const std::optional<std::vector<TimeSeries>>& past_covariates = std::nullopt,
           const std::optional<std::vector<TimeSeries>>& future_covariates = std::nullopt);

  /// Forecasts n steps after `series`. num_samples > 1 needs a likelihood;
  /// each trajectory feeds its own sampled values back between rounds.
  TimeSeries predict(std::size_t n, const TimeSeries& series, const std::optional<TimeSeries>& past_covariates = std::nullopt,
                     const std::optional<TimeSeries>& future_covariates = std::nullopt, std::size_t num_samples = 1,
                     std::uint64_t seed = 0) const;

  bool fitted() const { return fitted_; }
  const LaggedRegressionConfig& config() const { return cfg_; }
  const FeatureLayout& layout() const { return layout_; }
  /// (feature_dim, L_out * C_t)
  const Eigen::MatrixXd& weights() const { return W_; }
  const Eigen::VectorXd& intercept() const { return b_; }
  /// In-sample residuals, one row per training sample.
  const Eigen::MatrixXd& residuals() const { return residuals_; }
  const std::optional<Likelihood>& likelihood() const { return likelihood_; }
  /// Sum of squared in-sample residuals.
  double training_loss() const { return residuals_.squaredNorm(); }

  std::string to_json() const;
  static LaggedRegression from_json(const std::string& text);
  void save(const std::filesystem::path& path) const;
  static LaggedRegression load(const std::filesystem::path& path);

 private:
  void require_fitted() const;

  LaggedRegressionConfig cfg_;
  FeatureLayout layout_;
  bool fitted_ = false;
  Eigen::MatrixXd W_;
  Eigen::VectorXd b_;
  Eigen::MatrixXd residuals_;
  std::optional<Likelihood> likelihood_;
  std::vector<std::string> component_names_;
};

/// LaggedRegression behind the single-series ForecastingModel contract
/// (point forecasts).
class GlobalForecaster final : public ForecastingModel {
 public:
  explicit GlobalForecaster(LaggedRegressionConfig cfg) : cfg_(std::move(cfg)) {}
  std::string name() const override { return "LaggedRegression"; }
  bool supports_multivariate() const override { return true; }
  bool supports_covariates() const override { return true; }
  std::size_t min_train_length() const override;
  bool supports_history() const override { return true; }

  const LaggedRegression& model() const { return *model_; }

 protected:
  void do_fit(const TimeSeries& series, const Covariates& covariates) override;
  std::vector<double> do_predict(std::size_t n, const Covariates& covariates) const override;
  std::vector<double> do_predict_from(const TimeSeries& history, std::size_t n,
                                      const Covariates& covariates) const override;

 private:
  LaggedRegressionConfig cfg_;
  std::optional<LaggedRegression> model_;
  Covariates train_covariates_;
};

}  // namespace tsf
