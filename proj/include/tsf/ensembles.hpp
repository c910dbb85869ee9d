#pragma once

#include <vector>

#include "tsf/forecasting_model.hpp"

namespace tsf {

enum class EnsembleMode { NaiveMean, Learned };

struct EnsembleSpec {
  std::vector<ModelFactory> members;  // at least two; order fixes weight indexing
  EnsembleMode mode = EnsembleMode::NaiveMean;
  double rho = 0.7;                   // Learned: fraction used to fit members before weighting
};

/// Combines member models behind the same contract. NaiveMean averages the
/// member forecasts; Learned fits non-negative weights on a hold-out split and
/// then refits every member on the full series.
class Ensemble final : public ForecastingModel {
 public:
  explicit Ensemble(EnsembleSpec spec);
  std::string name() const override;
  bool supports_multivariate() const override { return multivariate_; }
  bool supports_covariates() const override { return covariates_; }
  bool supports_history() const override { return history_; }
  /// Largest member minimum; Learned mode also needs both sides of the split
  /// to reach it (DegenerateSplit otherwise).
  std::size_t min_train_length() const override { return min_length_; }

  /// One weight per member (1/M for NaiveMean).
  const std::vector<double>& weights() const { return weights_; }

 protected:
  void do_fit(const TimeSeries& series, const Covariates& covariates) override;
  std::vector<double> do_predict(std::size_t n, const Covariates& covariates) const override;
  std::vector<double> do_predict_from(const TimeSeries& history, std::size_t n,
                                      const Covariates& covariates) const override;

 private:
  std::vector<std::unique_ptr<ForecastingModel>> make_members() const;
  std::vector<double> combine(const std::vector<TimeSeries>& forecasts) const;

  EnsembleSpec spec_;
  std::vector<std::string> member_names_;
  bool multivariate_ = true;
  bool covariates_ = true;
  bool history_ = true;
  std::size_t min_length_ = 1;
  std::vector<std::unique_ptr<ForecastingModel>> members_;
  std::vector<double> weights_;
};

/// min ||A w - b||^2 subject to w >= 0, by projected coordinate descent.
/// A is row-major with `cols` columns. Stops when no coordinate moves by
/// more than `tol`.
std::vector<double> nnls(const std::vector<double>& A, std::size_t cols, const std::vector<double>& b,
                         double tol = 1e-10, std::size_t max_sweeps = 100000);

}  // namespace tsf
