#pragma once

#include <vector>

#include "tsf/timeseries.hpp"

namespace tsf {

enum class TransformerKind { MinMaxScaler, StandardScaler, BoxCox, MissingFiller };

/// Per-component data transformer. Statistics are computed jointly over time
/// and samples. Fitting mutates; a fitted transformer is read-only.
class Transformer {
 public:
  explicit Transformer(TransformerKind kind) : kind_(kind) {}

  TransformerKind kind() const { return kind_; }
  bool fitted() const { return fitted_; }
  bool invertible() const { return kind_ != TransformerKind::MissingFiller; }

  void fit(const TimeSeries& series);
  TimeSeries transform(const TimeSeries& series) const;
  TimeSeries fit_transform(const TimeSeries& series);
  TimeSeries inverse_transform(const TimeSeries& series) const;

  // Fitted state, one entry per component:
  //   MinMax: (min, max - min); Standard: (mean, std); BoxCox: (lambda, unused).
  const std::vector<double>& location() const { return loc_; }
  const std::vector<double>& scale() const { return scale_; }
  const std::vector<double>& lambda() const { return loc_; }

 private:
  void require_fitted(const TimeSeries& series) const;

  TransformerKind kind_;
  bool fitted_ = false;
  std::vector<double> loc_;
  std::vector<double> scale_;
};

/// Grid of Box-Cox exponents searched when fitting: -2.0, -1.9, ..., 2.0.
std::vector<double> box_cox_lambda_grid();
/// Gaussian profile log-likelihood of the Box-Cox transform at `lambda`.
double box_cox_log_likelihood(std::span<const double> x, double lambda);

class Pipeline {
 public:
  Pipeline() = default;
  explicit Pipeline(std::vector<Transformer> stages) : stages_(std::move(stages)) {}

  bool invertible() const;
  const std::vector<Transformer>& stages() const { return stages_; }

  TimeSeries fit_transform(const TimeSeries& series);
  TimeSeries transform(const TimeSeries& series) const;
  /// Applies stage inverses in reverse order.
  TimeSeries inverse_transform(const TimeSeries& series) const;

 private:
  std::vector<Transformer> stages_;
};

}  // namespace tsf
