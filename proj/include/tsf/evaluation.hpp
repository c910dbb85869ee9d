#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tsf/forecasting_model.hpp"

namespace tsf {

enum class MetricKind { MAE, MSE, RMSE, MAPE, SMAPE, MASE, Pinball };

struct Metric {
  MetricKind kind = MetricKind::MAE;
  double q = 0.5;              // Pinball only, in (0,1)
  std::size_t season = 1;      // MASE seasonal-naive lag m

  /// "mae", "mse", "rmse", "mape", "smape", "mase[:m]", "pinball[:q]".
  static Metric parse(const std::string& text);
  std::string to_string() const;
};

/// Evaluated on the time intersection of `actual` and `pred`, components
/// matched by position. Stochastic forecasts are reduced to their median
/// (to quantile q for the pinball loss). MASE divides by the in-sample MAE
/// of the seasonal-naive forecast at lag `season`.
double metric(const Metric& m, const TimeSeries& actual, const TimeSeries& pred,
              const std::optional<TimeSeries>& insample = std::nullopt);

struct BacktestPlan {
  SlicePoint start = Fraction{0.5};
  std::size_t horizon = 1;
  std::size_t stride = 1;
  bool retrain = true;
};

/// Position of the first forecast point: a timestamp or position names it
/// directly; a fraction f trains on the first floor(f * T) points.
std::size_t backtest_start(const TimeSeries& series, const SlicePoint& start);

/// Origins start, start + stride, ... with origin + horizon <= T.
std::vector<std::size_t> backtest_origins(std::size_t length, std::size_t start, const BacktestPlan& plan);

std::vector<TimeSeries> historical_forecasts(const ModelFactory& factory, const TimeSeries& series,
                                             const BacktestPlan& plan, const Covariates& covariates = {});

enum class Reduction { Mean, Median };

struct WindowScore {
  TimeStamp origin;  // first forecast point
  double score;
};

/// Metric of each forecast window against the actuals (MASE scales by the
/// history before the window).
std::vector<WindowScore> backtest_windows(const ModelFactory& factory, const TimeSeries& series, const BacktestPlan& plan,
                                          const Metric& m, const Covariates& covariates = {});

/// backtest_windows scores, reduced.
double backtest(const ModelFactory& factory, const TimeSeries& series, const BacktestPlan& plan, const Metric& m,
                Reduction reduction = Reduction::Mean, const Covariates& covariates = {});

struct GridAxis {
  std::string name;
  std::vector<double> values;
};
using ParamSet = std::vector<std::pair<std::string, double>>;
using ParametricFactory = std::function<std::unique_ptr<ForecastingModel>(const ParamSet&)>;

struct GridResult {
  ParamSet best;
  double best_score = 0.0;
  struct Entry {
    ParamSet params;
    std::optional<double> score;
    std::string error;
  };
  std::vector<Entry> entries;  // grid order
};

/// Cartesian product in axis order, last axis varying fastest.
std::vector<ParamSet> expand_grid(const std::vector<GridAxis>& axes);

/// Backtests every combination; the lowest score wins, ties go to the
/// earliest combination.
GridResult grid_search(const ParametricFactory& factory, const std::vector<GridAxis>& axes, const TimeSeries& series,
                       const BacktestPlan& plan, const Metric& m, const Covariates& covariates = {});

double param(const ParamSet& params, const std::string& name);

}  // namespace tsf
