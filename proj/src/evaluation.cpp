#include "tsf/evaluation.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include "tsf/error.hpp"
#include "tsf/table.hpp"

namespace tsf {

namespace {

struct Pairs {
  std::vector<double> y, yhat;
};

Pairs aligned(const TimeSeries& actual, const TimeSeries& pred, double q) {
  if (actual.n_components() != pred.n_components())
    fail(ErrorCode::ShapeMismatch, "actual has " + std::to_string(actual.n_components()) + " components, forecast has " +
                                       std::to_string(pred.n_components()));
  const TimeSeries a = actual.is_deterministic() ? actual : actual.quantile(0.5);
  const TimeSeries p = pred.is_deterministic() ? pred : pred.quantile(q);
  Pairs out;
  for (std::size_t i = 0; i < p.length(); ++i) {
    const auto pos = a.index().position_of(p.index().at(static_cast<std::int64_t>(i)));
    if (!pos) continue;
    for (std::size_t c = 0; c < p.n_components(); ++c) {
      out.y.push_back(a.at(*pos, c));
      out.yhat.push_back(p.at(i, c));
    }
  }
  if (out.y.empty())
    fail(ErrorCode::EmptyIntersection, "actual [" + actual.index().front().to_string() + ", " +
                                           actual.index().back().to_string() + "] and forecast [" +
                                           pred.index().front().to_string() + ", " + pred.index().back().to_string() +
                                           "] share no time points");
  return out;
}

double seasonal_naive_mae(const TimeSeries& insample, std::size_t m) {
  if (insample.length() <= m)
    fail(ErrorCode::MissingInsample, "MASE needs an in-sample series longer than the season " + std::to_string(m));
  const TimeSeries s = insample.is_deterministic() ? insample : insample.quantile(0.5);
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t t = m; t < s.length(); ++t)
    for (std::size_t c = 0; c < s.n_components(); ++c, ++count) sum += std::abs(s.at(t, c) - s.at(t - m, c));
  return sum / static_cast<double>(count);
}

}  // namespace

Metric Metric::parse(const std::string& text) {
  const auto colon = text.find(':');
  const std::string head = text.substr(0, colon);
  const std::string arg = colon == std::string::npos ? "" : text.substr(colon + 1);
  auto number = [&](double fallback) {
    if (arg.empty()) return fallback;
    double v = 0;
    const auto [ptr, ec] = std::from_chars(arg.data(), arg.data() + arg.size(), v);
    if (ec != std::errc() || ptr != arg.data() + arg.size())
      fail(ErrorCode::InvalidArgument, "bad metric argument '" + arg + "' in '" + text + "'");
    return v;
  };
  Metric m;
  if (head == "mae") m.kind = MetricKind::MAE;
  else if (head == "mse") m.kind = MetricKind::MSE;
  else if (head == "rmse") m.kind = MetricKind::RMSE;
  else if (head == "mape") m.kind = MetricKind::MAPE;
  else if (head == "smape") m.kind = MetricKind::SMAPE;
  else if (head == "mase") {
    m.kind = MetricKind::MASE;
    const double s = number(1.0);
    if (s < 1 || s != std::floor(s)) fail(ErrorCode::InvalidArgument, "MASE season must be a positive integer");
    m.season = static_cast<std::size_t>(s);
  } else if (head == "pinball") {
    m.kind = MetricKind::Pinball;
    m.q = number(0.5);
    if (!(m.q > 0.0 && m.q < 1.0)) fail(ErrorCode::QOutOfRange, "pinball quantile must lie in (0,1)");
  } else {
    fail(ErrorCode::InvalidArgument, "unknown metric '" + text + "' (expected mae, mse, rmse, mape, smape, mase[:m], pinball[:q])");
  }
  if (!arg.empty() && m.kind != MetricKind::MASE && m.kind != MetricKind::Pinball)
    fail(ErrorCode::InvalidArgument, "metric '" + head + "' takes no argument");
  return m;
}

std::string Metric::to_string() const {
  switch (kind) {
    case MetricKind::MAE: return "mae";
    case MetricKind::MSE: return "mse";
    case MetricKind::RMSE: return "rmse";
    case MetricKind::MAPE: return "mape";
    case MetricKind::SMAPE: return "smape";
    case MetricKind::MASE: return "mase:" + std::to_string(season);
    case MetricKind::Pinball: return "pinball:" + format_double(q);
  }
  return "?";
}

double metric(const Metric& m, const TimeSeries& actual, const TimeSeries& pred, const std::optional<TimeSeries>& insample) {
  if (m.kind == MetricKind::Pinball && !(m.q > 0.0 && m.q < 1.0))
    fail(ErrorCode::QOutOfRange, "pinball quantile must lie in (0,1)");
  if (m.kind == MetricKind::MASE && (!insample || m.season == 0))
    fail(ErrorCode::MissingInsample, "MASE needs an in-sample series and a season length >= 1");
  const auto [y, yhat] = aligned(actual, pred, m.kind == MetricKind::Pinball ? m.q : 0.5);
  const auto n = static_cast<double>(y.size());
  double acc = 0.0;
  switch (m.kind) {
    case MetricKind::MAE:
    case MetricKind::MASE:
      for (std::size_t i = 0; i < y.size(); ++i) acc += std::abs(y[i] - yhat[i]);
      break;
    case MetricKind::MSE:
    case MetricKind::RMSE:
      for (std::size_t i = 0; i < y.size(); ++i) acc += (y[i] - yhat[i]) * (y[i] - yhat[i]);
      break;
    case MetricKind::MAPE:
      for (std::size_t i = 0; i < y.size(); ++i) {
        if (y[i] == 0.0) fail(ErrorCode::ZeroDenominator, "MAPE is undefined: actual value 0 in the evaluated range");
        acc += std::abs((y[i] - yhat[i]) / y[i]);
      }
      acc *= 100.0;
      break;
    case MetricKind::SMAPE:
      for (std::size_t i = 0; i < y.size(); ++i) {
        const double d = std::abs(y[i]) + std::abs(yhat[i]);
        if (d == 0.0) fail(ErrorCode::ZeroDenominator, "sMAPE is undefined where actual and forecast are both 0");
        acc += 2.0 * std::abs(y[i] - yhat[i]) / d;
      }
      acc *= 100.0;
      break;
    case MetricKind::Pinball:
      for (std::size_t i = 0; i < y.size(); ++i) {
        const double e = y[i] - yhat[i];
        acc += e >= 0 ? m.q * e : (m.q - 1.0) * e;
      }
      break;
  }
  double value = acc / n;
  if (m.kind == MetricKind::RMSE) value = std::sqrt(value);
  if (m.kind == MetricKind::MASE) {
    const double scale = seasonal_naive_mae(*insample, m.season);
    if (scale == 0.0) fail(ErrorCode::ZeroDenominator, "MASE is undefined: the in-sample seasonal-naive error is 0");
    value /= scale;
  }
  return value;
}

std::size_t backtest_start(const TimeSeries& series, const SlicePoint& start) {
  const std::size_t p = series.resolve(start);
  return std::holds_alternative<Fraction>(start) ? p + 1 : p;
}

std::vector<std::size_t> backtest_origins(std::size_t length, std::size_t start, const BacktestPlan& plan) {
  if (plan.horizon == 0) fail(ErrorCode::PlanInfeasible, "backtest horizon must be >= 1");
  if (plan.stride == 0) fail(ErrorCode::PlanInfeasible, "backtest stride must be >= 1");
  if (start < 1) fail(ErrorCode::PlanInfeasible, "backtest start leaves no training data");
  if (start + plan.horizon > length)
    fail(ErrorCode::PlanInfeasible, "backtest start " + std::to_string(start) + " + horizon " + std::to_string(plan.horizon) +
                                        " exceeds series length " + std::to_string(length));
  std::vector<std::size_t> out;
  for (std::size_t p = start; p + plan.horizon <= length; p += plan.stride) out.push_back(p);
  return out;
}

std::vector<TimeSeries> historical_forecasts(const ModelFactory& factory, const TimeSeries& series,
                                             const BacktestPlan& plan, const Covariates& covariates) {
  std::size_t start = 0;
  try {
    start = backtest_start(series, plan.start);
  } catch (const Error& e) {
    fail(ErrorCode::PlanInfeasible, std::string("backtest start: ") + e.what());
  }
  const auto origins = backtest_origins(series.length(), start, plan);
  auto at_origin = [&](std::size_t p, auto&& body) {
    try {
      return body();
    } catch (const Error& e) {
      fail(e.code(), "forecast origin " + series.index().at(static_cast<std::int64_t>(p)).to_string() + ": " + e.what());
    }
  };

  std::vector<TimeSeries> out;
  out.reserve(origins.size());
  std::unique_ptr<ForecastingModel> shared;
  if (!plan.retrain) {
    shared = factory();
    at_origin(start, [&] {
      if (!shared->supports_history())
        fail(ErrorCode::Unsupported, shared->name() + " cannot forecast without retraining; set retrain=true");
      shared->fit(series.slice_positions(0, start), covariates);
      return 0;
    });
  }
  for (std::size_t p : origins) {
    out.push_back(at_origin(p, [&] {
      const auto history = series.slice_positions(0, p);
      if (shared) return shared->predict_from(history, plan.horizon, covariates);
      auto model = factory();
      model->fit(history, covariates);
      return model->predict(plan.horizon, covariates);
    }));
  }
  return out;
}

std::vector<WindowScore> backtest_windows(const ModelFactory& factory, const TimeSeries& series, const BacktestPlan& plan,
                                          const Metric& m, const Covariates& covariates) {
  const auto forecasts = historical_forecasts(factory, series, plan, covariates);
  std::vector<WindowScore> out;
  out.reserve(forecasts.size());
  for (const auto& f : forecasts) {
    const auto p = static_cast<std::size_t>(*series.index().offset_of(f.index().front()));
    out.push_back({f.index().front(), metric(m, series, f, series.slice_positions(0, p))});
  }
  return out;
}

double backtest(const ModelFactory& factory, const TimeSeries& series, const BacktestPlan& plan, const Metric& m,
                Reduction reduction, const Covariates& covariates) {
  std::vector<double> scores;
  for (const auto& w : backtest_windows(factory, series, plan, m, covariates)) scores.push_back(w.score);
  if (reduction == Reduction::Median) return empirical_quantile(scores, 0.5);
  double sum = 0.0;
  for (double s : scores) sum += s;
  return sum / static_cast<double>(scores.size());
}

std::vector<ParamSet> expand_grid(const std::vector<GridAxis>& axes) {
  if (axes.empty()) fail(ErrorCode::EmptyGrid, "parameter grid has no axes");
  for (const auto& a : axes)
    if (a.values.empty()) fail(ErrorCode::EmptyGrid, "grid axis '" + a.name + "' has no values");
  std::vector<ParamSet> out{{}};
  for (const auto& a : axes) {
    std::vector<ParamSet> next;
    for (const auto& prefix : out)
      for (double v : a.values) {
        auto p = prefix;
        p.emplace_back(a.name, v);
        next.push_back(std::move(p));
      }
    out = std::move(next);
  }
  return out;
}

GridResult grid_search(const ParametricFactory& factory, const std::vector<GridAxis>& axes, const TimeSeries& series,
                       const BacktestPlan& plan, const Metric& m, const Covariates& covariates) {
  GridResult result;
  std::optional<std::size_t> best;
  for (auto& params : expand_grid(axes)) {
    GridResult::Entry entry{params, std::nullopt, {}};
    try {
      entry.score = backtest([&] { return factory(params); }, series, plan, m, Reduction::Mean, covariates);
      if (std::isnan(*entry.score)) {
        entry.error = "score is NaN";
        entry.score.reset();
      }
    } catch (const Error& e) {
      entry.error = std::string(to_string(e.code())) + ": " + e.what();
    }
    if (entry.score && (!best || *entry.score < *result.entries[*best].score)) best = result.entries.size();
    result.entries.push_back(std::move(entry));
  }
  if (!best) {
    std::string msg = "all " + std::to_string(result.entries.size()) + " grid combinations failed:";
    for (const auto& e : result.entries) {
      msg += "\n  {";
      for (std::size_t i = 0; i < e.params.size(); ++i)
        msg += (i ? ", " : "") + e.params[i].first + "=" + format_double(e.params[i].second);
      msg += "}: " + e.error;
    }
    fail(ErrorCode::AllCombinationsFailed, msg);
  }
  result.best = result.entries[*best].params;
  result.best_score = *result.entries[*best].score;
  return result;
}

double param(const ParamSet& params, const std::string& name) {
  for (const auto& [k, v] : params)
    if (k == name) return v;
  fail(ErrorCode::InvalidArgument, "parameter '" + name + "' is not in the grid");
}

}  // namespace tsf
