#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "tsf/datasets.hpp"
#include "tsf/ensembles.hpp"
#include "tsf/error.hpp"
#include "tsf/global_models.hpp"
#include "tsf/local_models.hpp"
#include "tsf/table.hpp"

namespace tsfcli {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

[[noreturn]] void config_error(const std::string& msg) { throw CliError("E_CONFIG", msg); }

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

void check_keys(const json& obj, std::initializer_list<const char*> allowed, const std::string& path) {
  if (!obj.is_object()) config_error((path.empty() ? "config" : path) + " must be an object");
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* k) { return it.key() == k; }))
      config_error("unknown key '" + join(path, it.key()) + "'");
}

const json* field(const json& obj, const char* key) {
  auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

double get_number(const json& obj, const char* key, const std::string& path, std::optional<double> dflt = std::nullopt) {
  const json* v = field(obj, key);
  if (!v) {
    if (!dflt) config_error("missing required key '" + join(path, key) + "'");
    return *dflt;
  }
  if (!v->is_number()) config_error("'" + join(path, key) + "' must be a number");
  return v->get<double>();
}

std::size_t get_count(const json& obj, const char* key, const std::string& path, std::optional<std::size_t> dflt = std::nullopt,
                      std::size_t min = 0) {
  const json* v = field(obj, key);
  if (!v) {
    if (!dflt) config_error("missing required key '" + join(path, key) + "'");
    return *dflt;
  }
  const double d = v->is_number() ? v->get<double>() : -1.0;
  if (d < static_cast<double>(min) || d != std::floor(d) || d > 1e9)
    config_error("'" + join(path, key) + "' must be an integer >= " + std::to_string(min));
  return static_cast<std::size_t>(d);
}

std::string get_string(const json& obj, const char* key, const std::string& path, std::optional<std::string> dflt = std::nullopt) {
  const json* v = field(obj, key);
  if (!v) {
    if (!dflt) config_error("missing required key '" + join(path, key) + "'");
    return *dflt;
  }
  if (!v->is_string()) config_error("'" + join(path, key) + "' must be a string");
  return v->get<std::string>();
}

bool get_bool(const json& obj, const char* key, const std::string& path, bool dflt) {
  const json* v = field(obj, key);
  if (!v) return dflt;
  if (!v->is_boolean()) config_error("'" + join(path, key) + "' must be true or false");
  return v->get<bool>();
}

tsf::LaggedRegressionConfig lagged_config(const json& model, const std::string& path, bool warn_epochs) {
  check_keys(model,
             {"kind", "input_chunk_length", "output_chunk_length", "likelihood", "ridge_lambda", "target_lags", "stride",
              "epochs"},
             path);
  tsf::LaggedRegressionConfig cfg;
  cfg.input_length = get_count(model, "input_chunk_length", path, std::nullopt, 1);
  cfg.output_length = get_count(model, "output_chunk_length", path, std::nullopt, 1);
  cfg.ridge_lambda = get_number(model, "ridge_lambda", path, 0.0);
  cfg.stride = get_count(model, "stride", path, 1, 1);
  if (const json* lags = field(model, "target_lags")) {
    if (!lags->is_array()) config_error("'" + join(path, "target_lags") + "' must be an array");
    for (std::size_t i = 0; i < lags->size(); ++i) {
      const json& v = (*lags)[i];
      if (!v.is_number_unsigned() || v.get<std::size_t>() == 0)
        config_error("'" + path + ".target_lags[" + std::to_string(i) + "]' must be a positive integer");
      cfg.target_lags.push_back(v.get<std::size_t>());
    }
  }
  if (const json* l = field(model, "likelihood"); l && !l->is_null()) {
    if (!l->is_string()) config_error("'" + join(path, "likelihood") + "' must be a string");
    try {
      cfg.likelihood = tsf::likelihood_from_string(l->get<std::string>());
    } catch (const tsf::Error& e) {
      config_error("'" + join(path, "likelihood") + "': " + e.what());
    }
  }
  if (field(model, "epochs")) {
    get_count(model, "epochs", path, std::nullopt);
    if (warn_epochs) tsf::warn("'" + join(path, "epochs") + "' is ignored: the lagged regression is solved in closed form");
  }
  return cfg;
}

tsf::ModelFactory factory_for(const json& model, const std::string& path, bool warn) {
  if (!model.is_object()) config_error(path + " must be an object");
  const std::string kind = get_string(model, "kind", path);
  tsf::ModelFactory make;
  if (kind == "naive_seasonal") {
    check_keys(model, {"kind", "K"}, path);
    const auto K = get_count(model, "K", path, 1, 1);
    make = [K] { return std::make_unique<tsf::NaiveSeasonal>(K); };
  } else if (kind == "naive_drift") {
    check_keys(model, {"kind"}, path);
    make = [] { return std::make_unique<tsf::NaiveDrift>(); };
  } else if (kind == "exponential_smoothing") {
    check_keys(model, {"kind", "trend", "seasonal", "season_length"}, path);
    tsf::ESConfig cfg;
    const auto trend = get_string(model, "trend", path, "none");
    const auto seasonal = get_string(model, "seasonal", path, "none");
    if (trend == "additive") cfg.trend = tsf::TrendKind::Additive;
    else if (trend != "none") config_error("'" + join(path, "trend") + "' must be none or additive");
    if (seasonal == "additive") cfg.seasonal = tsf::SeasonalKind::Additive;
    else if (seasonal == "multiplicative") cfg.seasonal = tsf::SeasonalKind::Multiplicative;
    else if (seasonal != "none") config_error("'" + join(path, "seasonal") + "' must be none, additive or multiplicative");
    cfg.season_length = get_count(model, "season_length", path, 1, 1);
    make = [cfg] { return std::make_unique<tsf::ExponentialSmoothing>(cfg); };
  } else if (kind == "theta") {
    check_keys(model, {"kind", "season_length", "theta"}, path);
    const auto m = get_count(model, "season_length", path, 1, 1);
    const double theta = get_number(model, "theta", path, 2.0);
    make = [m, theta] { return std::make_unique<tsf::Theta>(m, theta); };
  } else if (kind == "fft") {
    check_keys(model, {"kind", "trend_degree", "top_k"}, path);
    const auto degree = static_cast<int>(get_count(model, "trend_degree", path, 0));
    const auto k = get_count(model, "top_k", path, 3);
    make = [degree, k] { return std::make_unique<tsf::FFTModel>(degree, k); };
  } else if (kind == "arima") {
    check_keys(model, {"kind", "p", "d", "q"}, path);
    tsf::ARIMAOrder order{get_count(model, "p", path, 1), get_count(model, "d", path, 0), get_count(model, "q", path, 0)};
    make = [order] { return std::make_unique<tsf::ARIMA>(order); };
  } else if (kind == "lagged_regression") {
    const auto cfg = lagged_config(model, path, warn);
    make = [cfg] { return std::make_unique<tsf::GlobalForecaster>(cfg); };
  } else if (kind == "ensemble") {
    check_keys(model, {"kind", "mode", "rho", "members"}, path);
    tsf::EnsembleSpec spec;
    const auto mode = get_string(model, "mode", path, "mean");
    if (mode == "learned") spec.mode = tsf::EnsembleMode::Learned;
    else if (mode != "mean") config_error("'" + join(path, "mode") + "' must be mean or learned");
    spec.rho = get_number(model, "rho", path, 0.7);
    const json* members = field(model, "members");
    if (!members || !members->is_array()) config_error("'" + join(path, "members") + "' must be an array of models");
    for (std::size_t i = 0; i < members->size(); ++i)
      spec.members.push_back(factory_for((*members)[i], path + ".members[" + std::to_string(i) + "]", warn));
    make = [spec] { return std::make_unique<tsf::Ensemble>(spec); };
  } else {
    config_error("'" + join(path, "kind") + "': unknown model kind '" + kind + "'");
  }
  // Constructors validate their arguments; surface that as a config error.
  try {
    (void)make();
  } catch (const tsf::Error& e) {
    config_error(path + ": " + e.what());
  }
  return make;
}

void parse_plan(const json& sec, const std::string& path, RunConfig& cfg) {
  const json* start = field(sec, "start");
  if (!start || !start->is_number()) config_error("'" + join(path, "start") + "' must be a number");
  const double s = start->get<double>();
  if (s > 0.0 && s < 1.0) cfg.plan.start = tsf::Fraction{s};
  else if (s >= 1.0 && s == std::floor(s)) cfg.plan.start = tsf::Position{static_cast<std::int64_t>(s)};
  else config_error("'" + join(path, "start") + "' must be a fraction in (0,1) or a position >= 1");
  cfg.plan.horizon = get_count(sec, "horizon", path, std::nullopt, 1);
  cfg.plan.stride = get_count(sec, "stride", path, 1, 1);
  cfg.plan.retrain = get_bool(sec, "retrain", path, true);
  try {
    cfg.metric = tsf::Metric::parse(get_string(sec, "metric", path, "mae"));
  } catch (const tsf::Error& e) {
    config_error("'" + join(path, "metric") + "': " + e.what());
  }
}

std::vector<tsf::TimeSeries> load_data(const RunConfig& cfg) {
  std::vector<tsf::TimeSeries> out;
  for (const auto& src : cfg.data) {
    try {
      out.push_back(src.csv ? tsf::read_csv_file(*src.csv) : tsf::load_dataset(src.name));
    } catch (const tsf::Error& e) {
      throw CliError("E_DATA", "cannot load '" + src.name + "': " + std::string(tsf::to_string(e.code())) + ": " + e.what());
    }
  }
  return out;
}

tsf::Transformer make_scaler(tsf::TransformerKind kind) { return tsf::Transformer(kind); }

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

std::string params_label(const tsf::ParamSet& p) {
  std::string s;
  for (std::size_t i = 0; i < p.size(); ++i) s += (i ? ";" : "") + p[i].first + "=" + tsf::format_double(p[i].second);
  return s;
}

/// Writes files and removes all of them again unless committed.
class OutputSet {
 public:
  ~OutputSet() {
    if (committed_) return;
    std::error_code ec;
    for (const auto& p : written_) fs::remove(p, ec);
  }
  void write(const fs::path& path, const std::string& content) {
    written_.push_back(path);
    std::ofstream f(path, std::ios::binary);
    f << content;
    f.close();
    if (!f) throw CliError("E_IO", "cannot write '" + path.string() + "'");
  }
  void commit() { committed_ = true; }
  const std::vector<fs::path>& files() const { return written_; }

 private:
  std::vector<fs::path> written_;
  bool committed_ = false;
};

fs::path prepare_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw CliError("E_IO", "cannot create output directory '" + dir.string() + "'");
  return dir;
}

std::string one_line(std::string s) {
  for (char& c : s)
    if (c == '\n' || c == '\r') c = ' ';
  return s;
}

}  // namespace

tsf::ModelFactory make_factory(const json& model, const std::string& path) { return factory_for(model, path, false); }

RunConfig parse_config(const json& doc, Action action, const fs::path& base_dir) {
  check_keys(doc, {"data", "transform", "model", "predict", "backtest", "gridsearch", "output"}, "");
  RunConfig cfg;
  cfg.action = action;

  const char* wanted = action == Action::Forecast ? "predict" : action == Action::Backtest ? "backtest" : "gridsearch";
  int actions = 0;
  for (const char* k : {"predict", "backtest", "gridsearch"}) actions += field(doc, k) ? 1 : 0;
  if (actions != 1 || !field(doc, wanted))
    config_error(std::string("config must contain exactly one action section, and it must be '") + wanted + "'");

  const json* data = field(doc, "data");
  if (!data) config_error("missing required key 'data'");
  check_keys(*data, {"series", "target"}, "data");
  const json* list = field(*data, "series");
  if (!list || !list->is_array() || list->empty()) config_error("'data.series' must be a non-empty array");
  for (std::size_t i = 0; i < list->size(); ++i) {
    const json& item = (*list)[i];
    const std::string path = "data.series[" + std::to_string(i) + "]";
    if (item.is_string()) {
      cfg.data.push_back({item.get<std::string>(), std::nullopt});
    } else if (item.is_object()) {
      check_keys(item, {"name", "csv"}, path);
      fs::path csv = get_string(item, "csv", path);
      if (csv.is_relative()) csv = base_dir / csv;
      cfg.data.push_back({get_string(item, "name", path, csv.stem().string()), csv});
    } else {
      config_error("'" + path + "' must be a dataset name or {name, csv}");
    }
  }
  const std::string target = get_string(*data, "target", "data", cfg.data.front().name);
  auto it = std::find_if(cfg.data.begin(), cfg.data.end(), [&](const DataSource& d) { return d.name == target; });
  if (it == cfg.data.end()) config_error("'data.target' names '" + target + "', which is not listed in data.series");
  cfg.target = static_cast<std::size_t>(it - cfg.data.begin());

  if (const json* tr = field(doc, "transform")) {
    check_keys(*tr, {"scaler"}, "transform");
    const auto s = get_string(*tr, "scaler", "transform", "none");
    if (s == "minmax") cfg.scaler = tsf::TransformerKind::MinMaxScaler;
    else if (s == "standard") cfg.scaler = tsf::TransformerKind::StandardScaler;
    else if (s != "none") config_error("'transform.scaler' must be minmax, standard or none");
  }

  const json* model = field(doc, "model");
  if (!model) config_error("missing required key 'model'");
  (void)factory_for(*model, "model", true);
  cfg.model = *model;

  if (const json* p = field(doc, "predict")) {
    check_keys(*p, {"n", "num_samples", "seed", "band"}, "predict");
    cfg.n = get_count(*p, "n", "predict", std::nullopt, 1);
    cfg.num_samples = get_count(*p, "num_samples", "predict", 1, 1);
    cfg.seed = get_count(*p, "seed", "predict", 0);
    if (const json* band = field(*p, "band")) {
      if (!band->is_array() || band->size() != 2 || !(*band)[0].is_number() || !(*band)[1].is_number())
        config_error("'predict.band' must be [q_low, q_high]");
      cfg.q_low = (*band)[0].get<double>();
      cfg.q_high = (*band)[1].get<double>();
    }
    if (!(cfg.q_low > 0.0 && cfg.q_low <= 0.5 && cfg.q_high >= 0.5 && cfg.q_high < 1.0))
      config_error("'predict.band' needs 0 < q_low <= 0.5 <= q_high < 1");
    const bool lagged = cfg.model.value("kind", "") == "lagged_regression";
    if (cfg.num_samples > 1 && !(lagged && field(cfg.model, "likelihood") && !cfg.model["likelihood"].is_null()))
      config_error("'predict.num_samples' > 1 needs a lagged_regression model with a likelihood");
  }
  if (const json* b = field(doc, "backtest")) {
    check_keys(*b, {"start", "horizon", "stride", "retrain", "metric", "reduction"}, "backtest");
    parse_plan(*b, "backtest", cfg);
    const auto r = get_string(*b, "reduction", "backtest", "mean");
    if (r == "median") cfg.reduction = tsf::Reduction::Median;
    else if (r != "mean") config_error("'backtest.reduction' must be mean or median");
  }
  if (const json* g = field(doc, "gridsearch")) {
    check_keys(*g, {"grid", "start", "horizon", "stride", "retrain", "metric"}, "gridsearch");
    parse_plan(*g, "gridsearch", cfg);
    const json* grid = field(*g, "grid");
    if (!grid || !grid->is_object()) config_error("'gridsearch.grid' must be an object of parameter arrays");
    if (grid->empty()) config_error("'gridsearch.grid' is empty");
    for (auto a = grid->begin(); a != grid->end(); ++a) {
      const std::string path = "gridsearch.grid." + a.key();
      if (!a->is_array() || a->empty()) config_error("'" + path + "' must be a non-empty array of numbers");
      tsf::GridAxis axis{a.key(), {}};
      for (const auto& v : *a) {
        if (!v.is_number()) config_error("'" + path + "' must be a non-empty array of numbers");
        axis.values.push_back(v.get<double>());
      }
      if (a.key() == "kind") config_error("'" + path + "': the model kind cannot be searched");
      cfg.grid.push_back(std::move(axis));
    }
  }

  cfg.prefix = wanted == std::string("predict") ? "forecast" : wanted;
  if (const json* out = field(doc, "output")) {
    check_keys(*out, {"dir", "prefix"}, "output");
    fs::path dir = get_string(*out, "dir", "output", ".");
    cfg.output_dir = dir.is_relative() ? base_dir / dir : dir;
    cfg.prefix = get_string(*out, "prefix", "output", cfg.prefix);
    if (cfg.prefix.empty() || cfg.prefix.find('/') != std::string::npos) config_error("'output.prefix' must be a plain file name");
  } else {
    cfg.output_dir = base_dir;
  }
  return cfg;
}

RunConfig load_config(const fs::path& path, Action action) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CliError("E_CONFIG", "cannot read config '" + path.string() + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw CliError("E_CONFIG", "config '" + path.string() + "' is not valid JSON: " + e.what());
  }
  return parse_config(doc, action, path.parent_path().empty() ? fs::path(".") : path.parent_path());
}

ForecastResult run_forecast(const RunConfig& cfg) {
  auto series = load_data(cfg);
  std::vector<tsf::Transformer> scalers;
  std::vector<tsf::TimeSeries> scaled;
  for (const auto& s : series) {
    if (cfg.scaler) {
      scalers.push_back(make_scaler(*cfg.scaler));
      scaled.push_back(scalers.back().fit_transform(s));
    } else {
      scaled.push_back(s);
    }
  }
  const auto& target = scaled[cfg.target];

  std::optional<tsf::TimeSeries> pred;
  if (cfg.model.value("kind", "") == "lagged_regression") {
    tsf::LaggedRegression model(lagged_config(cfg.model, "model", false));
    model.fit(scaled);
    pred = model.predict(cfg.n, target, std::nullopt, std::nullopt, cfg.num_samples, cfg.seed);
  } else {
    if (scaled.size() > 1) tsf::warn("model '" + cfg.model.value("kind", "") + "' is local; only the target series is used");
    auto model = factory_for(cfg.model, "model", false)();
    model->fit(target);
    pred = model->predict(cfg.n);
  }
  if (cfg.scaler) pred = scalers[cfg.target].inverse_transform(*pred);

  auto q = [&](double level) { return pred->is_deterministic() ? *pred : pred->quantile(level); };
  return {series[cfg.target], *pred, q(cfg.q_low), q(0.5), q(cfg.q_high)};
}

std::string quantile_csv(const ForecastResult& r) {
  std::string out = "time,component,q_low,median,q_high\n";
  const auto& names = r.forecast.component_names();
  for (std::size_t t = 0; t < r.forecast.length(); ++t)
    for (std::size_t c = 0; c < names.size(); ++c)
      out += r.forecast.index().at(static_cast<std::int64_t>(t)).to_string() + "," + names[c] + "," +
             tsf::format_double(r.low.at(t, c)) + "," + tsf::format_double(r.median.at(t, c)) + "," +
             tsf::format_double(r.high.at(t, c)) + "\n";
  return out;
}

std::string render_svg(const ForecastResult& r, double q_low, double q_high) {
  // First component only: original series, shaded band, median forecast.
  constexpr double W = 800, H = 400, L = 70, R = 20, T = 30, B = 50;
  const std::size_t n0 = r.history.length(), n1 = r.forecast.length(), total = n0 + n1;
  double lo = INFINITY, hi = -INFINITY;
  for (std::size_t t = 0; t < n0; ++t)
    if (std::isfinite(r.history.at(t))) lo = std::min(lo, r.history.at(t)), hi = std::max(hi, r.history.at(t));
  for (std::size_t t = 0; t < n1; ++t) {
    for (double v : {r.low.at(t), r.median.at(t), r.high.at(t)})
      if (std::isfinite(v)) lo = std::min(lo, v), hi = std::max(hi, v);
  }
  if (!(lo < hi)) {
    lo = std::isfinite(lo) ? lo - 1 : 0;
    hi = lo + 2;
  }
  const double pad = 0.05 * (hi - lo);
  lo -= pad;
  hi += pad;
  auto x = [&](std::size_t i) { return L + (W - L - R) * static_cast<double>(i) / static_cast<double>(std::max<std::size_t>(total - 1, 1)); };
  auto y = [&](double v) { return T + (H - T - B) * (hi - v) / (hi - lo); };
  auto time_at = [&](std::size_t i) {
    return i < n0 ? r.history.index().at(static_cast<std::int64_t>(i)).to_string()
                  : r.forecast.index().at(static_cast<std::int64_t>(i - n0)).to_string();
  };

  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 " << W << " " << H
    << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  // axes and ticks
  s << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R << "\" y2=\"" << H - B << "\" stroke=\"black\"/>\n";
  s << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << H - B << "\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 5; ++k) {
    const double v = lo + (hi - lo) * k / 5.0;
    s << "<line x1=\"" << fmt(L - 5) << "\" y1=\"" << fmt(y(v)) << "\" x2=\"" << fmt(L) << "\" y2=\"" << fmt(y(v))
      << "\" stroke=\"black\"/><text x=\"" << fmt(L - 8) << "\" y=\"" << fmt(y(v) + 4) << "\" text-anchor=\"end\">" << label(v)
      << "</text>\n";
  }
  const std::size_t ticks = std::min<std::size_t>(6, total);
  for (std::size_t k = 0; k < ticks; ++k) {
    const std::size_t i = ticks == 1 ? 0 : k * (total - 1) / (ticks - 1);
    s << "<line x1=\"" << fmt(x(i)) << "\" y1=\"" << fmt(H - B) << "\" x2=\"" << fmt(x(i)) << "\" y2=\"" << fmt(H - B + 5)
      << "\" stroke=\"black\"/><text x=\"" << fmt(x(i)) << "\" y=\"" << fmt(H - B + 18) << "\" text-anchor=\"middle\">"
      << time_at(i) << "</text>\n";
  }
  // band
  if (n1 > 0) {
    s << "<polygon fill=\"#4c78a8\" fill-opacity=\"0.25\" stroke=\"none\" points=\"";
    for (std::size_t t = 0; t < n1; ++t) s << fmt(x(n0 + t)) << "," << fmt(y(r.high.at(t))) << " ";
    for (std::size_t t = n1; t-- > 0;) s << fmt(x(n0 + t)) << "," << fmt(y(r.low.at(t))) << (t ? " " : "");
    s << "\"/>\n";
  }
  auto polyline = [&](const char* colour, auto value, std::size_t from, std::size_t count) {
    s << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < count; ++i) s << (i ? " " : "") << fmt(x(from + i)) << "," << fmt(y(value(i)));
    s << "\"/>\n";
  };
  polyline("black", [&](std::size_t i) { return r.history.at(i); }, 0, n0);
  polyline("#4c78a8", [&](std::size_t i) { return r.median.at(i); }, n0, n1);
  // legend
  s << "<text x=\"" << L + 10 << "\" y=\"" << T - 10 << "\">original series</text>\n";
  s << "<text x=\"" << L + 130 << "\" y=\"" << T - 10 << "\" fill=\"#4c78a8\">median forecast, band q" << label(q_low) << "-q"
    << label(q_high) << "</text>\n";
  s << "</svg>\n";
  return s.str();
}

namespace {

void cmd_forecast(const RunConfig& cfg, std::ostream& out) {
  const auto r = run_forecast(cfg);
  const auto dir = prepare_dir(cfg.output_dir);
  OutputSet files;
  std::ostringstream csv;
  tsf::write_csv(csv, r.forecast);
  files.write(dir / (cfg.prefix + ".csv"), csv.str());
  files.write(dir / (cfg.prefix + "_quantiles.csv"), quantile_csv(r));
  files.write(dir / (cfg.prefix + ".svg"), render_svg(r, cfg.q_low, cfg.q_high));
  files.commit();
  for (const auto& f : files.files()) out << "wrote " << f.string() << "\n";
}

void cmd_backtest(const RunConfig& cfg, std::ostream& out) {
  const auto series = load_data(cfg);
  const auto make = factory_for(cfg.model, "model", false);
  const auto windows = tsf::backtest_windows(make, series[cfg.target], cfg.plan, cfg.metric);
  std::vector<double> scores;
  std::string csv = "origin,score\n";
  for (const auto& w : windows) {
    csv += w.origin.to_string() + "," + tsf::format_double(w.score) + "\n";
    scores.push_back(w.score);
  }
  double reduced = 0.0;
  if (cfg.reduction == tsf::Reduction::Median) {
    reduced = tsf::empirical_quantile(scores, 0.5);
  } else {
    for (double v : scores) reduced += v;
    reduced /= static_cast<double>(scores.size());
  }
  const auto dir = prepare_dir(cfg.output_dir);
  OutputSet files;
  files.write(dir / (cfg.prefix + ".csv"), csv);
  files.commit();
  out << cfg.metric.to_string() << " " << (cfg.reduction == tsf::Reduction::Median ? "median" : "mean") << " over "
      << windows.size() << " windows: " << tsf::format_double(reduced) << "\n";
}

void cmd_gridsearch(const RunConfig& cfg, std::ostream& out) {
  const auto series = load_data(cfg);
  const tsf::ParametricFactory make = [&](const tsf::ParamSet& params) {
    json model = cfg.model;
    for (const auto& [name, value] : params) {
      if (value == std::floor(value) && std::abs(value) < 1e15) model[name] = static_cast<std::int64_t>(value);
      else model[name] = value;
    }
    // Rebuilt per combination; bad values fail that combination only.
    try {
      return factory_for(model, "model", false)();
    } catch (const CliError& e) {
      tsf::fail(tsf::ErrorCode::InvalidArgument, e.what());
    }
  };
  const auto result = tsf::grid_search(make, cfg.grid, series[cfg.target], cfg.plan, cfg.metric);
  auto entries = result.entries;
  std::stable_sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
    if (a.score && b.score) return *a.score < *b.score;
    return a.score.has_value() && !b.score.has_value();
  });
  std::string csv = "combination,score,error\n";
  for (const auto& e : entries) {
    std::string err = one_line(e.error);
    for (char& c : err)
      if (c == ',' || c == '"') c = ' ';
    csv += params_label(e.params) + "," + (e.score ? tsf::format_double(*e.score) : "") + "," + err + "\n";
  }
  const auto dir = prepare_dir(cfg.output_dir);
  OutputSet files;
  files.write(dir / (cfg.prefix + ".csv"), csv);
  files.commit();
  out << "best " << params_label(result.best) << " " << cfg.metric.to_string() << " " << tsf::format_double(result.best_score)
      << "\n";
}

void cmd_datasets_list(std::ostream& out) {
  for (const auto& d : tsf::dataset_catalog()) out << d.name << " " << d.length << " " << d.frequency.to_string() << "\n";
}

void cmd_datasets_export(const std::string& name, const fs::path& path) {
  std::string bytes;
  try {
    bytes = tsf::read_dataset_bundle(name);
  } catch (const tsf::Error& e) {
    throw CliError("E_DATA", std::string(tsf::to_string(e.code())) + ": " + e.what());
  }
  OutputSet files;
  files.write(path, bytes);
  files.commit();
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Time series forecasting toolkit"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand
  std::optional<std::uint64_t> seed;
  std::optional<std::string> output_dir;
  app.add_option("--seed", seed, "Override predict.seed");
  app.add_option("--output-dir", output_dir, "Override output.dir");

  std::string config_path;
  auto* forecast = app.add_subcommand("forecast", "Scale, fit, predict and write forecast CSVs and an SVG chart");
  forecast->add_option("config", config_path, "JSON run configuration")->required();
  auto* backtest = app.add_subcommand("backtest", "Historical forecasts scored per window");
  backtest->add_option("config", config_path, "JSON run configuration")->required();
  auto* grid = app.add_subcommand("gridsearch", "Backtest every parameter combination");
  grid->add_option("config", config_path, "JSON run configuration")->required();
  auto* datasets = app.add_subcommand("datasets", "Bundled datasets");
  datasets->require_subcommand(1);
  datasets->add_subcommand("list", "Print name, length and frequency");
  std::string ds_name, ds_path;
  auto* exp = datasets->add_subcommand("export", "Write a bundled dataset as CSV");
  exp->add_option("name", ds_name)->required();
  exp->add_option("path", ds_path)->required();

  try {
    try {
      app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
      out << app.help();
      return 0;
    } catch (const CLI::ParseError& e) {
      throw CliError("E_USAGE", e.what());
    }

    if (datasets->parsed()) {
      if (exp->parsed()) cmd_datasets_export(ds_name, ds_path);
      else cmd_datasets_list(out);
      return 0;
    }
    const Action action = forecast->parsed() ? Action::Forecast : backtest->parsed() ? Action::Backtest : Action::GridSearch;
    RunConfig cfg = load_config(config_path, action);
    if (seed) cfg.seed = *seed;
    if (output_dir) cfg.output_dir = *output_dir;
    switch (action) {
      case Action::Forecast: cmd_forecast(cfg, out); break;
      case Action::Backtest: cmd_backtest(cfg, out); break;
      case Action::GridSearch: cmd_gridsearch(cfg, out); break;
    }
    return 0;
  } catch (const CliError& e) {
    err << "error: " << e.code << ": " << one_line(e.what()) << std::endl;
    return 2;
  } catch (const tsf::Error& e) {
    const bool data = e.code() == tsf::ErrorCode::UnknownDataset || e.code() == tsf::ErrorCode::CorruptBundle;
    err << "error: " << (data ? "E_DATA" : "E_MODEL") << ": " << tsf::to_string(e.code()) << ": " << one_line(e.what())
        << std::endl;
    return 2;
  } catch (const std::exception& e) {
    err << "error: E_INTERNAL: " << one_line(e.what()) << std::endl;
    return 3;
  }
}

}  // namespace tsfcli
