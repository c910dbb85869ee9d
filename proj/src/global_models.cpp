#include "tsf/global_models.hpp"

#include <Eigen/Dense>
#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <random>
#include <sstream>

#include "tsf/error.hpp"

namespace tsf {

namespace {

using json = nlohmann::json;

std::vector<std::size_t> normalized_lags(std::vector<std::size_t> lags, std::size_t L_in, const char* what) {
  if (lags.empty()) {
    lags.resize(L_in);
    for (std::size_t i = 0; i < L_in; ++i) lags[i] = i + 1;
  }
  std::sort(lags.begin(), lags.end());
  lags.erase(std::unique(lags.begin(), lags.end()), lags.end());
  if (lags.front() == 0 || lags.back() > L_in)
    fail(ErrorCode::InvalidArgument, std::string(what) + " must lie in [1, input_length=" + std::to_string(L_in) + "]");
  return lags;
}

void validate(const LaggedRegressionConfig& cfg) {
  if (cfg.input_length == 0) fail(ErrorCode::InvalidArgument, "input_length must be >= 1");
  if (cfg.output_length == 0) fail(ErrorCode::InvalidArgument, "output_length must be >= 1");
  if (cfg.stride == 0) fail(ErrorCode::InvalidArgument, "stride must be >= 1");
  if (!(cfg.ridge_lambda >= 0.0)) fail(ErrorCode::InvalidArgument, "ridge lambda must be >= 0");
}

std::size_t uniform_components(const std::vector<TimeSeries>& list, const char* what) {
  const std::size_t C = list.front().n_components();
  for (const auto& s : list) {
    if (!s.is_deterministic()) fail(ErrorCode::InvalidArgument, std::string(what) + " must be deterministic");
    if (s.n_components() != C)
      fail(ErrorCode::ShapeMismatch, std::string(what) + " disagree on the number of components");
  }
  return C;
}

}  // namespace

LaggedRegression::LaggedRegression(LaggedRegressionConfig cfg) : cfg_(std::move(cfg)) {
  validate(cfg_);
  cfg_.target_lags = normalized_lags(cfg_.target_lags, cfg_.input_length, "target lags");
  cfg_.past_cov_lags = normalized_lags(cfg_.past_cov_lags, cfg_.input_length, "past covariate lags");
}

void LaggedRegression::require_fitted() const {
  if (!fitted_) fail(ErrorCode::NotFitted, "LaggedRegression: predict called before fit");
}

void LaggedRegression::fit(const std::vector<TimeSeries>& targets, const std::optional<std::vector<TimeSeries>>& past,
                           const std::optional<std::vector<TimeSeries>>& future) {
  if (targets.empty()) fail(ErrorCode::InvalidArgument, "no target series given");
  if (cfg_.use_future_covariates && !future)
    fail(ErrorCode::InvalidArgument, "use_future_covariates is set but no future covariates were given");
  for (const auto& s : targets)
    if (s.has_nan()) fail(ErrorCode::NaNInput, "target series contains NaN");

  FeatureLayout layout;
  layout.target_lags = cfg_.target_lags;
  layout.target_components = uniform_components(targets, "target series");
  layout.output_length = cfg_.output_length;
  if (past && !past->empty()) {
    layout.past_cov_lags = cfg_.past_cov_lags;
    layout.past_components = uniform_components(*past, "past covariates");
  }
  const auto used_future = cfg_.use_future_covariates ? future : std::nullopt;
  if (used_future && !used_future->empty()) layout.future_components = uniform_components(*used_future, "future covariates");
  const auto used_past = layout.past_components > 0 ? past : std::nullopt;

  const WindowSpec spec{cfg_.input_length, cfg_.output_length, cfg_.stride, std::nullopt};
  const auto samples = build_samples(targets, used_past, used_future, spec);
  const auto N = static_cast<Eigen::Index>(samples.size());
  const auto F = static_cast<Eigen::Index>(layout.size());
  const std::size_t C = layout.target_components, L_in = cfg_.input_length, L_out = cfg_.output_length;
  const auto K = static_cast<Eigen::Index>(L_out * C);

  Eigen::MatrixXd X(N, F), Y(N, K);
  for (Eigen::Index i = 0; i < N; ++i) {
    const auto s = samples[static_cast<std::size_t>(i)];
    Eigen::Index f = 0;
    for (std::size_t lag : layout.target_lags)
      for (std::size_t c = 0; c < C; ++c) X(i, f++) = s.past_target.at(L_in - lag, c);
    for (std::size_t lag : layout.past_cov_lags)
      for (std::size_t c = 0; c < layout.past_components; ++c) X(i, f++) = s.past_covariates->at(L_in - lag, c);
    if (layout.future_components)
      for (std::size_t h = 0; h < L_out; ++h)
        for (std::size_t c = 0; c < layout.future_components; ++c) X(i, f++) = s.future_covariates->at(h, c);
    for (std::size_t h = 0; h < L_out; ++h)
      for (std::size_t c = 0; c < C; ++c) Y(i, static_cast<Eigen::Index>(h * C + c)) = s.future_target.at(h, c);
  }

  // Centering removes the intercept from the penalized problem.
  const Eigen::RowVectorXd x_mean = X.colwise().mean();
  const Eigen::RowVectorXd y_mean = Y.colwise().mean();
  const Eigen::MatrixXd Xc = X.rowwise() - x_mean;
  const Eigen::MatrixXd Yc = Y.rowwise() - y_mean;
  Eigen::MatrixXd W;
  if (cfg_.ridge_lambda == 0.0) {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(Xc);
    if (qr.rank() < F)
      fail(ErrorCode::SingularSystem, "design matrix has rank " + std::to_string(qr.rank()) + " < " + std::to_string(F) +
                                          " features after centering; set ridge_lambda > 0");
    W = qr.solve(Yc);
  } else {
    Eigen::MatrixXd G = Xc.transpose() * Xc;
    G.diagonal().array() += cfg_.ridge_lambda;
    W = G.ldlt().solve(Xc.transpose() * Yc);
  }
  if (!W.allFinite()) fail(ErrorCode::SingularSystem, "ridge solve produced non-finite weights; increase ridge_lambda");

  W_ = std::move(W);
  b_ = (y_mean - x_mean * W_).transpose();
  residuals_ = Y - ((X * W_).rowwise() + b_.transpose());
  likelihood_.reset();
  if (cfg_.likelihood) likelihood_ = fit_residuals(*cfg_.likelihood, residuals_);
  layout_ = std::move(layout);
  component_names_ = targets.front().component_names();
  fitted_ = true;
}

TimeSeries LaggedRegression::predict(std::size_t n, const TimeSeries& series, const std::optional<TimeSeries>& past,
                                     const std::optional<TimeSeries>& future, std::size_t num_samples,
                                     std::uint64_t seed) const {
  require_fitted();
  if (num_samples == 0) fail(ErrorCode::InvalidArgument, "num_samples must be >= 1");
  if (num_samples > 1 && !likelihood_)
    fail(ErrorCode::InvalidArgument, "num_samples > 1 needs a model trained with a likelihood");
  const std::size_t C = layout_.target_components, L_in = cfg_.input_length, L_out = cfg_.output_length;
  if (series.n_components() != C)
    fail(ErrorCode::ShapeMismatch, "series has " + std::to_string(series.n_components()) + " components, model expects " +
                                       std::to_string(C));
  if (!series.is_deterministic()) fail(ErrorCode::InvalidArgument, "series must be deterministic");
  if (layout_.past_components > 0 && !past)
    fail(ErrorCode::CovariateCoverageError, "model was trained with past covariates; none given");
  if (layout_.future_components > 0 && !future)
    fail(ErrorCode::CovariateCoverageError, "model was trained with future covariates; none given");
  if (layout_.past_components > 0 && past->n_components() != layout_.past_components)
    fail(ErrorCode::ShapeMismatch, "past covariates have the wrong number of components");
  if (layout_.future_components > 0 && future->n_components() != layout_.future_components)
    fail(ErrorCode::ShapeMismatch, "future covariates have the wrong number of components");

  const auto win = extract_inference_window(series, layout_.past_components ? past : std::nullopt,
                                            layout_.future_components ? future : std::nullopt, L_in, n, L_out);
  if (win.past_target.has_nan()) fail(ErrorCode::NaNInput, "input window contains NaN");
  const std::size_t R = win.rounds, S = num_samples, rows = L_in + R * L_out;

  std::vector<std::vector<double>> history(S, std::vector<double>(rows * C));
  for (auto& h : history)
    for (std::size_t t = 0; t < L_in; ++t)
      for (std::size_t c = 0; c < C; ++c) h[t * C + c] = win.past_target.at(t, c);

  std::mt19937_64 rng(seed);
  Eigen::VectorXd x(static_cast<Eigen::Index>(layout_.size()));
  for (std::size_t r = 0; r < R; ++r) {
    const std::size_t p = L_in + r * L_out;
    for (std::size_t s = 0; s < S; ++s) {
      auto& hist = history[s];
      Eigen::Index f = 0;
      for (std::size_t lag : layout_.target_lags)
        for (std::size_t c = 0; c < C; ++c) x(f++) = hist[(p - lag) * C + c];
      for (std::size_t lag : layout_.past_cov_lags)
        for (std::size_t c = 0; c < layout_.past_components; ++c) x(f++) = win.past_covariates->at(p - lag, c);
      if (layout_.future_components)
        for (std::size_t h = 0; h < L_out; ++h)
          for (std::size_t c = 0; c < layout_.future_components; ++c) x(f++) = win.future_covariates->at(r * L_out + h, c);
      const Eigen::VectorXd out = W_.transpose() * x + b_;
      for (std::size_t j = 0; j < L_out * C; ++j) {
        double v = out(static_cast<Eigen::Index>(j));
        if (S > 1) v += likelihood_->draw(j, rng);
        hist[p * C + j] = v;
      }
    }
  }

  std::vector<double> values(n * C * S);
  for (std::size_t t = 0; t < n; ++t)
    for (std::size_t c = 0; c < C; ++c)
      for (std::size_t s = 0; s < S; ++s) values[(t * C + c) * S + s] = history[s][(L_in + t) * C + c];
  return TimeSeries::build(forecast_index(series, n), std::move(values), C, S, series.component_names());
}

// ---------------------------------------------------------------------------
// Serialization

std::string LaggedRegression::to_json() const {
  require_fitted();
  json j;
  j["format_version"] = kModelFormatVersion;
  j["config"] = {{"input_length", cfg_.input_length},
                 {"output_length", cfg_.output_length},
                 {"target_lags", cfg_.target_lags},
                 {"past_cov_lags", cfg_.past_cov_lags},
                 {"use_future_covariates", cfg_.use_future_covariates},
                 {"ridge_lambda", cfg_.ridge_lambda},
                 {"likelihood", cfg_.likelihood ? json(to_string(*cfg_.likelihood)) : json(nullptr)},
                 {"stride", cfg_.stride}};
  j["layout"] = {{"target_lags", layout_.target_lags},
                 {"past_cov_lags", layout_.past_cov_lags},
                 {"target_components", layout_.target_components},
                 {"past_components", layout_.past_components},
                 {"future_components", layout_.future_components},
                 {"output_length", layout_.output_length}};
  std::vector<double> w(static_cast<std::size_t>(W_.size()));
  for (Eigen::Index r = 0; r < W_.rows(); ++r)
    for (Eigen::Index c = 0; c < W_.cols(); ++c) w[static_cast<std::size_t>(r * W_.cols() + c)] = W_(r, c);
  j["weights"] = {{"rows", W_.rows()}, {"cols", W_.cols()}, {"row_major", w}};
  j["intercept"] = std::vector<double>(b_.data(), b_.data() + b_.size());
  if (likelihood_)
    j["likelihood"] = {{"kind", to_string(likelihood_->kind())},
                       {"scale", likelihood_->scale()},
                       {"pools", likelihood_->pools()}};
  else
    j["likelihood"] = nullptr;
  j["component_names"] = component_names_;
  return j.dump(1);
}

LaggedRegression LaggedRegression::from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    fail(ErrorCode::ParseError, std::string("model file is not valid JSON: ") + e.what());
  }
  try {
    const int version = j.at("format_version").get<int>();
    if (version != kModelFormatVersion)
      fail(ErrorCode::VersionMismatch, "model format version " + std::to_string(version) + " is not supported (expected " +
                                           std::to_string(kModelFormatVersion) + ")");
    const auto& c = j.at("config");
    LaggedRegressionConfig cfg;
    cfg.input_length = c.at("input_length").get<std::size_t>();
    cfg.output_length = c.at("output_length").get<std::size_t>();
    cfg.target_lags = c.at("target_lags").get<std::vector<std::size_t>>();
    cfg.past_cov_lags = c.at("past_cov_lags").get<std::vector<std::size_t>>();
    cfg.use_future_covariates = c.at("use_future_covariates").get<bool>();
    cfg.ridge_lambda = c.at("ridge_lambda").get<double>();
    if (!c.at("likelihood").is_null()) cfg.likelihood = likelihood_from_string(c.at("likelihood").get<std::string>());
    cfg.stride = c.at("stride").get<std::size_t>();
    LaggedRegression m(cfg);

    const auto& l = j.at("layout");
    m.layout_.target_lags = l.at("target_lags").get<std::vector<std::size_t>>();
    m.layout_.past_cov_lags = l.at("past_cov_lags").get<std::vector<std::size_t>>();
    m.layout_.target_components = l.at("target_components").get<std::size_t>();
    m.layout_.past_components = l.at("past_components").get<std::size_t>();
    m.layout_.future_components = l.at("future_components").get<std::size_t>();
    m.layout_.output_length = l.at("output_length").get<std::size_t>();

    const auto rows = j.at("weights").at("rows").get<Eigen::Index>();
    const auto cols = j.at("weights").at("cols").get<Eigen::Index>();
    const auto w = j.at("weights").at("row_major").get<std::vector<double>>();
    const auto b = j.at("intercept").get<std::vector<double>>();
    if (rows != static_cast<Eigen::Index>(m.layout_.size()) ||
        cols != static_cast<Eigen::Index>(m.layout_.output_length * m.layout_.target_components) ||
        w.size() != static_cast<std::size_t>(rows * cols) || b.size() != static_cast<std::size_t>(cols))
      fail(ErrorCode::ParseError, "model weights do not match the stored feature layout");
    m.W_.resize(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r)
      for (Eigen::Index k = 0; k < cols; ++k) m.W_(r, k) = w[static_cast<std::size_t>(r * cols + k)];
    m.b_ = Eigen::Map<const Eigen::VectorXd>(b.data(), cols);

    if (!j.at("likelihood").is_null()) {
      const auto& lk = j.at("likelihood");
      m.likelihood_ = Likelihood::from_parameters(likelihood_from_string(lk.at("kind").get<std::string>()),
                                                  lk.at("scale").get<std::vector<double>>(),
                                                  lk.at("pools").get<std::vector<std::vector<double>>>());
      if (m.likelihood_->coordinates() != static_cast<std::size_t>(cols))
        fail(ErrorCode::ParseError, "likelihood does not match the model's output size");
    }
    m.component_names_ = j.at("component_names").get<std::vector<std::string>>();
    m.fitted_ = true;
    return m;
  } catch (const json::exception& e) {
    fail(ErrorCode::ParseError, std::string("malformed model file: ") + e.what());
  }
}

void LaggedRegression::save(const std::filesystem::path& path) const {
  const auto text = to_json();
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::IoError, "cannot write " + path.string());
  out << text;
  if (!out) fail(ErrorCode::IoError, "write failed for " + path.string());
}

LaggedRegression LaggedRegression::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::IoError, "cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json(ss.str());
}

// ---------------------------------------------------------------------------
// ForecastingModel adapter

std::size_t GlobalForecaster::min_train_length() const { return cfg_.input_length + cfg_.output_length; }

void GlobalForecaster::do_fit(const TimeSeries& series, const Covariates& covariates) {
  LaggedRegression m(cfg_);
  std::optional<std::vector<TimeSeries>> past, future;
  if (covariates.past) past = std::vector<TimeSeries>{*covariates.past};
  if (covariates.future) future = std::vector<TimeSeries>{*covariates.future};
  m.fit({series}, past, future);
  model_ = std::move(m);
  train_covariates_ = covariates;
}

std::vector<double> GlobalForecaster::do_predict(std::size_t n, const Covariates& covariates) const {
  return do_predict_from(training_series(), n, covariates);
}

std::vector<double> GlobalForecaster::do_predict_from(const TimeSeries& history, std::size_t n,
                                                      const Covariates& covariates) const {
  const auto& past = covariates.past ? covariates.past : train_covariates_.past;
  const auto& future = covariates.future ? covariates.future : train_covariates_.future;
  const auto out = model_->predict(n, history, past, future);
  return {out.values().begin(), out.values().end()};
}

}  // namespace tsf
