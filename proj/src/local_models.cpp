#include "tsf/local_models.hpp"

#include <Eigen/Dense>
#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numeric>

#include "tsf/error.hpp"
#include "tsf/optimize.hpp"

namespace tsf {

namespace {

const std::vector<double> kStartGrid{0.2, 0.5, 0.8};

double mean_of(std::span<const double> v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

NelderMeadOptions unit_box(std::size_t dim) {
  NelderMeadOptions o;
  o.lower = std::vector<double>(dim, 0.0);
  o.upper = std::vector<double>(dim, 1.0);
  o.initial_step = 0.1;
  // Flat optima: converge on the parameters, not just the SSE, so rescaled
  // data lands on the same smoothing weights.
  o.f_tolerance = 1e-15;
  return o;
}

}  // namespace

// ---------------------------------------------------------------------------
// Naive baselines

NaiveSeasonal::NaiveSeasonal(std::size_t K) : K_(K) {
  if (K_ == 0) fail(ErrorCode::InvalidArgument, "NaiveSeasonal needs K >= 1");
}

void NaiveSeasonal::do_fit(const TimeSeries& series, const Covariates&) {
  const auto y = series.component_values();
  tail_.assign(y.end() - static_cast<std::ptrdiff_t>(K_), y.end());
}

std::vector<double> NaiveSeasonal::do_predict(std::size_t n, const Covariates&) const {
  std::vector<double> out(n);
  for (std::size_t h = 1; h <= n; ++h) out[h - 1] = tail_[(h - 1) % K_];
  return out;
}

void NaiveDrift::do_fit(const TimeSeries& series, const Covariates&) {
  const auto y = series.component_values();
  last_ = y.back();
  slope_ = (y.back() - y.front()) / static_cast<double>(y.size() - 1);
}

std::vector<double> NaiveDrift::do_predict(std::size_t n, const Covariates&) const {
  std::vector<double> out(n);
  for (std::size_t h = 1; h <= n; ++h) out[h - 1] = last_ + static_cast<double>(h) * slope_;
  return out;
}

// ---------------------------------------------------------------------------
// Exponential smoothing

ESState es_initial_state(std::span<const double> y, const ESConfig& cfg) {
  ESState st;
  const std::size_t m = cfg.season_length;
  if (cfg.seasonal == SeasonalKind::None) {
    st.level = y.front();
    st.trend = 0.0;
    return st;
  }
  const double season1 = mean_of(y.subspan(0, m));
  const double season2 = mean_of(y.subspan(m, m));
  st.level = season1;
  st.trend = cfg.trend == TrendKind::Additive ? (season2 - season1) / static_cast<double>(m) : 0.0;
  st.seasonal.resize(m);
  for (std::size_t i = 0; i < m; ++i)
    st.seasonal[i] = cfg.seasonal == SeasonalKind::Additive ? y[i] - st.level : y[i] / st.level;
  const double centre = mean_of(st.seasonal);
  for (double& s : st.seasonal) s = cfg.seasonal == SeasonalKind::Additive ? s - centre : s / centre;
  return st;
}

double es_sse(std::span<const double> y, const ESConfig& cfg, std::span<const double> params, ESState* final_state) {
  const bool has_trend = cfg.trend == TrendKind::Additive;
  const bool has_season = cfg.seasonal != SeasonalKind::None;
  const bool mult = cfg.seasonal == SeasonalKind::Multiplicative;
  const double alpha = params[0];
  const double beta = has_trend ? params[1] : 0.0;
  const double gamma = has_season ? params[has_trend ? 2 : 1] : 0.0;
  const std::size_t m = has_season ? cfg.season_length : 1;

  ESState st = es_initial_state(y, cfg);
  double sse = 0.0;
  for (std::size_t t = 0; t < y.size(); ++t) {
    const double base = st.level + st.trend;
    double fitted = base;
    double s = 0.0;
    if (has_season) {
      s = st.seasonal[t % m];
      fitted = mult ? base * s : base + s;
    }
    const double err = y[t] - fitted;
    sse += err * err;
    const double prev_level = st.level;
    if (has_season) {
      st.level = alpha * (mult ? y[t] / s : y[t] - s) + (1.0 - alpha) * base;
      st.seasonal[t % m] = gamma * (mult ? y[t] / base : y[t] - base) + (1.0 - gamma) * s;
    } else {
      st.level = alpha * y[t] + (1.0 - alpha) * base;
    }
    if (has_trend) st.trend = beta * (st.level - prev_level) + (1.0 - beta) * st.trend;
  }
  if (final_state != nullptr) {
    if (has_season) std::rotate(st.seasonal.begin(), st.seasonal.begin() + static_cast<std::ptrdiff_t>(y.size() % m), st.seasonal.end());
    *final_state = std::move(st);
  }
  return sse;
}

ExponentialSmoothing::ExponentialSmoothing(ESConfig cfg) : cfg_(cfg) {
  if (cfg_.seasonal != SeasonalKind::None && cfg_.season_length < 2)
    fail(ErrorCode::InvalidArgument, "seasonal exponential smoothing needs season_length >= 2");
}

std::size_t ExponentialSmoothing::min_train_length() const {
  return cfg_.seasonal != SeasonalKind::None ? 2 * cfg_.season_length : 2;
}

void ExponentialSmoothing::do_fit(const TimeSeries& series, const Covariates&) {
  const auto y = series.component_values();
  if (cfg_.seasonal == SeasonalKind::Multiplicative &&
      std::any_of(y.begin(), y.end(), [](double v) { return v <= 0.0; }))
    fail(ErrorCode::NonPositiveForMultiplicative, "multiplicative seasonality requires strictly positive values");
  const std::size_t dim = 1 + (cfg_.trend == TrendKind::Additive ? 1 : 0) + (cfg_.seasonal != SeasonalKind::None ? 1 : 0);
  const auto objective = [&](std::span<const double> p) { return es_sse(y, cfg_, p, nullptr); };
  const auto best = nelder_mead_multistart(objective, grid_corners(kStartGrid, dim), unit_box(dim));
  params_ = best.x;
  sse_ = es_sse(y, cfg_, params_, &state_);
}

std::vector<double> ExponentialSmoothing::do_predict(std::size_t n, const Covariates&) const {
  std::vector<double> out(n);
  for (std::size_t h = 1; h <= n; ++h) {
    const double base = state_.level + static_cast<double>(h) * state_.trend;
    switch (cfg_.seasonal) {
      case SeasonalKind::None: out[h - 1] = base; break;
      case SeasonalKind::Additive: out[h - 1] = base + state_.seasonal[(h - 1) % cfg_.season_length]; break;
      case SeasonalKind::Multiplicative: out[h - 1] = base * state_.seasonal[(h - 1) % cfg_.season_length]; break;
    }
  }
  return out;
}

SESFit fit_ses(std::span<const double> y) {
  const auto sse = [&](double alpha, double* level) {
    double l = y.front(), s = 0.0;
    for (double v : y) {
      const double e = v - l;
      s += e * e;
      l += alpha * e;
    }
    if (level != nullptr) *level = l;
    return s;
  };
  std::vector<std::vector<double>> starts;
  for (double a : kStartGrid) starts.push_back({a});
  const auto best = nelder_mead_multistart([&](std::span<const double> p) { return sse(p[0], nullptr); }, starts,
                                           unit_box(1));
  SESFit fit;
  fit.alpha = best.x[0];
  fit.sse = sse(fit.alpha, &fit.level);
  return fit;
}

// ---------------------------------------------------------------------------
// Theta

std::vector<double> autocorrelation(std::span<const double> y, std::size_t max_lag) {
  const double mu = mean_of(y);
  double denom = 0.0;
  for (double v : y) denom += (v - mu) * (v - mu);
  std::vector<double> r(max_lag + 1, 0.0);
  if (denom <= 0.0) return r;
  for (std::size_t k = 0; k <= max_lag && k < y.size(); ++k) {
    double num = 0.0;
    for (std::size_t t = 0; t + k < y.size(); ++t) num += (y[t] - mu) * (y[t + k] - mu);
    r[k] = num / denom;
  }
  return r;
}

bool seasonality_test(std::span<const double> y, std::size_t m) {
  if (m < 2 || y.size() <= m) return false;
  const auto r = autocorrelation(y, m);
  double acc = 1.0;
  for (std::size_t k = 1; k < m; ++k) acc += 2.0 * r[k] * r[k];
  return std::abs(r[m]) > 1.645 * std::sqrt(acc / static_cast<double>(y.size()));
}

std::vector<double> multiplicative_seasonal_indices(std::span<const double> y, std::size_t m) {
  const std::size_t T = y.size();
  const std::size_t half = m / 2;
  std::vector<double> sum(m, 0.0);
  std::vector<std::size_t> count(m, 0);
  for (std::size_t t = half; t + half < T; ++t) {
    double trend = 0.0;
    if (m % 2 == 1) {
      for (std::size_t j = t - half; j <= t + half; ++j) trend += y[j];
      trend /= static_cast<double>(m);
    } else {
      // 2 x m centred moving average.
      trend = 0.5 * (y[t - half] + y[t + half]);
      for (std::size_t j = t - half + 1; j < t + half; ++j) trend += y[j];
      trend /= static_cast<double>(m);
    }
    sum[t % m] += y[t] / trend;
    ++count[t % m];
  }
  std::vector<double> idx(m, 1.0);
  for (std::size_t i = 0; i < m; ++i)
    if (count[i] > 0) idx[i] = sum[i] / static_cast<double>(count[i]);
  const double centre = mean_of(idx);
  for (double& v : idx) v /= centre;
  return idx;
}

Theta::Theta(std::size_t season_length, double theta) : m_(season_length), theta_(theta) {
  if (m_ == 0) fail(ErrorCode::InvalidArgument, "Theta needs season_length >= 1");
  if (!(theta_ > 0.0)) fail(ErrorCode::InvalidArgument, "Theta coefficient must be positive");
}

void Theta::do_fit(const TimeSeries& series, const Covariates&) {
  auto x = series.component_values();
  const std::size_t T = x.size();
  seasonal_.clear();
  if (seasonality_test(x, m_)) {
    if (T < 2 * m_)
      fail(ErrorCode::SeriesTooShort, "Theta deseasonalization needs at least " + std::to_string(2 * m_) + " points");
    if (std::any_of(x.begin(), x.end(), [](double v) { return v <= 0.0; }))
      fail(ErrorCode::NonPositiveSeasonal, "multiplicative deseasonalization requires strictly positive values");
    seasonal_ = multiplicative_seasonal_indices(x, m_);
    for (std::size_t t = 0; t < T; ++t) x[t] /= seasonal_[t % m_];
  }
  // Least-squares line over t = 0..T-1.
  const double t_mean = static_cast<double>(T - 1) / 2.0;
  const double x_mean = mean_of(x);
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t t = 0; t < T; ++t) {
    const double dt = static_cast<double>(t) - t_mean;
    sxy += dt * (x[t] - x_mean);
    sxx += dt * dt;
  }
  slope_ = sxy / sxx;
  intercept_ = x_mean - slope_ * t_mean;
  length_ = T;

  // Theta line in detrended coordinates: theta * (x - line).
  std::vector<double> z(T);
  for (std::size_t t = 0; t < T; ++t) z[t] = theta_ * (x[t] - (intercept_ + slope_ * static_cast<double>(t)));
  ses_ = fit_ses(z);
}

std::vector<double> Theta::do_predict(std::size_t n, const Covariates&) const {
  std::vector<double> out(n);
  for (std::size_t h = 1; h <= n; ++h) {
    const std::size_t t = length_ - 1 + h;
    double f = intercept_ + slope_ * static_cast<double>(t) + ses_.level / theta_;
    if (!seasonal_.empty()) f *= seasonal_[t % m_];
    out[h - 1] = f;
  }
  return out;
}

// ---------------------------------------------------------------------------
// FFT

FFTModel::FFTModel(int trend_degree, std::size_t top_k) : degree_(trend_degree), top_k_(top_k) {
  if (degree_ < 0 || degree_ > 3) fail(ErrorCode::InvalidArgument, "FFT trend degree must be in {0,1,2,3}");
  if (top_k_ == 0) fail(ErrorCode::InvalidArgument, "FFT top_k must be >= 1");
}

void FFTModel::do_fit(const TimeSeries& series, const Covariates&) {
  const auto y = series.component_values();
  const std::size_t T = y.size();
  if (top_k_ > T / 2 + 1)
    fail(ErrorCode::KTooLarge, "top_k " + std::to_string(top_k_) + " exceeds floor(T/2)+1 = " + std::to_string(T / 2 + 1));

  const auto cols = static_cast<Eigen::Index>(degree_ + 1);
  Eigen::MatrixXd V(static_cast<Eigen::Index>(T), cols);
  Eigen::VectorXd rhs(static_cast<Eigen::Index>(T));
  for (std::size_t t = 0; t < T; ++t) {
    const double u = static_cast<double>(t) / static_cast<double>(T);
    double p = 1.0;
    for (Eigen::Index j = 0; j < cols; ++j, p *= u) V(static_cast<Eigen::Index>(t), j) = p;
    rhs(static_cast<Eigen::Index>(t)) = y[t];
  }
  const Eigen::VectorXd coef = V.colPivHouseholderQr().solve(rhs);
  trend_coef_.assign(coef.data(), coef.data() + coef.size());
  const Eigen::VectorXd resid = rhs - V * coef;

  std::vector<std::complex<double>> in(T), spec;
  for (std::size_t t = 0; t < T; ++t) in[t] = resid(static_cast<Eigen::Index>(t));
  Eigen::FFT<double> fft;
  fft.fwd(spec, in);

  std::vector<std::size_t> bins(T / 2 + 1);
  std::iota(bins.begin(), bins.end(), 0);
  std::stable_sort(bins.begin(), bins.end(), [&](std::size_t a, std::size_t b) { return std::abs(spec[a]) > std::abs(spec[b]); });
  std::vector<bool> keep(T, false);
  for (std::size_t i = 0; i < top_k_; ++i) {
    keep[bins[i]] = true;
    keep[(T - bins[i]) % T] = true;
  }
  for (std::size_t k = 0; k < T; ++k)
    if (!keep[k]) spec[k] = 0.0;
  std::vector<std::complex<double>> back;
  fft.inv(back, spec);
  filtered_.resize(T);
  for (std::size_t t = 0; t < T; ++t) filtered_[t] = back[t].real();
}

std::vector<double> FFTModel::do_predict(std::size_t n, const Covariates&) const {
  const std::size_t T = filtered_.size();
  std::vector<double> out(n);
  for (std::size_t h = 1; h <= n; ++h) {
    const double u = static_cast<double>(T - 1 + h) / static_cast<double>(T);
    double trend = 0.0, p = 1.0;
    for (double c : trend_coef_) {
      trend += c * p;
      p *= u;
    }
    out[h - 1] = trend + filtered_[(h - 1) % T];
  }
  return out;
}

// ---------------------------------------------------------------------------
// ARIMA

double arma_css(std::span<const double> w, std::span<const double> ar, std::span<const double> ma,
                std::vector<double>* residuals) {
  const std::size_t p = ar.size(), q = ma.size(), n = w.size();
  std::vector<double> e(n, 0.0);
  double css = 0.0;
  for (std::size_t t = p; t < n; ++t) {
    double pred = 0.0;
    for (std::size_t i = 0; i < p; ++i) pred += ar[i] * w[t - 1 - i];
    for (std::size_t j = 0; j < q && j < t; ++j) pred += ma[j] * e[t - 1 - j];
    e[t] = w[t] - pred;
    css += e[t] * e[t];
    if (!std::isfinite(css)) return std::numeric_limits<double>::infinity();
  }
  if (residuals != nullptr) *residuals = std::move(e);
  return css;
}

std::vector<double> yule_walker(std::span<const double> w, std::size_t p) {
  std::vector<double> ar(p, 0.0);
  if (p == 0) return ar;
  const double mu = mean_of(w);
  const auto n = static_cast<double>(w.size());
  std::vector<double> gamma(p + 1, 0.0);
  for (std::size_t k = 0; k <= p; ++k) {
    for (std::size_t t = 0; t + k < w.size(); ++t) gamma[k] += (w[t] - mu) * (w[t + k] - mu);
    gamma[k] /= n;
  }
  if (gamma[0] <= 0.0) return ar;
  const auto P = static_cast<Eigen::Index>(p);
  Eigen::MatrixXd G(P, P);
  Eigen::VectorXd g(P);
  for (Eigen::Index i = 0; i < P; ++i) {
    g(i) = gamma[static_cast<std::size_t>(i) + 1];
    for (Eigen::Index j = 0; j < P; ++j) G(i, j) = gamma[static_cast<std::size_t>(std::abs(i - j))];
  }
  const Eigen::VectorXd phi = G.ldlt().solve(g);
  if (!phi.allFinite()) return ar;
  ar.assign(phi.data(), phi.data() + P);
  return ar;
}

ARIMA::ARIMA(ARIMAOrder order) : order_(order) {
  if (order_.p + order_.q == 0 && order_.d == 0)
    fail(ErrorCode::InvalidArgument, "ARIMA order needs p + q >= 1 or d >= 1");
}

void ARIMA::do_fit(const TimeSeries& series, const Covariates&) {
  std::vector<double> w = series.component_values();
  const std::size_t p = order_.p, q = order_.q;
  diff_anchors_.clear();
  for (std::size_t i = 0; i < order_.d; ++i) {
    diff_anchors_.push_back(w.back());
    std::vector<double> next(w.size() - 1);
    for (std::size_t t = 0; t + 1 < w.size(); ++t) next[t] = w[t + 1] - w[t];
    w = std::move(next);
  }
  // Only a stationary (d = 0) model carries a constant.
  mean_ = order_.d == 0 ? mean_of(w) : 0.0;
  for (double& v : w) v -= mean_;

  fallback_ = false;
  ar_.assign(p, 0.0);
  ma_.assign(q, 0.0);
  if (q == 0 && p > 0) {
    const std::size_t rows = w.size() - p;
    Eigen::MatrixXd X(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(p));
    Eigen::VectorXd Y(static_cast<Eigen::Index>(rows));
    for (std::size_t r = 0; r < rows; ++r) {
      Y(static_cast<Eigen::Index>(r)) = w[r + p];
      for (std::size_t i = 0; i < p; ++i) X(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(i)) = w[r + p - 1 - i];
    }
    const Eigen::VectorXd phi = X.colPivHouseholderQr().solve(Y);
    const auto yw = yule_walker(w, p);
    initial_css_ = arma_css(w, yw, {});
    if (phi.allFinite()) ar_.assign(phi.data(), phi.data() + phi.size());
    else ar_ = yw;
  } else if (p + q > 0) {
    std::vector<double> start = yule_walker(w, p);
    start.resize(p + q, 0.0);
    const auto objective = [&](std::span<const double> theta) {
      return arma_css(w, theta.subspan(0, p), theta.subspan(p, q));
    };
    initial_css_ = objective(start);
    auto best = nelder_mead(objective, start);
    if (!std::isfinite(best.value) || !best.converged) {
      auto retry = nelder_mead(objective, std::vector<double>(p + q, 0.0));
      fallback_ = true;
      warn("ARIMA: optimizer did not converge from the Yule-Walker start; retried from zero");
      if (retry.value < best.value) best = std::move(retry);
    }
    if (!(best.value <= initial_css_)) best.x = start;
    ar_.assign(best.x.begin(), best.x.begin() + static_cast<std::ptrdiff_t>(p));
    ma_.assign(best.x.begin() + static_cast<std::ptrdiff_t>(p), best.x.end());
  }
  std::vector<double> resid;
  css_ = arma_css(w, ar_, ma_, &resid);
  if (p + q == 0) initial_css_ = css_;
  w_tail_ = w;
  e_tail_ = resid;
}

std::vector<double> ARIMA::do_predict(std::size_t n, const Covariates&) const {
  const std::size_t p = order_.p, q = order_.q;
  std::vector<double> w = w_tail_, e = e_tail_;
  std::vector<double> out(n);
  for (std::size_t h = 0; h < n; ++h) {
    const std::size_t t = w.size();
    double v = 0.0;
    for (std::size_t i = 0; i < p; ++i) v += ar_[i] * w[t - 1 - i];
    for (std::size_t j = 0; j < q && j < t; ++j) v += ma_[j] * e[t - 1 - j];
    w.push_back(v);
    e.push_back(0.0);
    out[h] = v + mean_;
  }
  // Undo differencing, innermost level first.
  for (std::size_t level = order_.d; level-- > 0;) {
    double acc = diff_anchors_[level];
    for (double& v : out) {
      acc += v;
      v = acc;
    }
  }
  return out;
}

}  // namespace tsf
