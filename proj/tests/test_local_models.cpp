#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "contract_harness.hpp"
#include "tsf/datasets.hpp"
#include "tsf/error.hpp"
#include "tsf/local_models.hpp"

using namespace tsf;

namespace {

TimeSeries series(std::vector<double> v) {
  const auto n = v.size();
  return TimeSeries::univariate(TimeIndex::range(0, n), std::move(v));
}

ErrorCode code_of(const auto& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected tsf::Error");
  return ErrorCode::InvalidArgument;
}

std::vector<double> forecast(ForecastingModel& m, std::vector<double> y, std::size_t n) {
  m.fit(series(std::move(y)));
  return m.predict(n).component_values();
}

// Direct Holt-Winters (additive trend, multiplicative season) written from
// the textbook recursions, tuned by exhaustive grid search.
struct HoltWintersOracle {
  std::size_t m;

  double run(const std::vector<double>& y, double a, double b, double g, std::vector<double>* fc, std::size_t n) const {
    double l = 0, tr = 0;
    for (std::size_t i = 0; i < m; ++i) l += y[i] / static_cast<double>(m);
    double l2 = 0;
    for (std::size_t i = m; i < 2 * m; ++i) l2 += y[i] / static_cast<double>(m);
    tr = (l2 - l) / static_cast<double>(m);
    std::vector<double> s(m);
    double ssum = 0;
    for (std::size_t i = 0; i < m; ++i) ssum += (s[i] = y[i] / l);
    for (auto& v : s) v /= ssum / static_cast<double>(m);
    double sse = 0;
    for (std::size_t t = 0; t < y.size(); ++t) {
      const double si = s[t % m];
      const double yhat = (l + tr) * si;
      sse += (y[t] - yhat) * (y[t] - yhat);
      const double lnew = a * y[t] / si + (1 - a) * (l + tr);
      const double tnew = b * (lnew - l) + (1 - b) * tr;
      s[t % m] = g * y[t] / (l + tr) + (1 - g) * si;
      l = lnew;
      tr = tnew;
    }
    if (fc)
      for (std::size_t h = 1; h <= n; ++h) fc->push_back((l + static_cast<double>(h) * tr) * s[(y.size() + h - 1) % m]);
    return sse;
  }

  std::vector<double> best_forecast(const std::vector<double>& y, std::size_t n) const {
    double best = INFINITY, ba = 0, bb = 0, bg = 0;
    for (int i = 0; i <= 20; ++i)
      for (int j = 0; j <= 20; ++j)
        for (int k = 0; k <= 20; ++k) {
          const double v = run(y, i / 20.0, j / 20.0, k / 20.0, nullptr, 0);
          if (v < best) best = v, ba = i / 20.0, bb = j / 20.0, bg = k / 20.0;
        }
    std::vector<double> fc;
    run(y, ba, bb, bg, &fc, n);
    return fc;
  }
};

double mape(const std::vector<double>& actual, const std::vector<double>& pred) {
  double s = 0;
  for (std::size_t i = 0; i < actual.size(); ++i) s += std::abs((actual[i] - pred[i]) / actual[i]);
  return 100.0 * s / static_cast<double>(actual.size());
}

}  // namespace

TEST_CASE("naive seasonal repeats the last K values") {
  NaiveSeasonal k1(1), k2(2);
  CHECK(forecast(k1, {1, 2, 3}, 2) == std::vector<double>{3, 3});
  CHECK(forecast(k2, {1, 2, 3, 4}, 3) == std::vector<double>{3, 4, 3});
  CHECK(code_of([&] { k2.fit(series({1})); }) == ErrorCode::SeriesTooShort);
}

TEST_CASE("naive drift extends the first-to-last line") {
  NaiveDrift m;
  CHECK(forecast(m, {0, 10}, 2) == std::vector<double>{20, 30});
  CHECK(forecast(m, {5, 5, 5}, 3) == std::vector<double>{5, 5, 5});
  CHECK(code_of([&] { m.fit(series({1})); }) == ErrorCode::SeriesTooShort);
}

TEST_CASE("predict before fit and multivariate input are rejected") {
  NaiveDrift m;
  CHECK(code_of([&] { (void)m.predict(3); }) == ErrorCode::NotFitted);
  auto two = TimeSeries::build(TimeIndex::range(0, 3), {1, 2, 3, 4, 5, 6}, 2, 1, {"a", "b"});
  CHECK(code_of([&] { m.fit(two); }) == ErrorCode::UnsupportedMultivariate);
  CHECK(code_of([&] { m.fit(series({1, NAN, 3})); }) == ErrorCode::NaNInput);
}

TEST_CASE("exponential smoothing keeps constant series fixed") {
  for (auto trend : {TrendKind::None, TrendKind::Additive})
    for (auto seasonal : {SeasonalKind::None, SeasonalKind::Additive}) {
      ExponentialSmoothing es({trend, seasonal, 4});
      es.fit(series(std::vector<double>(16, 5.0)));
      CHECK(es.sse() == 0.0);
      for (double v : es.predict(9).component_values()) CHECK(v == doctest::Approx(5.0).epsilon(1e-12));
    }
}

TEST_CASE("additive seasonal ES reproduces a noiseless cycle") {
  const std::vector<double> cycle{1, 3, 2, 5};
  std::vector<double> y;
  for (int r = 0; r < 6; ++r) y.insert(y.end(), cycle.begin(), cycle.end());
  for (auto trend : {TrendKind::None, TrendKind::Additive}) {
    ExponentialSmoothing es({trend, SeasonalKind::Additive, 4});
    const auto fc = forecast(es, y, 8);
    for (std::size_t h = 0; h < 8; ++h) CHECK(std::abs(fc[h] - cycle[h % 4]) < 1e-6);
  }
}

TEST_CASE("ES rejects non-positive data for multiplicative seasonality and short series") {
  ExponentialSmoothing es({TrendKind::None, SeasonalKind::Multiplicative, 2});
  CHECK(code_of([&] { es.fit(series({1, 2, 0, 4})); }) == ErrorCode::NonPositiveForMultiplicative);
  CHECK(code_of([&] { es.fit(series({1, 2, 3})); }) == ErrorCode::SeriesTooShort);
}

TEST_CASE("Holt-Winters on AirPassengers is as accurate as a direct grid-search oracle") {
  const auto air = load_dataset("air_passengers");
  const auto all = air.component_values();
  std::vector<double> train(all.begin(), all.begin() + 132), test(all.begin() + 132, all.end());
  ExponentialSmoothing es({TrendKind::Additive, SeasonalKind::Multiplicative, 12});
  es.fit(air.slice_positions(0, 132));
  const auto ours = mape(test, es.predict(12).component_values());
  const auto reference = mape(test, HoltWintersOracle{12}.best_forecast(train, 12));
  MESSAGE("ES MAPE " << ours << "%, oracle " << reference << "%");
  CHECK(ours < reference + 1.0);
}

TEST_CASE("theta continues an exact line") {
  std::vector<double> y(40);
  for (std::size_t t = 0; t < y.size(); ++t) y[t] = 3.0 * static_cast<double>(t) + 1.0;
  for (std::size_t m : {1, 4, 12}) {
    Theta th(m);
    const auto fc = forecast(th, y, 10);
    for (std::size_t h = 0; h < 10; ++h) CHECK(std::abs(fc[h] - (3.0 * static_cast<double>(40 + h) + 1.0)) < 1e-8);
  }
}

TEST_CASE("theta on a constant series is constant") {
  Theta th(12);
  for (double v : forecast(th, std::vector<double>(30, 7.5), 6)) CHECK(v == doctest::Approx(7.5).epsilon(1e-12));
}

TEST_CASE("theta detects the yearly cycle in AirPassengers") {
  const auto y = load_dataset("air_passengers").component_values();
  const double T = static_cast<double>(y.size());
  double mu = 0;
  for (double v : y) mu += v / T;
  auto r = [&](std::size_t k) {
    double num = 0, den = 0;
    for (std::size_t t = 0; t < y.size(); ++t) den += (y[t] - mu) * (y[t] - mu);
    for (std::size_t t = 0; t + k < y.size(); ++t) num += (y[t] - mu) * (y[t + k] - mu);
    return num / den;
  };
  double acc = 1;
  for (std::size_t k = 1; k < 12; ++k) acc += 2 * r(k) * r(k);
  CHECK(std::abs(r(12)) > 1.645 * std::sqrt(acc / T));

  Theta th(12);
  th.fit(load_dataset("air_passengers"));
  CHECK(th.seasonal());
  for (double v : th.predict(24).component_values()) CHECK(v > 0);
}

TEST_CASE("theta raises on a seasonal series shorter than two seasons") {
  // Opposite spikes six steps apart: r_6 is strongly negative with T = 11 < 12.
  const std::vector<double> y{20, 20, 20, 30, 20, 20, 20, 20, 20, 10, 20};
  CHECK(seasonality_test(y, 6));
  Theta th(6);
  CHECK(code_of([&] { th.fit(series(y)); }) == ErrorCode::SeriesTooShort);
}

TEST_CASE("theta refuses multiplicative deseasonalization of non-positive data") {
  std::vector<double> y;
  for (int r = 0; r < 10; ++r) y.insert(y.end(), {-1.0, 5.0});
  Theta th(2);
  CHECK(code_of([&] { th.fit(series(y)); }) == ErrorCode::NonPositiveSeasonal);
}

TEST_CASE("FFT extends a sampled sine") {
  std::vector<double> y(64);
  for (std::size_t t = 0; t < 64; ++t) y[t] = std::sin(2 * std::numbers::pi * static_cast<double>(t) / 16);
  FFTModel fft(0, 1);
  const auto fc = forecast(fft, y, 16);
  for (std::size_t h = 0; h < 16; ++h)
    CHECK(std::abs(fc[h] - std::sin(2 * std::numbers::pi * static_cast<double>(64 + h) / 16)) < 1e-6);
}

TEST_CASE("FFT keeps the DC bin of a constant series") {
  FFTModel fft(0, 1);
  for (double v : forecast(fft, std::vector<double>(20, 4.0), 7)) CHECK(v == doctest::Approx(4.0).epsilon(1e-12));
}

TEST_CASE("FFT with a linear trend extends 2t + sin(2 pi t / 8)") {
  // The least-squares line absorbs part of the sine, so the error decays as
  // ~7/T; a long sample brings it under the 1e-3 target.
  const std::size_t T = 16384;
  auto f = [](double t) { return 2 * t + std::sin(2 * std::numbers::pi * t / 8); };
  std::vector<double> y(T);
  for (std::size_t t = 0; t < T; ++t) y[t] = f(static_cast<double>(t));
  FFTModel fft(1, 1);
  const auto fc = forecast(fft, y, 8);
  double worst = 0;
  for (std::size_t h = 0; h < 8; ++h) worst = std::max(worst, std::abs(fc[h] - f(static_cast<double>(T + h))));
  MESSAGE("max error " << worst);
  CHECK(worst < 1e-3);
}

TEST_CASE("FFT argument checks") {
  FFTModel fft(0, 6);
  CHECK(code_of([&] { fft.fit(series(std::vector<double>(8, 1))); }) == ErrorCode::KTooLarge);
  CHECK(code_of([&] { fft.fit(series(std::vector<double>(7, 1))); }) == ErrorCode::SeriesTooShort);
  CHECK(code_of([] { FFTModel bad(4, 1); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("ARIMA AR(1) matches the OLS regression estimate") {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> eps(0.0, 1.0);
  std::vector<double> y(500);
  y[0] = eps(rng);
  for (std::size_t t = 1; t < y.size(); ++t) y[t] = 0.8 * y[t - 1] + eps(rng);

  // OLS of y_t on (1, y_{t-1}).
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(y.size() - 1);
  for (std::size_t t = 1; t < y.size(); ++t) {
    sx += y[t - 1], sy += y[t], sxx += y[t - 1] * y[t - 1], sxy += y[t - 1] * y[t];
  }
  const double phi_ols = (sxy - sx * sy / n) / (sxx - sx * sx / n);

  ARIMA ar({1, 0, 0});
  ar.fit(series(y));
  CHECK(std::abs(ar.ar()[0] - phi_ols) < 0.1);

  ARIMA arma({1, 0, 1});
  arma.fit(series(y));
  CHECK(std::abs(arma.ar()[0] - phi_ols) < 0.1);
  CHECK(arma.css() <= arma.initial_css());
}

TEST_CASE("ARIMA random walk and double-difference cases") {
  ARIMA rw({0, 1, 0});
  for (double v : forecast(rw, {3, 1, 4, 1, 5, 9, 2, 6}, 5)) CHECK(v == 6.0);
  std::vector<double> line(12);
  for (std::size_t t = 0; t < line.size(); ++t) line[t] = 2.5 * static_cast<double>(t) - 4;
  ARIMA d2({0, 2, 0});
  const auto fc = forecast(d2, line, 6);
  for (std::size_t h = 0; h < 6; ++h) CHECK(fc[h] == doctest::Approx(2.5 * static_cast<double>(12 + h) - 4).epsilon(1e-12));
  CHECK(code_of([] { ARIMA bad({0, 0, 0}); }) == ErrorCode::InvalidArgument);
  ARIMA big({2, 1, 1});
  CHECK(code_of([&] { big.fit(series({1, 2, 3, 4, 5})); }) == ErrorCode::SeriesTooShort);
}

TEST_CASE("ARIMA CSS never exceeds its Yule-Walker starting point") {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> eps(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> y(120);
    double e_prev = 0;
    for (std::size_t t = 0; t < y.size(); ++t) {
      const double e = eps(rng);
      y[t] = (t ? 0.5 * y[t - 1] : 0.0) + e + 0.4 * e_prev;
      e_prev = e;
    }
    for (ARIMAOrder o : {ARIMAOrder{1, 0, 1}, ARIMAOrder{2, 0, 1}, ARIMAOrder{0, 0, 2}, ARIMAOrder{1, 1, 1}}) {
      ARIMA m(o);
      m.fit(series(y));
      CHECK(m.css() <= m.initial_css());
    }
  }
}

namespace {

std::vector<std::pair<std::string, ModelFactory>> local_factories() {
  return {
      {"naive", [] { return std::make_unique<NaiveSeasonal>(3); }},
      {"drift", [] { return std::make_unique<NaiveDrift>(); }},
      {"es", [] { return std::make_unique<ExponentialSmoothing>(ESConfig{TrendKind::Additive, SeasonalKind::Additive, 12}); }},
      {"theta", [] { return std::make_unique<Theta>(12); }},
      {"fft", [] { return std::make_unique<FFTModel>(1, 3); }},
      {"arima", [] { return std::make_unique<ARIMA>(ARIMAOrder{1, 1, 1}); }},
  };
}

}  // namespace

TEST_CASE("every local model satisfies the shared contract") {
  std::mt19937_64 rng(99);
  for (const auto& [label, make] : local_factories()) {
    harness::ContractStats stats;
    harness::run_contract(label, make, rng, 40, 30, stats);
    INFO(stats.first_failure);
    CHECK(stats.failures == 0);
  }
}

TEST_CASE("shift equivariance") {
  std::mt19937_64 rng(5);
  const std::vector<std::pair<std::string, ModelFactory>> models{
      {"naive", [] { return std::make_unique<NaiveSeasonal>(4); }},
      {"drift", [] { return std::make_unique<NaiveDrift>(); }},
      {"es", [] { return std::make_unique<ExponentialSmoothing>(ESConfig{TrendKind::Additive, SeasonalKind::Additive, 12}); }},
      {"arima", [] { return std::make_unique<ARIMA>(ARIMAOrder{1, 1, 0}); }},
      {"arima-d2", [] { return std::make_unique<ARIMA>(ARIMAOrder{0, 2, 0}); }},
  };
  for (int trial = 0; trial < 10; ++trial) {
    const auto s = harness::random_series(rng, 30);
    const double c = 37.25;
    for (const auto& [label, make] : models) {
      auto a = make(), b = make();
      a->fit(s);
      b->fit(s.map([c](double v) { return v + c; }));
      const auto fa = a->predict(12).component_values(), fb = b->predict(12).component_values();
      for (std::size_t h = 0; h < 12; ++h) CHECK_MESSAGE(std::abs(fb[h] - (fa[h] + c)) < 1e-8 * (1 + std::abs(fa[h])), label);
    }
  }
}

TEST_CASE("scale equivariance") {
  std::mt19937_64 rng(6);
  const std::vector<std::pair<std::string, ModelFactory>> models{
      {"naive", [] { return std::make_unique<NaiveSeasonal>(4); }},
      {"drift", [] { return std::make_unique<NaiveDrift>(); }},
      {"theta", [] { return std::make_unique<Theta>(12); }},
      {"fft", [] { return std::make_unique<FFTModel>(2, 3); }},
      {"es", [] { return std::make_unique<ExponentialSmoothing>(ESConfig{TrendKind::Additive, SeasonalKind::Multiplicative, 12}); }},
  };
  for (int trial = 0; trial < 10; ++trial) {
    const auto s = harness::random_series(rng, 30);
    const double lambda = 3.0;
    for (const auto& [label, make] : models) {
      auto a = make(), b = make();
      a->fit(s);
      b->fit(s.map([lambda](double v) { return v * lambda; }));
      const auto fa = a->predict(12).component_values(), fb = b->predict(12).component_values();
      for (std::size_t h = 0; h < 12; ++h)
        CHECK_MESSAGE(std::abs(fb[h] - lambda * fa[h]) <= 1e-8 * std::abs(lambda * fa[h]), label);
    }
  }
}
