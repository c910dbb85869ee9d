#include "tsf/filters.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <random>

#include "tsf/error.hpp"
#include "tsf/optimize.hpp"

namespace tsf {

namespace {

void check_dimensions(const KalmanSpec& s, Eigen::Index c) {
  const auto k = s.F.rows();
  auto bad = [](const std::string& what) { fail(ErrorCode::DimensionMismatch, "Kalman spec: " + what); };
  if (k == 0 || s.F.cols() != k) bad("F must be square and non-empty");
  if (s.H.cols() != k) bad("H must have " + std::to_string(k) + " columns");
  if (s.H.rows() != c) bad("H has " + std::to_string(s.H.rows()) + " rows but the series has " + std::to_string(c) + " components");
  if (s.Q.rows() != k || s.Q.cols() != k) bad("Q must be " + std::to_string(k) + "x" + std::to_string(k));
  if (s.R.rows() != c || s.R.cols() != c) bad("R must be " + std::to_string(c) + "x" + std::to_string(c));
  if (s.m0.size() != k) bad("m0 must have length " + std::to_string(k));
  if (s.P0.rows() != k || s.P0.cols() != k) bad("P0 must be " + std::to_string(k) + "x" + std::to_string(k));
}

void symmetrize_and_check(Eigen::MatrixXd& P) {
  P = (0.5 * (P + P.transpose())).eval();  // eval: transpose aliases P
  const double min_eig = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(P, Eigen::EigenvaluesOnly).eigenvalues().minCoeff();
  if (min_eig < -1e-9 * std::max(1.0, P.cwiseAbs().maxCoeff()))
    fail(ErrorCode::NotInvertible, "state covariance lost positive semidefiniteness (min eigenvalue " +
                                       std::to_string(min_eig) + ")");
}

Eigen::MatrixXd as_matrix(const TimeSeries& s) {
  Eigen::MatrixXd y(static_cast<Eigen::Index>(s.length()), static_cast<Eigen::Index>(s.n_components()));
  for (std::size_t t = 0; t < s.length(); ++t)
    for (std::size_t c = 0; c < s.n_components(); ++c) y(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(c)) = s.at(t, c);
  return y;
}

}  // namespace

KalmanSpec KalmanSpec::local_level(double q, double r, double m0, double p0) {
  KalmanSpec s;
  s.F = Eigen::MatrixXd::Identity(1, 1);
  s.H = Eigen::MatrixXd::Identity(1, 1);
  s.Q = Eigen::MatrixXd::Constant(1, 1, q);
  s.R = Eigen::MatrixXd::Constant(1, 1, r);
  s.m0 = Eigen::VectorXd::Constant(1, m0);
  s.P0 = Eigen::MatrixXd::Constant(1, 1, p0);
  return s;
}

KalmanResult kalman_run(const KalmanSpec& spec, const Eigen::MatrixXd& y) {
  check_dimensions(spec, y.cols());
  const auto k = spec.F.rows();
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(k, k);
  KalmanResult out;
  Eigen::VectorXd m = spec.m0;
  Eigen::MatrixXd P = spec.P0;
  for (Eigen::Index t = 0; t < y.rows(); ++t) {
    if (t > 0) {
      m = spec.F * m;
      P = spec.F * P * spec.F.transpose() + spec.Q;
      symmetrize_and_check(P);
    }
    const Eigen::VectorXd v = y.row(t).transpose() - spec.H * m;
    const Eigen::MatrixXd S = spec.H * P * spec.H.transpose() + spec.R;
    const Eigen::LLT<Eigen::MatrixXd> llt(S);
    if (llt.info() != Eigen::Success)
      fail(ErrorCode::NonInvertibleInnovation, "innovation covariance is not positive definite at step " + std::to_string(t));
    const Eigen::MatrixXd K = llt.solve(spec.H * P).transpose();  // P H^T S^{-1}, with P and S symmetric
    out.log_likelihood -= 0.5 * (static_cast<double>(v.size()) * std::log(2.0 * std::numbers::pi) +
                                 2.0 * Eigen::MatrixXd(llt.matrixL()).diagonal().array().log().sum() + v.dot(llt.solve(v)));
    m = m + K * v;
    // Joseph form: same value as (I - KH) P, but without the cancellation
    // that destroys precision when P is huge relative to R.
    const Eigen::MatrixXd A = I - K * spec.H;
    P = A * P * A.transpose() + K * spec.R * K.transpose();
    symmetrize_and_check(P);
    out.means.push_back(m);
    out.covariances.push_back(P);
  }
  return out;
}

TimeSeries kalman_filter(const KalmanSpec& spec, const TimeSeries& series, std::size_t num_samples, std::uint64_t seed) {
  if (!series.is_deterministic()) fail(ErrorCode::InvalidArgument, "Kalman filter input must be deterministic");
  if (series.has_nan()) fail(ErrorCode::NaNInput, "Kalman filter input contains NaN");
  if (num_samples == 0) fail(ErrorCode::InvalidArgument, "num_samples must be >= 1");
  const auto run = kalman_run(spec, as_matrix(series));
  const std::size_t T = series.length(), C = series.n_components(), S = num_samples;
  std::vector<double> values(T * C * S);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> z(0.0, 1.0);
  for (std::size_t t = 0; t < T; ++t) {
    const Eigen::VectorXd mean = spec.H * run.means[t];
    if (S == 1) {
      for (std::size_t c = 0; c < C; ++c) values[t * C + c] = mean(static_cast<Eigen::Index>(c));
      continue;
    }
    // H P H^T is only PSD; factor it through its eigen-decomposition.
    const Eigen::MatrixXd cov = spec.H * run.covariances[t] * spec.H.transpose();
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (cov + cov.transpose()));
    const Eigen::MatrixXd root = eig.eigenvectors() * eig.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
    Eigen::VectorXd e(static_cast<Eigen::Index>(C));
    for (std::size_t s = 0; s < S; ++s) {
      for (auto& v : e) v = z(rng);
      const Eigen::VectorXd draw = mean + root * e;
      for (std::size_t c = 0; c < C; ++c) values[(t * C + c) * S + s] = draw(static_cast<Eigen::Index>(c));
    }
  }
  return TimeSeries::build(series.index(), std::move(values), C, S, series.component_names());
}

KalmanSpec local_level_fit(const TimeSeries& series) {
  if (series.n_components() != 1 || !series.is_deterministic())
    fail(ErrorCode::UnsupportedMultivariate, "local_level_fit needs a deterministic univariate series");
  if (series.has_nan()) fail(ErrorCode::NaNInput, "local_level_fit input contains NaN");
  if (series.length() < 10)
    fail(ErrorCode::SeriesTooShort, "local_level_fit needs at least 10 points, got " + std::to_string(series.length()));
  const auto y = series.component_values();
  const auto var = [](const std::vector<double>& v) {
    double mu = 0, s = 0;
    for (double x : v) mu += x / static_cast<double>(v.size());
    for (double x : v) s += (x - mu) * (x - mu);
    return s / static_cast<double>(v.size() - 1);
  };
  std::vector<double> d(y.size() - 1);
  for (std::size_t t = 0; t + 1 < y.size(); ++t) d[t] = y[t + 1] - y[t];
  const double p0 = std::max(var(y), 1e-12);
  const double start = std::log(std::max(var(d) / 2.0, 1e-12));
  const Eigen::MatrixXd obs = as_matrix(series);

  const auto negll = [&](std::span<const double> x) {
    try {
      return -kalman_run(KalmanSpec::local_level(std::exp(x[0]), std::exp(x[1]), y[0], p0), obs).log_likelihood;
    } catch (const Error&) {
      return std::numeric_limits<double>::infinity();
    }
  };
  NelderMeadOptions opts;
  opts.initial_step = 1.0;
  opts.lower = std::vector<double>{-30.0, -30.0};
  opts.upper = std::vector<double>{30.0, 30.0};
  const auto best = nelder_mead(negll, {start, start}, opts);
  return KalmanSpec::local_level(std::exp(best.x[0]), std::exp(best.x[1]), y[0], p0);
}

TimeSeries moving_average_filter(const TimeSeries& series, std::size_t window) {
  const std::size_t T = series.length();
  if (window == 0 || window % 2 == 0)
    fail(ErrorCode::BadWindow, "moving average window must be odd and positive, got " + std::to_string(window));
  if (window > T)
    fail(ErrorCode::BadWindow, "moving average window " + std::to_string(window) + " exceeds series length " + std::to_string(T));
  const std::size_t half = window / 2;
  const std::size_t C = series.n_components(), S = series.n_samples();
  std::vector<double> out(T * C * S);
  for (std::size_t t = 0; t < T; ++t) {
    const std::size_t lo = t >= half ? t - half : 0, hi = std::min(T - 1, t + half);
    for (std::size_t c = 0; c < C; ++c)
      for (std::size_t s = 0; s < S; ++s) {
        double sum = 0;
        for (std::size_t j = lo; j <= hi; ++j) sum += series.at(j, c, s);
        out[(t * C + c) * S + s] = sum / static_cast<double>(hi - lo + 1);
      }
  }
  return TimeSeries::like(series, series.index(), std::move(out));
}

}  // namespace tsf
