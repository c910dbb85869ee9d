#include "tsf/likelihoods.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "tsf/error.hpp"

namespace tsf {

std::string to_string(LikelihoodKind kind) {
  switch (kind) {
    case LikelihoodKind::Gaussian: return "gaussian";
    case LikelihoodKind::Laplace: return "laplace";
    case LikelihoodKind::EmpiricalQuantile: return "empirical_quantile";
  }
  return "?";
}

LikelihoodKind likelihood_from_string(const std::string& name) {
  if (name == "gaussian") return LikelihoodKind::Gaussian;
  if (name == "laplace") return LikelihoodKind::Laplace;
  if (name == "empirical_quantile") return LikelihoodKind::EmpiricalQuantile;
  fail(ErrorCode::InvalidArgument, "unknown likelihood '" + name + "' (expected gaussian, laplace or empirical_quantile)");
}

Likelihood fit_residuals(LikelihoodKind kind, const Eigen::MatrixXd& residuals) {
  const auto rows = residuals.rows();
  if (rows < 2)
    fail(ErrorCode::TooFewResiduals, "need at least 2 residual rows to fit a likelihood, got " + std::to_string(rows));
  Likelihood l;
  l.kind_ = kind;
  for (Eigen::Index j = 0; j < residuals.cols(); ++j) {
    const auto col = residuals.col(j);
    if (kind == LikelihoodKind::EmpiricalQuantile) {
      std::vector<double> pool(col.data(), col.data() + rows);
      std::sort(pool.begin(), pool.end());
      l.pools_.push_back(std::move(pool));
      l.scale_.push_back(0.0);
      continue;
    }
    double s = 0.0;
    if (kind == LikelihoodKind::Gaussian) {
      const double mu = col.mean();
      s = std::sqrt((col.array() - mu).square().sum() / static_cast<double>(rows - 1));
    } else {
      s = col.cwiseAbs().mean();
    }
    if (!(s > kScaleFloor)) {
      s = kScaleFloor;
      l.degenerate_.push_back(static_cast<std::size_t>(j));
    }
    l.scale_.push_back(s);
  }
  if (!l.degenerate_.empty())
    warn(std::to_string(l.degenerate_.size()) + " residual column(s) have zero spread; scale floored at 1e-12");
  l.fitted_ = true;
  return l;
}

Likelihood Likelihood::from_parameters(LikelihoodKind kind, std::vector<double> scale,
                                       std::vector<std::vector<double>> pools) {
  Likelihood l;
  l.kind_ = kind;
  l.scale_ = std::move(scale);
  l.pools_ = std::move(pools);
  if (kind == LikelihoodKind::EmpiricalQuantile) {
    if (l.pools_.size() != l.scale_.size())
      fail(ErrorCode::InvalidArgument, "empirical likelihood needs one residual pool per coordinate");
    for (const auto& p : l.pools_)
      if (p.empty()) fail(ErrorCode::InvalidArgument, "empty residual pool");
  } else {
    for (std::size_t j = 0; j < l.scale_.size(); ++j) {
      if (!(l.scale_[j] > 0.0)) fail(ErrorCode::InvalidArgument, "likelihood scale must be positive");
      if (l.scale_[j] <= kScaleFloor) l.degenerate_.push_back(j);
    }
  }
  l.fitted_ = true;
  return l;
}

void Likelihood::require_fitted() const {
  if (!fitted_) fail(ErrorCode::NotFitted, "likelihood is not fitted");
}

double Likelihood::draw(std::size_t j, std::mt19937_64& rng) const {
  switch (kind_) {
    case LikelihoodKind::Gaussian: return std::normal_distribution<double>(0.0, scale_[j])(rng);
    case LikelihoodKind::Laplace: {
      // Inverse CDF: u in (-1/2, 1/2) -> -b sgn(u) ln(1 - 2|u|).
      std::uniform_real_distribution<double> unif(-0.5, 0.5);
      double u = unif(rng);
      while (u == -0.5) u = unif(rng);
      return -scale_[j] * std::copysign(1.0, u) * std::log1p(-2.0 * std::abs(u));
    }
    case LikelihoodKind::EmpiricalQuantile: {
      const auto& pool = pools_[j];
      return pool[std::uniform_int_distribution<std::size_t>(0, pool.size() - 1)(rng)];
    }
  }
  return 0.0;
}

std::vector<double> Likelihood::sample(std::span<const double> point, std::size_t num_samples,
                                       std::uint64_t seed) const {
  require_fitted();
  if (num_samples == 0) fail(ErrorCode::InvalidArgument, "num_samples must be >= 1");
  if (point.size() != coordinates())
    fail(ErrorCode::ShapeMismatch, "point block has " + std::to_string(point.size()) + " coordinates, likelihood has " +
                                       std::to_string(coordinates()));
  if (num_samples == 1) return {point.begin(), point.end()};
  std::mt19937_64 rng(seed);
  std::vector<double> out(point.size() * num_samples);
  for (std::size_t j = 0; j < point.size(); ++j)
    for (std::size_t s = 0; s < num_samples; ++s) out[j * num_samples + s] = point[j] + draw(j, rng);
  return out;
}

double Likelihood::nll(std::span<const double> observed, std::span<const double> forecast) const {
  require_fitted();
  if (observed.size() != forecast.size() || observed.size() != coordinates())
    fail(ErrorCode::ShapeMismatch, "nll needs observed and forecast blocks of " + std::to_string(coordinates()) +
                                       " coordinates; got " + std::to_string(observed.size()) + " and " +
                                       std::to_string(forecast.size()));
  double total = 0.0;
  for (std::size_t j = 0; j < observed.size(); ++j) {
    const double r = observed[j] - forecast[j];
    const double s = scale_[j];
    switch (kind_) {
      case LikelihoodKind::Gaussian: total += 0.5 * std::log(2.0 * std::numbers::pi * s * s) + r * r / (2.0 * s * s); break;
      case LikelihoodKind::Laplace: total += std::log(2.0 * s) + std::abs(r) / s; break;
      case LikelihoodKind::EmpiricalQuantile: fail(ErrorCode::Unsupported, "nll is not defined for the empirical likelihood");
    }
  }
  return total;
}

}  // namespace tsf
