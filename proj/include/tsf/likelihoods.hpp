#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace tsf {

enum class LikelihoodKind { Gaussian, Laplace, EmpiricalQuantile };

std::string to_string(LikelihoodKind kind);
LikelihoodKind likelihood_from_string(const std::string& name);

/// Noise distribution per output coordinate, fitted to a point model's
/// residuals. Default-constructed instances are unfitted.
class Likelihood {
 public:
  Likelihood() = default;

  bool fitted() const { return fitted_; }
  LikelihoodKind kind() const { return kind_; }
  std::size_t coordinates() const { return scale_.size(); }
  /// sigma (Gaussian), b (Laplace); empty pools are never stored.
  const std::vector<double>& scale() const { return scale_; }
  const std::vector<std::vector<double>>& pools() const { return pools_; }
  /// Columns whose scale hit the 1e-12 floor.
  const std::vector<std::size_t>& degenerate_columns() const { return degenerate_; }

  /// One noise draw for coordinate j.
  double draw(std::size_t j, std::mt19937_64& rng) const;

  /// `point` holds one value per coordinate (time-major, components inner).
  /// Returns coordinates * S values, samples innermost. S = 1 returns the
  /// point forecast unchanged.
  std::vector<double> sample(std::span<const double> point, std::size_t num_samples, std::uint64_t seed) const;

  /// Sum over coordinates of the negative log density of observed - forecast.
  double nll(std::span<const double> observed, std::span<const double> forecast) const;

  static Likelihood from_parameters(LikelihoodKind kind, std::vector<double> scale,
                                    std::vector<std::vector<double>> pools);

 private:
  friend Likelihood fit_residuals(LikelihoodKind, const Eigen::MatrixXd&);
  void require_fitted() const;

  bool fitted_ = false;
  LikelihoodKind kind_ = LikelihoodKind::Gaussian;
  std::vector<double> scale_;
  std::vector<std::vector<double>> pools_;
  std::vector<std::size_t> degenerate_;
};

inline constexpr double kScaleFloor = 1e-12;

/// Rows are training samples, columns output coordinates. Needs >= 2 rows.
Likelihood fit_residuals(LikelihoodKind kind, const Eigen::MatrixXd& residuals);

}  // namespace tsf
