#pragma once

#include <cstdint>

#include <Eigen/Core>

#include "tsf/timeseries.hpp"

namespace tsf {

/// Linear-Gaussian state space model. (m0, P0) is the prior on the state at
/// the first observation, so the first step is an update without a predict.
struct KalmanSpec {
  Eigen::MatrixXd F;   // k x k transition
  Eigen::MatrixXd H;   // c x k observation
  Eigen::MatrixXd Q;   // k x k process noise
  Eigen::MatrixXd R;   // c x c observation noise
  Eigen::VectorXd m0;  // k
  Eigen::MatrixXd P0;  // k x k

  static KalmanSpec local_level(double q, double r, double m0, double p0);
};

struct KalmanResult {
  std::vector<Eigen::VectorXd> means;        // filtered state means
  std::vector<Eigen::MatrixXd> covariances;  // filtered state covariances
  double log_likelihood = 0.0;               // innovation-form Gaussian log-likelihood
};

/// Runs the predict/update recursion over the rows of `y` (T x c).
KalmanResult kalman_run(const KalmanSpec& spec, const Eigen::MatrixXd& y);

/// Filtered observation means H m_t (S = 1) or S draws per step from
/// N(H m_t, H P_t H^T).
TimeSeries kalman_filter(const KalmanSpec& spec, const TimeSeries& series, std::size_t num_samples = 1,
                         std::uint64_t seed = 0);

/// Local-level model with (Q, R) fitted by maximum likelihood.
KalmanSpec local_level_fit(const TimeSeries& series);

/// Centered moving average of odd width w; near the ends the window is cut
/// to the points that exist.
TimeSeries moving_average_filter(const TimeSeries& series, std::size_t window);

}  // namespace tsf
