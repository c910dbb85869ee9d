#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace tsf {

struct NelderMeadOptions {
  double initial_step = 0.1;
  double f_tolerance = 1e-12;
  double x_tolerance = 1e-10;
  int max_iterations = 5000;
  /// Optional box; vertices are projected onto it.
  std::optional<std::vector<double>> lower;
  std::optional<std::vector<double>> upper;
};

struct NelderMeadResult {
  std::vector<double> x;
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
};

using Objective = std::function<double(std::span<const double>)>;

/// Derivative-free simplex minimization. The returned value never exceeds
/// f(x0) since the start point is a simplex vertex. Non-finite objective
/// values are treated as +infinity.
NelderMeadResult nelder_mead(const Objective& f, std::vector<double> x0, const NelderMeadOptions& options = {});

/// Runs `nelder_mead` from each start and keeps the best result (earliest on ties).
NelderMeadResult nelder_mead_multistart(const Objective& f, const std::vector<std::vector<double>>& starts,
                                        const NelderMeadOptions& options = {});

/// Cartesian product {values}^dim, in lexicographic order.
std::vector<std::vector<double>> grid_corners(const std::vector<double>& values, std::size_t dim);

}  // namespace tsf
