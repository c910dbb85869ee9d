#include "tsf/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "tsf/error.hpp"

namespace tsf {

namespace {

constexpr double kReflect = 1.0;
constexpr double kExpand = 2.0;
constexpr double kContract = 0.5;
constexpr double kShrink = 0.5;

}  // namespace

NelderMeadResult nelder_mead(const Objective& f, std::vector<double> x0, const NelderMeadOptions& options) {
  const std::size_t n = x0.size();
  if (n == 0) fail(ErrorCode::InvalidArgument, "nelder_mead needs at least one parameter");

  auto project = [&](std::vector<double>& x) {
    for (std::size_t i = 0; i < n; ++i) {
      if (options.lower) x[i] = std::max(x[i], (*options.lower)[i]);
      if (options.upper) x[i] = std::min(x[i], (*options.upper)[i]);
    }
  };
  auto eval = [&](const std::vector<double>& x) {
    const double v = f(x);
    return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
  };

  project(x0);
  std::vector<std::vector<double>> simplex{x0};
  for (std::size_t i = 0; i < n; ++i) {
    auto v = x0;
    double step = options.initial_step;
    // Step away from an active upper bound.
    if (options.upper && v[i] + step > (*options.upper)[i]) step = -step;
    v[i] += step;
    project(v);
    simplex.push_back(std::move(v));
  }
  std::vector<double> fv(n + 1);
  for (std::size_t i = 0; i <= n; ++i) fv[i] = eval(simplex[i]);

  std::vector<std::size_t> order(n + 1);
  NelderMeadResult res;
  for (res.iterations = 0; res.iterations < options.max_iterations; ++res.iterations) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
    const std::size_t best = order.front(), worst = order.back(), second = order[n - 1];

    double x_spread = 0.0;
    for (std::size_t i = 0; i <= n; ++i)
      for (std::size_t j = 0; j < n; ++j) x_spread = std::max(x_spread, std::abs(simplex[i][j] - simplex[best][j]));
    const double f_spread = std::abs(fv[worst] - fv[best]);
    if ((std::isfinite(fv[worst]) && f_spread <= options.f_tolerance * std::abs(fv[best])) ||
        x_spread <= options.x_tolerance) {
      res.converged = true;
      break;
    }

    std::vector<double> centroid(n, 0.0);
    for (std::size_t i = 0; i <= n; ++i) {
      if (i == worst) continue;
      for (std::size_t j = 0; j < n; ++j) centroid[j] += simplex[i][j] / static_cast<double>(n);
    }
    auto along = [&](double coef) {
      std::vector<double> x(n);
      for (std::size_t j = 0; j < n; ++j) x[j] = centroid[j] + coef * (simplex[worst][j] - centroid[j]);
      project(x);
      return x;
    };

    auto xr = along(-kReflect);
    const double fr = eval(xr);
    if (fr < fv[best]) {
      auto xe = along(-kExpand);
      const double fe = eval(xe);
      if (fe < fr) {
        simplex[worst] = std::move(xe);
        fv[worst] = fe;
      } else {
        simplex[worst] = std::move(xr);
        fv[worst] = fr;
      }
      continue;
    }
    if (fr < fv[second]) {
      simplex[worst] = std::move(xr);
      fv[worst] = fr;
      continue;
    }
    const bool outside = fr < fv[worst];
    auto xc = along(outside ? -kContract : kContract);
    const double fc = eval(xc);
    if (fc < (outside ? fr : fv[worst])) {
      simplex[worst] = std::move(xc);
      fv[worst] = fc;
      continue;
    }
    for (std::size_t i = 0; i <= n; ++i) {
      if (i == best) continue;
      for (std::size_t j = 0; j < n; ++j) simplex[i][j] = simplex[best][j] + kShrink * (simplex[i][j] - simplex[best][j]);
      project(simplex[i]);
      fv[i] = eval(simplex[i]);
    }
  }
  const auto best = static_cast<std::size_t>(std::min_element(fv.begin(), fv.end()) - fv.begin());
  res.x = simplex[best];
  res.value = fv[best];
  return res;
}

NelderMeadResult nelder_mead_multistart(const Objective& f, const std::vector<std::vector<double>>& starts,
                                        const NelderMeadOptions& options) {
  if (starts.empty()) fail(ErrorCode::InvalidArgument, "no start points given");
  NelderMeadResult best;
  best.value = std::numeric_limits<double>::infinity();
  bool have = false;
  for (const auto& s : starts) {
    auto r = nelder_mead(f, s, options);
    if (!have || r.value < best.value) {
      best = std::move(r);
      have = true;
    }
  }
  return best;
}

std::vector<std::vector<double>> grid_corners(const std::vector<double>& values, std::size_t dim) {
  std::vector<std::vector<double>> out{{}};
  for (std::size_t d = 0; d < dim; ++d) {
    std::vector<std::vector<double>> next;
    for (const auto& prefix : out)
      for (double v : values) {
        auto p = prefix;
        p.push_back(v);
        next.push_back(std::move(p));
      }
    out = std::move(next);
  }
  return out;
}

}  // namespace tsf
