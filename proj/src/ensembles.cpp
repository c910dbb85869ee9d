#include "tsf/ensembles.hpp"

#include <algorithm>
#include <cmath>

#include "tsf/error.hpp"

namespace tsf {

std::vector<double> nnls(const std::vector<double>& A, std::size_t cols, const std::vector<double>& b, double tol,
                         std::size_t max_sweeps) {
  if (cols == 0 || A.size() != b.size() * cols)
    fail(ErrorCode::ShapeMismatch, "nnls: design matrix does not match the target length");
  const std::size_t rows = b.size();
  std::vector<double> G(cols * cols, 0.0), c(cols, 0.0);
  for (std::size_t r = 0; r < rows; ++r) {
    const double* a = &A[r * cols];
    for (std::size_t i = 0; i < cols; ++i) {
      c[i] += a[i] * b[r];
      for (std::size_t j = 0; j < cols; ++j) G[i * cols + j] += a[i] * a[j];
    }
  }
  std::vector<double> w(cols, 0.0);
  for (std::size_t sweep = 0; sweep < max_sweeps; ++sweep) {
    double moved = 0.0;
    for (std::size_t i = 0; i < cols; ++i) {
      const double gii = G[i * cols + i];
      if (gii <= 0.0) {  // all-zero column: contributes nothing
        w[i] = 0.0;
        continue;
      }
      double grad = -c[i];
      for (std::size_t j = 0; j < cols; ++j) grad += G[i * cols + j] * w[j];
      const double next = std::max(0.0, w[i] - grad / gii);
      moved = std::max(moved, std::abs(next - w[i]));
      w[i] = next;
    }
    if (moved <= tol) break;
  }
  return w;
}

Ensemble::Ensemble(EnsembleSpec spec) : spec_(std::move(spec)) {
  if (spec_.members.size() < 2)
    fail(ErrorCode::InvalidArgument, "an ensemble needs at least two members, got " + std::to_string(spec_.members.size()));
  if (spec_.mode == EnsembleMode::Learned && !(spec_.rho > 0.0 && spec_.rho < 1.0))
    fail(ErrorCode::InvalidArgument, "ensemble rho must lie in (0,1)");
  for (const auto& make : make_members()) {
    member_names_.push_back(make->name());
    multivariate_ = multivariate_ && make->supports_multivariate();
    covariates_ = covariates_ && make->supports_covariates();
    history_ = history_ && make->supports_history();
    min_length_ = std::max(min_length_, make->min_train_length());
  }
}

std::string Ensemble::name() const {
  std::string out = spec_.mode == EnsembleMode::Learned ? "LearnedEnsemble(" : "MeanEnsemble(";
  for (std::size_t i = 0; i < member_names_.size(); ++i) out += (i ? "," : "") + member_names_[i];
  return out + ")";
}

std::vector<std::unique_ptr<ForecastingModel>> Ensemble::make_members() const {
  std::vector<std::unique_ptr<ForecastingModel>> out;
  for (std::size_t i = 0; i < spec_.members.size(); ++i) {
    auto m = spec_.members[i] ? spec_.members[i]() : nullptr;
    if (!m) fail(ErrorCode::InvalidArgument, "ensemble member " + std::to_string(i) + " factory produced no model");
    out.push_back(std::move(m));
  }
  return out;
}

namespace {

template <class F>
auto guarded(std::size_t i, const std::string& name, F&& f) {
  try {
    return f();
  } catch (const Error& e) {
    fail(ErrorCode::MemberFailure, "member " + std::to_string(i) + " (" + name + ") failed: " +
                                       std::string(to_string(e.code())) + ": " + e.what());
  }
}

}  // namespace

void Ensemble::do_fit(const TimeSeries& series, const Covariates& covariates) {
  auto members = make_members();
  std::vector<double> weights(members.size(), 1.0 / static_cast<double>(members.size()));

  if (spec_.mode == EnsembleMode::Learned) {
    auto [left, right] = series.split_after(Fraction{spec_.rho});
    std::size_t need = 1;
    for (const auto& m : members) need = std::max(need, m->min_train_length());
    if (left.length() < need || right.length() < need)
      fail(ErrorCode::DegenerateSplit, "ensemble split at " + std::to_string(spec_.rho) + " gives sides of " +
                                           std::to_string(left.length()) + " and " + std::to_string(right.length()) +
                                           " points; members need " + std::to_string(need));
    const std::size_t M = members.size(), H = right.length();
    const auto actual = right.component_values();
    std::vector<double> A(actual.size() * M);
    for (std::size_t i = 0; i < M; ++i) {
      const auto f = guarded(i, members[i]->name(), [&] {
        members[i]->fit(left, covariates);
        return members[i]->predict(H, covariates).component_values();
      });
      for (std::size_t r = 0; r < f.size(); ++r) A[r * M + i] = f[r];
    }
    weights = nnls(A, M, actual);
    for (double w : weights)
      if (!std::isfinite(w)) fail(ErrorCode::MemberFailure, "ensemble weights are not finite");
  }

  for (std::size_t i = 0; i < members.size(); ++i)
    guarded(i, members[i]->name(), [&] {
      members[i]->fit(series, covariates);
      return 0;
    });
  members_ = std::move(members);
  weights_ = std::move(weights);
}

std::vector<double> Ensemble::combine(const std::vector<TimeSeries>& forecasts) const {
  std::vector<double> out;
  for (std::size_t i = 0; i < forecasts.size(); ++i) {
    const auto f = forecasts[i].component_values();
    if (out.empty()) out.assign(f.size(), 0.0);
    if (spec_.mode == EnsembleMode::NaiveMean) {
      for (std::size_t r = 0; r < f.size(); ++r) out[r] += f[r];
    } else {
      for (std::size_t r = 0; r < f.size(); ++r) out[r] += weights_[i] * f[r];
    }
  }
  // Mean as sum / M so the result does not depend on member order beyond rounding of the sum.
  if (spec_.mode == EnsembleMode::NaiveMean)
    for (double& v : out) v /= static_cast<double>(forecasts.size());
  return out;
}

std::vector<double> Ensemble::do_predict(std::size_t n, const Covariates& covariates) const {
  std::vector<TimeSeries> forecasts;
  for (std::size_t i = 0; i < members_.size(); ++i)
    forecasts.push_back(guarded(i, members_[i]->name(), [&] { return members_[i]->predict(n, covariates); }));
  return combine(forecasts);
}

std::vector<double> Ensemble::do_predict_from(const TimeSeries& history, std::size_t n,
                                              const Covariates& covariates) const {
  std::vector<TimeSeries> forecasts;
  for (std::size_t i = 0; i < members_.size(); ++i)
    forecasts.push_back(
        guarded(i, members_[i]->name(), [&] { return members_[i]->predict_from(history, n, covariates); }));
  return combine(forecasts);
}

}  // namespace tsf
