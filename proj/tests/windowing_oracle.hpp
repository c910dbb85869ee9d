#pragma once

// Brute-force reference for training-sample slicing. Walks every candidate
// origin and looks covariate rows up by timestamp scan; shares no code with
// the windowing implementation beyond the container.

#include <cstddef>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "tsf/error.hpp"
#include "tsf/windowing.hpp"

namespace oracle {

struct BruteSample {
  std::size_t series = 0;
  std::size_t position = 0;
  std::vector<double> past_target, future_target, past_cov, future_cov;
};

struct BruteResult {
  bool covered = true;
  std::size_t failing_series = 0;
  std::string failing_side;
  std::vector<BruteSample> samples;
};

inline std::optional<double> lookup(const tsf::TimeSeries& s, tsf::TimeStamp t) {
  for (std::size_t i = 0; i < s.length(); ++i)
    if (s.index().at(static_cast<std::int64_t>(i)) == t) return s.at(i);
  return std::nullopt;
}

inline BruteResult enumerate(const std::vector<tsf::TimeSeries>& targets,
                             const std::optional<std::vector<tsf::TimeSeries>>& past,
                             const std::optional<std::vector<tsf::TimeSeries>>& future, std::size_t L_in,
                             std::size_t L_out, std::size_t stride, std::optional<std::size_t> cap) {
  BruteResult res;
  for (std::size_t si = 0; si < targets.size(); ++si) {
    const auto& y = targets[si];
    const std::size_t T = y.length();
    std::vector<std::size_t> origins;
    for (std::size_t p = T; p-- > 0;) {
      if (p < L_in || p + L_out > T) continue;
      if ((T - L_out - p) % stride != 0) continue;
      origins.push_back(p);
    }
    if (cap && origins.size() > *cap) origins.resize(*cap);
    std::vector<BruteSample> local;
    bool past_bad = false, future_bad = false;
    for (std::size_t p : origins) {
      BruteSample b{si, p, {}, {}, {}, {}};
      for (std::size_t t = p - L_in; t < p; ++t) {
        b.past_target.push_back(y.at(t));
        if (past) {
          auto v = lookup((*past)[si], y.index().at(static_cast<std::int64_t>(t)));
          if (!v) past_bad = true;
          else b.past_cov.push_back(*v);
        }
      }
      for (std::size_t t = p; t < p + L_out; ++t) {
        b.future_target.push_back(y.at(t));
        if (future) {
          auto v = lookup((*future)[si], y.index().at(static_cast<std::int64_t>(t)));
          if (!v) future_bad = true;
          else b.future_cov.push_back(*v);
        }
      }
      local.push_back(std::move(b));
    }
    if (past_bad || future_bad) {
      res.covered = false;
      res.failing_series = si;
      res.failing_side = past_bad ? "past" : "future";
      return res;
    }
    res.samples.insert(res.samples.end(), local.begin(), local.end());
  }
  return res;
}

struct CheckStats {
  int instances = 0;
  int mismatches = 0;
  int error_cases = 0;
  int success_cases = 0;
  std::string first_mismatch;
};

inline std::vector<double> values_of(const tsf::TimeSeries& s) { return {s.values().begin(), s.values().end()}; }

/// Randomized (T, L_in, L_out, stride, covariate span) instances compared
/// against the enumerator above.
inline CheckStats run_randomized_windowing_checks(std::mt19937_64& rng, int instances) {
  using namespace tsf;
  CheckStats stats;
  auto uni = [&](int lo, int hi) { return static_cast<int>(lo + static_cast<int>(rng() % static_cast<unsigned>(hi - lo + 1))); };
  const auto base = std::chrono::year{2000} / 1 / 1;
  const auto grid = TimeIndex::dates(base, TimeStep::months(1), 1);
  auto make = [&](int start_offset, int length, double tag) {
    const auto idx = grid.sub(start_offset, static_cast<std::size_t>(length));
    std::vector<double> v(static_cast<std::size_t>(length));
    for (int i = 0; i < length; ++i) v[static_cast<std::size_t>(i)] = tag + static_cast<double>(idx.at(i).value);
    return TimeSeries::univariate(idx, v);
  };

  for (int inst = 0; inst < instances; ++inst) {
    const std::size_t L_in = static_cast<std::size_t>(uni(1, 10));
    const std::size_t L_out = static_cast<std::size_t>(uni(1, 6));
    const std::size_t stride = static_cast<std::size_t>(uni(1, 4));
    const std::optional<std::size_t> cap =
        uni(0, 3) == 0 ? std::optional<std::size_t>(static_cast<std::size_t>(uni(1, 5))) : std::nullopt;
    const int n_series = uni(1, 3);
    const bool use_past = uni(0, 1) == 1, use_future = uni(0, 1) == 1;
    std::vector<TimeSeries> targets;
    std::vector<TimeSeries> past, future;
    for (int s = 0; s < n_series; ++s) {
      const int T = uni(static_cast<int>(L_in + L_out), 40);
      const int start = uni(-24, 24);
      targets.push_back(make(start, T, 0.0));
      // Covariate spans straddle the target span; some fall short on purpose.
      const int ps = start + uni(-8, 2), pe = start + T + uni(-3, 8);
      past.push_back(make(ps, std::max(1, pe - ps), 0.5));
      const int fs = start + uni(-4, 3), fe = start + T + uni(-3, 8);
      future.push_back(make(fs, std::max(1, fe - fs), 0.25));
    }
    const std::optional<std::vector<TimeSeries>> pc = use_past ? std::optional(past) : std::nullopt;
    const std::optional<std::vector<TimeSeries>> fc = use_future ? std::optional(future) : std::nullopt;

    ++stats.instances;
    const auto expected = enumerate(targets, pc, fc, L_in, L_out, stride, cap);
    const auto mismatch = [&](const std::string& why) {
      ++stats.mismatches;
      if (stats.first_mismatch.empty()) stats.first_mismatch = "instance " + std::to_string(inst) + ": " + why;
    };
    try {
      const auto seq = build_samples(targets, pc, fc, {L_in, L_out, stride, cap});
      if (!expected.covered) {
        mismatch("expected a coverage error");
        continue;
      }
      ++stats.success_cases;
      if (seq.size() != expected.samples.size()) {
        mismatch("sample count " + std::to_string(seq.size()) + " vs " + std::to_string(expected.samples.size()));
        continue;
      }
      for (std::size_t i = 0; i < seq.size(); ++i) {
        const auto got = seq[i];
        const auto& want = expected.samples[i];
        bool ok = got.origin.series == want.series && got.origin.position == want.position &&
                  values_of(got.past_target) == want.past_target && values_of(got.future_target) == want.future_target;
        if (use_past) ok = ok && values_of(*got.past_covariates) == want.past_cov;
        if (use_future) ok = ok && values_of(*got.future_covariates) == want.future_cov;
        if (!ok) {
          mismatch("sample " + std::to_string(i) + " differs");
          break;
        }
      }
    } catch (const Error& e) {
      const std::string msg = e.what();
      if (expected.covered) {
        mismatch(std::string("unexpected error: ") + msg);
        continue;
      }
      ++stats.error_cases;
      const bool names_it = e.code() == ErrorCode::CovariateCoverageError &&
                            msg.rfind(expected.failing_side, 0) == 0 &&
                            msg.find("series " + std::to_string(expected.failing_series)) != std::string::npos;
      if (!names_it) mismatch("wrong error: " + msg);
    }
  }
  return stats;
}

}  // namespace oracle
