#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "tsf/evaluation.hpp"
#include "tsf/forecasting_model.hpp"
#include "tsf/transforms.hpp"

namespace tsfcli {

/// User-facing failure: `code` is one of E_CONFIG, E_DATA, E_MODEL, E_IO, E_USAGE.
struct CliError : std::runtime_error {
  CliError(std::string c, const std::string& message) : std::runtime_error(message), code(std::move(c)) {}
  std::string code;
};

enum class Action { Forecast, Backtest, GridSearch };

struct DataSource {
  std::string name;
  std::optional<std::filesystem::path> csv;  // bundled dataset when empty
};

struct RunConfig {
  std::vector<DataSource> data;
  std::size_t target = 0;  // index into data
  std::optional<tsf::TransformerKind> scaler;
  nlohmann::ordered_json model;
  Action action = Action::Forecast;

  // forecast
  std::size_t n = 1;
  std::size_t num_samples = 1;
  std::uint64_t seed = 0;
  double q_low = 0.1, q_high = 0.9;

  // backtest / gridsearch
  tsf::BacktestPlan plan;
  tsf::Metric metric;
  tsf::Reduction reduction = tsf::Reduction::Mean;
  std::vector<tsf::GridAxis> grid;

  std::filesystem::path output_dir = ".";
  std::string prefix;
};

/// Validates the whole document; unknown keys are rejected by their dotted path.
/// Relative CSV paths resolve against `base_dir`.
RunConfig parse_config(const nlohmann::ordered_json& doc, Action action, const std::filesystem::path& base_dir = ".");
RunConfig load_config(const std::filesystem::path& path, Action action);

/// Model factory for one `model` object.
tsf::ModelFactory make_factory(const nlohmann::ordered_json& model, const std::string& path = "model");

struct ForecastResult {
  tsf::TimeSeries history;   // target, original units
  tsf::TimeSeries forecast;  // (n, C, S), original units
  tsf::TimeSeries low, median, high;
};

ForecastResult run_forecast(const RunConfig& cfg);

std::string quantile_csv(const ForecastResult& r);
std::string render_svg(const ForecastResult& r, double q_low, double q_high);

/// Entry point behind the executable. Returns the process exit code:
/// 0 success, 2 user or configuration error, 3 internal error.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace tsfcli
