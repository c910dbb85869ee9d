#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "tsf/datasets.hpp"
#include "tsf/error.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run cli(std::vector<std::string> args) {
  args.insert(args.begin(), "tsfcast");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = tsfcli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("tsfcast_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), {}};
}

void spit(const fs::path& p, const std::string& s) { std::ofstream(p, std::ios::binary) << s; }

std::size_t count_lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

const fs::path kTwoSeriesConfig = fs::path(TSF_SOURCE_DIR) / "configs" / "air_milk_forecast.json";

std::vector<std::string> warnings;
void capture(std::string_view m) { warnings.emplace_back(m); }

}  // namespace

TEST_CASE("datasets list reports the bundled files") {
  const auto r = cli({"datasets", "list"});
  REQUIRE(r.code == 0);
  CHECK(count_lines(r.out) == 2);
  // Expected lengths: data rows in the bundled CSVs (header excluded).
  for (const char* name : {"air_passengers", "monthly_milk"}) {
    const auto rows = count_lines(slurp(tsf::data_directory() / (std::string(name) + ".csv"))) - 1;
    CHECK(r.out.find(std::string(name) + " " + std::to_string(rows) + " ") != std::string::npos);
  }
  CHECK(r.out.find("air_passengers 144 ") != std::string::npos);
  CHECK(r.out.find("monthly_milk 168 ") != std::string::npos);
}

TEST_CASE("datasets export writes the bundle bytes") {
  const auto dir = scratch("export");
  REQUIRE(cli({"datasets", "export", "monthly_milk", (dir / "milk.csv").string()}).code == 0);
  CHECK(slurp(dir / "milk.csv") == slurp(tsf::data_directory() / "monthly_milk.csv"));
  const auto bad = cli({"datasets", "export", "nope", (dir / "x.csv").string()});
  CHECK(bad.code == 2);
  CHECK(bad.err.rfind("error: E_DATA", 0) == 0);
  CHECK_FALSE(fs::exists(dir / "x.csv"));
}

TEST_CASE("forecast with the two-series config") {
  const auto dir = scratch("two_series");
  const auto r = cli({"forecast", kTwoSeriesConfig.string(), "--output-dir", dir.string()});
  REQUIRE_MESSAGE(r.code == 0, r.err);
  const auto csv = slurp(dir / "air_forecast.csv");
  CHECK(csv.rfind("time,component,sample,value\n", 0) == 0);
  CHECK(count_lines(csv) == 1 + 48 * 500);
  const auto q = slurp(dir / "air_forecast_quantiles.csv");
  CHECK(count_lines(q) == 1 + 48);
  std::istringstream lines(q);
  std::string line;
  std::getline(lines, line);
  CHECK(line == "time,component,q_low,median,q_high");
  while (std::getline(lines, line)) {
    std::vector<std::string> f;
    std::stringstream ss(line);
    for (std::string c; std::getline(ss, c, ',');) f.push_back(c);
    REQUIRE(f.size() == 5);
    CHECK(std::stod(f[2]) <= std::stod(f[3]));
    CHECK(std::stod(f[3]) <= std::stod(f[4]));
  }
  const auto svg = slurp(dir / "air_forecast.svg");
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(svg.find("<polygon") != std::string::npos);
  CHECK(std::count(svg.begin(), svg.end(), '\n') > 10);
}

TEST_CASE("reruns are byte-identical; the seed flag changes samples") {
  const auto a = scratch("rerun_a"), b = scratch("rerun_b"), c = scratch("rerun_c");
  REQUIRE(cli({"forecast", kTwoSeriesConfig.string(), "--output-dir", a.string()}).code == 0);
  REQUIRE(cli({"forecast", kTwoSeriesConfig.string(), "--output-dir", b.string()}).code == 0);
  for (const char* f : {"air_forecast.csv", "air_forecast_quantiles.csv", "air_forecast.svg"})
    CHECK(slurp(a / f) == slurp(b / f));
  REQUIRE(cli({"--seed", "7", "forecast", kTwoSeriesConfig.string(), "--output-dir", c.string()}).code == 0);
  CHECK(slurp(a / "air_forecast.csv") != slurp(c / "air_forecast.csv"));
}

TEST_CASE("a single sample gives a degenerate band") {
  const auto dir = scratch("single");
  spit(dir / "cfg.json", R"({"data":{"series":["air_passengers"]},"model":{"kind":"theta","season_length":12},
    "predict":{"n":6},"output":{"dir":"."}})");
  REQUIRE(cli({"forecast", (dir / "cfg.json").string()}).code == 0);
  std::istringstream lines(slurp(dir / "forecast_quantiles.csv"));
  std::string line;
  std::getline(lines, line);
  int rows = 0;
  while (std::getline(lines, line)) {
    const auto p1 = line.find(',', line.find(',') + 1);
    const auto rest = line.substr(p1 + 1);
    const auto a = rest.substr(0, rest.find(','));
    const auto m = rest.substr(a.size() + 1, rest.find(',', a.size() + 1) - a.size() - 1);
    const auto b = rest.substr(rest.rfind(',') + 1);
    CHECK(a == m);
    CHECK(m == b);
    ++rows;
  }
  CHECK(rows == 6);
}

TEST_CASE("backtest writes one row per origin") {
  const auto dir = scratch("backtest");
  spit(dir / "cfg.json", R"({"data":{"series":["air_passengers"]},"model":{"kind":"naive_seasonal","K":12},
    "backtest":{"start":0.75,"horizon":12,"stride":12}})");
  const auto r = cli({"backtest", (dir / "cfg.json").string()});
  REQUIRE_MESSAGE(r.code == 0, r.err);
  // Brute force: origins p = floor(0.75 * 144) + k * 12 while p + 12 <= 144.
  std::size_t expected = 0;
  for (std::size_t p = 108; p + 12 <= 144; p += 12) ++expected;
  const auto csv = slurp(dir / "backtest.csv");
  CHECK(count_lines(csv) == 1 + expected);
  CHECK(csv.find("\n1958-01-01,") != std::string::npos);
  CHECK(r.out.find(" over 3 windows: ") != std::string::npos);
}

TEST_CASE("gridsearch ranks combinations") {
  const auto dir = scratch("grid");
  spit(dir / "cfg.json", R"({"data":{"series":["air_passengers"]},"model":{"kind":"naive_seasonal"},
    "gridsearch":{"grid":{"K":[1,12]},"start":0.5,"horizon":12,"stride":12}})");
  const auto r = cli({"gridsearch", (dir / "cfg.json").string()});
  REQUIRE_MESSAGE(r.code == 0, r.err);
  CHECK(r.out.rfind("best K=12 ", 0) == 0);
  const auto csv = slurp(dir / "gridsearch.csv");
  CHECK(csv.find("combination,score,error\nK=12,") == 0);
}

TEST_CASE("error paths: exit 2, one error line, no partial outputs") {
  const auto dir = scratch("errors");
  auto one_error = [](const Run& r, const std::string& code) {
    CHECK(r.code == 2);
    CHECK(count_lines(r.err) == 1);
    CHECK_MESSAGE(r.err.rfind("error: " + code + ":", 0) == 0, r.err);
  };
  spit(dir / "missing.json", R"({"data":{"series":["no_such_data"]},"model":{"kind":"naive_drift"},"predict":{"n":3}})");
  one_error(cli({"forecast", (dir / "missing.json").string()}), "E_DATA");

  spit(dir / "empty_grid.json", R"({"data":{"series":["air_passengers"]},"model":{"kind":"naive_seasonal"},
    "gridsearch":{"grid":{},"start":0.5,"horizon":12}})");
  one_error(cli({"gridsearch", (dir / "empty_grid.json").string()}), "E_CONFIG");

  spit(dir / "unknown.json", R"({"data":{"series":["air_passengers"]},"model":{"kind":"theta","alpha":1},"predict":{"n":3}})");
  const auto r = cli({"forecast", (dir / "unknown.json").string()});
  one_error(r, "E_CONFIG");
  CHECK(r.err.find("model.alpha") != std::string::npos);

  spit(dir / "two_actions.json", R"({"data":{"series":["air_passengers"]},"model":{"kind":"naive_drift"},
    "predict":{"n":3},"backtest":{"start":0.5,"horizon":2}})");
  one_error(cli({"forecast", (dir / "two_actions.json").string()}), "E_CONFIG");

  spit(dir / "samples.json", R"({"data":{"series":["air_passengers"]},"model":{"kind":"naive_drift"},
    "predict":{"n":3,"num_samples":10}})");
  one_error(cli({"forecast", (dir / "samples.json").string()}), "E_CONFIG");

  spit(dir / "short.json", R"({"data":{"series":["air_passengers"]},"model":{"kind":"naive_seasonal","K":500},"predict":{"n":3}})");
  one_error(cli({"forecast", (dir / "short.json").string()}), "E_MODEL");

  one_error(cli({"forecast", (dir / "absent.json").string()}), "E_CONFIG");
  spit(dir / "broken.json", "{not json");
  one_error(cli({"forecast", (dir / "broken.json").string()}), "E_CONFIG");
  one_error(cli({"frobnicate"}), "E_USAGE");

  // The chart cannot be written (a directory sits at its path): the CSVs
  // written before it must be removed again.
  const auto out = dir / "partial";
  fs::create_directories(out / "forecast.svg");
  spit(dir / "partial.json", R"({"data":{"series":["air_passengers"]},"model":{"kind":"naive_drift"},"predict":{"n":3},
    "output":{"dir":"partial"}})");
  one_error(cli({"forecast", (dir / "partial.json").string()}), "E_IO");
  CHECK_FALSE(fs::exists(out / "forecast.csv"));
  CHECK_FALSE(fs::exists(out / "forecast_quantiles.csv"));
}

TEST_CASE("epochs is accepted with a warning") {
  warnings.clear();
  const auto previous = tsf::set_warning_sink(&capture);
  const auto cfg = tsfcli::load_config(kTwoSeriesConfig, tsfcli::Action::Forecast);
  tsf::set_warning_sink(previous);
  CHECK(cfg.n == 48);
  CHECK(cfg.num_samples == 500);
  REQUIRE(warnings.size() == 1);
  CHECK(warnings[0].find("epochs") != std::string::npos);
}
