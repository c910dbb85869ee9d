#include "tsf/datasets.hpp"

#include <zlib.h>

#include <cstdlib>
#include <fstream>
#include <iterator>
#include <sstream>

#include "tsf/error.hpp"
#include "tsf/table.hpp"

#ifndef TSF_DEFAULT_DATA_DIR
#define TSF_DEFAULT_DATA_DIR "data"
#endif

namespace tsf {

const std::vector<DatasetDescriptor>& dataset_catalog() {
  static const std::vector<DatasetDescriptor> catalog{
      {"air_passengers", TimeStep::months(1), 144, "air_passengers.csv", 0xbbb2e049u},
      {"monthly_milk", TimeStep::months(1), 168, "monthly_milk.csv", 0xfaf82ff8u},
  };
  return catalog;
}

const DatasetDescriptor& find_dataset(std::string_view name) {
  for (const auto& d : dataset_catalog())
    if (d.name == name) return d;
  fail(ErrorCode::UnknownDataset, "unknown dataset '" + std::string(name) + "'");
}

std::filesystem::path data_directory() {
  if (const char* env = std::getenv("TSF_DATA_DIR"); env != nullptr && *env != '\0') return env;
  return TSF_DEFAULT_DATA_DIR;
}

std::string read_dataset_bundle(std::string_view name, const std::filesystem::path& dir) {
  const auto& d = find_dataset(name);
  const auto path = dir / d.file;
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::CorruptBundle, "bundled file '" + path.string() + "' is missing");
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  const auto crc = static_cast<std::uint32_t>(
      crc32(0L, reinterpret_cast<const Bytef*>(bytes.data()), static_cast<uInt>(bytes.size())));
  if (crc != d.crc32) fail(ErrorCode::CorruptBundle, "checksum mismatch for '" + path.string() + "'");
  return bytes;
}

TimeSeries load_dataset(std::string_view name, const std::filesystem::path& dir) {
  const auto& d = find_dataset(name);
  std::istringstream in(read_dataset_bundle(name, dir));
  auto s = read_csv(in, d.frequency);
  if (s.length() != d.length || s.has_nan())
    fail(ErrorCode::CorruptBundle, "bundled dataset '" + d.name + "' does not match its descriptor");
  return s;
}

}  // namespace tsf
