#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "tsf/time_index.hpp"
#include "tsf/timeseries.hpp"

namespace tsf {

struct DatasetDescriptor {
  std::string name;
  TimeStep frequency;
  std::size_t length;
  std::string file;     // relative to the data directory
  std::uint32_t crc32;  // of the bundled file bytes
};

const std::vector<DatasetDescriptor>& dataset_catalog();
const DatasetDescriptor& find_dataset(std::string_view name);

/// `TSF_DATA_DIR` from the environment when set, else the build-time default.
std::filesystem::path data_directory();

/// Raw bundled CSV bytes after checksum verification.
std::string read_dataset_bundle(std::string_view name, const std::filesystem::path& dir = data_directory());
TimeSeries load_dataset(std::string_view name, const std::filesystem::path& dir = data_directory());

}  // namespace tsf
