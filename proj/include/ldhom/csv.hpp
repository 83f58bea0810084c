#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace ldhom {

/// Provenance written as leading '#' lines of every CSV artifact.
struct CsvHeader {
  std::string config_hash;
  std::uint64_t master_seed = 0;
  std::string version;
  std::vector<std::string> extra;
};

const char* library_version();

/// Shortest round-trip decimal form; "inf", "-inf" and "nan" for non-finite values.
std::string format_double(double value);

class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const CsvHeader& header, const std::vector<std::string>& columns);

  void row(const std::vector<double>& values);
  void row(const std::vector<std::string>& cells);

 private:
  std::ofstream out_;
  std::size_t n_columns_;
};

}  // namespace ldhom
