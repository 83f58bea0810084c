#include "ldhom/csv.hpp"

#include <charconv>
#include <cmath>
#include <stdexcept>

#include "ldhom/errors.hpp"

namespace ldhom {

const char* library_version() { return "0.1.0"; }

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

CsvWriter::CsvWriter(const std::filesystem::path& path, const CsvHeader& header,
                     const std::vector<std::string>& columns)
    : out_(path), n_columns_(columns.size()) {
  if (!out_) throw ConfigError("cannot open output file " + path.string());
  out_ << "# config_hash=" << header.config_hash << "\n";
  out_ << "# master_seed=" << header.master_seed << "\n";
  out_ << "# version=" << header.version << "\n";
  for (const auto& line : header.extra) out_ << "# " << line << "\n";
  for (std::size_t i = 0; i < columns.size(); ++i) out_ << (i ? "," : "") << columns[i];
  out_ << "\n";
}

void CsvWriter::row(const std::vector<double>& values) {
  std::vector<std::string> cells;
  cells.reserve(values.size());
  for (double v : values) cells.push_back(format_double(v));
  row(cells);
}

void CsvWriter::row(const std::vector<std::string>& cells) {
  if (cells.size() != n_columns_) throw std::logic_error("csv row width mismatch");
  for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << cells[i];
  out_ << "\n";
}

}  // namespace ldhom
