#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "ldhom/media.hpp"
#include "ldhom/source.hpp"

namespace ldhom {

/// Level grid: either an explicit list or `count` points from `from` to `to`.
struct LevelGrid {
  std::vector<double> explicit_levels;
  double from = 0.0;
  double to = 0.0;
  int count = 0;
  /// When set, from/to are multiples of u0 at the evaluation point.
  bool relative_to_u0 = false;

  std::vector<double> resolve(double u0) const;
};

struct RunBlock {
  std::vector<double> epsilons{0.01};
  double x = 0.5;
  std::size_t n = 1000;
  std::uint64_t seed = 0;
  std::size_t realizations = 1;
  std::size_t grid_points = 101;
  std::optional<double> tilt;
  std::size_t pilot_n = 2000;
  LevelGrid levels;
  int gauss_order = 8;
  int panels = 512;
  int max_evaluations = 600;
  int wiener_grid_size = 2000;
  std::size_t corrector_paths = 0;
  double validity_factor = 10.0;
};

struct OutputBlock {
  std::filesystem::path directory = "out";
};

struct ExperimentConfig {
  MediaModel media;
  std::string media_label;
  SourceSpec source = SourceSpec::indicator();
  RunBlock run;
  OutputBlock outputs;
  /// FNV-1a of the canonical JSON text.
  std::string hash;
};

/// Parses and validates a JSON document; unknown keys and out-of-domain values
/// raise ConfigError naming the offending field path.
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::filesystem::path& path);

std::string fnv1a_hex(const std::string& text);

/// Documented CSV columns, printed by --help.
const char* csv_columns_help();

}  // namespace ldhom
