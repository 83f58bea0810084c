#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "ldhom/config.hpp"
#include "ldhom/csv.hpp"

namespace ldhom {

struct CommandContext {
  ExperimentConfig config;
  std::filesystem::path out_dir;
  std::uint64_t seed = 0;
  int threads = 0;

  CsvHeader header(std::vector<std::string> extra = {}) const;
};

/// --out and --seed override the config's outputs.directory and run.seed.
CommandContext make_context(ExperimentConfig config, const std::optional<std::filesystem::path>& out,
                            const std::optional<std::uint64_t>& seed, int threads);

int cmd_media_sample(const CommandContext& ctx);
int cmd_solve(const CommandContext& ctx);
int cmd_homogenize(const CommandContext& ctx);
int cmd_corrector(const CommandContext& ctx);
/// kind is one of approx, full, gaussian, chernoff.
int cmd_rate(const CommandContext& ctx, const std::string& kind);
int cmd_empirical(const CommandContext& ctx);

const std::vector<std::string>& figure_names();
/// Runs a named figure recipe. The recipe fixes the medium and epsilon list;
/// the context supplies the output directory, seed, threads and sample size.
int cmd_figure(const std::string& name, const CommandContext& ctx);

/// Full command-line entry point; returns the process exit code
/// (0 success, 2 configuration error, 3 numerical failure).
int run_cli(int argc, const char* const* argv);

}  // namespace ldhom
