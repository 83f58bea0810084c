#include "ldhom/commands.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "ldhom/corrector.hpp"
#include "ldhom/errors.hpp"
#include "ldhom/ldp.hpp"
#include "ldhom/montecarlo.hpp"
#include "ldhom/solver.hpp"

namespace ldhom {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

// Seed tags keep the independent pieces of one run on disjoint streams.
constexpr std::uint64_t kTagRealization = 1;
constexpr std::uint64_t kTagCorrector = 2;
constexpr std::uint64_t kTagPilotMean = 3;
constexpr std::uint64_t kTagTiltPilot = 4;
constexpr std::uint64_t kTagLevel = 5;

std::uint64_t tagged(std::uint64_t seed, std::uint64_t tag, std::uint64_t index) {
  return derive_seed(derive_seed(seed, tag), index);
}

FieldRealization realization_for(const CommandContext& ctx, std::size_t eps_index, std::size_t r) {
  Rng rng(tagged(ctx.seed, kTagRealization, eps_index), r);
  return sample_fine(ctx.config.media, ctx.config.run.epsilons[eps_index], rng);
}

std::string steepness_line(const SteepnessReport& s) {
  std::ostringstream out;
  out << "steepness condition1=" << s.condition1 << " condition2=" << s.condition2 << " condition3=" << s.condition3
      << " steep=" << s.steep << " (" << s.note << ")";
  return out.str();
}

}  // namespace

CsvHeader CommandContext::header(std::vector<std::string> extra) const {
  CsvHeader h;
  h.config_hash = config.hash;
  h.master_seed = seed;
  h.version = library_version();
  h.extra = std::move(extra);
  h.extra.insert(h.extra.begin(), "media=" + config.media_label);
  return h;
}

CommandContext make_context(ExperimentConfig config, const std::optional<std::filesystem::path>& out,
                            const std::optional<std::uint64_t>& seed, int threads) {
  CommandContext ctx;
  ctx.out_dir = out ? *out : config.outputs.directory;
  ctx.seed = seed ? *seed : config.run.seed;
  ctx.threads = threads;
  ctx.config = std::move(config);
  std::filesystem::create_directories(ctx.out_dir);
  return ctx;
}

int cmd_media_sample(const CommandContext& ctx) {
  const auto& run = ctx.config.run;
  CsvWriter out(ctx.out_dir / "media.csv", ctx.header(), {"epsilon", "realization", "cell_index", "inv_value"});
  for (std::size_t e = 0; e < run.epsilons.size(); ++e) {
    for (std::size_t r = 0; r < run.realizations; ++r) {
      const auto field = realization_for(ctx, e, r);
      for (std::size_t n = 0; n < field.n_cells; ++n) {
        const double value = ctx.config.media.is_parameterized()
                                 ? inv_coeff_at(ctx.config.media, field, (n + 0.5) * field.epsilon)
                                 : field.inv_cells[n];
        out.row({run.epsilons[e], static_cast<double>(r), static_cast<double>(n + 1), value});
      }
    }
  }
  return 0;
}

int cmd_solve(const CommandContext& ctx) {
  const auto& cfg = ctx.config;
  const auto grid = uniform_grid(cfg.run.grid_points);
  std::vector<HomogenizedPoint> hom;
  for (double x : grid) hom.push_back(homogenize_point(cfg.media, cfg.source, x));
  CsvWriter out(ctx.out_dir / "solution.csv", ctx.header(),
                {"epsilon", "realization", "x", "u_eps", "u0", "v_eps", "R_eps"});
  for (std::size_t e = 0; e < cfg.run.epsilons.size(); ++e) {
    const CellLayout layout(cfg.media, cfg.source, cfg.run.epsilons[e], cfg.run.gauss_order);
    for (std::size_t r = 0; r < cfg.run.realizations; ++r) {
      const auto path = solve_path(layout, realization_for(ctx, e, r), grid, hom);
      for (std::size_t i = 0; i < grid.size(); ++i)
        out.row({cfg.run.epsilons[e], static_cast<double>(r), grid[i], path.values[i], path.u0[i], path.v_eps[i],
                 path.r_eps[i]});
    }
  }
  return 0;
}

int cmd_homogenize(const CommandContext& ctx) {
  const auto& cfg = ctx.config;
  CsvWriter out(ctx.out_dir / "homogenized.csv", ctx.header(), {"x", "A0", "inv_A0", "u0", "sigma_sq"});
  for (double x : uniform_grid(cfg.run.grid_points)) {
    out.row({x, homogenized_coeff(cfg.media, x), homogenized_inv(cfg.media, x),
             homogenize_point(cfg.media, cfg.source, x).u0, sigma_sq(cfg.media, x)});
  }
  return 0;
}

int cmd_corrector(const CommandContext& ctx) {
  const auto& cfg = ctx.config;
  std::vector<double> grid;
  for (double x : uniform_grid(cfg.run.grid_points))
    if (x > 0.0 && x < 1.0) grid.push_back(x);
  {
    CsvWriter out(ctx.out_dir / "corrector_variance.csv", ctx.header(), {"x", "corrector_variance"});
    for (double x : grid) out.row({x, corrector_variance(cfg.media, cfg.source, x)});
  }
  if (cfg.run.corrector_paths > 0) {
    const CorrectorSampler sampler(CorrectorSpec{cfg.media, cfg.source, cfg.run.wiener_grid_size}, grid);
    CsvWriter out(ctx.out_dir / "corrector_paths.csv", ctx.header(), {"path", "x", "v"});
    for (std::size_t p = 0; p < cfg.run.corrector_paths; ++p) {
      Rng rng(derive_seed(ctx.seed, kTagCorrector), p);
      const auto v = sampler.sample(rng);
      for (std::size_t i = 0; i < grid.size(); ++i) out.row({static_cast<double>(p), grid[i], v[i]});
    }
  }
  return 0;
}

int cmd_rate(const CommandContext& ctx, const std::string& kind) {
  const auto& cfg = ctx.config;
  const auto& run = cfg.run;
  if (kind != "approx" && kind != "full" && kind != "gaussian" && kind != "chernoff")
    throw ConfigError("rate --kind: expected approx, full, gaussian or chernoff, got '" + kind + "'");
  const auto steep = steepness_check(cfg.media, cfg.source);
  const CramerFunctional cf(cfg.media, cfg.source, run.x, run.panels, run.gauss_order);
  const double u0 = cf.homogenized().u0;
  const auto levels = run.levels.resolve(u0);
  std::ostringstream where;
  where << "x=" << format_double(run.x) << " u0=" << format_double(u0);
  CsvWriter out(ctx.out_dir / ("rate_" + kind + ".csv"), ctx.header({steepness_line(steep), where.str()}),
                {"epsilon", "ell", "rate", "lambda_star", "z1", "z2", "z3", "z4", "status"});

  std::size_t failures = 0, total = 0;
  const ZVector none{{kNan, kNan, kNan, kNan}};
  const auto emit = [&](double eps, double ell, double rate, double lambda, ZVector z, RateStatus status) {
    if (status == RateStatus::Infinite) {
      lambda = kNan;
      z = none;
    }
    out.row(std::vector<std::string>{format_double(eps), format_double(ell), format_double(rate),
                                     format_double(lambda), format_double(z[0]), format_double(z[1]),
                                     format_double(z[2]), format_double(z[3]), status_name(status)});
    ++total;
    failures += status == RateStatus::NotConverged;
  };

  if (kind == "approx" || kind == "full") {
    const auto curve = kind == "approx" ? approx_curve(cf, levels) : full_curve(cf, levels, run.max_evaluations);
    for (std::size_t i = 0; i < levels.size(); ++i)
      emit(kNan, levels[i], curve.values[i], curve.lambda_star[i], kind == "full" ? curve.z_star[i] : none,
           curve.status[i]);
  } else if (kind == "gaussian") {
    const double cc = corrector_variance(cfg.media, cfg.source, run.x);
    for (double ell : levels) emit(kNan, ell, gaussian_rate(u0, cc, ell), (ell - u0) / cc, none, RateStatus::Converged);
  } else {
    for (double eps : run.epsilons) {
      const ChernoffBound cb(cfg.media, cfg.source, run.x, eps, run.gauss_order);
      for (double ell : levels) emit(eps, ell, -cb.bound(ell), kNan, none, RateStatus::Converged);
    }
  }
  if (total > 0 && failures * 20 > total) {
    throw NumericalError("rate: optimizer did not converge on " + std::to_string(failures) + " of " +
                         std::to_string(total) + " levels");
  }
  return 0;
}

int cmd_empirical(const CommandContext& ctx) {
  const auto& cfg = ctx.config;
  const auto& run = cfg.run;
  CsvWriter rates(ctx.out_dir / "empirical_rate.csv", ctx.header(),
                  {"epsilon", "ell", "neg_rate", "log_prob", "ess", "n_exceed", "clipped", "tilt"});
  CsvWriter manifest(ctx.out_dir / "samples_manifest.csv", ctx.header(),
                     {"epsilon", "level_index", "tilt_kind", "tilt", "n", "master_seed", "reference_mean"});
  bool any_usable = false;
  for (std::size_t e = 0; e < run.epsilons.size(); ++e) {
    const double eps = run.epsilons[e];
    const McProblem problem(cfg.media, cfg.source, eps, run.x, run.gauss_order);
    // W-hat: weighted mean of a dedicated direct pilot run.
    const std::uint64_t pilot_seed = tagged(ctx.seed, kTagPilotMean, e);
    const double reference = weighted_mean(run_is(problem, 0.0, {run.pilot_n, pilot_seed, Observable::Solution,
                                                                  ctx.threads}));
    manifest.row(std::vector<std::string>{format_double(eps), "pilot", "direct", "0", std::to_string(run.pilot_n),
                                          std::to_string(pilot_seed), format_double(reference)});
    const auto levels = run.levels.resolve(problem.homogenized().u0);
    for (std::size_t i = 0; i < levels.size(); ++i) {
      const double ell = levels[i];
      double tilt = 0.0;
      if (run.tilt) {
        tilt = *run.tilt;
      } else if (ell > reference) {
        tilt = choose_tilt(problem, ell, run.pilot_n, tagged(ctx.seed, kTagTiltPilot, e * 100003 + i)).parameter;
      }
      const std::uint64_t seed = tagged(ctx.seed, kTagLevel, e * 100003 + i);
      const auto samples = run_is(problem, tilt, {run.n, seed, Observable::Solution, ctx.threads});
      const auto r = empirical_rate(samples, {ell}, reference);
      any_usable = any_usable || r.ess[0] >= 10.0;
      rates.row({eps, ell, -r.values[0], r.log_prob[0], r.ess[0], static_cast<double>(r.n_exceed[0]),
                 static_cast<double>(r.clipped[0]), tilt});
      manifest.row(std::vector<std::string>{format_double(eps), std::to_string(i), samples.tilt.kind,
                                            format_double(tilt), std::to_string(run.n), std::to_string(seed),
                                            format_double(reference)});
    }
  }
  if (!any_usable) throw NumericalError("empirical: effective sample size below 10 at every level");
  return 0;
}

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"Large deviations of 1D elliptic equations with oscillatory random coefficients"};
  app.require_subcommand(1);
  app.footer(csv_columns_help());
  std::string config_path;
  std::optional<std::string> out_dir;
  std::optional<std::uint64_t> seed;
  int threads = 0;
  app.add_option("--config", config_path, "JSON experiment config");
  app.add_option("--out", out_dir, "output directory (overrides outputs.directory)");
  app.add_option("--seed", seed, "master seed (overrides run.seed)");
  app.add_option("--threads", threads, "OpenMP threads (0: runtime default)")->check(CLI::NonNegativeNumber);

  auto* media_sample = app.add_subcommand("media-sample", "sample fine-scale realizations -> media.csv");
  auto* solve = app.add_subcommand("solve", "exact and homogenized solutions -> solution.csv");
  auto* homogenize = app.add_subcommand("homogenize", "A0, u0 and sigma^2 on the grid -> homogenized.csv");
  auto* corrector = app.add_subcommand("corrector", "corrector variance and optional paths");
  auto* rate = app.add_subcommand("rate", "rate function over the level grid -> rate_<kind>.csv");
  std::string kind = "approx";
  rate->add_option("--kind", kind, "approx | full | gaussian | chernoff");
  auto* empirical = app.add_subcommand("empirical", "importance-sampled empirical rate -> empirical_rate.csv");
  auto* figure = app.add_subcommand("figure", "named figure recipe");
  std::string name;
  figure->add_option("--name", name, "mild_ldp | wild_ldp | convolved_ldp_eps100 | convolved_ldp_eps10 | "
                                     "corrector_variance | pdf_compare")
      ->required();
  for (auto* sub : app.get_subcommands({})) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (threads > 0) omp_set_num_threads(threads);
    ExperimentConfig config;
    if (!config_path.empty()) {
      config = load_config(config_path);
    } else if (!figure->parsed()) {
      throw ConfigError("--config: required for this subcommand");
    } else {
      config = parse_config(R"({"media": {"family": "convolved"}})");
    }
    std::optional<std::filesystem::path> out;
    if (out_dir) out = *out_dir;
    const auto ctx = make_context(std::move(config), out, seed, threads);
    if (media_sample->parsed()) return cmd_media_sample(ctx);
    if (solve->parsed()) return cmd_solve(ctx);
    if (homogenize->parsed()) return cmd_homogenize(ctx);
    if (corrector->parsed()) return cmd_corrector(ctx);
    if (rate->parsed()) return cmd_rate(ctx, kind);
    if (empirical->parsed()) return cmd_empirical(ctx);
    if (figure->parsed()) return cmd_figure(name, ctx);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}

}  // namespace ldhom
