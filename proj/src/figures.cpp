#include <cmath>
#include <memory>
#include <sstream>

#include "ldhom/commands.hpp"
#include "ldhom/corrector.hpp"
#include "ldhom/errors.hpp"
#include "ldhom/solver.hpp"

namespace ldhom {

namespace {

struct Recipe {
  std::string name;
  MediaModel media;
  std::string media_label;
  std::vector<double> epsilons;
  LevelGrid levels;
};

LevelGrid relative_levels(double from, double to, int count) {
  LevelGrid g;
  g.from = from;
  g.to = to;
  g.count = count;
  g.relative_to_u0 = true;
  return g;
}

MediaModel convolved(int xi, int kappa) { return MediaModel{ConvolvedCoarse::box(xi, 1.0, kappa)}; }

CommandContext sub_context(const CommandContext& parent, const Recipe& recipe, const std::filesystem::path& dir,
                           std::vector<double> epsilons) {
  CommandContext ctx = parent;
  ctx.config.media = recipe.media;
  ctx.config.media_label = recipe.media_label;
  ctx.config.run.epsilons = std::move(epsilons);
  ctx.config.run.x = 0.5;
  ctx.config.run.levels = recipe.levels;
  ctx.config.run.tilt.reset();
  ctx.config.hash = fnv1a_hex(parent.config.hash + "/" + recipe.name + "/" + dir.string());
  ctx.out_dir = dir;
  std::filesystem::create_directories(dir);
  return ctx;
}

void write_manifest(const CommandContext& ctx, const Recipe& recipe) {
  CsvWriter out(ctx.out_dir / "manifest.csv", ctx.header(), {"key", "value"});
  out.row(std::vector<std::string>{"recipe", recipe.name});
  out.row(std::vector<std::string>{"media", recipe.media_label});
  if (recipe.media.is_parameterized()) {
    const auto& c = recipe.media.parameterized();
    std::ostringstream xi;
    for (std::size_t i = 0; i < c.xi.size(); ++i) xi << (i ? " " : "") << format_double(c.xi[i]);
    out.row(std::vector<std::string>{"family", "parameterized"});
    out.row(std::vector<std::string>{"xi", xi.str()});
    out.row(std::vector<std::string>{"r", format_double(c.r)});
    out.row(std::vector<std::string>{"nu_b", format_double(c.nu_b)});
  } else {
    const auto& c = recipe.media.convolved();
    out.row(std::vector<std::string>{"family", "convolved"});
    out.row(std::vector<std::string>{"xi", std::to_string(c.xi)});
    out.row(std::vector<std::string>{"h_norm", format_double(c.h_norm())});
    out.row(std::vector<std::string>{"kappa", std::to_string(c.kappa())});
  }
  for (double eps : recipe.epsilons) out.row(std::vector<std::string>{"epsilon", format_double(eps)});
  out.row(std::vector<std::string>{"x", "0.5"});
  out.row(std::vector<std::string>{"f", "1 on (0.45, 0.55)"});
  out.row(std::vector<std::string>{"n", std::to_string(ctx.config.run.n)});
}

int ldp_recipe(const CommandContext& parent, const Recipe& recipe) {
  const auto root = parent.out_dir / recipe.name;
  auto top = sub_context(parent, recipe, root, recipe.epsilons);
  write_manifest(top, recipe);
  cmd_rate(top, "approx");
  cmd_rate(top, "full");
  cmd_rate(top, "gaussian");
  for (double eps : recipe.epsilons) {
    const auto dir = root / ("eps" + std::to_string(std::llround(1.0 / eps)));
    cmd_empirical(sub_context(parent, recipe, dir, {eps}));
  }
  return 0;
}

// Var[u_eps(x)]/eps from direct sampling against C_c(x) on a coarse x grid.
int variance_recipe(const CommandContext& parent, const Recipe& recipe) {
  const auto root = parent.out_dir / recipe.name;
  const auto ctx = sub_context(parent, recipe, root, recipe.epsilons);
  write_manifest(ctx, recipe);
  const auto& f = ctx.config.source;
  std::vector<double> grid;
  for (int i = 1; i < 20; ++i) grid.push_back(i / 20.0);
  std::vector<HomogenizedPoint> hom;
  std::vector<double> cc;
  {
    CsvWriter out(root / "corrector_variance.csv", ctx.header(), {"x", "corrector_variance"});
    for (double x : grid) {
      hom.push_back(homogenize_point(recipe.media, f, x));
      cc.push_back(corrector_variance(recipe.media, f, x));
      out.row({x, cc.back()});
    }
  }
  CsvWriter out(root / "variance.csv", ctx.header(),
                {"epsilon", "x", "var_over_eps", "corrector_variance", "mean_sq_u_eps", "mean_sq_corrected"});
  for (std::size_t e = 0; e < recipe.epsilons.size(); ++e) {
    const double eps = recipe.epsilons[e];
    const CellLayout layout(recipe.media, f, eps, ctx.config.run.gauss_order);
    std::vector<double> sum(grid.size(), 0.0), sq(grid.size(), 0.0);
    const std::size_t n = ctx.config.run.n;
    for (std::size_t k = 0; k < n; ++k) {
      Rng rng(derive_seed(ctx.seed, 100 + e), k);
      const auto path = solve_path(layout, sample_fine(recipe.media, eps, rng), grid, hom);
      for (std::size_t i = 0; i < grid.size(); ++i) {
        sum[i] += path.values[i];
        sq[i] += path.values[i] * path.values[i];
      }
    }
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double mean = sum[i] / n;
      const double var = sq[i] / n - mean * mean;
      out.row({eps, grid[i], var / eps, cc[i], sq[i] / n, hom[i].u0 * hom[i].u0 + eps * cc[i]});
    }
  }
  return 0;
}

// Draws of u_eps(0.5) next to draws of u0 + sqrt(eps) v(0.5).
int pdf_recipe(const CommandContext& parent) {
  const auto root = parent.out_dir / "pdf_compare";
  const std::vector<double> epsilons{0.1, 0.01};
  const SourceSpec& f = parent.config.source;
  bool first = true;
  std::unique_ptr<CsvWriter> out;
  for (int kappa : {1, 10}) {
    Recipe recipe{"pdf_compare", convolved(1, kappa), "convolved_xi1_kappa" + std::to_string(kappa), epsilons, {}};
    const auto ctx = sub_context(parent, recipe, root / ("kappa" + std::to_string(kappa)), epsilons);
    write_manifest(ctx, recipe);
    if (first) {
      out = std::make_unique<CsvWriter>(root / "pdf_samples.csv", ctx.header(),
                                        std::vector<std::string>{"kappa", "epsilon", "u_eps", "corrected"});
      first = false;
    }
    const auto hom = homogenize_point(recipe.media, f, 0.5);
    const CorrectorSampler sampler(CorrectorSpec{recipe.media, f, ctx.config.run.wiener_grid_size}, {0.5});
    for (std::size_t e = 0; e < epsilons.size(); ++e) {
      const PointKernel kernel(recipe.media, f, 0.5, epsilons[e]);
      for (std::size_t k = 0; k < ctx.config.run.n; ++k) {
        Rng rng(derive_seed(ctx.seed, 200 + 10 * kappa + e), k);
        const double u = g_map(kernel.z_vector(sample_fine(recipe.media, epsilons[e], rng)));
        Rng wiener(derive_seed(ctx.seed, 300 + 10 * kappa + e), k);
        const double v = sampler.sample(wiener)[0];
        out->row({static_cast<double>(kappa), epsilons[e], u, hom.u0 + std::sqrt(epsilons[e]) * v});
      }
    }
  }
  return 0;
}

}  // namespace

const std::vector<std::string>& figure_names() {
  static const std::vector<std::string> names{"mild_ldp",           "wild_ldp",         "convolved_ldp_eps100",
                                              "convolved_ldp_eps10", "corrector_variance", "pdf_compare"};
  return names;
}

int cmd_figure(const std::string& name, const CommandContext& ctx) {
  if (name == "mild_ldp")
    return ldp_recipe(ctx, {name, MediaModel{mild_preset()}, "mild", {0.01}, relative_levels(0.5, 1.6, 23)});
  if (name == "wild_ldp")
    return ldp_recipe(ctx, {name, MediaModel{wild_preset()}, "wild", {0.01}, relative_levels(0.5, 3.0, 26)});
  if (name == "convolved_ldp_eps100")
    return ldp_recipe(ctx, {name, convolved(1, 1), "convolved_xi1_kappa1", {0.01}, relative_levels(0.5, 4.0, 36)});
  if (name == "convolved_ldp_eps10")
    return ldp_recipe(ctx, {name, convolved(1, 1), "convolved_xi1_kappa1", {0.1}, relative_levels(0.5, 4.0, 36)});
  if (name == "corrector_variance")
    return variance_recipe(ctx, {name, MediaModel{wild_preset()}, "wild", {0.1, 0.02, 0.01}, {}});
  if (name == "pdf_compare") return pdf_recipe(ctx);
  throw ConfigError("figure --name: unknown recipe '" + name + "'");
}

}  // namespace ldhom
