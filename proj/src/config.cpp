#include "ldhom/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "ldhom/errors.hpp"

namespace ldhom {

using nlohmann::json;

namespace {

void reject_unknown(const json& node, const std::string& path, const std::set<std::string>& allowed) {
  if (!node.is_object()) throw ConfigError(path + ": expected an object");
  for (const auto& [key, value] : node.items()) {
    if (!allowed.count(key)) throw ConfigError(path + "." + key + ": unknown key");
  }
}

double get_number(const json& node, const std::string& key, const std::string& path, double fallback) {
  if (!node.contains(key)) return fallback;
  const auto& v = node.at(key);
  if (!v.is_number()) throw ConfigError(path + "." + key + ": expected a number");
  return v.get<double>();
}

std::uint64_t get_unsigned(const json& node, const std::string& key, const std::string& path, std::uint64_t fallback) {
  if (!node.contains(key)) return fallback;
  const auto& v = node.at(key);
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer() && v.get<std::int64_t>() >= 0) return static_cast<std::uint64_t>(v.get<std::int64_t>());
  throw ConfigError(path + "." + key + ": expected a nonnegative integer");
}

void require(bool ok, const std::string& field, const std::string& what) {
  if (!ok) throw ConfigError(field + ": " + what);
}

MediaModel parse_parameterized(const json& m, std::string& label) {
  reject_unknown(m, "media", {"family", "preset", "xi", "xi_seed", "r", "floor", "amplitude", "nu_b"});
  const int sources = m.contains("preset") + m.contains("xi") + m.contains("xi_seed");
  require(sources <= 1, "media", "give at most one of preset, xi, xi_seed");
  ParameterizedCoarse c = mild_preset();
  label = "mild";
  if (m.contains("preset")) {
    const auto& p = m.at("preset");
    require(p.is_string(), "media.preset", "expected a string");
    const auto name = p.get<std::string>();
    if (name == "mild") {
      c = mild_preset();
    } else if (name == "wild") {
      c = wild_preset();
    } else if (name == "flat") {
      c = ParameterizedCoarse{};
    } else {
      throw ConfigError("media.preset: unknown preset '" + name + "' (mild, wild, flat)");
    }
    label = name;
  } else if (m.contains("xi")) {
    const auto& xi = m.at("xi");
    require(xi.is_array() && xi.size() == 8, "media.xi", "expected 8 numbers");
    for (std::size_t i = 0; i < 8; ++i) {
      require(xi[i].is_number(), "media.xi[" + std::to_string(i) + "]", "expected a number");
      const double v = xi[i].get<double>();
      require(std::abs(v) <= 1.0, "media.xi[" + std::to_string(i) + "]", "must lie in [-1, 1]");
      c.xi[i] = v;
    }
    label = "custom";
  } else if (m.contains("xi_seed")) {
    Rng rng(get_unsigned(m, "xi_seed", "media", 0), 0);
    c = sample_coarse(MediaFamily::Parameterized, rng).parameterized();
    label = "sampled";
  }
  c.r = get_number(m, "r", "media", c.r);
  c.floor = get_number(m, "floor", "media", c.floor);
  c.amplitude = get_number(m, "amplitude", "media", c.amplitude);
  c.nu_b = get_number(m, "nu_b", "media", c.nu_b);
  require(c.r > 0.0 && c.r < 1.0, "media.r", "must lie in (0, 1)");
  require(c.nu_b > 0.0, "media.nu_b", "must be positive");
  require(c.floor > c.nu_b, "media.floor", "must exceed nu_b so coefficients stay positive");
  require(c.amplitude >= 0.0, "media.amplitude", "must be nonnegative");
  return MediaModel{c};
}

MediaModel parse_convolved(const json& m, std::string& label) {
  reject_unknown(m, "media", {"family", "xi", "xi_seed", "kappa", "h_norm"});
  require(!(m.contains("xi") && m.contains("xi_seed")), "media", "give at most one of xi, xi_seed");
  int xi = 1;
  if (m.contains("xi")) {
    const auto& v = m.at("xi");
    require(v.is_number_integer() && v.get<std::int64_t>() >= 1, "media.xi", "expected an integer >= 1");
    xi = static_cast<int>(v.get<std::int64_t>());
  } else if (m.contains("xi_seed")) {
    Rng rng(get_unsigned(m, "xi_seed", "media", 0), 0);
    xi = sample_coarse(MediaFamily::Convolved, rng).convolved().xi;
  }
  const auto kappa = get_unsigned(m, "kappa", "media", 1);
  require(kappa >= 1 && kappa <= 100000, "media.kappa", "expected an integer in [1, 100000]");
  const double h_norm = get_number(m, "h_norm", "media", 1.0);
  require(h_norm > 0.0 && std::isfinite(h_norm), "media.h_norm", "must be positive");
  label = "convolved_xi" + std::to_string(xi) + "_kappa" + std::to_string(kappa);
  return MediaModel{ConvolvedCoarse::box(xi, h_norm, static_cast<int>(kappa))};
}

SourceSpec parse_source(const json& s) {
  reject_unknown(s, "source", {"pieces", "indicator"});
  require(!(s.contains("pieces") && s.contains("indicator")), "source", "give either pieces or indicator");
  try {
    if (s.contains("indicator")) {
      const auto& ind = s.at("indicator");
      reject_unknown(ind, "source.indicator", {"lo", "hi", "value"});
      const double lo = get_number(ind, "lo", "source.indicator", 0.45);
      const double hi = get_number(ind, "hi", "source.indicator", 0.55);
      require(0.0 <= lo && lo < hi && hi <= 1.0, "source.indicator", "need 0 <= lo < hi <= 1");
      return SourceSpec::indicator(lo, hi, get_number(ind, "value", "source.indicator", 1.0));
    }
    if (s.contains("pieces")) {
      const auto& arr = s.at("pieces");
      require(arr.is_array() && !arr.empty(), "source.pieces", "expected a nonempty array");
      std::vector<SourcePiece> pieces;
      for (std::size_t i = 0; i < arr.size(); ++i) {
        const std::string path = "source.pieces[" + std::to_string(i) + "]";
        reject_unknown(arr[i], path, {"lo", "hi", "value"});
        for (const char* key : {"lo", "hi", "value"}) require(arr[i].contains(key), path + "." + key, "missing");
        pieces.push_back({get_number(arr[i], "lo", path, 0.0), get_number(arr[i], "hi", path, 0.0),
                          get_number(arr[i], "value", path, 0.0)});
      }
      return SourceSpec(pieces);
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("source: ") + e.what());
  }
  return SourceSpec::indicator();
}

LevelGrid parse_levels(const json& l) {
  LevelGrid grid;
  if (l.is_array()) {
    for (std::size_t i = 0; i < l.size(); ++i) {
      require(l[i].is_number(), "run.levels[" + std::to_string(i) + "]", "expected a number");
      grid.explicit_levels.push_back(l[i].get<double>());
    }
    require(!grid.explicit_levels.empty(), "run.levels", "expected at least one level");
    return grid;
  }
  reject_unknown(l, "run.levels", {"from", "to", "count", "relative_to_u0"});
  for (const char* key : {"from", "to", "count"}) require(l.contains(key), std::string("run.levels.") + key, "missing");
  grid.from = get_number(l, "from", "run.levels", 0.0);
  grid.to = get_number(l, "to", "run.levels", 0.0);
  grid.count = static_cast<int>(get_unsigned(l, "count", "run.levels", 0));
  require(grid.count >= 1 && grid.count <= 100000, "run.levels.count", "expected an integer in [1, 100000]");
  require(grid.to >= grid.from, "run.levels", "need to >= from");
  if (l.contains("relative_to_u0")) {
    require(l.at("relative_to_u0").is_boolean(), "run.levels.relative_to_u0", "expected a boolean");
    grid.relative_to_u0 = l.at("relative_to_u0").get<bool>();
  }
  return grid;
}

RunBlock parse_run(const json& r, const MediaModel& media) {
  reject_unknown(r, "run",
                 {"epsilon", "x", "n", "seed", "realizations", "grid_points", "tilt", "pilot_n", "levels",
                  "gauss_order", "panels", "max_evaluations", "wiener_grid_size", "corrector_paths",
                  "validity_factor"});
  RunBlock run;
  if (r.contains("epsilon")) {
    const auto& e = r.at("epsilon");
    run.epsilons.clear();
    if (e.is_number()) {
      run.epsilons.push_back(e.get<double>());
    } else {
      require(e.is_array() && !e.empty(), "run.epsilon", "expected a number or a nonempty array");
      for (const auto& v : e) {
        require(v.is_number(), "run.epsilon", "expected numbers");
        run.epsilons.push_back(v.get<double>());
      }
    }
  }
  for (double eps : run.epsilons) {
    require(eps > 0.0 && eps <= 1.0, "run.epsilon", "must lie in (0, 1]");
    try {
      (void)cell_count(eps);
    } catch (const ConfigError& e) {
      throw ConfigError(std::string("run.epsilon: ") + e.what());
    }
  }
  run.x = get_number(r, "x", "run", run.x);
  require(run.x > 0.0 && run.x < 1.0, "run.x", "must lie in (0, 1)");
  run.n = get_unsigned(r, "n", "run", run.n);
  require(run.n >= 1, "run.n", "must be positive");
  run.seed = get_unsigned(r, "seed", "run", run.seed);
  run.realizations = get_unsigned(r, "realizations", "run", run.realizations);
  require(run.realizations >= 1, "run.realizations", "must be positive");
  run.grid_points = get_unsigned(r, "grid_points", "run", run.grid_points);
  require(run.grid_points >= 2, "run.grid_points", "must be at least 2");
  if (r.contains("tilt") && !r.at("tilt").is_null()) {
    run.tilt = get_number(r, "tilt", "run", 0.0);
    if (media.is_parameterized())
      require(*run.tilt >= 0.0, "run.tilt", "Bradford parameter must be >= 0");
    else
      require(*run.tilt < 0.5, "run.tilt", "chi-squared tilt must be < 1/2");
  }
  run.pilot_n = get_unsigned(r, "pilot_n", "run", run.pilot_n);
  require(run.pilot_n >= 10, "run.pilot_n", "must be at least 10");
  if (r.contains("levels")) {
    run.levels = parse_levels(r.at("levels"));
  } else {
    run.levels.from = 0.5;
    run.levels.to = 3.0;
    run.levels.count = 26;
    run.levels.relative_to_u0 = true;
  }
  run.gauss_order = static_cast<int>(get_unsigned(r, "gauss_order", "run", 8));
  require(run.gauss_order >= 1 && run.gauss_order <= 64, "run.gauss_order", "expected an integer in [1, 64]");
  run.panels = static_cast<int>(get_unsigned(r, "panels", "run", 512));
  require(run.panels >= 8, "run.panels", "must be at least 8");
  run.max_evaluations = static_cast<int>(get_unsigned(r, "max_evaluations", "run", 600));
  require(run.max_evaluations >= 10, "run.max_evaluations", "must be at least 10");
  run.wiener_grid_size = static_cast<int>(get_unsigned(r, "wiener_grid_size", "run", 2000));
  require(run.wiener_grid_size >= 10, "run.wiener_grid_size", "must be at least 10");
  run.corrector_paths = get_unsigned(r, "corrector_paths", "run", 0);
  run.validity_factor = get_number(r, "validity_factor", "run", 10.0);
  require(run.validity_factor > 0.0, "run.validity_factor", "must be positive");
  return run;
}

}  // namespace

std::vector<double> LevelGrid::resolve(double u0) const {
  if (!explicit_levels.empty()) return explicit_levels;
  const double scale = relative_to_u0 ? u0 : 1.0;
  std::vector<double> out;
  for (int i = 0; i < count; ++i) {
    const double t = count == 1 ? 0.0 : static_cast<double>(i) / (count - 1);
    out.push_back(scale * (from + (to - from) * t));
  }
  return out;
}

std::string fnv1a_hex(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

ExperimentConfig parse_config(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: invalid JSON: ") + e.what());
  }
  reject_unknown(doc, "config", {"media", "source", "run", "outputs"});
  if (!doc.contains("media")) throw ConfigError("media: missing required block");
  const auto& m = doc.at("media");
  if (!m.is_object()) throw ConfigError("media: expected an object");
  if (!m.contains("family") || !m.at("family").is_string())
    throw ConfigError("media.family: missing (parameterized or convolved)");

  ExperimentConfig cfg;
  const auto family = m.at("family").get<std::string>();
  if (family == "parameterized") {
    cfg.media = parse_parameterized(m, cfg.media_label);
  } else if (family == "convolved") {
    cfg.media = parse_convolved(m, cfg.media_label);
  } else {
    throw ConfigError("media.family: unknown family '" + family + "'");
  }
  if (doc.contains("source")) cfg.source = parse_source(doc.at("source"));
  cfg.run = parse_run(doc.contains("run") ? doc.at("run") : json::object(), cfg.media);
  if (doc.contains("outputs")) {
    const auto& o = doc.at("outputs");
    reject_unknown(o, "outputs", {"directory"});
    if (o.contains("directory")) {
      require(o.at("directory").is_string(), "outputs.directory", "expected a string");
      cfg.outputs.directory = o.at("directory").get<std::string>();
    }
  }
  cfg.hash = fnv1a_hex(doc.dump());
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot read " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

const char* csv_columns_help() {
  return R"(CSV artifacts (every file starts with '# config_hash', '# master_seed', '# version' lines):
  media.csv               epsilon, realization, cell_index, inv_value
  solution.csv            epsilon, realization, x, u_eps, u0, v_eps, R_eps
  homogenized.csv         x, A0, inv_A0, u0, sigma_sq
  corrector_variance.csv  x, corrector_variance
  corrector_paths.csv     path, x, v
  rate_<kind>.csv         epsilon (chernoff only), ell, rate, lambda_star, z1..z4 (full only), status
  empirical_rate.csv      epsilon, ell, neg_rate, log_prob, ess, n_exceed, clipped, tilt
  samples_manifest.csv    epsilon, level_index, tilt_kind, tilt, n, master_seed, reference_mean
  figure recipes add manifest.csv (key, value), variance.csv and pdf_samples.csv)";
}

}  // namespace ldhom
