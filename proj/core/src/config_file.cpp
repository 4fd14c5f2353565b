#include "gseg3d/config_file.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace gseg3d {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

double parse_double(std::string_view key, std::string_view value) {
  value = trim(value);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw ConfigError("invalid value '" + std::string(value) + "' for key '" + std::string(key) + "'");
  }
  return v;
}

template <typename Int>
Int parse_int(std::string_view key, std::string_view value) {
  value = trim(value);
  Int v = 0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw ConfigError("invalid value '" + std::string(value) + "' for key '" + std::string(key) + "'");
  }
  return v;
}

// "1.5 (Phase I), 0.2 (Phase II)" -> {1.5, 0.2}
std::vector<double> parse_number_list(std::string_view key, std::string_view value) {
  std::string cleaned;
  int depth = 0;
  for (const char c : value) {
    if (c == '(') {
      ++depth;
    } else if (c == ')') {
      --depth;
    } else if (depth == 0) {
      cleaned.push_back(c == ',' ? ' ' : c);
    }
  }
  std::vector<double> out;
  std::istringstream in(cleaned);
  std::string token;
  while (in >> token) out.push_back(parse_double(key, token));
  return out;
}

template <typename F>
void for_both(PipelineConfig& cfg, F&& f) {
  f(cfg.phase1);
  f(cfg.phase2);
}

}  // namespace

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = {
      "distToGround",     "robotRadius",          "cellSizeX",
      "cellSizeY",        "cellSizeZ",            "slopeThresholdDegrees",
      "groundInlierThreshold", "centroidSearchRadius", "lineRatioMin",
      "planarFlatnessMax", "ransacIterations",    "ambiguityElevationThreshold",
      "sparsityLowMax",   "sparsityMediumMax",    "globalSeed",
      "seedSpacing",
  };
  return keys;
}

void apply_setting(PipelineConfig& cfg, std::string_view key, std::string_view value) {
  key = trim(key);
  if (key == "distToGround") {
    cfg.dist_to_ground = parse_double(key, value);
  } else if (key == "robotRadius") {
    cfg.robot_radius = parse_double(key, value);
  } else if (key == "seedSpacing") {
    cfg.seed_spacing = parse_double(key, value);
  } else if (key == "globalSeed") {
    cfg.global_seed = parse_int<std::uint64_t>(key, value);
  } else if (key == "cellSizeX") {
    const double v = parse_double(key, value);
    for_both(cfg, [v](PhaseConfig& p) { p.cellsize.sx = v; });
  } else if (key == "cellSizeY") {
    const double v = parse_double(key, value);
    for_both(cfg, [v](PhaseConfig& p) { p.cellsize.sy = v; });
  } else if (key == "cellSizeZ") {
    const auto values = parse_number_list(key, value);
    if (values.size() != 2) {
      throw ConfigError("key 'cellSizeZ' needs two values (phase 1, phase 2), got '" +
                        std::string(trim(value)) + "'");
    }
    cfg.phase1.cellsize.sz = values[0];
    cfg.phase2.cellsize.sz = values[1];
  } else if (key == "slopeThresholdDegrees") {
    const double v = parse_double(key, value);
    for_both(cfg, [v](PhaseConfig& p) { p.geometry.slope_threshold_deg = v; });
  } else if (key == "groundInlierThreshold") {
    const double v = parse_double(key, value);
    for_both(cfg, [v](PhaseConfig& p) {
      p.geometry.inlier_threshold = v;
      p.expansion.height_threshold = v;
    });
  } else if (key == "centroidSearchRadius") {
    const double v = parse_double(key, value);
    for_both(cfg, [v](PhaseConfig& p) { p.expansion.search_radius = v; });
  } else if (key == "lineRatioMin") {
    const double v = parse_double(key, value);
    for_both(cfg, [v](PhaseConfig& p) { p.geometry.line_ratio_min = v; });
  } else if (key == "planarFlatnessMax") {
    const double v = parse_double(key, value);
    for_both(cfg, [v](PhaseConfig& p) { p.geometry.planar_flatness_max = v; });
  } else if (key == "ransacIterations") {
    const int v = parse_int<int>(key, value);
    for_both(cfg, [v](PhaseConfig& p) { p.geometry.ransac_iterations = v; });
  } else if (key == "ambiguityElevationThreshold") {
    const double v = parse_double(key, value);
    for_both(cfg, [v](PhaseConfig& p) { p.expansion.ambiguity_elevation_threshold = v; });
  } else if (key == "sparsityLowMax") {
    const double v = parse_double(key, value);
    for_both(cfg, [v](PhaseConfig& p) { p.geometry.sparsity_low_max = v; });
  } else if (key == "sparsityMediumMax") {
    const double v = parse_double(key, value);
    for_both(cfg, [v](PhaseConfig& p) { p.geometry.sparsity_medium_max = v; });
  } else {
    throw ConfigError("unknown configuration key '" + std::string(key) + "'");
  }
}

void apply_override(PipelineConfig& cfg, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos) {
    throw ConfigError("override '" + std::string(assignment) + "' is not of the form key=value");
  }
  apply_setting(cfg, assignment.substr(0, eq), assignment.substr(eq + 1));
}

void apply_config_text(PipelineConfig& cfg, std::string_view text) {
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) continue;
    const auto sep = line.find_first_of(":=");
    if (sep == std::string_view::npos) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected 'key: value', got '" +
                        std::string(line) + "'");
    }
    apply_setting(cfg, line.substr(0, sep), line.substr(sep + 1));
  }
}

void apply_config_file(PipelineConfig& cfg, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    apply_config_text(cfg, buf.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

std::string format_number(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  std::string s(buf, ptr);
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

std::string dump_config(const PipelineConfig& cfg) {
  const GeometryParams& g = cfg.phase1.geometry;
  const ExpansionParams& e = cfg.phase1.expansion;
  std::ostringstream out;
  out << "distToGround: " << format_number(cfg.dist_to_ground) << '\n'
      << "robotRadius: " << format_number(cfg.robot_radius) << '\n'
      << "cellSizeX: " << format_number(cfg.phase1.cellsize.sx) << '\n'
      << "cellSizeY: " << format_number(cfg.phase1.cellsize.sy) << '\n'
      << "cellSizeZ: " << format_number(cfg.phase1.cellsize.sz) << " (Phase I), "
      << format_number(cfg.phase2.cellsize.sz) << " (Phase II)\n"
      << "slopeThresholdDegrees: " << format_number(g.slope_threshold_deg) << '\n'
      << "groundInlierThreshold: " << format_number(g.inlier_threshold) << '\n'
      << "centroidSearchRadius: " << format_number(e.search_radius) << '\n'
      << "lineRatioMin: " << format_number(g.line_ratio_min) << '\n'
      << "planarFlatnessMax: " << format_number(g.planar_flatness_max) << '\n'
      << "ransacIterations: " << g.ransac_iterations << '\n'
      << "ambiguityElevationThreshold: " << format_number(e.ambiguity_elevation_threshold) << '\n'
      << "sparsityLowMax: " << format_number(g.sparsity_low_max) << '\n'
      << "sparsityMediumMax: " << format_number(g.sparsity_medium_max) << '\n'
      << "globalSeed: " << cfg.global_seed << '\n'
      << "seedSpacing: " << format_number(cfg.seed_spacing) << '\n';
  return out.str();
}

}  // namespace gseg3d
