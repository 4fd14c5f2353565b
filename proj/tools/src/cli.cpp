#include "gseg3d_cli/cli.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "gseg3d/cloud_io.hpp"
#include "gseg3d/config_file.hpp"
#include "gseg3d/errors.hpp"
#include "gseg3d/evaluation.hpp"
#include "gseg3d/pipeline.hpp"
#include "gseg3d/scene.hpp"

namespace gseg3d::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

// Config sources shared by every subcommand that runs the pipeline.
struct ConfigOptions {
  std::string config_path;
  std::vector<std::string> sets;
  std::map<std::string, std::string> flags;  // --<key> <value>, keyed by config key
};

void add_config_options(CLI::App& cmd, ConfigOptions& opts) {
  cmd.add_option("--config", opts.config_path,
                 std::string("config file (key: value lines); defaults to $") + kConfigEnvVar);
  cmd.add_option("--set", opts.sets, "override as key=value (repeatable)");
  for (const std::string& key : config_keys()) {
    cmd.add_option_function<std::string>(
        "--" + key, [&opts, key](const std::string& v) { opts.flags[key] = v; },
        "override " + key);
  }
}

// defaults < config file < --set < --<key>
PipelineConfig resolve_config(const ConfigOptions& opts) {
  PipelineConfig cfg = make_default_config();
  std::string path = opts.config_path;
  if (path.empty()) {
    if (const char* env = std::getenv(kConfigEnvVar); env != nullptr) path = env;
  }
  if (!path.empty()) apply_config_file(cfg, path);
  for (const std::string& s : opts.sets) apply_override(cfg, s);
  for (const auto& [key, value] : opts.flags) apply_setting(cfg, key, value);
  cfg.validate();
  return cfg;
}

std::vector<fs::path> list_scans(const fs::path& dir) {
  std::vector<fs::path> scans;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".bin") scans.push_back(entry.path());
  }
  std::sort(scans.begin(), scans.end());
  return scans;
}

// Runs fn(k) for k in [0, n) on up to `jobs` threads.
template <class Fn>
void fan_out(std::size_t n, unsigned jobs, Fn fn) {
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < n; k = next++) fn(k);
  };
  const unsigned threads = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(n)));
  if (threads == 1) {
    worker();
    return;
  }
  std::vector<std::jthread> pool;
  for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
}

json phase_json(const PhaseStats& s) {
  return json{{"input_points", s.input_points},     {"cells", s.cells},
              {"line_cells", s.line_cells},         {"planar_cells", s.planar_cells},
              {"nonplanar_cells", s.nonplanar_cells}, {"tentative_cells", s.tentative_cells},
              {"expanded_cells", s.expanded_cells}, {"ground_cells", s.ground_cells},
              {"ground_points", s.ground_points},   {"nonground_points", s.nonground_points},
              {"runtime_ms", s.runtime_ms}};
}

std::vector<double> parse_number_list(const std::string& text, const std::string& what) {
  std::vector<double> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    const auto first = item.find_first_not_of(' ');
    const auto last = item.find_last_not_of(' ');
    if (first == std::string::npos) throw ConfigError("empty entry in " + what);
    item = item.substr(first, last - first + 1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    if (ec != std::errc{} || ptr != item.data() + item.size()) {
      throw ConfigError("invalid number '" + item + "' in " + what);
    }
    out.push_back(v);
  }
  return out;
}

BoxObstacle parse_box(const std::string& text) {
  const auto v = parse_number_list(text, "--box");
  if (v.size() != 5 && v.size() != 6) {
    throw ConfigError("--box expects cx,cy,sx,sy,height[,base], got '" + text + "'");
  }
  BoxObstacle b{v[0], v[1], v[2], v[3], v[4], v.size() == 6 ? v[5] : 0.0};
  if (!(b.size_x > 0.0 && b.size_y > 0.0 && b.height > 0.0) || b.base < 0.0) {
    throw ConfigError("--box sizes and height must be positive and base non-negative");
  }
  return b;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw IoError("failed writing " + path.string());
}

// ---- segment ---------------------------------------------------------------

struct SegmentOptions {
  std::string input;
  std::string out_dir;
  std::string format = "bin";
  unsigned jobs = 1;
  bool debug_dump = false;
  ConfigOptions config;
};

struct ScanResult {
  std::optional<SegmentationStats> stats;
  std::size_t points = 0;
  std::string error;
};

int cmd_segment(const SegmentOptions& opt, std::ostream& out, std::ostream& err) {
  const PipelineConfig cfg = resolve_config(opt.config);
  const fs::path input(opt.input);
  if (!fs::exists(input)) {
    err << "error: " << input.string() << ": input path does not exist\n";
    return kFailure;
  }
  const std::vector<fs::path> scans = fs::is_directory(input) ? list_scans(input)
                                                              : std::vector<fs::path>{input};
  if (scans.empty()) {
    err << "error: " << input.string() << ": no .bin scans found\n";
    return kFailure;
  }
  const fs::path out_dir(opt.out_dir);
  fs::create_directories(out_dir);
  const MaskFormat format = opt.format == "txt" ? MaskFormat::Text : MaskFormat::Binary;

  std::vector<ScanResult> results(scans.size());
  fan_out(scans.size(), opt.jobs, [&](std::size_t k) {
    try {
      const PointCloud cloud = read_kitti_bin(scans[k]);
      SegmentationTrace trace;
      const SegmentationResult r = segment(cloud, cfg, opt.debug_dump ? &trace : nullptr);
      const std::string stem = scans[k].stem().string();
      write_mask(out_dir / (stem + ".mask"), r, format, &cloud);
      if (opt.debug_dump) {
        std::ofstream dump(out_dir / (stem + ".trace"));
        dump << "phase 1\n";
        write_expansion_trace(dump, trace.phase1.trace, trace.phase1.grid);
        dump << "phase 2\n";
        write_expansion_trace(dump, trace.phase2.trace, trace.phase2.grid);
      }
      results[k].stats = r.stats;
      results[k].points = cloud.size();
    } catch (const std::exception& e) {
      results[k].error = e.what();
    }
  });

  json scans_json = json::array();
  json failed = json::array();
  std::size_t ok = 0;
  for (std::size_t k = 0; k < scans.size(); ++k) {
    const ScanResult& r = results[k];
    if (!r.stats) {
      // I/O errors already name the file
      if (r.error.starts_with(scans[k].string())) {
        err << "error: " << r.error << '\n';
      } else {
        err << "error: " << scans[k].string() << ": " << r.error << '\n';
      }
      failed.push_back(json{{"scan", scans[k].filename().string()}, {"error", r.error}});
      continue;
    }
    ++ok;
    scans_json.push_back(json{{"scan", scans[k].filename().string()},
                              {"points", r.points},
                              {"synthetic_points", r.stats->synthetic_points},
                              {"runtime_ms", r.stats->runtime_ms},
                              {"phase1", phase_json(r.stats->phase1)},
                              {"phase2", phase_json(r.stats->phase2)}});
  }
  write_text(out_dir / "stats.json",
             json{{"scans", scans_json}, {"failed", failed}}.dump(2) + "\n");
  out << "segmented " << ok << '/' << scans.size() << " scans into " << out_dir.string() << '\n';
  if (ok == 0) return kFailure;
  return ok == scans.size() ? kOk : kPartial;
}

// ---- evaluate --------------------------------------------------------------

struct EvaluateOptions {
  std::string scans;
  std::string labels;
  std::string report;
  std::string format;
  std::string range = "planar";
  std::string ground_labels;
  std::string thresholds;
  unsigned jobs = 1;
  ConfigOptions config;
};

int cmd_evaluate(const EvaluateOptions& opt, std::ostream& out, std::ostream& err) {
  const PipelineConfig cfg = resolve_config(opt.config);
  GroundTruthPolicy policy;
  policy.range = opt.range == "full" ? RangeMode::Full : RangeMode::Planar;
  if (!opt.ground_labels.empty()) {
    policy.ground_label_ids.clear();
    for (const double v : parse_number_list(opt.ground_labels, "--ground-labels")) {
      if (v < 0 || v > 65535 || v != static_cast<double>(static_cast<int>(v))) {
        throw ConfigError("--ground-labels entries must be integers in [0, 65535]");
      }
      policy.ground_label_ids.insert(static_cast<std::uint16_t>(v));
    }
  }
  const std::vector<double> thresholds = opt.thresholds.empty()
                                             ? default_thresholds()
                                             : parse_number_list(opt.thresholds, "--thresholds");

  ReportFormat format = ReportFormat::Csv;
  if (opt.format == "json" || (opt.format.empty() && fs::path(opt.report).extension() == ".json")) {
    format = ReportFormat::Json;
  }

  const SequenceReport report =
      evaluate_sequence(opt.scans, opt.labels, cfg, policy, thresholds, opt.jobs);
  for (const std::string& s : report.skipped) err << "error: skipped " << s << '\n';
  if (!opt.report.empty()) {
    const fs::path path(opt.report);
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    write_text(path, emit_report(report, format));
  }
  out << format_summary(report) << '\n';
  if (report.scans_evaluated == 0) {
    err << "error: " << opt.scans << ": no scans could be evaluated\n";
    return kFailure;
  }
  return report.skipped.empty() ? kOk : kPartial;
}

// ---- synth -----------------------------------------------------------------

struct SynthOptions {
  std::string out_dir;
  std::string name = "scene";
  std::vector<std::string> boxes;
  SceneSpec spec;
};

int cmd_synth(const SynthOptions& opt, std::ostream& out) {
  SceneSpec spec = opt.spec;
  for (const std::string& b : opt.boxes) spec.boxes.push_back(parse_box(b));
  const Scene scene = generate_scene(spec);
  const fs::path dir(opt.out_dir);
  fs::create_directories(dir);
  write_kitti_bin(dir / (opt.name + ".bin"), scene.cloud);
  write_semantic_labels(dir / (opt.name + ".label"), scene.labels);
  write_text(dir / (opt.name + ".json"), scene_manifest(spec));
  out << "wrote " << scene.cloud.size() << " points to " << (dir / opt.name).string() << ".*\n";
  return kOk;
}

}  // namespace

int run(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Two-phase LiDAR ground segmentation", "gseg3d"};
  app.require_subcommand(1);

  SegmentOptions seg;
  auto* segment_cmd = app.add_subcommand("segment", "segment scans and write ground masks");
  segment_cmd->add_option("input", seg.input, ".bin scan or directory of scans")->required();
  segment_cmd->add_option("-o,--out", seg.out_dir, "output directory")->required();
  segment_cmd->add_option("--format", seg.format, "mask format")
      ->check(CLI::IsMember({"bin", "txt"}));
  segment_cmd->add_option("-j,--jobs", seg.jobs, "parallel scans")->check(CLI::PositiveNumber);
  segment_cmd->add_flag("--debug-dump", seg.debug_dump, "write per-scan expansion traces");
  add_config_options(*segment_cmd, seg.config);

  EvaluateOptions ev;
  auto* evaluate_cmd = app.add_subcommand("evaluate", "segment and score a labelled sequence");
  evaluate_cmd->add_option("--scans", ev.scans, "directory of .bin scans")->required();
  evaluate_cmd->add_option("--labels", ev.labels, "directory of .label files")->required();
  evaluate_cmd->add_option("--report", ev.report, "report output path");
  evaluate_cmd->add_option("--format", ev.format, "report format (default: from extension)")
      ->check(CLI::IsMember({"csv", "json"}));
  evaluate_cmd->add_option("--range", ev.range, "distance measure")
      ->check(CLI::IsMember({"planar", "full"}));
  evaluate_cmd->add_option("--ground-labels", ev.ground_labels,
                           "comma-separated label ids counted as ground");
  evaluate_cmd->add_option("--thresholds", ev.thresholds, "comma-separated distances in m");
  evaluate_cmd->add_option("-j,--jobs", ev.jobs, "parallel scans")->check(CLI::PositiveNumber);
  add_config_options(*evaluate_cmd, ev.config);

  SynthOptions syn;
  auto* synth_cmd = app.add_subcommand("synth", "generate a labelled synthetic scene");
  synth_cmd->add_option("-o,--out", syn.out_dir, "output directory")->required();
  synth_cmd->add_option("--name", syn.name, "file stem");
  synth_cmd->add_option("--slope", syn.spec.slope_deg, "ground slope about the y axis, degrees");
  synth_cmd->add_option("--extent", syn.spec.extent, "side length of the square ground patch, m");
  synth_cmd->add_option("--points", syn.spec.points, "total point count");
  synth_cmd->add_option("--box", syn.boxes, "obstacle cx,cy,sx,sy,height[,base] (repeatable)");
  synth_cmd->add_option("--noise", syn.spec.noise_sigma, "gaussian noise sigma, m");
  synth_cmd->add_option("--seed", syn.spec.seed, "generator seed");
  synth_cmd->add_option("--dist-to-ground", syn.spec.dist_to_ground, "sensor height, m");

  ConfigOptions dump_opts;
  auto* dump_cmd = app.add_subcommand("config-dump", "print the effective configuration");
  add_config_options(*dump_cmd, dump_opts);

  // CLI11 consumes arguments from the back of the vector.
  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kFailure;
  }

  try {
    if (segment_cmd->parsed()) return cmd_segment(seg, out, err);
    if (evaluate_cmd->parsed()) return cmd_evaluate(ev, out, err);
    if (synth_cmd->parsed()) return cmd_synth(syn, out);
    if (dump_cmd->parsed()) {
      out << dump_config(resolve_config(dump_opts));
      return kOk;
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  }
  return kFailure;
}

}  // namespace gseg3d::cli
