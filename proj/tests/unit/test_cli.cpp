#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "gseg3d/cloud_io.hpp"
#include "gseg3d/evaluation.hpp"
#include "gseg3d_cli/cli.hpp"
#include "oracles.hpp"

namespace gseg3d {
namespace {

namespace fs = std::filesystem;

struct Outcome {
  int code = -1;
  std::string out;
  std::string err;
};

Outcome run_cli(std::vector<std::string> args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Writes `n` labelled synthetic scans as <dir>/velodyne/00000k.bin and <dir>/labels/00000k.label.
void make_sequence(const fs::path& dir, int n) {
  for (int k = 0; k < n; ++k) {
    const std::string stem = "00000" + std::to_string(k);
    const auto r = run_cli({"synth", "-o", (dir / "velodyne").string(), "--name", stem, "--points",
                            "6000", "--noise", "0.02", "--seed", std::to_string(k + 1), "--box",
                            std::to_string(3 + k) + ",2,1.5,1.5,1.0"});
    ASSERT_EQ(r.code, 0) << r.err;
    fs::create_directories(dir / "labels");
    fs::rename(dir / "velodyne" / (stem + ".label"), dir / "labels" / (stem + ".label"));
    fs::remove(dir / "velodyne" / (stem + ".json"));
  }
}

TEST(CliSegment, SingleScanWritesMaskAndStats) {
  testing::TempDir dir("cli");
  ASSERT_EQ(run_cli({"synth", "-o", dir.path().string(), "--points", "3000"}).code, 0);
  const auto r = run_cli({"segment", (dir / "scene.bin").string(), "-o", (dir / "out").string()});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(read_mask(dir / "out/scene.mask").size(), 3000u);
  const auto stats = nlohmann::json::parse(slurp(dir / "out/stats.json"));
  ASSERT_EQ(stats.at("scans").size(), 1u);
  EXPECT_GT(stats["scans"][0]["phase1"]["cells"].get<int>(), 0);
  EXPECT_TRUE(stats["scans"][0].contains("runtime_ms"));
  EXPECT_TRUE(r.err.empty());
}

TEST(CliSegment, CorruptScanInDirectoryIsPartial) {
  testing::TempDir dir("cli");
  ASSERT_EQ(run_cli({"synth", "-o", (dir / "in").string(), "--name", "good", "--points", "2000"}).code, 0);
  {
    std::ofstream bad(dir / "in/broken.bin", std::ios::binary);
    bad << "0123456789";  // not a multiple of 16 bytes
  }
  const auto r = run_cli({"segment", (dir / "in").string(), "-o", (dir / "out").string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_TRUE(fs::exists(dir / "out/good.mask"));
  EXPECT_FALSE(fs::exists(dir / "out/broken.mask"));
  EXPECT_NE(r.err.find("broken.bin"), std::string::npos);
  EXPECT_EQ(r.out.find("broken.bin"), std::string::npos);
}

TEST(CliSegment, MissingInputFails) {
  testing::TempDir dir("cli");
  const auto r = run_cli({"segment", (dir / "nope.bin").string(), "-o", (dir / "out").string()});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("nope.bin"), std::string::npos);
}

TEST(CliSegment, JobsDoNotChangeOutputs) {
  testing::TempDir dir("cli");
  make_sequence(dir.path(), 4);
  ASSERT_EQ(run_cli({"segment", (dir / "velodyne").string(), "-o", (dir / "a").string()}).code, 0);
  ASSERT_EQ(run_cli({"segment", (dir / "velodyne").string(), "-o", (dir / "b").string(), "-j", "3"}).code, 0);
  for (int k = 0; k < 4; ++k) {
    const std::string name = "00000" + std::to_string(k) + ".mask";
    EXPECT_EQ(slurp(dir / "a" / name), slurp(dir / "b" / name));
  }
}

TEST(CliEvaluate, SyntheticSequenceReport) {
  testing::TempDir dir("cli");
  make_sequence(dir.path(), 5);
  const auto r = run_cli({"evaluate", "--scans", (dir / "velodyne").string(), "--labels",
                          (dir / "labels").string(), "--report", (dir / "report.json").string()});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("Pr "), std::string::npos);
  EXPECT_NE(r.out.find(" / Rc "), std::string::npos);
  const auto report = nlohmann::json::parse(slurp(dir / "report.json"));
  EXPECT_EQ(report.at("scans_evaluated").get<int>(), 5);
  EXPECT_EQ(report.at("rows").size(), 10u);

  const auto csv = run_cli({"evaluate", "--scans", (dir / "velodyne").string(), "--labels",
                            (dir / "labels").string(), "--report", (dir / "report.csv").string()});
  EXPECT_EQ(csv.code, 0);
  EXPECT_EQ(slurp(dir / "report.csv").rfind("distance,", 0), 0u);
}

TEST(CliEvaluate, MismatchedCountsReportSkips) {
  testing::TempDir dir("cli");
  make_sequence(dir.path(), 3);
  fs::remove(dir / "labels/000001.label");
  const auto r = run_cli({"evaluate", "--scans", (dir / "velodyne").string(), "--labels",
                          (dir / "labels").string(), "--report", (dir / "r.json").string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("000001.bin"), std::string::npos);
  const auto report = nlohmann::json::parse(slurp(dir / "r.json"));
  EXPECT_EQ(report.at("scans_evaluated").get<int>(), 2);
  EXPECT_EQ(report.at("skipped").size(), 1u);
}

TEST(CliEvaluate, SegmentThenScoreEqualsEndToEnd) {
  testing::TempDir dir("cli");
  make_sequence(dir.path(), 3);
  ASSERT_EQ(run_cli({"segment", (dir / "velodyne").string(), "-o", (dir / "masks").string()}).code, 0);
  const auto r = run_cli({"evaluate", "--scans", (dir / "velodyne").string(), "--labels",
                          (dir / "labels").string(), "--report", (dir / "r.json").string(), "-j", "2"});
  ASSERT_EQ(r.code, 0);
  const SequenceReport end_to_end = parse_report_json(slurp(dir / "r.json"));

  const auto thresholds = default_thresholds();
  SequenceAccumulator acc(thresholds);
  for (int k = 0; k < 3; ++k) {
    const std::string stem = "00000" + std::to_string(k);
    const PointCloud cloud = read_kitti_bin(dir / "velodyne" / (stem + ".bin"));
    const GroundMask mask = read_mask(dir / "masks" / (stem + ".mask"));
    const LabelArray truth = read_semantic_labels(dir / "labels" / (stem + ".label"));
    acc.add_scan(evaluate_scan(cloud, mask, truth, GroundTruthPolicy{}, thresholds), 0.0);
  }
  const SequenceReport staged = acc.finish();
  ASSERT_EQ(staged.rows.size(), end_to_end.rows.size());
  for (std::size_t t = 0; t < staged.rows.size(); ++t) {
    EXPECT_EQ(staged.rows[t].counts, end_to_end.rows[t].counts);
  }
}

TEST(CliSynth, DeterministicFiles) {
  testing::TempDir dir("cli");
  for (const char* sub : {"a", "b"}) {
    ASSERT_EQ(run_cli({"synth", "-o", (dir / sub).string(), "--points", "4000", "--noise", "0.03",
                       "--box", "2,2,1,1,1.5", "--seed", "9"})
                  .code,
              0);
  }
  for (const char* ext : {".bin", ".label", ".json"}) {
    const std::string name = std::string("scene") + ext;
    EXPECT_EQ(slurp(dir / "a" / name), slurp(dir / "b" / name)) << name;
  }
}

TEST(CliSynth, FlatSceneLabelsAreRoad) {
  testing::TempDir dir("cli");
  ASSERT_EQ(run_cli({"synth", "-o", dir.path().string(), "--points", "2500"}).code, 0);
  const LabelArray labels = read_semantic_labels(dir / "scene.label");
  ASSERT_EQ(labels.size(), 2500u);
  for (const auto l : labels) ASSERT_EQ(l, 40);
}

TEST(CliSynth, SteepRampIsNotRecalled) {
  testing::TempDir dir("cli");
  ASSERT_EQ(run_cli({"synth", "-o", dir.path().string(), "--slope", "45", "--points", "10000"}).code, 0);
  ASSERT_EQ(run_cli({"segment", (dir / "scene.bin").string(), "-o", (dir / "out").string()}).code, 0);
  const GroundMask mask = read_mask(dir / "out/scene.mask");
  std::size_t hit = 0;
  for (const auto m : mask) hit += m;
  EXPECT_LE(static_cast<double>(hit) / static_cast<double>(mask.size()), 0.05);
}

TEST(CliConfigDump, DefaultsAndOverrides) {
  const auto d = run_cli({"config-dump"});
  EXPECT_EQ(d.code, 0);
  EXPECT_NE(d.out.find("groundInlierThreshold: 0.125\n"), std::string::npos);

  const auto s = run_cli({"config-dump", "--set", "slopeThresholdDegrees=20"});
  EXPECT_EQ(s.code, 0);
  EXPECT_NE(s.out.find("slopeThresholdDegrees: 20.0\n"), std::string::npos);
  std::string expected = d.out;
  expected.replace(expected.find("slopeThresholdDegrees: 30.0"), 27, "slopeThresholdDegrees: 20.0");
  EXPECT_EQ(s.out, expected);

  const auto bad = run_cli({"config-dump", "--set", "bogus=1"});
  EXPECT_EQ(bad.code, 1);
  EXPECT_NE(bad.err.find("bogus"), std::string::npos);
  EXPECT_TRUE(bad.out.empty());
}

TEST(CliConfigDump, PrecedenceFileThenSetThenFlag) {
  testing::TempDir dir("cli");
  {
    std::ofstream cfg(dir / "c.cfg");
    cfg << "slopeThresholdDegrees: 25\nrobotRadius: 1.5\n";
  }
  const std::string file = (dir / "c.cfg").string();
  auto r = run_cli({"config-dump", "--config", file});
  EXPECT_NE(r.out.find("slopeThresholdDegrees: 25.0\n"), std::string::npos);
  EXPECT_NE(r.out.find("robotRadius: 1.5\n"), std::string::npos);
  r = run_cli({"config-dump", "--config", file, "--set", "slopeThresholdDegrees=22"});
  EXPECT_NE(r.out.find("slopeThresholdDegrees: 22.0\n"), std::string::npos);
  r = run_cli({"config-dump", "--config", file, "--set", "slopeThresholdDegrees=22",
               "--slopeThresholdDegrees", "21"});
  EXPECT_NE(r.out.find("slopeThresholdDegrees: 21.0\n"), std::string::npos);
  EXPECT_NE(r.out.find("robotRadius: 1.5\n"), std::string::npos);

  ::setenv(std::string(cli::kConfigEnvVar).c_str(), file.c_str(), 1);
  r = run_cli({"config-dump"});
  ::unsetenv(std::string(cli::kConfigEnvVar).c_str());
  EXPECT_NE(r.out.find("robotRadius: 1.5\n"), std::string::npos);
}

}  // namespace
}  // namespace gseg3d
