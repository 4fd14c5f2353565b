#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gseg3d/pipeline.hpp"
#include "gseg3d/point_cloud.hpp"

namespace gseg3d {

enum class RangeMode {
  Planar,  // sqrt(x^2 + y^2)
  Full,    // sqrt(x^2 + y^2 + z^2)
};

struct GroundTruthPolicy {
  /// road, parking, sidewalk, other-ground, lane-marking, terrain
  std::set<std::uint16_t> ground_label_ids = {40, 44, 48, 49, 60, 72};
  RangeMode range = RangeMode::Planar;

  [[nodiscard]] bool is_ground(std::uint16_t label) const {
    return ground_label_ids.count(label) != 0;
  }
};

struct ConfusionCounts {
  std::uint64_t ntp = 0;
  std::uint64_t nfp = 0;
  std::uint64_t nfn = 0;
  std::uint64_t ntn = 0;

  [[nodiscard]] std::uint64_t total() const noexcept { return ntp + nfp + nfn + ntn; }
  ConfusionCounts& operator+=(const ConfusionCounts& o) noexcept {
    ntp += o.ntp;
    nfp += o.nfp;
    nfn += o.nfn;
    ntn += o.ntn;
    return *this;
  }
  friend bool operator==(const ConfusionCounts&, const ConfusionCounts&) = default;
};

double point_range(const Point3& p, RangeMode mode);

/// Counts over points whose range is <= max_dist. Truth-positive iff the label
/// is a ground class, predicted-positive iff the mask byte is set.
ConfusionCounts confusion_counts(std::span<const std::uint8_t> mask, const LabelArray& truth,
                                 const GroundTruthPolicy& policy, double max_dist,
                                 const PointCloud& cloud);

/// Undefined (nullopt) when the denominator is zero.
std::optional<double> precision(const ConfusionCounts& c);
std::optional<double> recall(const ConfusionCounts& c);
std::optional<double> f1(const ConfusionCounts& c);
std::optional<double> f1(std::optional<double> p, std::optional<double> r);

struct MetricRow {
  double distance_m = 0.0;
  ConfusionCounts counts;
  std::optional<double> precision;
  std::optional<double> recall;
  std::optional<double> f1;

  static MetricRow from_counts(double distance_m, const ConfusionCounts& counts);
};

/// 10, 20, ..., 100 m.
std::vector<double> default_thresholds();

std::vector<MetricRow> evaluate_scan(const PointCloud& cloud, std::span<const std::uint8_t> mask,
                                     const LabelArray& truth, const GroundTruthPolicy& policy,
                                     std::span<const double> thresholds);

/// Mean and population standard deviation of the defined values.
struct MeanStd {
  double mean = 0.0;
  double std = 0.0;
  std::size_t count = 0;
  /// Undefined values left out of the statistic.
  std::size_t excluded = 0;

  static MeanStd of(std::span<const std::optional<double>> values);
  friend bool operator==(const MeanStd&, const MeanStd&) = default;
};

struct SequenceReport {
  std::vector<MetricRow> rows;
  MeanStd precision;
  MeanStd recall;
  MeanStd f1;
  /// Harmonic mean of the mean precision and mean recall (the aggregate F1 column).
  std::optional<double> f1_of_means;
  MeanStd runtime_ms;
  std::size_t scans_evaluated = 0;
  std::vector<std::string> skipped;
};

/// Accumulates scans of one sequence: counts are summed per threshold
/// (micro-average), metrics are derived once at the end.
class SequenceAccumulator {
 public:
  explicit SequenceAccumulator(std::vector<double> thresholds);

  void add_scan(std::span<const MetricRow> rows, double runtime_ms);
  void add_skipped(std::string what) { skipped_.push_back(std::move(what)); }

  [[nodiscard]] SequenceReport finish() const;

 private:
  std::vector<double> thresholds_;
  std::vector<ConfusionCounts> counts_;
  std::vector<std::optional<double>> runtimes_;
  std::vector<std::string> skipped_;
};

/// Builds the aggregate statistics from already-summed rows.
SequenceReport make_report(std::vector<MetricRow> rows, std::span<const std::optional<double>> runtimes_ms);

/// Segments and scores every `<stem>.bin` in `scan_dir` against `<stem>.label`
/// in `label_dir`. Scans without a readable label (or with a corrupt file) are
/// skipped and listed in SequenceReport::skipped.
SequenceReport evaluate_sequence(const std::filesystem::path& scan_dir,
                                 const std::filesystem::path& label_dir,
                                 const PipelineConfig& cfg, const GroundTruthPolicy& policy,
                                 std::span<const double> thresholds, unsigned jobs = 1);

enum class ReportFormat { Csv, Json };

/// CSV columns: distance,ntp,nfp,nfn,ntn,precision,recall,f1,precision_std,recall_std,f1_std.
/// One row per threshold, then a single "mean" aggregate row (omitted when there are no rows).
std::string emit_report(const SequenceReport& report, ReportFormat format);

SequenceReport parse_report_json(std::string_view json);

/// "Pr 96.6±2.7 / Rc 89.4±5.1 / F1 92.8" (percent, one decimal).
std::string format_summary(const SequenceReport& report);

}  // namespace gseg3d
