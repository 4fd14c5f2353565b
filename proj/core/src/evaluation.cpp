#include "gseg3d/evaluation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <mutex>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "gseg3d/cloud_io.hpp"

namespace gseg3d {
namespace {

using nlohmann::json;

std::optional<double> ratio(std::uint64_t num, std::uint64_t den) {
  if (den == 0) return std::nullopt;
  return static_cast<double>(num) / static_cast<double>(den);
}

void check_aligned(std::size_t mask, std::size_t truth, std::size_t cloud) {
  if (mask != truth || mask != cloud) {
    throw ContractViolation("length mismatch: mask " + std::to_string(mask) + ", labels " +
                            std::to_string(truth) + ", cloud " + std::to_string(cloud));
  }
}

std::string csv_value(const std::optional<double>& v) {
  if (!v) return "";
  std::ostringstream out;
  out.precision(17);
  out << *v;
  return out.str();
}

json opt_to_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::optional<double> opt_from_json(const json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<double>();
}

json mean_std_to_json(const MeanStd& m) {
  return json{{"mean", m.mean}, {"std", m.std}, {"count", m.count}, {"excluded", m.excluded}};
}

MeanStd mean_std_from_json(const json& j) {
  MeanStd m;
  m.mean = j.at("mean").get<double>();
  m.std = j.at("std").get<double>();
  m.count = j.at("count").get<std::size_t>();
  m.excluded = j.at("excluded").get<std::size_t>();
  return m;
}

struct ScanOutcome {
  std::vector<MetricRow> rows;
  double runtime_ms = 0.0;
  std::optional<std::string> error;
};

ScanOutcome evaluate_one(const std::filesystem::path& scan, const std::filesystem::path& label,
                         const PipelineConfig& cfg, const GroundTruthPolicy& policy,
                         std::span<const double> thresholds) {
  ScanOutcome out;
  try {
    if (!std::filesystem::exists(label)) {
      out.error = scan.filename().string() + ": missing label " + label.string();
      return out;
    }
    const PointCloud cloud = read_kitti_bin(scan);
    const LabelArray truth = align_labels(read_semantic_labels(label), cloud);
    const SegmentationResult result = segment(cloud, cfg);
    out.rows = evaluate_scan(cloud, result.mask, truth, policy, thresholds);
    out.runtime_ms = result.stats.runtime_ms;
  } catch (const std::exception& e) {
    out.error = scan.filename().string() + ": " + e.what();
  }
  return out;
}

}  // namespace

double point_range(const Point3& p, RangeMode mode) {
  return mode == RangeMode::Planar ? std::hypot(p.x(), p.y()) : p.norm();
}

ConfusionCounts confusion_counts(std::span<const std::uint8_t> mask, const LabelArray& truth,
                                 const GroundTruthPolicy& policy, double max_dist,
                                 const PointCloud& cloud) {
  check_aligned(mask.size(), truth.size(), cloud.size());
  ConfusionCounts c;
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (point_range(cloud[i], policy.range) > max_dist) continue;
    const bool truth_ground = policy.is_ground(truth[i]);
    const bool pred_ground = mask[i] != 0;
    if (truth_ground && pred_ground) {
      ++c.ntp;
    } else if (!truth_ground && pred_ground) {
      ++c.nfp;
    } else if (truth_ground) {
      ++c.nfn;
    } else {
      ++c.ntn;
    }
  }
  return c;
}

std::optional<double> precision(const ConfusionCounts& c) { return ratio(c.ntp, c.ntp + c.nfp); }
std::optional<double> recall(const ConfusionCounts& c) { return ratio(c.ntp, c.ntp + c.nfn); }

std::optional<double> f1(std::optional<double> p, std::optional<double> r) {
  if (!p || !r || *p + *r == 0.0) return std::nullopt;
  return 2.0 * *p * *r / (*p + *r);
}

std::optional<double> f1(const ConfusionCounts& c) { return f1(precision(c), recall(c)); }

MetricRow MetricRow::from_counts(double distance_m, const ConfusionCounts& counts) {
  MetricRow row;
  row.distance_m = distance_m;
  row.counts = counts;
  row.precision = gseg3d::precision(counts);
  row.recall = gseg3d::recall(counts);
  row.f1 = gseg3d::f1(row.precision, row.recall);
  return row;
}

std::vector<double> default_thresholds() {
  std::vector<double> t;
  for (int d = 10; d <= 100; d += 10) t.push_back(d);
  return t;
}

std::vector<MetricRow> evaluate_scan(const PointCloud& cloud, std::span<const std::uint8_t> mask,
                                     const LabelArray& truth, const GroundTruthPolicy& policy,
                                     std::span<const double> thresholds) {
  check_aligned(mask.size(), truth.size(), cloud.size());
  std::vector<ConfusionCounts> counts(thresholds.size());
  for (std::size_t i = 0; i < mask.size(); ++i) {
    const double range = point_range(cloud[i], policy.range);
    const bool truth_ground = policy.is_ground(truth[i]);
    const bool pred_ground = mask[i] != 0;
    for (std::size_t t = 0; t < thresholds.size(); ++t) {
      if (range > thresholds[t]) continue;
      ConfusionCounts& c = counts[t];
      if (truth_ground) {
        ++(pred_ground ? c.ntp : c.nfn);
      } else {
        ++(pred_ground ? c.nfp : c.ntn);
      }
    }
  }
  std::vector<MetricRow> rows;
  rows.reserve(thresholds.size());
  for (std::size_t t = 0; t < thresholds.size(); ++t) {
    rows.push_back(MetricRow::from_counts(thresholds[t], counts[t]));
  }
  return rows;
}

MeanStd MeanStd::of(std::span<const std::optional<double>> values) {
  MeanStd m;
  double sum = 0.0;
  for (const auto& v : values) {
    if (v) {
      sum += *v;
      ++m.count;
    } else {
      ++m.excluded;
    }
  }
  if (m.count == 0) return m;
  m.mean = sum / static_cast<double>(m.count);
  double sq = 0.0;
  for (const auto& v : values) {
    if (v) sq += (*v - m.mean) * (*v - m.mean);
  }
  m.std = std::sqrt(sq / static_cast<double>(m.count));
  return m;
}

SequenceReport make_report(std::vector<MetricRow> rows,
                           std::span<const std::optional<double>> runtimes_ms) {
  SequenceReport report;
  std::vector<std::optional<double>> p, r, f;
  for (const MetricRow& row : rows) {
    p.push_back(row.precision);
    r.push_back(row.recall);
    f.push_back(row.f1);
  }
  report.precision = MeanStd::of(p);
  report.recall = MeanStd::of(r);
  report.f1 = MeanStd::of(f);
  if (report.precision.count > 0 && report.recall.count > 0) {
    report.f1_of_means = gseg3d::f1(report.precision.mean, report.recall.mean);
  }
  report.runtime_ms = MeanStd::of(runtimes_ms);
  report.rows = std::move(rows);
  return report;
}

SequenceAccumulator::SequenceAccumulator(std::vector<double> thresholds)
    : thresholds_(std::move(thresholds)), counts_(thresholds_.size()) {}

void SequenceAccumulator::add_scan(std::span<const MetricRow> rows, double runtime_ms) {
  if (rows.size() != thresholds_.size()) {
    throw ContractViolation("scan rows do not match the configured thresholds");
  }
  for (std::size_t t = 0; t < rows.size(); ++t) counts_[t] += rows[t].counts;
  runtimes_.emplace_back(runtime_ms);
}

SequenceReport SequenceAccumulator::finish() const {
  std::vector<MetricRow> rows;
  for (std::size_t t = 0; t < thresholds_.size(); ++t) {
    rows.push_back(MetricRow::from_counts(thresholds_[t], counts_[t]));
  }
  SequenceReport report = make_report(std::move(rows), runtimes_);
  report.scans_evaluated = runtimes_.size();
  report.skipped = skipped_;
  return report;
}

SequenceReport evaluate_sequence(const std::filesystem::path& scan_dir,
                                 const std::filesystem::path& label_dir,
                                 const PipelineConfig& cfg, const GroundTruthPolicy& policy,
                                 std::span<const double> thresholds, unsigned jobs) {
  cfg.validate();
  if (!std::filesystem::is_directory(scan_dir)) {
    throw IoError("scan directory " + scan_dir.string() + " does not exist");
  }
  std::vector<std::filesystem::path> scans;
  for (const auto& entry : std::filesystem::directory_iterator(scan_dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".bin") {
      scans.push_back(entry.path());
    }
  }
  std::sort(scans.begin(), scans.end());

  std::vector<ScanOutcome> outcomes(scans.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < scans.size(); k = next++) {
      const auto label = label_dir / (scans[k].stem().string() + ".label");
      outcomes[k] = evaluate_one(scans[k], label, cfg, policy, thresholds);
    }
  };
  const unsigned n_threads = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(scans.size())));
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  }

  // Results are folded in filename order regardless of completion order.
  SequenceAccumulator acc(std::vector<double>(thresholds.begin(), thresholds.end()));
  for (const ScanOutcome& o : outcomes) {
    if (o.error) {
      acc.add_skipped(*o.error);
    } else {
      acc.add_scan(o.rows, o.runtime_ms);
    }
  }
  return acc.finish();
}

std::string emit_report(const SequenceReport& report, ReportFormat format) {
  if (format == ReportFormat::Csv) {
    std::ostringstream out;
    out << "distance,ntp,nfp,nfn,ntn,precision,recall,f1,precision_std,recall_std,f1_std\n";
    for (const MetricRow& row : report.rows) {
      out << csv_value(row.distance_m) << ',' << row.counts.ntp << ',' << row.counts.nfp << ','
          << row.counts.nfn << ',' << row.counts.ntn << ',' << csv_value(row.precision) << ','
          << csv_value(row.recall) << ',' << csv_value(row.f1) << ",,,\n";
    }
    if (!report.rows.empty()) {
      auto defined = [](const MeanStd& m) {
        return m.count > 0 ? std::optional<double>(m.mean) : std::nullopt;
      };
      auto spread = [](const MeanStd& m) {
        return m.count > 0 ? std::optional<double>(m.std) : std::nullopt;
      };
      out << "mean,,,,," << csv_value(defined(report.precision)) << ','
          << csv_value(defined(report.recall)) << ',' << csv_value(report.f1_of_means) << ','
          << csv_value(spread(report.precision)) << ',' << csv_value(spread(report.recall)) << ','
          << csv_value(spread(report.f1)) << '\n';
    }
    return out.str();
  }

  json rows = json::array();
  for (const MetricRow& row : report.rows) {
    rows.push_back(json{{"distance", row.distance_m},
                        {"ntp", row.counts.ntp},
                        {"nfp", row.counts.nfp},
                        {"nfn", row.counts.nfn},
                        {"ntn", row.counts.ntn},
                        {"precision", opt_to_json(row.precision)},
                        {"recall", opt_to_json(row.recall)},
                        {"f1", opt_to_json(row.f1)}});
  }
  json doc{{"rows", rows},
           {"aggregate",
            {{"precision", mean_std_to_json(report.precision)},
             {"recall", mean_std_to_json(report.recall)},
             {"f1", mean_std_to_json(report.f1)},
             {"f1_of_means", opt_to_json(report.f1_of_means)}}},
           {"runtime_ms", mean_std_to_json(report.runtime_ms)},
           {"scans_evaluated", report.scans_evaluated},
           {"skipped", report.skipped}};
  return doc.dump(2) + "\n";
}

SequenceReport parse_report_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw MalformedFileError(std::string("report is not valid JSON: ") + e.what());
  }
  try {
    SequenceReport report;
    for (const json& r : doc.at("rows")) {
      MetricRow row;
      row.distance_m = r.at("distance").get<double>();
      row.counts.ntp = r.at("ntp").get<std::uint64_t>();
      row.counts.nfp = r.at("nfp").get<std::uint64_t>();
      row.counts.nfn = r.at("nfn").get<std::uint64_t>();
      row.counts.ntn = r.at("ntn").get<std::uint64_t>();
      row.precision = opt_from_json(r.at("precision"));
      row.recall = opt_from_json(r.at("recall"));
      row.f1 = opt_from_json(r.at("f1"));
      report.rows.push_back(row);
    }
    const json& agg = doc.at("aggregate");
    report.precision = mean_std_from_json(agg.at("precision"));
    report.recall = mean_std_from_json(agg.at("recall"));
    report.f1 = mean_std_from_json(agg.at("f1"));
    report.f1_of_means = opt_from_json(agg.at("f1_of_means"));
    report.runtime_ms = mean_std_from_json(doc.at("runtime_ms"));
    report.scans_evaluated = doc.at("scans_evaluated").get<std::size_t>();
    report.skipped = doc.at("skipped").get<std::vector<std::string>>();
    return report;
  } catch (const json::exception& e) {
    throw MalformedFileError(std::string("report JSON has an unexpected layout: ") + e.what());
  }
}

std::string format_summary(const SequenceReport& report) {
  auto pct = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.1f", 100.0 * v);
    return std::string(buf);
  };
  std::string out = "Pr " + pct(report.precision.mean) + "±" + pct(report.precision.std) +
                    " / Rc " + pct(report.recall.mean) + "±" + pct(report.recall.std) +
                    " / F1 " + (report.f1_of_means ? pct(*report.f1_of_means) : std::string("n/a"));
  return out;
}

}  // namespace gseg3d
