#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <utility>

#include "gseg3d/point_cloud.hpp"
#include "gseg3d/segmentation_result.hpp"

namespace gseg3d {

/// Parses a KITTI velodyne scan: consecutive little-endian float32 (x, y, z, intensity).
/// Non-finite records are dropped and listed in PointCloud::dropped_records().
/// Throws IoError / MalformedFileError.
PointCloud read_kitti_bin(const std::filesystem::path& path);

/// Same decoding from an in-memory byte buffer.
PointCloud decode_kitti_bin(std::span<const std::byte> bytes);

/// Writes `cloud` in the KITTI .bin layout (intensity 0 when absent).
void write_kitti_bin(const std::filesystem::path& path, const PointCloud& cloud);

/// Parses a SemanticKITTI .label file; keeps the lower 16 bits of every word.
LabelArray read_semantic_labels(const std::filesystem::path& path);
LabelArray decode_semantic_labels(std::span<const std::byte> bytes);

/// Writes labels as little-endian uint32 words (instance id 0).
void write_semantic_labels(const std::filesystem::path& path, const LabelArray& labels);

/// Removes the entries of dropped raw records so labels line up with a parsed cloud.
LabelArray align_labels(const LabelArray& raw, const PointCloud& cloud);

struct SyntheticSeedInfo {
  std::size_t count = 0;
  double radius = 0.0;
  double depth = 0.0;
  double spacing = 0.0;
};

/// Appends a square lattice (pitch `spacing`) clipped to the disk of `radius`
/// at z = -depth. The original points keep their order and ids.
std::pair<PointCloud, SyntheticSeedInfo> inject_synthetic_seed(const PointCloud& cloud,
                                                              double radius, double depth,
                                                              double spacing);

/// Drops the synthetic tail of a per-point result.
SegmentationResult strip_synthetic(SegmentationResult result, const SyntheticSeedInfo& info);

enum class MaskFormat { Binary, Text };

/// Binary: one byte per point. Text: "x y z label" per line, which needs the cloud.
void write_mask(const std::filesystem::path& path, const SegmentationResult& result,
                MaskFormat format = MaskFormat::Binary, const PointCloud* cloud = nullptr);

GroundMask read_mask(const std::filesystem::path& path);

}  // namespace gseg3d
