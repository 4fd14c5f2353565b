#include "gseg3d/cloud_io.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <iterator>
#include <string>
#include <vector>

namespace gseg3d {
namespace {

std::vector<std::byte> slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  in.seekg(0, std::ios::end);
  const auto size = in.tellg();
  if (size < 0) throw IoError("cannot determine size of " + path.string());
  in.seekg(0, std::ios::beg);
  std::vector<std::byte> bytes(static_cast<std::size_t>(size));
  if (!bytes.empty() && !in.read(reinterpret_cast<char*>(bytes.data()), size)) {
    throw IoError("short read on " + path.string());
  }
  return bytes;
}

std::uint32_t load_u32_le(const std::byte* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

void store_u32_le(std::uint32_t v, char* out) {
  for (int i = 0; i < 4; ++i) out[i] = static_cast<char>((v >> (8 * i)) & 0xffu);
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  return out;
}

}  // namespace

PointCloud decode_kitti_bin(std::span<const std::byte> bytes) {
  constexpr std::size_t kRecord = 16;
  if (bytes.size() % kRecord != 0) {
    throw MalformedFileError("KITTI scan size " + std::to_string(bytes.size()) +
                             " is not a multiple of 16 bytes");
  }
  const std::size_t records = bytes.size() / kRecord;
  std::vector<Point3> points;
  std::vector<float> intensity;
  std::vector<std::size_t> dropped;
  points.reserve(records);
  intensity.reserve(records);
  for (std::size_t r = 0; r < records; ++r) {
    const std::byte* rec = bytes.data() + r * kRecord;
    const float x = std::bit_cast<float>(load_u32_le(rec));
    const float y = std::bit_cast<float>(load_u32_le(rec + 4));
    const float z = std::bit_cast<float>(load_u32_le(rec + 8));
    const float i = std::bit_cast<float>(load_u32_le(rec + 12));
    if (!std::isfinite(x) || !std::isfinite(y) || !std::isfinite(z)) {
      dropped.push_back(r);
      continue;
    }
    points.emplace_back(x, y, z);
    intensity.push_back(i);
  }
  PointCloud cloud(std::move(points), std::move(intensity));
  cloud.set_dropped_records(std::move(dropped));
  return cloud;
}

PointCloud read_kitti_bin(const std::filesystem::path& path) {
  const auto bytes = slurp(path);
  try {
    return decode_kitti_bin(bytes);
  } catch (const MalformedFileError& e) {
    throw MalformedFileError(path.string() + ": " + e.what());
  }
}

void write_kitti_bin(const std::filesystem::path& path, const PointCloud& cloud) {
  std::string buf(cloud.size() * 16, '\0');
  for (std::size_t k = 0; k < cloud.size(); ++k) {
    const Point3& p = cloud[k];
    const float rec[4] = {static_cast<float>(p.x()), static_cast<float>(p.y()),
                          static_cast<float>(p.z()),
                          cloud.has_intensity() ? cloud.intensity()[k] : 0.0f};
    for (int c = 0; c < 4; ++c) store_u32_le(std::bit_cast<std::uint32_t>(rec[c]), &buf[k * 16 + c * 4]);
  }
  auto out = open_out(path);
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) throw IoError("write failed on " + path.string());
}

LabelArray decode_semantic_labels(std::span<const std::byte> bytes) {
  if (bytes.size() % 4 != 0) {
    throw MalformedFileError("label file size " + std::to_string(bytes.size()) +
                             " is not a multiple of 4 bytes");
  }
  LabelArray labels(bytes.size() / 4);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    labels[i] = static_cast<std::uint16_t>(load_u32_le(bytes.data() + 4 * i) & 0xffffu);
  }
  return labels;
}

LabelArray read_semantic_labels(const std::filesystem::path& path) {
  const auto bytes = slurp(path);
  try {
    return decode_semantic_labels(bytes);
  } catch (const MalformedFileError& e) {
    throw MalformedFileError(path.string() + ": " + e.what());
  }
}

void write_semantic_labels(const std::filesystem::path& path, const LabelArray& labels) {
  std::string buf(labels.size() * 4, '\0');
  for (std::size_t i = 0; i < labels.size(); ++i) store_u32_le(labels[i], &buf[4 * i]);
  auto out = open_out(path);
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) throw IoError("write failed on " + path.string());
}

LabelArray align_labels(const LabelArray& raw, const PointCloud& cloud) {
  const auto dropped = cloud.dropped_records();
  if (raw.size() != cloud.size() + dropped.size()) {
    throw ContractViolation("label count " + std::to_string(raw.size()) +
                            " does not match scan record count " +
                            std::to_string(cloud.size() + dropped.size()));
  }
  if (dropped.empty()) return raw;
  LabelArray out;
  out.reserve(cloud.size());
  std::size_t next = 0;
  for (std::size_t r = 0; r < raw.size(); ++r) {
    if (next < dropped.size() && dropped[next] == r) {
      ++next;
      continue;
    }
    out.push_back(raw[r]);
  }
  return out;
}

std::pair<PointCloud, SyntheticSeedInfo> inject_synthetic_seed(const PointCloud& cloud,
                                                              double radius, double depth,
                                                              double spacing) {
  if (!(radius >= 0.0) || !(depth > 0.0) || !(spacing > 0.0)) {
    throw ContractViolation("synthetic seed needs radius >= 0, depth > 0, spacing > 0");
  }
  // Absorbs round-off in (i * spacing)^2 for lattice points that sit on the rim.
  const double r2 = radius * radius * (1.0 + 1e-12) + 1e-12;
  const auto half = static_cast<long>(std::floor(radius / spacing + 1e-9));
  std::vector<Point3> lattice;
  for (long i = -half; i <= half; ++i) {
    for (long j = -half; j <= half; ++j) {
      const double x = static_cast<double>(i) * spacing;
      const double y = static_cast<double>(j) * spacing;
      if (x * x + y * y <= r2) lattice.emplace_back(x, y, -depth);
    }
  }
  PointCloud out = cloud;
  out.append(lattice);
  return {std::move(out), SyntheticSeedInfo{lattice.size(), radius, depth, spacing}};
}

SegmentationResult strip_synthetic(SegmentationResult result, const SyntheticSeedInfo& info) {
  if (info.count > result.mask.size()) {
    throw ContractViolation("synthetic count " + std::to_string(info.count) +
                            " exceeds mask length " + std::to_string(result.mask.size()));
  }
  result.mask.resize(result.mask.size() - info.count);
  return result;
}

void write_mask(const std::filesystem::path& path, const SegmentationResult& result,
                MaskFormat format, const PointCloud* cloud) {
  auto out = open_out(path);
  if (format == MaskFormat::Binary) {
    std::string buf(result.mask.size(), '\0');
    for (std::size_t i = 0; i < result.mask.size(); ++i) buf[i] = result.mask[i] ? 1 : 0;
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  } else {
    if (cloud == nullptr || cloud->size() != result.mask.size()) {
      throw ContractViolation("text mask output needs the matching cloud");
    }
    out << std::setprecision(7);
    for (std::size_t i = 0; i < result.mask.size(); ++i) {
      const Point3& p = (*cloud)[i];
      out << p.x() << ' ' << p.y() << ' ' << p.z() << ' ' << (result.mask[i] ? 1 : 0) << '\n';
    }
  }
  if (!out) throw IoError("write failed on " + path.string());
}

GroundMask read_mask(const std::filesystem::path& path) {
  const auto bytes = slurp(path);
  GroundMask mask(bytes.size());
  for (std::size_t i = 0; i < bytes.size(); ++i) {
    const auto b = static_cast<std::uint8_t>(bytes[i]);
    if (b > 1) throw MalformedFileError(path.string() + ": mask byte is neither 0 nor 1");
    mask[i] = b;
  }
  return mask;
}

void sort_distinct_ids(std::vector<PointId>& ids) {
  if (ids.size() < 64) {
    std::sort(ids.begin(), ids.end());
    return;
  }
  const PointId hi = *std::max_element(ids.begin(), ids.end());
  if (hi / 4 > ids.size()) {
    std::sort(ids.begin(), ids.end());
    return;
  }
  std::vector<bool> present(static_cast<std::size_t>(hi) + 1, false);
  for (const PointId id : ids) present[id] = true;
  std::size_t k = 0;
  for (std::size_t id = 0; id <= hi; ++id) {
    if (present[id]) ids[k++] = static_cast<PointId>(id);
  }
}

}  // namespace gseg3d
