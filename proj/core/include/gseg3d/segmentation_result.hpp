#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace gseg3d {

/// 1 = ground, 0 = non-ground; aligned with cloud point order.
using GroundMask = std::vector<std::uint8_t>;

struct PhaseStats {
  std::size_t input_points = 0;
  std::size_t cells = 0;
  std::size_t line_cells = 0;
  std::size_t planar_cells = 0;
  std::size_t nonplanar_cells = 0;
  std::size_t tentative_cells = 0;
  std::size_t expanded_cells = 0;
  std::size_t ground_cells = 0;
  std::size_t ground_points = 0;
  std::size_t nonground_points = 0;
  double runtime_ms = 0.0;
};

struct SegmentationStats {
  PhaseStats phase1;
  PhaseStats phase2;
  std::size_t synthetic_points = 0;
  double runtime_ms = 0.0;
};

struct SegmentationResult {
  GroundMask mask;
  SegmentationStats stats;

  [[nodiscard]] std::size_t size() const noexcept { return mask.size(); }
  [[nodiscard]] bool is_ground(std::size_t i) const { return mask[i] != 0; }
};

}  // namespace gseg3d
