#include "gseg3d/centroid_index.hpp"

#include <algorithm>

namespace gseg3d {

CentroidIndex::CentroidIndex(std::vector<CentroidEntry> entries, std::size_t leaf_size)
    : leaf_size_(std::max<std::size_t>(1, leaf_size)), entries_(std::move(entries)) {
  if (!entries_.empty()) {
    nodes_.reserve(2 * entries_.size() / leaf_size_ + 1);
    build(0, static_cast<std::uint32_t>(entries_.size()));
  }
}

std::uint32_t CentroidIndex::build(std::uint32_t begin, std::uint32_t end) {
  const auto id = static_cast<std::uint32_t>(nodes_.size());
  Point3 lo = entries_[begin].centroid;
  Point3 hi = lo;
  for (std::uint32_t i = begin; i < end; ++i) {
    lo = lo.cwiseMin(entries_[i].centroid);
    hi = hi.cwiseMax(entries_[i].centroid);
  }
  nodes_.push_back(Node{begin, end});
  nodes_.back().lo = lo;
  nodes_.back().hi = hi;
  if (end - begin <= leaf_size_) return id;

  int axis = 0;
  (hi - lo).maxCoeff(&axis);
  if (hi[axis] == lo[axis]) return id;  // all coincident: keep as a leaf

  const std::uint32_t mid = begin + (end - begin) / 2;
  std::nth_element(entries_.begin() + begin, entries_.begin() + mid, entries_.begin() + end,
                   [axis](const CentroidEntry& a, const CentroidEntry& b) {
                     return a.centroid[axis] < b.centroid[axis];
                   });
  const std::uint32_t left = build(begin, mid);
  const std::uint32_t right = build(mid, end);
  Node& node = nodes_[id];
  node.axis = axis;
  node.left = left;
  node.right = right;
  return id;
}

void CentroidIndex::query(std::uint32_t node_id, const Point3& center, double r2,
                          std::vector<CellId>& out) const {
  const Node& node = nodes_[node_id];
  const Point3 nearest = (node.lo - center).cwiseMax(center - node.hi).cwiseMax(0.0);
  if (nearest.squaredNorm() > r2) return;
  // Rounding is monotone, so no entry lies farther than the far corner.
  const Point3 farthest = (center - node.lo).cwiseAbs().cwiseMax((node.hi - center).cwiseAbs());
  if (farthest.squaredNorm() <= r2) {
    for (std::uint32_t i = node.begin; i < node.end; ++i) out.push_back(entries_[i].cell);
    return;
  }
  if (node.axis < 0) {
    for (std::uint32_t i = node.begin; i < node.end; ++i) {
      if ((entries_[i].centroid - center).squaredNorm() <= r2) out.push_back(entries_[i].cell);
    }
    return;
  }
  query(node.left, center, r2, out);
  query(node.right, center, r2, out);
}

std::vector<CellId> CentroidIndex::radius_query(const Point3& center, double radius) const {
  std::vector<CellId> out;
  if (entries_.empty() || radius < 0.0) return out;
  query(0, center, radius * radius, out);
  std::sort(out.begin(), out.end());
  return out;
}

CentroidIndex build_centroid_index(const VoxelGrid& grid) {
  std::vector<CentroidEntry> entries;
  const auto cells = grid.cells();
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (cells[i].ground_state == GroundState::TentativeGround) {
      entries.push_back(CentroidEntry{static_cast<CellId>(i), cells[i].centroid});
    }
  }
  return CentroidIndex(std::move(entries));
}

}  // namespace gseg3d
