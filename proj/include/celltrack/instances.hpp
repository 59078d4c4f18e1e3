#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <vector>

#include "celltrack/image.hpp"

namespace celltrack {

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

/// One segmented cell in one frame. Frames are 1-based.
struct CellInstance {
  std::size_t frame_index = 0;
  Label label = 0;
  Point centroid;
  std::size_t area = 0;
  double activity = 0.0;

  friend bool operator==(const CellInstance&, const CellInstance&) = default;
};

/// One instance per distinct nonzero label, sorted by label. Centroids are the
/// unweighted mean pixel position, x = column, y = row.
inline std::vector<CellInstance> extract_instances(const LabelImage& mask, std::size_t frame_index) {
  struct Accum {
    double sum_x = 0.0;
    double sum_y = 0.0;
    std::size_t count = 0;
  };
  std::map<Label, Accum> by_label;
  for (std::size_t y = 0; y < mask.height(); ++y) {
    for (std::size_t x = 0; x < mask.width(); ++x) {
      const Label l = mask(x, y);
      if (l == 0) continue;
      auto& a = by_label[l];
      a.sum_x += static_cast<double>(x);
      a.sum_y += static_cast<double>(y);
      ++a.count;
    }
  }

  std::vector<CellInstance> out;
  out.reserve(by_label.size());
  for (const auto& [label, a] : by_label) {
    const double n = static_cast<double>(a.count);
    out.push_back(CellInstance{frame_index, label, {a.sum_x / n, a.sum_y / n}, a.count, 0.0});
  }
  return out;
}

/// Keeps instances with area >= min_area, preserving order.
inline std::vector<CellInstance> filter_min_area(const std::vector<CellInstance>& instances,
                                                 std::size_t min_area) {
  std::vector<CellInstance> out;
  std::copy_if(instances.begin(), instances.end(), std::back_inserter(out),
               [min_area](const CellInstance& c) { return c.area >= min_area; });
  return out;
}

/// Zeroes the pixels of every instance smaller than min_area, in every frame.
inline LabelMaskStack erase_small_instances(LabelMaskStack masks, std::size_t min_area) {
  if (min_area <= 1) return masks;
  for (auto& mask : masks.masks) {
    std::map<Label, std::size_t> areas;
    for (const Label l : mask.pixels()) {
      if (l != 0) ++areas[l];
    }
    for (Label& l : mask.pixels()) {
      if (l != 0 && areas[l] < min_area) l = 0;
    }
  }
  return masks;
}

}  // namespace celltrack
