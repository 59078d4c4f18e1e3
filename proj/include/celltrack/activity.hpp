#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "celltrack/image.hpp"
#include "celltrack/instances.hpp"

namespace celltrack {

/// Moving pixel-wise standard deviation S_t of one frame.
struct StdField {
  std::size_t frame_index = 0;
  Image<float> values;
  std::size_t n_minus = 0;
  std::size_t n_plus = 0;
};

/// Affine map applied by normalize_intensity: v' = (v - min) * scale.
struct IntensityScaling {
  double source_min = 0.0;
  double source_max = 0.0;
  double scale = 1.0;
};

inline constexpr double kNormalizedIntensityMax = 255.0;

/// Min-max normalizes the whole stack to [0, 255] in place so the linking
/// scale parameter means the same thing for 8-bit and 16-bit sources.
/// A constant stack maps to all zeros.
inline IntensityScaling normalize_intensity(ImageStack& stack) {
  IntensityScaling s;
  if (stack.frames.empty()) return s;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (const auto& f : stack.frames) {
    for (const float v : f.pixels()) {
      lo = std::min(lo, static_cast<double>(v));
      hi = std::max(hi, static_cast<double>(v));
    }
  }
  if (!(lo <= hi)) return s;  // frames without pixels
  s.source_min = lo;
  s.source_max = hi;
  const double range = hi - lo;
  s.scale = range > 0.0 ? kNormalizedIntensityMax / range : 0.0;
  for (auto& f : stack.frames) {
    for (float& v : f.pixels()) {
      v = range > 0.0 ? static_cast<float>((static_cast<double>(v) - lo) / range * kNormalizedIntensityMax)
                      : 0.0f;
    }
  }
  return s;
}

/// Population standard deviation over frames max(t-n_minus,1)..min(t+n_plus,N),
/// evaluated independently per pixel. t is 1-based.
inline StdField moving_std(const ImageStack& stack, std::size_t t, std::size_t n_minus,
                           std::size_t n_plus) {
  const std::size_t n = stack.count();
  if (t < 1 || t > n) {
    throw std::out_of_range("frame " + std::to_string(t) + " outside [1, " + std::to_string(n) + "]");
  }
  const std::size_t first = t > n_minus ? std::max<std::size_t>(t - n_minus, 1) : 1;
  const std::size_t last = std::min(t + n_plus, n);
  const std::size_t window = last - first + 1;

  const auto& ref = stack.frame(t);
  StdField out{t, Image<float>(ref.width(), ref.height(), 0.0f), n_minus, n_plus};
  if (window == 1) return out;

  std::vector<double> samples(window);
  for (std::size_t i = 0; i < ref.size(); ++i) {
    // Offsets from the first sample keep identical samples exactly zero.
    const double origin = stack.frame(first)[i];
    double mean = 0.0;
    for (std::size_t s = 0; s < window; ++s) {
      samples[s] = static_cast<double>(stack.frame(first + s)[i]) - origin;
      mean += samples[s];
    }
    mean /= static_cast<double>(window);
    double ss = 0.0;
    for (const double d : samples) ss += (d - mean) * (d - mean);
    out.values[i] = static_cast<float>(std::sqrt(ss / static_cast<double>(window)));
  }
  return out;
}

/// Area-normalized integral of S_t over the pixels carrying `label`.
inline double cell_activity(const StdField& field, const LabelImage& mask, Label label) {
  if (!mask.same_shape(field.values)) {
    throw std::invalid_argument("mask shape " + shape_string(mask) + " does not match field shape " +
                                shape_string(field.values));
  }
  double sum = 0.0;
  std::size_t area = 0;
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (mask[i] == label) {
      sum += field.values[i];
      ++area;
    }
  }
  if (label == 0 || area == 0) {
    throw std::invalid_argument("label " + std::to_string(label) + " not present in mask");
  }
  return sum / static_cast<double>(area);
}

/// Activities of all cells of frame t under an arbitrary window. Instances
/// below min_area are dropped.
inline std::vector<CellInstance> activities_with_window(const ImageStack& stack, const LabelMaskStack& masks,
                                                        std::size_t t, std::size_t n_minus, std::size_t n_plus,
                                                        std::size_t min_area = 0) {
  const StdField field = moving_std(stack, t, n_minus, n_plus);
  const auto& mask = masks.mask(t);
  if (!mask.same_shape(field.values)) {
    throw std::invalid_argument("mask " + std::to_string(t) + " has shape " + shape_string(mask) +
                                ", frames are " + shape_string(field.values));
  }
  auto cells = filter_min_area(extract_instances(mask, t), min_area);

  // Single pass over the mask instead of one scan per label.
  std::map<Label, double> sums;
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (mask[i] != 0) sums[mask[i]] += field.values[i];
  }
  for (auto& c : cells) c.activity = sums[c.label] / static_cast<double>(c.area);
  return cells;
}

/// Activities used for tracking: the two-frame window (0, 1). At the last
/// frame the window collapses and every activity is 0.
inline std::vector<CellInstance> activity_frame(const ImageStack& stack, const LabelMaskStack& masks,
                                                std::size_t t, std::size_t min_area = 0) {
  return activities_with_window(stack, masks, t, 0, 1, min_area);
}

/// Paints each instance's pixels with its activity; background stays 0.
inline Image<float> render_activity_map(const std::vector<CellInstance>& instances, const LabelImage& mask) {
  std::map<Label, float> value;
  for (const auto& c : instances) value[c.label] = static_cast<float>(c.activity);
  Image<float> out(mask.width(), mask.height(), 0.0f);
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (mask[i] == 0) continue;
    if (auto it = value.find(mask[i]); it != value.end()) out[i] = it->second;
  }
  return out;
}

}  // namespace celltrack
