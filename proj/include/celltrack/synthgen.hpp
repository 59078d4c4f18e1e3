#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "celltrack/image.hpp"
#include "celltrack/instances.hpp"
#include "celltrack/lineage.hpp"

namespace celltrack {

enum class DivisionMode {
  symmetric,        // equal halves, daughters keep the mother's axis
  asymmetric_snap,  // unequal halves, daughters tilt into a V around the septum
};

/// Synthetic rod-shaped colony. Lengths are pole-to-pole in pixels.
struct SimParams {
  std::uint64_t seed = 1;
  std::size_t frame_count = 20;
  std::size_t width = 128;
  std::size_t height = 128;
  std::size_t initial_cells = 4;
  double elongation_rate = 1.5;  // px per frame
  double division_length = 32.0;
  DivisionMode division_mode = DivisionMode::symmetric;
  double snap_angle_deg = 20.0;
  double drift_noise = 0.0;  // std of per-frame center jitter, px

  double cell_width = 8.0;
  double initial_length = 16.0;
  /// Initial lengths are drawn from [initial_length, initial_length + jitter * (division_length - initial_length)].
  double initial_length_jitter = 0.0;
  /// Split fraction range [0.5 - asymmetry, 0.5 + asymmetry] in asymmetric mode.
  double asymmetry = 0.1;
  /// Free space kept between rods during placement and overlap resolution.
  double min_gap = 1.0;

  double background = 200.0;
  double foreground = 60.0;
  double pixel_noise = 2.0;

  void validate() const {
    if (frame_count < 1) throw std::invalid_argument("frame_count must be >= 1");
    if (width < 1 || height < 1) throw std::invalid_argument("image size must be positive");
    if (initial_cells < 1) throw std::invalid_argument("initial_cells must be >= 1");
    if (!(cell_width > 0.0) || !(initial_length > 0.0) || !(division_length > 0.0)) {
      throw std::invalid_argument("cell width and lengths must be positive (zero-area cells)");
    }
    if (elongation_rate < 0.0 || drift_noise < 0.0 || pixel_noise < 0.0 || min_gap < 0.0) {
      throw std::invalid_argument("rates and noise levels must be >= 0");
    }
    if (asymmetry < 0.0 || asymmetry >= 0.5) throw std::invalid_argument("asymmetry must lie in [0, 0.5)");
    if (initial_length_jitter < 0.0 || initial_length_jitter > 1.0) {
      throw std::invalid_argument("initial_length_jitter must lie in [0, 1]");
    }
  }
};

struct SimulationResult {
  ImageStack images;
  LabelMaskStack masks;  // labels are GT track ids
  LineageGraph ground_truth;
};

namespace detail {

struct Rod {
  TrackId id = 0;
  Point center;
  double angle = 0.0;  // radians, axis direction
  double length = 0.0;
};

struct Segment {
  Point a;
  Point b;
};

inline Segment axis_segment(const Rod& r, double width) {
  const double half = std::max(r.length - width, 0.0) / 2.0;
  const double ux = std::cos(r.angle);
  const double uy = std::sin(r.angle);
  return {{r.center.x - half * ux, r.center.y - half * uy}, {r.center.x + half * ux, r.center.y + half * uy}};
}

inline double point_segment_distance(Point p, const Segment& s) {
  const double vx = s.b.x - s.a.x;
  const double vy = s.b.y - s.a.y;
  const double len2 = vx * vx + vy * vy;
  double t = 0.0;
  if (len2 > 0.0) t = std::clamp(((p.x - s.a.x) * vx + (p.y - s.a.y) * vy) / len2, 0.0, 1.0);
  const double dx = p.x - (s.a.x + t * vx);
  const double dy = p.y - (s.a.y + t * vy);
  return std::sqrt(dx * dx + dy * dy);
}

inline double segment_distance(const Segment& s1, const Segment& s2) {
  const double ux = s1.b.x - s1.a.x, uy = s1.b.y - s1.a.y;
  const double vx = s2.b.x - s2.a.x, vy = s2.b.y - s2.a.y;
  // Proper crossing -> zero distance.
  const double d1 = ux * (s2.a.y - s1.a.y) - uy * (s2.a.x - s1.a.x);
  const double d2 = ux * (s2.b.y - s1.a.y) - uy * (s2.b.x - s1.a.x);
  const double d3 = vx * (s1.a.y - s2.a.y) - vy * (s1.a.x - s2.a.x);
  const double d4 = vx * (s1.b.y - s2.a.y) - vy * (s1.b.x - s2.a.x);
  if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0))) return 0.0;
  return std::min({point_segment_distance(s1.a, s2), point_segment_distance(s1.b, s2),
                   point_segment_distance(s2.a, s1), point_segment_distance(s2.b, s1)});
}

/// Shifts a rod so its outline stays inside the image.
inline void keep_inside(Rod& r, const SimParams& p) {
  const Segment s = axis_segment(r, p.cell_width);
  const double reach = p.cell_width / 2.0 + 1.0;
  const double min_x = std::min(s.a.x, s.b.x) - reach;
  const double max_x = std::max(s.a.x, s.b.x) + reach;
  const double min_y = std::min(s.a.y, s.b.y) - reach;
  const double max_y = std::max(s.a.y, s.b.y) + reach;
  const double w = static_cast<double>(p.width) - 1.0;
  const double h = static_cast<double>(p.height) - 1.0;
  if (min_x < 0.0) r.center.x -= min_x;
  else if (max_x > w) r.center.x -= max_x - w;
  if (min_y < 0.0) r.center.y -= min_y;
  else if (max_y > h) r.center.y -= max_y - h;
}

/// Pairwise separation along the line of centers, at most 100 sweeps; any
/// residual contact after that is accepted.
inline void resolve_overlaps(std::vector<Rod>& rods, const SimParams& p) {
  constexpr int kMaxIterations = 100;
  const double target = p.cell_width + p.min_gap;
  for (int iter = 0; iter < kMaxIterations; ++iter) {
    bool moved = false;
    for (std::size_t i = 0; i < rods.size(); ++i) {
      for (std::size_t j = i + 1; j < rods.size(); ++j) {
        const double d = segment_distance(axis_segment(rods[i], p.cell_width), axis_segment(rods[j], p.cell_width));
        if (d >= target - 1e-9) continue;
        double dx = rods[j].center.x - rods[i].center.x;
        double dy = rods[j].center.y - rods[i].center.y;
        double norm = std::sqrt(dx * dx + dy * dy);
        if (norm < 1e-9) {
          dx = -std::sin(rods[i].angle);
          dy = std::cos(rods[i].angle);
          norm = 1.0;
        }
        const double push = (target - d) / 2.0 + 1e-3;
        rods[i].center.x -= push * dx / norm;
        rods[i].center.y -= push * dy / norm;
        rods[j].center.x += push * dx / norm;
        rods[j].center.y += push * dy / norm;
        moved = true;
      }
    }
    for (auto& r : rods) keep_inside(r, p);
    if (!moved) return;
  }
}

inline void rasterize(const std::vector<Rod>& rods, const SimParams& p, LabelImage& mask) {
  const double radius = p.cell_width / 2.0;
  for (const auto& r : rods) {
    const Segment s = axis_segment(r, p.cell_width);
    const auto lo_x = static_cast<long>(std::floor(std::min(s.a.x, s.b.x) - radius));
    const auto hi_x = static_cast<long>(std::ceil(std::max(s.a.x, s.b.x) + radius));
    const auto lo_y = static_cast<long>(std::floor(std::min(s.a.y, s.b.y) - radius));
    const auto hi_y = static_cast<long>(std::ceil(std::max(s.a.y, s.b.y) + radius));
    for (long y = std::max(lo_y, 0L); y <= std::min(hi_y, static_cast<long>(p.height) - 1); ++y) {
      for (long x = std::max(lo_x, 0L); x <= std::min(hi_x, static_cast<long>(p.width) - 1); ++x) {
        auto& px = mask(static_cast<std::size_t>(x), static_cast<std::size_t>(y));
        if (px != 0) continue;
        if (point_segment_distance({static_cast<double>(x), static_cast<double>(y)}, s) <= radius) px = r.id;
      }
    }
  }
}

}  // namespace detail

/// Grows, divides and renders a rod colony. The cell of a track that reaches
/// division_length at frame f ends at f; its daughters start at f + 1.
/// Identical parameters give bit-identical output.
inline SimulationResult simulate(const SimParams& p) {
  p.validate();
  std::mt19937_64 rng(p.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);

  std::vector<detail::Rod> rods;
  TrackId next_id = 1;
  const double spacing = p.cell_width + std::max(p.min_gap, 2.0);
  for (std::size_t k = 0; k < p.initial_cells; ++k) {
    bool placed = false;
    for (int attempt = 0; attempt < 10000 && !placed; ++attempt) {
      detail::Rod r;
      r.length = p.initial_length +
                 unit(rng) * p.initial_length_jitter * std::max(p.division_length - p.initial_length, 0.0);
      r.angle = unit(rng) * std::numbers::pi;
      const double margin = r.length / 2.0 + p.cell_width;
      const double span_x = static_cast<double>(p.width) - 2.0 * margin;
      const double span_y = static_cast<double>(p.height) - 2.0 * margin;
      if (span_x < 0.0 || span_y < 0.0) break;
      r.center = {margin + unit(rng) * span_x, margin + unit(rng) * span_y};
      const auto seg = detail::axis_segment(r, p.cell_width);
      placed = std::all_of(rods.begin(), rods.end(), [&](const detail::Rod& o) {
        return detail::segment_distance(seg, detail::axis_segment(o, p.cell_width)) >= spacing;
      });
      if (placed) {
        r.id = next_id++;
        rods.push_back(r);
      }
    }
    if (!placed) throw std::invalid_argument("could not place initial cell " + std::to_string(k + 1));
  }

  SimulationResult out;
  out.images.frame_interval = 1.0;
  std::map<TrackId, TrackRecord> tracks;
  for (const auto& r : rods) tracks[r.id] = TrackRecord{r.id, 1, 1, 0, {}};

  const double snap = p.snap_angle_deg * std::numbers::pi / 180.0;
  for (std::size_t f = 1; f <= p.frame_count; ++f) {
    if (f > 1) {
      std::vector<detail::Rod> next;
      for (const auto& r : rods) {
        if (r.length < p.division_length) {
          detail::Rod g = r;
          g.length += p.elongation_rate;
          if (p.drift_noise > 0.0) {
            g.center.x += p.drift_noise * gauss(rng);
            g.center.y += p.drift_noise * gauss(rng);
          }
          next.push_back(g);
          continue;
        }
        double frac = 0.5;
        double tilt = 0.0;
        if (p.division_mode == DivisionMode::asymmetric_snap) {
          frac = 0.5 - p.asymmetry + 2.0 * p.asymmetry * unit(rng);
          tilt = unit(rng) < 0.5 ? snap : -snap;
        }
        const double ux = std::cos(r.angle);
        const double uy = std::sin(r.angle);
        const Point septum{r.center.x + (-r.length / 2.0 + frac * r.length) * ux,
                           r.center.y + (-r.length / 2.0 + frac * r.length) * uy};
        const double len_a = frac * r.length;
        const double len_b = (1.0 - frac) * r.length;
        const double ang_a = r.angle + tilt;
        const double ang_b = r.angle - tilt;
        detail::Rod a{next_id++, {septum.x - len_a / 2.0 * std::cos(ang_a), septum.y - len_a / 2.0 * std::sin(ang_a)},
                      ang_a, len_a};
        detail::Rod b{next_id++, {septum.x + len_b / 2.0 * std::cos(ang_b), septum.y + len_b / 2.0 * std::sin(ang_b)},
                      ang_b, len_b};
        tracks[a.id] = TrackRecord{a.id, f, f, r.id, {}};
        tracks[b.id] = TrackRecord{b.id, f, f, r.id, {}};
        next.push_back(a);
        next.push_back(b);
      }
      rods = std::move(next);
      detail::resolve_overlaps(rods, p);
    } else {
      for (auto& r : rods) detail::keep_inside(r, p);
    }

    LabelImage mask(p.width, p.height, 0);
    detail::rasterize(rods, p, mask);
    std::map<Label, std::size_t> area;
    for (const Label l : mask.pixels()) {
      if (l != 0) ++area[l];
    }
    for (const auto& r : rods) {
      if (area[r.id] == 0) {
        throw std::invalid_argument("cell " + std::to_string(r.id) + " rasterizes to zero pixels at frame " +
                                    std::to_string(f));
      }
      auto& t = tracks[r.id];
      t.end_frame = f;
      t.member_cells.emplace_back(f, r.id);
    }

    IntensityImage img(p.width, p.height, 0.0f);
    for (std::size_t i = 0; i < img.size(); ++i) {
      const double base = mask[i] != 0 ? p.foreground : p.background;
      const double v = base + (p.pixel_noise > 0.0 ? p.pixel_noise * gauss(rng) : 0.0);
      img[i] = static_cast<float>(std::clamp(std::round(v), 0.0, 255.0));
    }
    out.images.frames.push_back(std::move(img));
    out.masks.masks.push_back(std::move(mask));
  }

  out.ground_truth.frame_count = p.frame_count;
  for (auto& [id, t] : tracks) out.ground_truth.tracks.push_back(std::move(t));
  return out;
}

/// Keeps frames 1, 1 + factor, 1 + 2 factor, ... (1-based).
inline std::vector<std::size_t> downsampled_frames(std::size_t frame_count, std::size_t factor) {
  if (factor < 1) throw std::invalid_argument("down-sampling factor must be >= 1");
  std::vector<std::size_t> kept;
  for (std::size_t f = 1; f <= frame_count; f += factor) kept.push_back(f);
  return kept;
}

/// Contracts a lineage graph onto kept frames. Tracks with no kept frame are
/// dropped and their children reattach to the nearest surviving ancestor.
/// Track ids are preserved.
inline LineageGraph downsample_lineage(const LineageGraph& g, std::size_t factor) {
  const auto kept = downsampled_frames(g.frame_count, factor);
  std::map<std::size_t, std::size_t> remap;
  for (std::size_t i = 0; i < kept.size(); ++i) remap[kept[i]] = i + 1;

  std::map<TrackId, TrackRecord> survivors;
  for (const auto& t : g.tracks) {
    TrackRecord nt{t.track_id, 0, 0, 0, {}};
    for (std::size_t f = t.begin_frame; f <= t.end_frame; ++f) {
      if (auto it = remap.find(f); it != remap.end()) {
        if (nt.begin_frame == 0) nt.begin_frame = it->second;
        nt.end_frame = it->second;
      }
    }
    for (const auto& [f, label] : t.member_cells) {
      if (auto it = remap.find(f); it != remap.end()) nt.member_cells.emplace_back(it->second, label);
    }
    if (nt.begin_frame != 0) survivors[t.track_id] = std::move(nt);
  }

  LineageGraph out;
  out.frame_count = kept.size();
  for (const auto& t : g.tracks) {
    auto it = survivors.find(t.track_id);
    if (it == survivors.end()) continue;
    TrackId parent = t.parent_id;
    while (parent != 0 && !survivors.count(parent)) {
      const auto* p = g.find(parent);
      parent = p != nullptr ? p->parent_id : 0;
    }
    it->second.parent_id = parent;
    out.tracks.push_back(std::move(it->second));
  }
  return out;
}

inline SimulationResult downsample(const SimulationResult& in, std::size_t factor) {
  const auto kept = downsampled_frames(in.images.count(), factor);
  SimulationResult out;
  out.images.frame_interval = in.images.frame_interval * static_cast<double>(factor);
  for (const std::size_t f : kept) {
    out.images.frames.push_back(in.images.frame(f));
    if (f <= in.masks.count()) out.masks.masks.push_back(in.masks.mask(f));
  }
  LineageGraph gt = in.ground_truth;
  gt.frame_count = in.images.count();
  out.ground_truth = downsample_lineage(gt, factor);
  return out;
}

}  // namespace celltrack
