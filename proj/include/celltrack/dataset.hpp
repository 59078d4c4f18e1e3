#pragma once

// On-disk dataset layout: `t{NNN}.tif` intensity frames, `mask{NNN}.tif` or
// `man_track{NNN}.tif` label frames, and a CTC track text file. File indices
// are 0-based and contiguous; in memory frames are 1-based.

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "celltrack/activity.hpp"
#include "celltrack/evaluation.hpp"
#include "celltrack/image.hpp"
#include "celltrack/lineage.hpp"
#include "celltrack/tiff_io.hpp"
#include "celltrack/track_file.hpp"

namespace celltrack {

namespace fs = std::filesystem;

struct DatasetLayout {
  fs::path images_dir;
  fs::path masks_dir;
  fs::path track_file;  // empty when not needed
};

struct Dataset {
  ImageStack images;
  LabelMaskStack masks;
  IntensityScaling scaling;
  unsigned source_bits = 0;
};

inline constexpr const char* kDatasetConfig = "dataset.json";

/// Zero-padded file index, at least three digits.
inline std::string frame_file_name(const std::string& prefix, std::size_t index, std::size_t count,
                                   const std::string& ext = ".tif") {
  std::size_t digits = 3;
  for (std::size_t n = count > 0 ? count - 1 : 0; n >= 1000; n /= 10) ++digits;
  std::ostringstream os;
  os << prefix << std::setw(static_cast<int>(digits)) << std::setfill('0') << index << ext;
  return os.str();
}

/// Files named `<prefix><digits>.tif[f]` in dir, keyed by index. Fails naming
/// the first missing index when the numbering has a gap or does not start at 0.
inline std::vector<fs::path> list_frame_files(const fs::path& dir, const std::string& prefix) {
  if (!fs::is_directory(dir)) throw std::runtime_error("not a directory: " + dir.string());
  std::map<std::size_t, fs::path> found;
  std::size_t width = 3;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const std::string ext = entry.path().extension().string();
    if (ext != ".tif" && ext != ".tiff") continue;
    const std::string stem = entry.path().stem().string();
    if (stem.size() <= prefix.size() || stem.compare(0, prefix.size(), prefix) != 0) continue;
    const std::string digits = stem.substr(prefix.size());
    if (!std::all_of(digits.begin(), digits.end(), [](unsigned char c) { return std::isdigit(c); })) continue;
    const auto idx = static_cast<std::size_t>(std::stoull(digits));
    if (!found.emplace(idx, entry.path()).second) {
      throw std::runtime_error(dir.string() + ": duplicate frame index " + std::to_string(idx));
    }
    width = digits.size();
  }
  std::vector<fs::path> out;
  for (const auto& [idx, path] : found) {
    if (idx != out.size()) {
      std::ostringstream name;
      name << prefix << std::setw(static_cast<int>(width)) << std::setfill('0') << out.size();
      throw std::runtime_error(dir.string() + ": missing frame " + name.str());
    }
    out.push_back(path);
  }
  return out;
}

/// Prefix used by the label images in dir: `mask` or `man_track`.
inline std::string detect_mask_prefix(const fs::path& dir) {
  for (const std::string prefix : {"mask", "man_track"}) {
    if (!fs::is_directory(dir)) break;
    for (const auto& entry : fs::directory_iterator(dir)) {
      const std::string stem = entry.path().stem().string();
      const std::string ext = entry.path().extension().string();
      if ((ext == ".tif" || ext == ".tiff") && stem.size() > prefix.size() &&
          stem.compare(0, prefix.size(), prefix) == 0 && std::isdigit(static_cast<unsigned char>(stem[prefix.size()]))) {
        return prefix;
      }
    }
  }
  throw std::runtime_error(dir.string() + ": no mask*.tif or man_track*.tif files");
}

inline LabelMaskStack read_masks(const fs::path& dir) {
  LabelMaskStack masks;
  for (const auto& path : list_frame_files(dir, detect_mask_prefix(dir))) {
    auto label = to_labels(read_tiff(path), path.string());
    if (!masks.masks.empty() && !label.same_shape(masks.masks.front())) {
      throw std::runtime_error(path.string() + ": shape " + shape_string(label) + " differs from " +
                               shape_string(masks.masks.front()));
    }
    masks.masks.push_back(std::move(label));
  }
  return masks;
}

/// Reads frames and masks; intensities are min-max normalized to [0, 255]
/// unless `normalize` is false.
inline Dataset read_dataset(const DatasetLayout& layout, bool normalize = true) {
  Dataset ds;
  for (const auto& path : list_frame_files(layout.images_dir, "t")) {
    const auto tif = read_tiff(path);
    if (tif.is_float) throw std::runtime_error(path.string() + ": expected an 8- or 16-bit image");
    ds.source_bits = std::max(ds.source_bits, tif.bits_per_sample);
    auto img = to_intensity(tif);
    if (!ds.images.frames.empty() && !img.same_shape(ds.images.frames.front())) {
      throw std::runtime_error(path.string() + ": shape " + shape_string(img) + " differs from " +
                               shape_string(ds.images.frames.front()));
    }
    ds.images.frames.push_back(std::move(img));
  }
  if (ds.images.frames.empty()) throw std::runtime_error(layout.images_dir.string() + ": no t*.tif frames");

  ds.masks = read_masks(layout.masks_dir);
  if (ds.masks.count() != ds.images.count()) {
    throw std::runtime_error("frame count " + std::to_string(ds.images.count()) + " in " +
                             layout.images_dir.string() + " does not match mask count " +
                             std::to_string(ds.masks.count()) + " in " + layout.masks_dir.string());
  }
  if (!ds.masks.masks.front().same_shape(ds.images.frames.front())) {
    throw std::runtime_error("mask shape " + shape_string(ds.masks.masks.front()) + " does not match frame shape " +
                             shape_string(ds.images.frames.front()));
  }

  if (const auto cfg = layout.images_dir / kDatasetConfig; fs::exists(cfg)) {
    std::ifstream is(cfg);
    try {
      const auto j = nlohmann::json::parse(is);
      ds.images.frame_interval = j.value("frame_interval", 0.0);
    } catch (const nlohmann::json::exception& e) {
      throw std::runtime_error(cfg.string() + ": " + e.what());
    }
  }
  if (normalize) ds.scaling = normalize_intensity(ds.images);
  return ds;
}

inline void write_images(const fs::path& dir, const ImageStack& stack, unsigned bits = 8) {
  fs::create_directories(dir);
  for (std::size_t t = 1; t <= stack.count(); ++t) {
    const auto path = dir / frame_file_name("t", t - 1, stack.count());
    if (bits == 8) {
      write_tiff(path, narrow_image<std::uint8_t>(stack.frame(t), path.string()));
    } else if (bits == 16) {
      write_tiff(path, narrow_image<std::uint16_t>(stack.frame(t), path.string()));
    } else {
      throw std::invalid_argument("unsupported bit depth " + std::to_string(bits));
    }
  }
  nlohmann::json j{{"frame_interval", stack.frame_interval}};
  std::ofstream os(dir / kDatasetConfig, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + (dir / kDatasetConfig).string());
  os << j.dump(2) << '\n';
}

/// 16-bit label frames `<prefix>{NNN}.tif`.
inline void write_masks(const fs::path& dir, const LabelMaskStack& masks, const std::string& prefix = "mask") {
  fs::create_directories(dir);
  for (std::size_t t = 1; t <= masks.count(); ++t) {
    const auto path = dir / frame_file_name(prefix, t - 1, masks.count());
    write_tiff(path, narrow_image<std::uint16_t>(masks.mask(t), path.string()));
  }
}

/// `man_track.txt` or `res_track.txt`, whichever exists in dir.
inline fs::path find_track_file(const fs::path& dir) {
  for (const char* name : {"res_track.txt", "man_track.txt"}) {
    if (fs::exists(dir / name)) return dir / name;
  }
  throw std::runtime_error(dir.string() + ": no res_track.txt or man_track.txt");
}

/// Masks plus lineage of a tracking result or ground-truth directory, with
/// member cells resolved from mask labels.
inline TrackingData read_tracking_dir(const fs::path& dir) {
  auto masks = read_masks(dir);
  auto graph = attach_members_from_masks(read_track_file(find_track_file(dir)), masks);
  return {std::move(graph), std::move(masks)};
}

}  // namespace celltrack
