#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace celltrack {

/// Instance label inside one mask frame; 0 is background.
using Label = std::uint32_t;

/// Lineage track identifier; 0 means "no track" / "no parent".
using TrackId = std::uint32_t;

/// Dense row-major 2-D field. x is the column, y the row.
template <typename T>
class Image {
 public:
  Image() = default;
  Image(std::size_t width, std::size_t height, T fill = T{})
      : width_(width), height_(height), data_(width * height, fill) {}

  std::size_t width() const noexcept { return width_; }
  std::size_t height() const noexcept { return height_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  T& operator()(std::size_t x, std::size_t y) { return data_[y * width_ + x]; }
  const T& operator()(std::size_t x, std::size_t y) const { return data_[y * width_ + x]; }

  T& operator[](std::size_t i) { return data_[i]; }
  const T& operator[](std::size_t i) const { return data_[i]; }

  std::span<T> pixels() noexcept { return data_; }
  std::span<const T> pixels() const noexcept { return data_; }

  bool same_shape(std::size_t w, std::size_t h) const noexcept { return width_ == w && height_ == h; }
  template <typename U>
  bool same_shape(const Image<U>& other) const noexcept {
    return same_shape(other.width(), other.height());
  }

  friend bool operator==(const Image&, const Image&) = default;

 private:
  std::size_t width_ = 0;
  std::size_t height_ = 0;
  std::vector<T> data_;
};

using IntensityImage = Image<float>;
using LabelImage = Image<Label>;

inline std::string shape_string(std::size_t w, std::size_t h) {
  return std::to_string(w) + "x" + std::to_string(h);
}

template <typename T>
std::string shape_string(const Image<T>& img) {
  return shape_string(img.width(), img.height());
}

/// Ordered intensity frames I_1..I_N sharing one shape.
struct ImageStack {
  std::vector<IntensityImage> frames;
  /// Minutes between frames; metadata only.
  double frame_interval = 0.0;

  std::size_t count() const noexcept { return frames.size(); }
  std::size_t width() const noexcept { return frames.empty() ? 0 : frames.front().width(); }
  std::size_t height() const noexcept { return frames.empty() ? 0 : frames.front().height(); }

  /// 1-based frame access.
  const IntensityImage& frame(std::size_t t) const { return frames.at(t - 1); }

  void validate() const {
    if (frames.empty()) throw std::invalid_argument("image stack is empty");
    for (std::size_t i = 1; i < frames.size(); ++i) {
      if (!frames[i].same_shape(frames.front())) {
        throw std::invalid_argument("frame " + std::to_string(i + 1) + " has shape " +
                                    shape_string(frames[i]) + ", expected " +
                                    shape_string(frames.front()));
      }
    }
  }
};

/// Per-frame instance label images paired with an ImageStack.
struct LabelMaskStack {
  std::vector<LabelImage> masks;

  std::size_t count() const noexcept { return masks.size(); }

  /// 1-based frame access.
  const LabelImage& mask(std::size_t t) const { return masks.at(t - 1); }
  LabelImage& mask(std::size_t t) { return masks.at(t - 1); }

  void validate() const {
    for (std::size_t i = 1; i < masks.size(); ++i) {
      if (!masks[i].same_shape(masks.front())) {
        throw std::invalid_argument("mask " + std::to_string(i + 1) + " has shape " +
                                    shape_string(masks[i]) + ", expected " +
                                    shape_string(masks.front()));
      }
    }
  }

  void validate_against(const ImageStack& stack) const {
    validate();
    if (masks.size() != stack.count()) {
      throw std::invalid_argument("mask count " + std::to_string(masks.size()) +
                                  " does not match frame count " + std::to_string(stack.count()));
    }
    if (!masks.empty() && !masks.front().same_shape(stack.width(), stack.height())) {
      throw std::invalid_argument("mask shape " + shape_string(masks.front()) +
                                  " does not match frame shape " +
                                  shape_string(stack.width(), stack.height()));
    }
  }

  friend bool operator==(const LabelMaskStack&, const LabelMaskStack&) = default;
};

}  // namespace celltrack
