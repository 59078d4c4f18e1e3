#pragma once

// Independent reference computations used only by tests. Nothing here calls
// into the library code paths it is used to check.

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <map>
#include <vector>

#include "celltrack/image.hpp"

namespace celltrack::oracle {

/// Population std of one pixel over 1-based frames [first, last], straight
/// from the definition of variance, in long double.
inline double pixel_std(const ImageStack& stack, std::size_t x, std::size_t y, std::size_t first,
                        std::size_t last) {
  long double mean = 0.0L;
  for (std::size_t s = first; s <= last; ++s) mean += stack.frames[s - 1](x, y);
  mean /= static_cast<long double>(last - first + 1);
  long double var = 0.0L;
  for (std::size_t s = first; s <= last; ++s) {
    const long double d = stack.frames[s - 1](x, y) - mean;
    var += d * d;
  }
  var /= static_cast<long double>(last - first + 1);
  return static_cast<double>(std::sqrt(var));
}

/// Pixel count per nonzero label.
inline std::map<Label, std::size_t> label_histogram(const LabelImage& mask) {
  std::map<Label, std::size_t> h;
  for (std::size_t y = 0; y < mask.height(); ++y) {
    for (std::size_t x = 0; x < mask.width(); ++x) {
      if (mask(x, y) != 0) ++h[mask(x, y)];
    }
  }
  return h;
}

/// Mean of a field over the pixels of one label, by explicit pixel loop.
inline double masked_mean(const Image<float>& field, const LabelImage& mask, Label label) {
  long double sum = 0.0L;
  std::size_t n = 0;
  for (std::size_t y = 0; y < mask.height(); ++y) {
    for (std::size_t x = 0; x < mask.width(); ++x) {
      if (mask(x, y) == label) {
        sum += field(x, y);
        ++n;
      }
    }
  }
  return static_cast<double>(sum / static_cast<long double>(n));
}

/// Unnormalized 2-D Gaussian written via hypot, independent of the library's form.
inline double gaussian(double cx, double cy, double sigma, double px, double py) {
  const double r = std::hypot(px - cx, py - cy);
  return std::exp(-0.5 * (r / sigma) * (r / sigma));
}

/// Minimum summed loss over every assignment of daughters to mothers (or to
/// nobody) in which each mother receives at most two daughters. loss[i][j]
/// is the cost of mother i taking daughter j; `allowed[i][j]` gates pairs.
inline double min_two_daughter_loss(const std::vector<std::vector<double>>& loss,
                                    const std::vector<std::vector<bool>>& allowed) {
  const std::size_t m = loss.size();
  const std::size_t d = m == 0 ? 0 : loss.front().size();
  std::vector<int> slots(m, 2);
  double best = std::numeric_limits<double>::infinity();
  std::function<void(std::size_t, double)> go = [&](std::size_t j, double acc) {
    if (j == d) {
      best = std::min(best, acc);
      return;
    }
    go(j + 1, acc);  // daughter j unassigned
    for (std::size_t i = 0; i < m; ++i) {
      if (slots[i] == 0 || !allowed[i][j]) continue;
      --slots[i];
      go(j + 1, acc + loss[i][j]);
      ++slots[i];
    }
  };
  go(0, 0.0);
  return d == 0 ? 0.0 : best;
}

}  // namespace celltrack::oracle
