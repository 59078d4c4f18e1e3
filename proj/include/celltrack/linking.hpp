#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "celltrack/instances.hpp"

namespace celltrack {

struct LinkConfig {
  /// sigma = activity / k.
  double k = 2.5;
  /// Gaussian values below this are treated as "no link".
  double g_cutoff = 0.01;
  /// Lower bound on sigma in pixels so zero-activity cells can still match in place.
  double sigma_floor = 0.5;

  void validate() const {
    if (!(k > 0.0)) throw std::invalid_argument("k must be > 0");
    if (!(g_cutoff > 0.0 && g_cutoff < 1.0)) throw std::invalid_argument("g-cutoff must lie in (0, 1)");
    if (!(sigma_floor > 0.0)) throw std::invalid_argument("sigma-floor must be > 0");
  }
};

struct LinkCandidate {
  Label mother_label = 0;
  Label daughter_label = 0;
  double g_value = 0.0;
  double loss = 0.0;  // always -g_value

  friend bool operator==(const LinkCandidate&, const LinkCandidate&) = default;
};

inline double sigma_of(double activity, const LinkConfig& config) {
  return std::max(activity / config.k, config.sigma_floor);
}

/// Unnormalized isotropic Gaussian, peak 1 at `center`.
inline double gaussian_value(Point center, double sigma, Point point) {
  const double dx = point.x - center.x;
  const double dy = point.y - center.y;
  return std::exp(-(dx * dx + dy * dy) / (2.0 * sigma * sigma));
}

/// Inclusive cutoff test. The relative slack absorbs the last-bit rounding of
/// exp() for points placed exactly on the cutoff radius.
inline bool passes_cutoff(double g_value, double g_cutoff) {
  constexpr double kSlack = 1e-12;
  return g_value >= g_cutoff * (1.0 - kSlack);
}

/// Distance from the center at which G drops to the cutoff.
inline double cutoff_radius(double sigma, double g_cutoff) {
  return sigma * std::sqrt(2.0 * std::log(1.0 / g_cutoff));
}

inline LinkCandidate make_candidate(const CellInstance& mother, const CellInstance& daughter,
                                    const LinkConfig& config) {
  const double g = gaussian_value(mother.centroid, sigma_of(mother.activity, config), daughter.centroid);
  return LinkCandidate{mother.label, daughter.label, g, -g};
}

/// Daughters inside the mother's activity-scaled Gaussian, best (lowest loss) first,
/// ties by ascending daughter label.
inline std::vector<LinkCandidate> candidates_for(const CellInstance& mother,
                                                 const std::vector<CellInstance>& daughters,
                                                 const LinkConfig& config) {
  std::vector<LinkCandidate> out;
  for (const auto& d : daughters) {
    auto c = make_candidate(mother, d, config);
    if (passes_cutoff(c.g_value, config.g_cutoff)) out.push_back(c);
  }
  std::sort(out.begin(), out.end(), [](const LinkCandidate& a, const LinkCandidate& b) {
    if (a.loss != b.loss) return a.loss < b.loss;
    return a.daughter_label < b.daughter_label;
  });
  return out;
}

}  // namespace celltrack
