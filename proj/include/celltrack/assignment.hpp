#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "celltrack/instances.hpp"
#include "celltrack/lap.hpp"
#include "celltrack/linking.hpp"

namespace celltrack {

struct GrowthLink {
  Label mother = 0;
  Label daughter = 0;

  friend bool operator==(const GrowthLink&, const GrowthLink&) = default;
  friend auto operator<=>(const GrowthLink&, const GrowthLink&) = default;
};

/// Stage-2 link: a mother with one or two daughters, daughters in label order.
struct DivisionLink {
  Label mother = 0;
  Label first = 0;
  std::optional<Label> second;

  std::vector<Label> daughters() const {
    std::vector<Label> d{first};
    if (second) d.push_back(*second);
    return d;
  }

  friend bool operator==(const DivisionLink&, const DivisionLink&) = default;
};

/// Links between the cells of frame t (mothers) and frame t+1 (daughters).
struct FramePairAssignment {
  std::vector<GrowthLink> growth_links;
  std::vector<DivisionLink> division_links;
  std::vector<Label> appeared;
  std::vector<Label> disappeared;

  friend bool operator==(const FramePairAssignment&, const FramePairAssignment&) = default;
};

struct Stage1Result {
  std::vector<GrowthLink> growth_links;
  std::vector<CellInstance> remaining_mothers;
  std::vector<CellInstance> remaining_daughters;
};

/// Prioritized single assignment of growing cells. Mothers are visited by
/// ascending activity (ties by label); each takes its best remaining candidate
/// if that daughter is not smaller than the mother. Remaining lists are sorted
/// by label.
inline Stage1Result stage1_greedy(std::vector<CellInstance> mothers, std::vector<CellInstance> daughters,
                                  const LinkConfig& config) {
  std::sort(mothers.begin(), mothers.end(), [](const CellInstance& a, const CellInstance& b) {
    if (a.activity != b.activity) return a.activity < b.activity;
    return a.label < b.label;
  });
  std::sort(daughters.begin(), daughters.end(),
            [](const CellInstance& a, const CellInstance& b) { return a.label < b.label; });

  Stage1Result out;
  for (const auto& mother : mothers) {
    const auto candidates = candidates_for(mother, daughters, config);
    if (candidates.empty()) {
      out.remaining_mothers.push_back(mother);
      continue;
    }
    const Label best = candidates.front().daughter_label;
    auto it = std::find_if(daughters.begin(), daughters.end(),
                           [best](const CellInstance& d) { return d.label == best; });
    if (it->area >= mother.area) {
      out.growth_links.push_back({mother.label, it->label});
      daughters.erase(it);
    } else {
      out.remaining_mothers.push_back(mother);
    }
  }
  std::sort(out.remaining_mothers.begin(), out.remaining_mothers.end(),
            [](const CellInstance& a, const CellInstance& b) { return a.label < b.label; });
  std::sort(out.growth_links.begin(), out.growth_links.end());
  out.remaining_daughters = std::move(daughters);
  return out;
}

/// Loss matrix of the leftovers stacked on itself (2m x d): rows i and i+m
/// both stand for mother i.
inline CostMatrix build_cost_matrix(const std::vector<CellInstance>& mothers,
                                    const std::vector<CellInstance>& daughters, const LinkConfig& config) {
  const std::size_t m = mothers.size();
  const std::size_t d = daughters.size();
  if (m == 0 || d == 0) return CostMatrix{};
  CostMatrix c(2 * m, d);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      const auto cand = make_candidate(mothers[i], daughters[j], config);
      const bool forbidden = !passes_cutoff(cand.g_value, config.g_cutoff);
      for (const std::size_t row : {i, i + m}) {
        c.at(row, j) = cand.loss;
        c.set_forbidden(row, j, forbidden);
      }
    }
  }
  return c;
}

/// Full two-stage assignment for one frame pair.
inline FramePairAssignment assign_frame_pair(const std::vector<CellInstance>& mothers,
                                             const std::vector<CellInstance>& daughters,
                                             const LinkConfig& config) {
  auto stage1 = stage1_greedy(mothers, daughters, config);
  const auto& left_m = stage1.remaining_mothers;
  const auto& left_d = stage1.remaining_daughters;

  FramePairAssignment out;
  out.growth_links = std::move(stage1.growth_links);

  const std::size_t m = left_m.size();
  std::vector<std::vector<Label>> children(m);
  std::vector<char> daughter_used(left_d.size(), 0);
  for (const auto& [row, col] : lap_solve(build_cost_matrix(left_m, left_d, config))) {
    children[row % m].push_back(left_d[col].label);
    daughter_used[col] = 1;
  }

  for (std::size_t i = 0; i < m; ++i) {
    auto& kids = children[i];
    if (kids.empty()) {
      out.disappeared.push_back(left_m[i].label);
      continue;
    }
    std::sort(kids.begin(), kids.end());
    DivisionLink link{left_m[i].label, kids.front(), std::nullopt};
    if (kids.size() == 2) link.second = kids[1];
    out.division_links.push_back(link);
  }
  for (std::size_t j = 0; j < left_d.size(); ++j) {
    if (!daughter_used[j]) out.appeared.push_back(left_d[j].label);
  }
  return out;
}

}  // namespace celltrack
