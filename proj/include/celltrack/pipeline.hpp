#pragma once

#include <cstddef>
#include <vector>

#include "celltrack/activity.hpp"
#include "celltrack/assignment.hpp"
#include "celltrack/evaluation.hpp"
#include "celltrack/image.hpp"
#include "celltrack/instances.hpp"
#include "celltrack/lineage.hpp"
#include "celltrack/linking.hpp"

namespace celltrack {

struct TrackerConfig {
  LinkConfig link;
  std::size_t min_area = 0;
};

struct TrackingResult {
  std::vector<std::vector<CellInstance>> instances;  // per frame, with activities
  std::vector<FramePairAssignment> assignments;
  LineageGraph graph;  // member labels are the input mask labels
  /// Input masks with small instances removed and labels replaced by track ids.
  LabelMaskStack relabeled;

  /// Result in the on-disk convention: mask labels are track ids.
  TrackingData as_tracking_data() const { return {with_track_labels(graph), relabeled}; }
};

/// Runs activity computation, two-stage assignment for every frame pair, and
/// lineage stitching. Intensities are used as given; callers normalize first.
inline TrackingResult track(const ImageStack& stack, const LabelMaskStack& input_masks,
                            const TrackerConfig& config) {
  stack.validate();
  input_masks.validate_against(stack);
  config.link.validate();

  const LabelMaskStack masks = erase_small_instances(input_masks, config.min_area);
  const std::size_t n = stack.count();

  TrackingResult r;
  r.instances.reserve(n);
  for (std::size_t t = 1; t <= n; ++t) r.instances.push_back(activity_frame(stack, masks, t));
  for (std::size_t t = 1; t < n; ++t) {
    r.assignments.push_back(assign_frame_pair(r.instances[t - 1], r.instances[t], config.link));
  }
  r.graph = accumulate(r.assignments, r.instances);
  r.relabeled = relabel_masks(r.graph, masks);
  return r;
}

}  // namespace celltrack
