#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "celltrack/assignment.hpp"
#include "celltrack/image.hpp"
#include "celltrack/instances.hpp"

namespace celltrack {

/// (frame, label) of one instance; frames are 1-based.
using CellRef = std::pair<std::size_t, Label>;

struct TrackRecord {
  TrackId track_id = 0;
  std::size_t begin_frame = 0;
  std::size_t end_frame = 0;
  TrackId parent_id = 0;
  std::vector<CellRef> member_cells;

  friend bool operator==(const TrackRecord&, const TrackRecord&) = default;
};

/// Tracks sorted by id, linked to their parents by division edges.
struct LineageGraph {
  std::vector<TrackRecord> tracks;
  std::size_t frame_count = 0;

  const TrackRecord* find(TrackId id) const {
    auto it = std::lower_bound(tracks.begin(), tracks.end(), id,
                               [](const TrackRecord& t, TrackId v) { return t.track_id < v; });
    return it != tracks.end() && it->track_id == id ? &*it : nullptr;
  }

  /// (frame, label) -> owning track.
  std::map<CellRef, TrackId> cell_index() const {
    std::map<CellRef, TrackId> idx;
    for (const auto& t : tracks) {
      for (const auto& c : t.member_cells) idx.emplace(c, t.track_id);
    }
    return idx;
  }

  friend bool operator==(const LineageGraph&, const LineageGraph&) = default;
};

/// Throws std::invalid_argument naming the first broken invariant.
/// max_children = 0 disables the per-parent child limit.
inline void validate_lineage(const LineageGraph& g, std::size_t max_children = 2) {
  std::map<TrackId, std::size_t> children;
  std::set<CellRef> seen;
  TrackId prev = 0;
  for (const auto& t : g.tracks) {
    const std::string name = "track " + std::to_string(t.track_id);
    if (t.track_id == 0) throw std::invalid_argument("track id 0 is reserved");
    if (t.track_id <= prev) throw std::invalid_argument(name + ": ids not strictly ascending");
    prev = t.track_id;
    if (t.begin_frame < 1 || t.begin_frame > t.end_frame) {
      throw std::invalid_argument(name + ": bad frame range");
    }
    if (g.frame_count != 0 && t.end_frame > g.frame_count) {
      throw std::invalid_argument(name + ": ends after the last frame");
    }
    if (!t.member_cells.empty()) {
      if (t.member_cells.size() != t.end_frame - t.begin_frame + 1) {
        throw std::invalid_argument(name + ": expected one member cell per frame");
      }
      for (std::size_t i = 0; i < t.member_cells.size(); ++i) {
        if (t.member_cells[i].first != t.begin_frame + i) {
          throw std::invalid_argument(name + ": member cells out of frame order");
        }
        if (!seen.insert(t.member_cells[i]).second) {
          throw std::invalid_argument(name + ": cell shared with another track");
        }
      }
    }
    if (t.parent_id != 0) {
      if (t.parent_id == t.track_id) throw std::invalid_argument(name + ": is its own parent");
      const auto* p = g.find(t.parent_id);
      if (p == nullptr) throw std::invalid_argument(name + ": unknown parent");
      if (p->end_frame + 1 != t.begin_frame) {
        throw std::invalid_argument(name + ": parent does not end right before the child begins");
      }
      ++children[t.parent_id];
    }
  }
  if (max_children != 0) {
    for (const auto& [id, n] : children) {
      if (n > max_children) {
        throw std::invalid_argument("track " + std::to_string(id) + " has " + std::to_string(n) +
                                    " children");
      }
    }
  }
  // Parent links point strictly backwards in time, so the graph is acyclic.
}

/// Chains per-frame-pair assignments (assignments[t-1] links frame t to t+1)
/// into a lineage graph. New tracks of a frame receive ids in ascending label
/// order. Daughters not mentioned by any link open parentless tracks.
inline LineageGraph accumulate(const std::vector<FramePairAssignment>& assignments,
                               const std::vector<std::vector<CellInstance>>& instances_per_frame) {
  const std::size_t n = instances_per_frame.size();
  if (n == 0) return {};
  if (assignments.size() + 1 != n) {
    throw std::invalid_argument("expected " + std::to_string(n - 1) + " frame-pair assignments, got " +
                                std::to_string(assignments.size()));
  }

  LineageGraph g;
  g.frame_count = n;
  std::map<Label, std::size_t> current;  // label in frame t -> index into g.tracks

  auto open = [&](std::size_t frame, Label label, TrackId parent) {
    const auto id = static_cast<TrackId>(g.tracks.size() + 1);
    g.tracks.push_back(TrackRecord{id, frame, frame, parent, {{frame, label}}});
    return g.tracks.size() - 1;
  };

  {
    std::vector<Label> labels;
    for (const auto& c : instances_per_frame[0]) labels.push_back(c.label);
    std::sort(labels.begin(), labels.end());
    for (const Label l : labels) current[l] = open(1, l, 0);
  }

  for (std::size_t t = 1; t < n; ++t) {
    const auto& asg = assignments[t - 1];
    const std::size_t next_frame = t + 1;
    std::set<Label> next_labels;
    for (const auto& c : instances_per_frame[t]) next_labels.insert(c.label);

    std::set<Label> used_daughters;
    std::set<Label> used_mothers;
    auto claim_daughter = [&](Label d) {
      if (!next_labels.count(d)) {
        throw std::invalid_argument("frame " + std::to_string(next_frame) + ": unknown daughter label " +
                                    std::to_string(d));
      }
      if (!used_daughters.insert(d).second) {
        throw std::invalid_argument("frame " + std::to_string(next_frame) + ": daughter label " +
                                    std::to_string(d) + " linked twice");
      }
    };
    auto claim_mother = [&](Label m) -> std::size_t {
      auto it = current.find(m);
      if (it == current.end()) {
        throw std::invalid_argument("frame " + std::to_string(t) + ": unknown mother label " +
                                    std::to_string(m));
      }
      if (!used_mothers.insert(m).second) {
        throw std::invalid_argument("frame " + std::to_string(t) + ": mother label " + std::to_string(m) +
                                    " linked twice");
      }
      return it->second;
    };

    std::map<Label, std::size_t> next;
    for (const auto& link : asg.growth_links) {
      claim_daughter(link.daughter);
      const std::size_t idx = claim_mother(link.mother);
      auto& tr = g.tracks[idx];
      tr.end_frame = next_frame;
      tr.member_cells.emplace_back(next_frame, link.daughter);
      next[link.daughter] = idx;
    }

    std::map<Label, TrackId> pending;  // new daughter label -> parent id
    for (const auto& link : asg.division_links) {
      const std::size_t idx = claim_mother(link.mother);
      for (const Label d : link.daughters()) {
        claim_daughter(d);
        pending[d] = g.tracks[idx].track_id;
      }
    }
    for (const Label d : asg.appeared) {
      claim_daughter(d);
      pending[d] = 0;
    }
    for (const Label m : asg.disappeared) claim_mother(m);
    for (const Label d : next_labels) {
      if (!used_daughters.count(d)) pending[d] = 0;
    }
    for (const auto& [label, parent] : pending) next[label] = open(next_frame, label, parent);
    current = std::move(next);
  }
  return g;
}

/// Same graph with every member cell's label replaced by its track id, which is
/// how relabeled masks identify cells.
inline LineageGraph with_track_labels(LineageGraph g) {
  for (auto& t : g.tracks) {
    for (auto& c : t.member_cells) c.second = t.track_id;
  }
  return g;
}

/// Rewrites each member cell's pixels to its track id.
inline LabelMaskStack relabel_masks(const LineageGraph& graph, const LabelMaskStack& masks) {
  const auto index = graph.cell_index();
  LabelMaskStack out = masks;
  for (std::size_t f = 1; f <= masks.count(); ++f) {
    auto& mask = out.mask(f);
    std::map<Label, Label> lut;
    for (Label& px : mask.pixels()) {
      if (px == 0) continue;
      auto it = lut.find(px);
      if (it == lut.end()) {
        auto hit = index.find({f, px});
        if (hit == index.end()) {
          throw std::invalid_argument("frame " + std::to_string(f) + ": label " + std::to_string(px) +
                                      " is not covered by any track");
        }
        it = lut.emplace(px, hit->second).first;
      }
      px = it->second;
    }
  }
  return out;
}

/// Fills member cells from masks whose labels are track ids (the on-disk
/// convention). Tracks keep their declared frame range.
inline LineageGraph attach_members_from_masks(LineageGraph g, const LabelMaskStack& masks) {
  g.frame_count = masks.count();
  std::vector<std::set<Label>> present(masks.count() + 1);
  for (std::size_t f = 1; f <= masks.count(); ++f) {
    for (const Label l : masks.mask(f).pixels()) {
      if (l != 0) present[f].insert(l);
    }
  }
  for (auto& t : g.tracks) {
    t.member_cells.clear();
    for (std::size_t f = t.begin_frame; f <= t.end_frame && f <= masks.count(); ++f) {
      if (present[f].count(t.track_id)) t.member_cells.emplace_back(f, t.track_id);
    }
  }
  return g;
}

}  // namespace celltrack
