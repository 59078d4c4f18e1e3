#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "celltrack/image.hpp"
#include "celltrack/lineage.hpp"

namespace celltrack {

/// AOGM operation weights.
struct PenaltyWeights {
  double split_vertex = 5.0;           // NS
  double false_negative_vertex = 10.0;  // FN
  double false_positive_vertex = 1.0;   // FP
  double redundant_edge = 1.0;          // ED
  double missing_edge = 1.5;            // EA
  double wrong_semantics_edge = 1.0;    // EC

  void validate() const {
    for (const double w : {split_vertex, false_negative_vertex, false_positive_vertex, redundant_edge,
                           missing_edge, wrong_semantics_edge}) {
      if (!(w >= 0.0)) throw std::invalid_argument("penalty weights must be >= 0");
    }
  }

  PenaltyWeights scaled(double factor) const {
    return {split_vertex * factor,   false_negative_vertex * factor, false_positive_vertex * factor,
            redundant_edge * factor, missing_edge * factor,          wrong_semantics_edge * factor};
  }
};

/// Vertex correspondence between a ground-truth and a result mask stack.
struct VertexMatch {
  std::map<CellRef, CellRef> gt_to_res;               // matched GT vertices only
  std::map<CellRef, std::vector<CellRef>> res_to_gt;  // every result vertex; empty = FP
  std::size_t gt_vertices = 0;
  std::size_t res_vertices = 0;
  std::size_t ns = 0;
  std::size_t fn = 0;
  std::size_t fp = 0;
};

/// GT vertex g is matched to result vertex r iff r covers strictly more than
/// half of g's pixels.
inline VertexMatch match_vertices(const LabelMaskStack& gt, const LabelMaskStack& res) {
  if (gt.count() != res.count()) {
    throw std::invalid_argument("frame count mismatch: gt " + std::to_string(gt.count()) + ", res " +
                                std::to_string(res.count()));
  }
  VertexMatch m;
  for (std::size_t f = 1; f <= gt.count(); ++f) {
    const auto& g = gt.mask(f);
    const auto& r = res.mask(f);
    if (!g.same_shape(r)) {
      throw std::invalid_argument("frame " + std::to_string(f) + ": gt shape " + shape_string(g) +
                                  " vs res shape " + shape_string(r));
    }
    std::map<Label, std::size_t> gt_area;
    std::map<std::pair<Label, Label>, std::size_t> overlap;
    std::set<Label> res_labels;
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (g[i] != 0) {
        ++gt_area[g[i]];
        if (r[i] != 0) ++overlap[{g[i], r[i]}];
      }
      if (r[i] != 0) res_labels.insert(r[i]);
    }
    for (const Label l : res_labels) m.res_to_gt[{f, l}];
    m.gt_vertices += gt_area.size();
    m.res_vertices += res_labels.size();
    for (const auto& [key, n] : overlap) {
      const auto [gl, rl] = key;
      if (2 * n > gt_area[gl]) {
        m.gt_to_res[{f, gl}] = {f, rl};
        m.res_to_gt[{f, rl}].push_back({f, gl});
      }
    }
  }
  m.fn = m.gt_vertices - m.gt_to_res.size();
  for (const auto& [r, gs] : m.res_to_gt) {
    if (gs.empty()) ++m.fp;
    if (gs.size() > 1) m.ns += gs.size() - 1;
  }
  return m;
}

enum class EdgeKind { track_internal, parent_link };

using Edge = std::pair<CellRef, CellRef>;

/// Directed edges of a lineage graph: consecutive members of one track, and
/// parent's last member to child's first member.
inline std::map<Edge, EdgeKind> graph_edges(const LineageGraph& g) {
  std::map<Edge, EdgeKind> edges;
  for (const auto& t : g.tracks) {
    for (std::size_t i = 1; i < t.member_cells.size(); ++i) {
      edges.emplace(Edge{t.member_cells[i - 1], t.member_cells[i]}, EdgeKind::track_internal);
    }
    if (t.parent_id != 0 && !t.member_cells.empty()) {
      const auto* p = g.find(t.parent_id);
      if (p != nullptr && !p->member_cells.empty()) {
        edges.emplace(Edge{p->member_cells.back(), t.member_cells.front()}, EdgeKind::parent_link);
      }
    }
  }
  return edges;
}

struct GraphDiff {
  std::size_t ns = 0;
  std::size_t fn = 0;
  std::size_t fp = 0;
  std::size_t ed = 0;
  std::size_t ea = 0;
  std::size_t ec = 0;
  std::size_t gt_vertices = 0;
  std::size_t gt_edges = 0;
  std::size_t res_vertices = 0;
  double aogm = 0.0;
  double aogm_empty = 0.0;
};

/// Counts the graph edit operations turning the result graph into the ground
/// truth. Each result edge can account for at most one GT edge.
inline GraphDiff aogm_score(const LineageGraph& gt, const LineageGraph& res, const VertexMatch& match,
                            const PenaltyWeights& w) {
  GraphDiff d;
  d.ns = match.ns;
  d.fn = match.fn;
  d.fp = match.fp;
  d.gt_vertices = match.gt_vertices;
  d.res_vertices = match.res_vertices;

  const auto gt_edges = graph_edges(gt);
  const auto res_edges = graph_edges(res);
  d.gt_edges = gt_edges.size();

  std::set<Edge> covered;
  for (const auto& [edge, kind] : res_edges) {
    const auto a = match.res_to_gt.find(edge.first);
    const auto b = match.res_to_gt.find(edge.second);
    bool used = false;
    if (a != match.res_to_gt.end() && b != match.res_to_gt.end()) {
      for (const auto& ga : a->second) {
        for (const auto& gb : b->second) {
          auto hit = gt_edges.find({ga, gb});
          if (hit == gt_edges.end() || covered.count(hit->first)) continue;
          covered.insert(hit->first);
          if (hit->second != kind) ++d.ec;
          used = true;
          break;
        }
        if (used) break;
      }
    }
    if (!used) ++d.ed;
  }
  d.ea = gt_edges.size() - covered.size();

  d.aogm = w.split_vertex * static_cast<double>(d.ns) + w.false_negative_vertex * static_cast<double>(d.fn) +
           w.false_positive_vertex * static_cast<double>(d.fp) + w.redundant_edge * static_cast<double>(d.ed) +
           w.missing_edge * static_cast<double>(d.ea) + w.wrong_semantics_edge * static_cast<double>(d.ec);
  d.aogm_empty = w.false_negative_vertex * static_cast<double>(d.gt_vertices) +
                 w.missing_edge * static_cast<double>(d.gt_edges);
  return d;
}

/// 1 - min(AOGM, AOGM_0) / AOGM_0. An empty ground truth scores 1 against an
/// empty result and 0 otherwise.
inline double tra(const GraphDiff& d) {
  if (d.aogm_empty <= 0.0) return d.res_vertices == 0 ? 1.0 : 0.0;
  return 1.0 - std::min(d.aogm, d.aogm_empty) / d.aogm_empty;
}

/// Graphs whose member cells carry the labels used in the matching masks.
struct TrackingData {
  LineageGraph graph;
  LabelMaskStack masks;
};

inline GraphDiff evaluate(const TrackingData& gt, const TrackingData& res, const PenaltyWeights& w = {}) {
  w.validate();
  return aogm_score(gt.graph, res.graph, match_vertices(gt.masks, res.masks), w);
}

inline double tra(const TrackingData& gt, const TrackingData& res, const PenaltyWeights& w = {}) {
  return tra(evaluate(gt, res, w));
}

}  // namespace celltrack
