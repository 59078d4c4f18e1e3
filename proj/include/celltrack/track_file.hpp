#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "celltrack/lineage.hpp"

namespace celltrack {

/// Cell Tracking Challenge track text: one `L B E P` line per track, ascending
/// L, 0-based frames, P = 0 for no parent.
inline std::string format_track_file(const LineageGraph& g) {
  std::ostringstream os;
  for (const auto& t : g.tracks) {
    if (t.begin_frame < 1) throw std::invalid_argument("track " + std::to_string(t.track_id) + " has no frames");
    os << t.track_id << ' ' << (t.begin_frame - 1) << ' ' << (t.end_frame - 1) << ' ' << t.parent_id << '\n';
  }
  return os.str();
}

/// Inverse of format_track_file. Member cells are left empty; see
/// attach_members_from_masks.
inline LineageGraph parse_track_file(std::istream& in, const std::string& source = "<track file>") {
  LineageGraph g;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream ls(line);
    long long l = 0, b = 0, e = 0, p = 0;
    std::string extra;
    if (!(ls >> l >> b >> e >> p) || (ls >> extra) || l <= 0 || b < 0 || e < b || p < 0) {
      throw std::runtime_error(source + ":" + std::to_string(line_no) + ": malformed track line '" + line + "'");
    }
    g.tracks.push_back(TrackRecord{static_cast<TrackId>(l), static_cast<std::size_t>(b) + 1,
                                   static_cast<std::size_t>(e) + 1, static_cast<TrackId>(p), {}});
    g.frame_count = std::max(g.frame_count, static_cast<std::size_t>(e) + 1);
  }
  std::sort(g.tracks.begin(), g.tracks.end(),
            [](const TrackRecord& a, const TrackRecord& c) { return a.track_id < c.track_id; });
  for (std::size_t i = 1; i < g.tracks.size(); ++i) {
    if (g.tracks[i].track_id == g.tracks[i - 1].track_id) {
      throw std::runtime_error(source + ": duplicate track " + std::to_string(g.tracks[i].track_id));
    }
  }
  return g;
}

inline void write_track_file(const LineageGraph& g, const std::filesystem::path& path) {
  const std::string text = format_track_file(g);
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
  os << text;
  if (!os) throw std::runtime_error("failed writing " + path.string());
}

inline LineageGraph read_track_file(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open " + path.string());
  return parse_track_file(is, path.string());
}

}  // namespace celltrack
