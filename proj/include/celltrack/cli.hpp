#pragma once

// Command-line front end shared by the celltrack tool and its tests.

#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "celltrack/activity.hpp"
#include "celltrack/dataset.hpp"
#include "celltrack/evaluation.hpp"
#include "celltrack/pipeline.hpp"
#include "celltrack/synthgen.hpp"
#include "celltrack/track_file.hpp"

namespace celltrack::cli {

namespace fs = std::filesystem;

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

/// Parses "ns,fn,fp,ed,ea,ec".
inline PenaltyWeights parse_weights(const std::string& text) {
  std::vector<double> v;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double x = 0.0;
    try {
      x = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size()) throw std::invalid_argument("--weights: cannot parse '" + item + "'");
    v.push_back(x);
  }
  if (v.size() != 6) throw std::invalid_argument("--weights: expected 6 comma-separated values, got " + std::to_string(v.size()));
  PenaltyWeights w{v[0], v[1], v[2], v[3], v[4], v[5]};
  w.validate();
  return w;
}

inline std::string fixed6(double v) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(6) << v;
  return os.str();
}

inline void write_text(const fs::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
  os << text;
  if (!os) throw std::runtime_error("failed writing " + path.string());
}

struct TrackOptions {
  fs::path images, masks, out;
  TrackerConfig config;
};

inline void run_track(const TrackOptions& o, std::ostream& log) {
  log << "track: k=" << o.config.link.k << " g_cutoff=" << o.config.link.g_cutoff
      << " sigma_floor=" << o.config.link.sigma_floor << " min_area=" << o.config.min_area << '\n';
  const auto ds = read_dataset({o.images, o.masks, {}});
  const auto result = track(ds.images, ds.masks, o.config);

  fs::create_directories(o.out);
  write_masks(o.out, result.relabeled, "mask");
  write_track_file(result.graph, o.out / "res_track.txt");

  const nlohmann::ordered_json meta{
      {"k", o.config.link.k},
      {"g_cutoff", o.config.link.g_cutoff},
      {"sigma_floor", o.config.link.sigma_floor},
      {"min_area", o.config.min_area},
      {"intensity_min", ds.scaling.source_min},
      {"intensity_max", ds.scaling.source_max},
      {"intensity_scale", ds.scaling.scale},
      {"frame_interval", ds.images.frame_interval},
      {"frames", ds.images.count()},
      {"tracks", result.graph.tracks.size()},
  };
  write_text(o.out / "run.json", meta.dump(2) + "\n");
  log << "track: " << ds.images.count() << " frames, " << result.graph.tracks.size() << " tracks -> "
      << o.out.string() << '\n';
}

struct ActivityOptions {
  fs::path images, masks, out;
  std::size_t min_area = 0;
  std::size_t n_minus = 0;
  std::size_t n_plus = 1;
};

inline void run_activity(const ActivityOptions& o, std::ostream& log) {
  const auto ds = read_dataset({o.images, o.masks, {}});
  const LabelMaskStack masks = erase_small_instances(ds.masks, o.min_area);
  fs::create_directories(o.out);
  std::ostringstream csv;
  csv << "frame,label,activity\n";
  for (std::size_t t = 1; t <= ds.images.count(); ++t) {
    const auto cells = activities_with_window(ds.images, masks, t, o.n_minus, o.n_plus);
    for (const auto& c : cells) csv << (t - 1) << ',' << c.label << ',' << fixed6(c.activity) << '\n';
    write_tiff(o.out / frame_file_name("activity", t - 1, ds.images.count()),
               render_activity_map(cells, masks.mask(t)));
  }
  write_text(o.out / "activities.csv", csv.str());
  log << "activity: window (" << o.n_minus << ", " << o.n_plus << "), " << ds.images.count() << " frames -> "
      << o.out.string() << '\n';
}

inline std::string format_report(const GraphDiff& d) {
  std::ostringstream os;
  os << "NS=" << d.ns << '\n'
     << "FN=" << d.fn << '\n'
     << "FP=" << d.fp << '\n'
     << "ED=" << d.ed << '\n'
     << "EA=" << d.ea << '\n'
     << "EC=" << d.ec << '\n'
     << "AOGM=" << fixed6(d.aogm) << '\n'
     << "AOGM_0=" << fixed6(d.aogm_empty) << '\n'
     << "TRA=" << fixed6(tra(d)) << '\n';
  return os.str();
}

inline void run_eval(const fs::path& gt_dir, const fs::path& res_dir, const PenaltyWeights& w, std::ostream& out) {
  const auto gt = read_tracking_dir(gt_dir);
  const auto res = read_tracking_dir(res_dir);
  out << format_report(evaluate(gt, res, w));
}

/// Writes `<dir>/images/t*.tif` and `<dir>/gt/man_track*.tif` + `man_track.txt`.
inline void write_simulation(const fs::path& dir, const SimulationResult& sim, unsigned bits) {
  write_images(dir / "images", sim.images, bits);
  write_masks(dir / "gt", sim.masks, "man_track");
  write_track_file(sim.ground_truth, dir / "gt" / "man_track.txt");
}

inline SimulationResult read_simulation(const fs::path& dir, unsigned* bits = nullptr) {
  auto ds = read_dataset({dir / "images", dir / "gt", {}}, /*normalize=*/false);
  if (bits != nullptr) *bits = ds.source_bits;
  auto graph = attach_members_from_masks(read_track_file(dir / "gt" / "man_track.txt"), ds.masks);
  return {std::move(ds.images), std::move(ds.masks), std::move(graph)};
}

inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Activity-prioritized cell tracking for live-cell microscopy", "celltrack"};
  app.require_subcommand(1);

  TrackOptions track_opt;
  auto* track_cmd = app.add_subcommand("track", "Track cells and write relabeled masks + res_track.txt");
  track_cmd->add_option("--images", track_opt.images, "Directory of t{NNN}.tif frames")->required();
  track_cmd->add_option("--masks", track_opt.masks, "Directory of mask{NNN}.tif label images")->required();
  track_cmd->add_option("--out", track_opt.out, "Output directory")->required();
  track_cmd->add_option("--k", track_opt.config.link.k, "Activity-to-sigma divisor")->capture_default_str();
  track_cmd->add_option("--g-cutoff", track_opt.config.link.g_cutoff, "Gaussian cutoff")->capture_default_str();
  track_cmd->add_option("--sigma-floor", track_opt.config.link.sigma_floor, "Minimum sigma in pixels")
      ->capture_default_str();
  track_cmd->add_option("--min-area", track_opt.config.min_area, "Drop instances smaller than this")
      ->capture_default_str();

  ActivityOptions act_opt;
  auto* act_cmd = app.add_subcommand("activity", "Write per-frame activity maps and activities.csv");
  act_cmd->add_option("--images", act_opt.images, "Directory of t{NNN}.tif frames")->required();
  act_cmd->add_option("--masks", act_opt.masks, "Directory of mask{NNN}.tif label images")->required();
  act_cmd->add_option("--out", act_opt.out, "Output directory")->required();
  act_cmd->add_option("--min-area", act_opt.min_area, "Drop instances smaller than this")->capture_default_str();
  act_cmd->add_option("--n-minus", act_opt.n_minus, "Frames before t in the std window")->capture_default_str();
  act_cmd->add_option("--n-plus", act_opt.n_plus, "Frames after t in the std window")->capture_default_str();

  fs::path gt_dir, res_dir;
  std::string weights_text = "5,10,1,1,1.5,1";
  auto* eval_cmd = app.add_subcommand("eval", "Score a tracking result against ground truth (TRA)");
  eval_cmd->add_option("--gt", gt_dir, "Ground-truth directory (man_track*.tif + man_track.txt)")->required();
  eval_cmd->add_option("--res", res_dir, "Result directory (mask*.tif + res_track.txt)")->required();
  eval_cmd->add_option("--weights", weights_text, "NS,FN,FP,ED,EA,EC penalties")->capture_default_str();

  SimParams sim;
  fs::path sim_out;
  std::string mode = "symmetric";
  unsigned sim_bits = 8;
  auto* sim_cmd = app.add_subcommand("simulate", "Generate a synthetic rod colony with ground truth");
  sim_cmd->add_option("--out", sim_out, "Output dataset directory")->required();
  sim_cmd->add_option("--seed", sim.seed)->capture_default_str();
  sim_cmd->add_option("--frames", sim.frame_count)->capture_default_str();
  sim_cmd->add_option("--width", sim.width)->capture_default_str();
  sim_cmd->add_option("--height", sim.height)->capture_default_str();
  sim_cmd->add_option("--cells", sim.initial_cells)->capture_default_str();
  sim_cmd->add_option("--elongation", sim.elongation_rate, "px per frame")->capture_default_str();
  sim_cmd->add_option("--division-length", sim.division_length, "px")->capture_default_str();
  sim_cmd->add_option("--mode", mode)->check(CLI::IsMember({"symmetric", "asymmetric-snap"}))->capture_default_str();
  sim_cmd->add_option("--snap-angle", sim.snap_angle_deg, "degrees")->capture_default_str();
  sim_cmd->add_option("--drift", sim.drift_noise, "px std per frame")->capture_default_str();
  sim_cmd->add_option("--cell-width", sim.cell_width)->capture_default_str();
  sim_cmd->add_option("--initial-length", sim.initial_length)->capture_default_str();
  sim_cmd->add_option("--length-jitter", sim.initial_length_jitter)->capture_default_str();
  sim_cmd->add_option("--asymmetry", sim.asymmetry, "Split fraction spread in asymmetric-snap mode")
      ->capture_default_str();
  sim_cmd->add_option("--min-gap", sim.min_gap, "px kept between rods")->capture_default_str();
  sim_cmd->add_option("--pixel-noise", sim.pixel_noise)->capture_default_str();
  sim_cmd->add_option("--bits", sim_bits, "Intensity bit depth")->check(CLI::IsMember({8u, 16u}))->capture_default_str();

  fs::path ds_in, ds_out;
  std::size_t factor = 1;
  auto* ds_cmd = app.add_subcommand("downsample", "Keep every factor-th frame of a dataset and contract its GT");
  ds_cmd->add_option("--in", ds_in, "Dataset directory (images/ + gt/)")->required();
  ds_cmd->add_option("--out", ds_out, "Output dataset directory")->required();
  ds_cmd->add_option("--factor", factor)->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    // Name unknown arguments even when a missing required option aborted the parse first.
    std::vector<std::string> unknown;
    for (const auto* sub : app.get_subcommands()) {
      for (const auto& arg : sub->remaining()) unknown.push_back(arg);
    }
    for (const auto& arg : app.remaining()) unknown.push_back(arg);
    err << "error: " << e.what() << '\n';
    if (!unknown.empty() && dynamic_cast<const CLI::ExtrasError*>(&e) == nullptr) {
      err << "error: unrecognized arguments:";
      for (const auto& arg : unknown) err << ' ' << arg;
      err << '\n';
    }
    err << app.help();
    return kExitUsage;
  }

  try {
    if (track_cmd->parsed()) {
      run_track(track_opt, out);
    } else if (act_cmd->parsed()) {
      run_activity(act_opt, out);
    } else if (eval_cmd->parsed()) {
      run_eval(gt_dir, res_dir, parse_weights(weights_text), out);
    } else if (sim_cmd->parsed()) {
      sim.division_mode = mode == "symmetric" ? DivisionMode::symmetric : DivisionMode::asymmetric_snap;
      const auto result = simulate(sim);
      write_simulation(sim_out, result, sim_bits);
      out << "simulate: " << result.images.count() << " frames, " << result.ground_truth.tracks.size()
          << " tracks -> " << sim_out.string() << '\n';
    } else if (ds_cmd->parsed()) {
      unsigned bits = 8;
      const auto in = read_simulation(ds_in, &bits);
      const auto result = downsample(in, factor);
      write_simulation(ds_out, result, bits);
      out << "downsample: factor " << factor << ", " << in.images.count() << " -> " << result.images.count()
          << " frames -> " << ds_out.string() << '\n';
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitOk;
}

inline int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run_cli(args, out, err);
}

}  // namespace celltrack::cli
