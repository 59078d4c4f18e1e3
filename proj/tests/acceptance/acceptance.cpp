// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "../easy_scene.hpp"
#include "../oracles.hpp"
#include "../test_support.hpp"
#include "celltrack/celltrack.hpp"
#include "celltrack/cli.hpp"

namespace ct = celltrack;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

template <typename... Args>
std::string fmt(const char* format, Args... args) {
  char buf[256];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

// 1. lap_solve vs brute force, exact cost equality.
Outcome lap_equivalence() {
  constexpr int kTrials = 10000;
  std::mt19937_64 rng(20240601);
  std::uniform_int_distribution<std::size_t> small_dim(1, 7);
  std::uniform_int_distribution<std::size_t> extra(0, 2);
  std::uniform_real_distribution<double> u(-1.0, 0.0);
  const auto t0 = Clock::now();
  int mismatches = 0;
  for (int trial = 0; trial < kTrials; ++trial) {
    const std::size_t a = small_dim(rng);
    const std::size_t b = std::min<std::size_t>(a + extra(rng), 8);
    const bool tall = trial % 2 == 0;
    ct::CostMatrix c(tall ? b : a, tall ? a : b);
    for (auto& e : c.entries) e = u(rng);
    const auto fast = ct::lap_solve(c);
    const auto slow = ct::brute_force_lap(c);
    if (fast.size() != slow.size() || ct::total_cost(c, fast) != ct::total_cost(c, slow)) ++mismatches;
  }
  const double secs = seconds_since(t0);
  return {mismatches == 0 && secs < 60.0,
          fmt("%d matrices, %d cost mismatches, %.2f s", kTrials, mismatches, secs)};
}

/// Sum in a fixed order so two equal multisets of losses give identical doubles.
double canonical_sum(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  double s = 0.0;
  for (const double x : v) s += x;
  return s;
}

/// Exhaustive search over every assignment of daughters to mothers (or to
/// nobody) with at most two daughters per mother. Returns the losses of the
/// chosen pairs of a minimum-loss assignment.
std::vector<double> exhaustive_min_losses(const std::vector<std::vector<double>>& loss) {
  const std::size_t m = loss.size();
  const std::size_t d = loss.front().size();
  std::vector<int> slots(m, 2);
  std::vector<double> chosen, best;
  double best_sum = std::numeric_limits<double>::infinity();
  std::function<void(std::size_t)> go = [&](std::size_t j) {
    if (j == d) {
      const double s = canonical_sum(chosen);
      if (s < best_sum) {
        best_sum = s;
        best = chosen;
      }
      return;
    }
    go(j + 1);
    for (std::size_t i = 0; i < m; ++i) {
      if (slots[i] == 0) continue;
      --slots[i];
      chosen.push_back(loss[i][j]);
      go(j + 1);
      chosen.pop_back();
      ++slots[i];
    }
  };
  go(0);
  return best;
}

// 2. Stage-2 assignment attains the exhaustive minimum.
Outcome two_stage_equivalence() {
  constexpr int kScenes = 1000;
  const ct::LinkConfig cfg;
  std::mt19937_64 rng(777);
  std::uniform_int_distribution<std::size_t> n_m(1, 4), n_d(1, 8);
  std::uniform_real_distribution<double> pos(0.0, 10.0), act(50.0, 100.0);
  int mismatches = 0, stage1_links = 0;
  for (int scene = 0; scene < kScenes; ++scene) {
    const std::size_t m = n_m(rng), d = n_d(rng);
    std::vector<ct::CellInstance> mothers, daughters;
    // Daughters are smaller than every mother, so stage 1 leaves all mothers over.
    for (ct::Label l = 1; l <= m; ++l) mothers.push_back(ct::testing::cell(l, pos(rng), pos(rng), 200, act(rng)));
    for (ct::Label l = 1; l <= d; ++l) daughters.push_back(ct::testing::cell(l, pos(rng), pos(rng), 100));

    std::vector<std::vector<double>> loss(m, std::vector<double>(d));
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < d; ++j) {
        const auto cand = ct::make_candidate(mothers[i], daughters[j], cfg);
        if (!ct::passes_cutoff(cand.g_value, cfg.g_cutoff)) return {false, "scene generator left the cutoff"};
        loss[i][j] = cand.loss;
      }
    }

    const auto a = ct::assign_frame_pair(mothers, daughters, cfg);
    stage1_links += static_cast<int>(a.growth_links.size());
    std::vector<double> got;
    for (const auto& link : a.division_links) {
      for (const ct::Label dl : link.daughters()) got.push_back(loss[link.mother - 1][dl - 1]);
    }
    if (canonical_sum(got) != canonical_sum(exhaustive_min_losses(loss))) ++mismatches;
  }
  return {mismatches == 0 && stage1_links == 0,
          fmt("%d scenes, %d loss mismatches, %d unexpected stage-1 links", kScenes, mismatches, stage1_links)};
}

// 3. moving_std against the definition of variance; static stacks give zero.
Outcome activity_correctness() {
  std::mt19937_64 rng(31337);
  std::uniform_real_distribution<float> u(0.0f, 255.0f);
  std::uniform_int_distribution<ct::Label> lab(0, 5);
  double worst = 0.0;
  std::size_t checked = 0;
  for (int trial = 0; trial < 20; ++trial) {
    ct::ImageStack s;
    for (int f = 0; f < 5; ++f) {
      ct::IntensityImage img(24, 17);
      for (auto& v : img.pixels()) v = u(rng);
      s.frames.push_back(img);
    }
    for (std::size_t n_minus = 0; n_minus <= 2; ++n_minus) {
      for (std::size_t n_plus = 0; n_plus <= 2; ++n_plus) {
        for (std::size_t t = 1; t <= 5; ++t) {
          const auto field = ct::moving_std(s, t, n_minus, n_plus);
          const std::size_t first = t > n_minus ? t - n_minus : 1;
          const std::size_t last = std::min<std::size_t>(t + n_plus, 5);
          for (std::size_t y = 0; y < 17; ++y) {
            for (std::size_t x = 0; x < 24; ++x) {
              const double want = ct::oracle::pixel_std(s, x, y, first, last);
              const double got = field.values(x, y);
              const double err = want == 0.0 ? std::abs(got) : std::abs(got - want) / want;
              worst = std::max(worst, err);
              ++checked;
            }
          }
        }
      }
    }
  }

  bool static_zero = true;
  for (int trial = 0; trial < 5; ++trial) {
    ct::IntensityImage img(20, 20);
    for (auto& v : img.pixels()) v = u(rng);
    ct::LabelImage mask(20, 20);
    for (auto& l : mask.pixels()) l = lab(rng);
    ct::ImageStack s;
    ct::LabelMaskStack m;
    for (int f = 0; f < 5; ++f) {
      s.frames.push_back(img);
      m.masks.push_back(mask);
    }
    ct::normalize_intensity(s);
    for (std::size_t t = 1; t <= 5; ++t) {
      for (const auto& c : ct::activity_frame(s, m, t)) static_zero = static_zero && c.activity == 0.0;
      const auto field = ct::moving_std(s, t, 2, 2);
      for (const float v : field.values.pixels()) static_zero = static_zero && v == 0.0f;
    }
  }
  return {worst <= 1e-6 && static_zero,
          fmt("%zu pixels, max relative error %.3g, static activity exactly zero: %s", checked, worst,
              static_zero ? "yes" : "no")};
}

ct::GraphDiff track_and_score(const ct::SimulationResult& sim) {
  ct::ImageStack images = sim.images;
  ct::normalize_intensity(images);
  const auto result = ct::track(images, sim.masks, ct::TrackerConfig{});
  return ct::evaluate({sim.ground_truth, sim.masks}, result.as_tracking_data());
}

std::size_t division_count(const ct::LineageGraph& g) {
  std::set<ct::TrackId> parents;
  for (const auto& t : g.tracks) {
    if (t.parent_id != 0) parents.insert(t.parent_id);
  }
  return parents.size();
}

// 4. Perfect tracking on the easy colony.
Outcome easy_colony() {
  const auto sim = ct::simulate(ct::testing::easy_colony());
  const std::size_t divisions = division_count(sim.ground_truth);
  const auto d = track_and_score(sim);
  const std::string shown = ct::cli::fixed6(ct::tra(d));
  return {divisions >= 3 && shown == "1.000000",
          "divisions " + std::to_string(divisions) + ", TRA " + shown + " (AOGM " + ct::cli::fixed6(d.aogm) + ")"};
}

// 5. TRA does not increase as frames are dropped.
Outcome frame_rate_trend() {
  ct::SimParams p;
  p.seed = 2023;
  p.frame_count = 41;
  p.width = 160;
  p.height = 160;
  p.initial_cells = 5;
  p.elongation_rate = 1.5;
  p.division_mode = ct::DivisionMode::asymmetric_snap;
  p.initial_length_jitter = 1.0;
  p.drift_noise = 0.5;
  const auto sim = ct::simulate(p);
  std::vector<double> scores;
  std::string detail;
  for (const std::size_t factor : {1u, 2u, 4u}) {
    scores.push_back(ct::tra(track_and_score(ct::downsample(sim, factor))));
    detail += (detail.empty() ? "" : ", ") + std::string("x") + std::to_string(factor) + " " +
              ct::cli::fixed6(scores.back());
  }
  return {scores[0] >= scores[1] && scores[1] >= scores[2], "TRA " + detail};
}

/// Two parallel 5-frame tracks of 5x5 squares: 10 vertices, 8 edges.
ct::TrackingData ten_vertex_truth() {
  ct::TrackingData d;
  d.graph.frame_count = 5;
  for (int f = 0; f < 5; ++f) d.masks.masks.emplace_back(32, 16, 0);
  for (ct::TrackId id = 1; id <= 2; ++id) {
    ct::TrackRecord t{id, 1, 5, 0, {}};
    for (std::size_t f = 1; f <= 5; ++f) {
      ct::testing::fill_rect<ct::Label>(d.masks.mask(f), 2 + 12 * (id - 1), 4, 5, 5, id);
      t.member_cells.emplace_back(f, id);
    }
    d.graph.tracks.push_back(t);
  }
  return d;
}

// 6. Evaluator spot values.
Outcome tra_spot_values() {
  const auto gt = ten_vertex_truth();
  const double self = ct::tra(gt, gt);

  ct::TrackingData empty;
  empty.graph.frame_count = 5;
  for (int f = 0; f < 5; ++f) empty.masks.masks.emplace_back(32, 16, 0);
  const double none = ct::tra(gt, empty);

  // Break track 1 between frames 3 and 4.
  ct::TrackingData res = gt;
  res.graph.tracks[0].end_frame = 3;
  res.graph.tracks[0].member_cells.resize(3);
  ct::TrackRecord tail{3, 4, 5, 0, {{4, 3}, {5, 3}}};
  res.graph.tracks.push_back(tail);
  for (std::size_t f = 4; f <= 5; ++f) {
    for (auto& px : res.masks.mask(f).pixels()) {
      if (px == 1) px = 3;
    }
  }
  const double missing = ct::tra(gt, res);
  const double want = 1.0 - 1.5 / 112.0;
  return {self == 1.0 && none == 0.0 && std::abs(missing - want) <= 1e-9,
          fmt("self %.6f, empty %.6f, missing edge %.12f", self, none, missing) + fmt(" (want %.12f)", want)};
}

// 7. Two CLI track runs give identical bytes.
Outcome track_determinism() {
  ct::testing::TempDir dir("acceptance_det");
  const auto sim = ct::simulate(ct::testing::easy_colony());
  ct::cli::write_simulation(dir.path(), sim, 16);
  std::ostringstream log, err;
  for (const char* out : {"run1", "run2"}) {
    const int code = ct::cli::run_cli({"track", "--images", (dir / "images").string(), "--masks",
                                       (dir / "gt").string(), "--out", (dir / out).string()},
                                      log, err);
    if (code != 0) return {false, "track failed: " + err.str()};
  }
  std::size_t files = 0, differing = 0;
  for (const auto& entry : std::filesystem::directory_iterator(dir / "run1")) {
    const auto name = entry.path().filename().string();
    if (name != "res_track.txt" && name.rfind("mask", 0) != 0) continue;
    ++files;
    if (ct::testing::read_bytes(entry.path()) != ct::testing::read_bytes(dir / "run2" / name)) ++differing;
  }
  return {files == sim.images.count() + 1 && differing == 0,
          std::to_string(files) + " files compared, " + std::to_string(differing) + " differ"};
}

// 8. Cutoff boundary: kept at the radius, dropped just beyond it.
Outcome cutoff_geometry() {
  const ct::LinkConfig cfg;
  std::string detail;
  bool ok = true;
  for (const double sigma : {0.5, 2.0, 10.0}) {
    const double r = sigma * std::sqrt(2.0 * std::log(100.0));
    const auto mother = ct::testing::cell(1, 40.0, 25.0, 10, sigma * cfg.k);
    for (const double angle : {0.0, 0.7853981633974483, 2.0, 4.5}) {
      const double cx = std::cos(angle), cy = std::sin(angle);
      const auto inside = ct::testing::cell(1, 40.0 + r * cx, 25.0 + r * cy, 10);
      const auto outside = ct::testing::cell(2, 40.0 + 1.001 * r * cx, 25.0 + 1.001 * r * cy, 10);
      const auto kept = ct::candidates_for(mother, {inside, outside}, cfg);
      const bool good = kept.size() == 1 && kept[0].daughter_label == 1;
      ok = ok && good;
    }
    detail += fmt("%ssigma %.1f: r %.4f", detail.empty() ? "" : ", ", sigma, r);
  }
  return {ok, detail + ", 4 directions each"};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"1 LAP oracle equivalence", lap_equivalence},
      {"2 two-stage oracle equivalence", two_stage_equivalence},
      {"3 activity correctness", activity_correctness},
      {"4 perfect tracking on easy synthetic colony", easy_colony},
      {"5 TRA non-increasing over down-sampling 1,2,4", frame_rate_trend},
      {"6 TRA evaluator spot values", tra_spot_values},
      {"7 track output is byte-deterministic", track_determinism},
      {"8 Gaussian cutoff geometry", cutoff_geometry},
  };
  int failed = 0;
  for (const auto& [name, check] : criteria) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::cout << (o.pass ? "PASS" : "FAIL") << "  criterion " << name << ": " << o.detail << std::endl;
    failed += o.pass ? 0 : 1;
  }
  std::cout << (failed == 0 ? "all acceptance criteria passed" : std::to_string(failed) + " criteria failed")
            << std::endl;
  return failed == 0 ? 0 : 1;
}
