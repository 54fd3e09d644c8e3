#pragma once

#include <cstdint>
#include <filesystem>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "lanegeo/geo.hpp"
#include "lanegeo/raster.hpp"
#include "lanegeo/roadmodel.hpp"

namespace lanegeo::synth {

enum class Distractor { guardrail, curb };

struct Occlusion {
  double start_m = 0.0;
  double end_m = 0.0;
  /// Boundary-line indices (0 = leftmost) hidden over the span; empty = all.
  std::vector<int> which_lines;
};

struct SceneSpec {
  geo::GeoPoint origin{48.10, 11.50, 0.0};
  double length_m = 500.0;
  int lane_count = 3;
  double lane_width_m = 3.5;
  double curvature = 0.0;  // 1/m, positive bends right
  double dash_length_m = 6.0;
  double dash_gap_m = 12.0;
  double marking_width_m = 0.25;
  double blur_sigma_px = 1.0;
  double noise_sigma = 3.0;
  std::vector<Occlusion> occlusions;
  std::set<Distractor> distractors;
  std::uint64_t seed = 1;
  int level = 20;
  double chunk_length_m = 12.0;
  std::int64_t map_version = 1;

  void validate() const;  // throws std::invalid_argument
};

/// Rendering record for one painted chain: global-pixel geometry plus which
/// spans (meters along the chain) actually carry ink. Kept on the scene so
/// corrupt() can account coverage against what was really painted.
struct RenderLine {
  std::vector<Vec2> chain_px;
  std::vector<double> cum_m;  // meters along chain_px
  double width_px = 1.0;
  std::uint8_t paint = 220;
  bool is_marking = true;
  std::vector<std::pair<double, double>> ink_m;
};

struct SceneData {
  std::vector<std::pair<std::string, Raster>> tiles;
  road::RoadModel truth;
  road::RoadSurface surface;
  road::BoundaryLine route;  // the full trajectory polyline
  std::vector<RenderLine> render_lines;
  /// Total rendered (un-occluded) marking length in meters.
  double marking_length_m = 0.0;
  int level = 20;
};

/// Renders a synthetic highway scene: bright markings (about 220) on asphalt
/// (about 90), dashed inner boundaries, solid outer ones, optional occlusions
/// and marking-like distractors outside the surface. Deterministic per seed.
SceneData generate_scene(const SceneSpec& spec);

/// Paints vehicle/shadow-like blobs over the road until about
/// occlusion_fraction of the truth marking length is covered.
void corrupt(SceneData& scene, double occlusion_fraction, std::uint64_t seed);

std::string scene_spec_to_config(const SceneSpec& spec);
SceneSpec scene_spec_from_config(const std::string& text);

/// Writes tiles/ (cache layout), truth/ (chunk JSONs), surface.json and
/// route.json under dir.
void write_scene(const std::filesystem::path& dir, const SceneData& scene,
                 std::int64_t map_version);

}  // namespace lanegeo::synth
