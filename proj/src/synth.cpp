#include "lanegeo/synth.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "lanegeo/config.hpp"
#include "lanegeo/imageio.hpp"
#include "lanegeo/rng.hpp"

namespace lanegeo::synth {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;
constexpr double kSampleStep = 1.5;       // control-point spacing, meters
constexpr double kShoulderWidth = 1.0;    // surface margin beyond markings
constexpr double kDistractorOffset = 2.0; // beyond the outermost marking
constexpr std::uint8_t kAsphalt = 90;
constexpr std::uint8_t kMarkingPaint = 220;

using Interval = std::pair<double, double>;

std::vector<Interval> subtract_intervals(std::vector<Interval> base,
                                         const std::vector<Interval>& cuts) {
  for (const auto& cut : cuts) {
    std::vector<Interval> next;
    for (const auto& iv : base) {
      if (cut.second <= iv.first || cut.first >= iv.second) {
        next.push_back(iv);
        continue;
      }
      if (cut.first > iv.first) next.push_back({iv.first, cut.first});
      if (cut.second < iv.second) next.push_back({cut.second, iv.second});
    }
    base = std::move(next);
  }
  return base;
}

double intervals_length(const std::vector<Interval>& ivs) {
  double sum = 0.0;
  for (const auto& iv : ivs) sum += iv.second - iv.first;
  return sum;
}

/// Scene geometry in the local metric frame (x east, y north, origin at
/// spec.origin). Curvature bends the road to the right when positive.
struct CenterlineFrame {
  double curvature = 0.0;

  Vec2 position(double s) const {
    if (std::abs(curvature) < 1e-12) return {0.0, s};
    return {(1.0 - std::cos(curvature * s)) / curvature,
            std::sin(curvature * s) / curvature};
  }
  Vec2 tangent(double s) const {
    const double theta = kPi / 2 - curvature * s;
    return {std::cos(theta), std::sin(theta)};
  }
  Vec2 offset_point(double s, double offset) const {
    const Vec2 t = tangent(s);
    return position(s) + right_normal(t) * offset;
  }
};

}  // namespace

void SceneSpec::validate() const {
  if (lane_count < 1) throw std::invalid_argument("lane_count must be >= 1");
  if (!(lane_width_m > marking_width_m && marking_width_m > 0.0)) {
    throw std::invalid_argument("need lane_width > marking_width > 0");
  }
  if (dash_length_m <= 0.0 || dash_gap_m <= 0.0) {
    throw std::invalid_argument("dash lengths must be positive");
  }
  if (length_m < chunk_length_m) {
    throw std::invalid_argument("scene shorter than one chunk");
  }
  if (level < geo::kMinLevel || level > geo::kMaxLevel) {
    throw std::invalid_argument("tile level out of range");
  }
  for (const auto& occ : occlusions) {
    if (occ.start_m < 0.0 || occ.end_m > length_m || occ.start_m >= occ.end_m) {
      throw std::invalid_argument("occlusion range outside [0, length]");
    }
  }
}

SceneData generate_scene(const SceneSpec& spec) {
  spec.validate();
  std::mt19937_64 rng(derive_seed(spec.seed, 0x5ce7e));

  const CenterlineFrame frame{spec.curvature};
  const geo::GeoPoint origin = spec.origin;

  const auto to_geo = [&](const Vec2& xy) {
    geo::NeuPoint np;
    np.origin = origin;
    np.n = xy.y;
    np.e = xy.x;
    return geo::neu_to_latlon(np);
  };
  const auto to_px = [&](const Vec2& xy) {
    const auto px = geo::latlon_to_pixel(to_geo(xy), spec.level);
    return Vec2{px.x, px.y};
  };

  const double res = geo::ground_resolution(origin.lat, spec.level);
  const double road_half_width = spec.lane_count * spec.lane_width_m / 2.0;

  std::vector<double> sample_s;
  for (double s = 0.0; s < spec.length_m - 1e-9; s += kSampleStep) {
    sample_s.push_back(s);
  }
  sample_s.push_back(spec.length_m);

  const auto sampled_offset_line = [&](double offset) {
    std::vector<Vec2> pts;
    pts.reserve(sample_s.size());
    for (double s : sample_s) pts.push_back(frame.offset_point(s, offset));
    return pts;
  };
  const auto to_geo_line = [&](const std::vector<Vec2>& pts) {
    std::vector<geo::GeoPoint> out;
    out.reserve(pts.size());
    for (const auto& p : pts) out.push_back(to_geo(p));
    return out;
  };

  SceneData scene;
  scene.level = spec.level;

  // occlusion spans per boundary-line index
  const auto occlusions_for = [&](int line_index) {
    std::vector<Interval> cuts;
    for (const auto& occ : spec.occlusions) {
      if (occ.which_lines.empty() ||
          std::count(occ.which_lines.begin(), occ.which_lines.end(),
                     line_index) > 0) {
        cuts.push_back({occ.start_m, occ.end_m});
      }
    }
    return cuts;
  };

  std::vector<road::BoundaryLine> truth_lines;
  std::uint64_t uuid_counter = 1;

  const int n_boundaries = spec.lane_count + 1;
  for (int i = 0; i < n_boundaries; ++i) {
    const double offset = (i - spec.lane_count / 2.0) * spec.lane_width_m;
    const bool solid = (i == 0 || i == spec.lane_count);

    if (solid) {
      road::BoundaryLine line;
      line.line_id = road::uuid_from_seed(derive_seed(spec.seed, 1, uuid_counter++));
      line.kind = road::LineKind::solid;
      const auto pts = sampled_offset_line(offset);
      line.points = to_geo_line(pts);
      truth_lines.push_back(line);

      RenderLine rl;
      rl.width_px = spec.marking_width_m / res;
      rl.paint = kMarkingPaint;
      rl.is_marking = true;
      rl.cum_m.push_back(0.0);
      rl.chain_px.push_back(to_px(pts[0]));
      for (std::size_t j = 1; j < pts.size(); ++j) {
        rl.cum_m.push_back(rl.cum_m.back() + norm(pts[j] - pts[j - 1]));
        rl.chain_px.push_back(to_px(pts[j]));
      }
      rl.ink_m = subtract_intervals({{0.0, rl.cum_m.back()}}, occlusions_for(i));
      scene.render_lines.push_back(std::move(rl));
    } else {
      // dashed: seed-jittered phase so dashes do not align with chunk borders
      const double cycle = spec.dash_length_m + spec.dash_gap_m;
      const double phase = uniform_range(rng, 0.0, cycle);
      for (double start = phase - cycle; start < spec.length_m;
           start += cycle) {
        const double a = std::max(0.0, start);
        const double b = std::min(spec.length_m, start + spec.dash_length_m);
        if (b - a < 0.5) continue;
        const Vec2 pa = frame.offset_point(a, offset);
        const Vec2 pb = frame.offset_point(b, offset);

        road::BoundaryLine dash;
        dash.line_id =
            road::uuid_from_seed(derive_seed(spec.seed, 1, uuid_counter++));
        dash.kind = road::LineKind::dashed;
        dash.points = {to_geo(pa), to_geo(pb)};
        truth_lines.push_back(dash);

        RenderLine rl;
        rl.width_px = spec.marking_width_m / res;
        rl.paint = kMarkingPaint;
        rl.is_marking = true;
        rl.chain_px = {to_px(pa), to_px(pb)};
        rl.cum_m = {0.0, b - a};
        // occlusions are defined along the road; shift into dash-local meters
        std::vector<Interval> cuts;
        for (const auto& c : occlusions_for(i)) {
          cuts.push_back({c.first - a, c.second - a});
        }
        rl.ink_m = subtract_intervals({{0.0, b - a}}, cuts);
        scene.render_lines.push_back(std::move(rl));
      }
    }
  }

  // trajectory along the road center
  road::BoundaryLine trajectory;
  trajectory.line_id = road::uuid_from_seed(derive_seed(spec.seed, 1, 0));
  trajectory.kind = road::LineKind::trajectory;
  trajectory.points = to_geo_line(sampled_offset_line(0.0));
  scene.route = trajectory;

  scene.surface.left_boundary =
      to_geo_line(sampled_offset_line(-(road_half_width + kShoulderWidth)));
  scene.surface.right_boundary =
      to_geo_line(sampled_offset_line(road_half_width + kShoulderWidth));

  for (Distractor d : spec.distractors) {
    const bool rail = d == Distractor::guardrail;
    const double offset = rail ? -(road_half_width + kDistractorOffset)
                               : (road_half_width + kDistractorOffset);
    const auto pts = sampled_offset_line(offset);
    RenderLine rl;
    rl.width_px = (rail ? 0.30 : 0.35) / res;
    rl.paint = rail ? 235 : 170;
    rl.is_marking = false;
    rl.cum_m.push_back(0.0);
    rl.chain_px.push_back(to_px(pts[0]));
    for (std::size_t j = 1; j < pts.size(); ++j) {
      rl.cum_m.push_back(rl.cum_m.back() + norm(pts[j] - pts[j - 1]));
      rl.chain_px.push_back(to_px(pts[j]));
    }
    rl.ink_m = {{0.0, rl.cum_m.back()}};
    scene.render_lines.push_back(std::move(rl));
  }

  for (const auto& rl : scene.render_lines) {
    if (rl.is_marking) scene.marking_length_m += intervals_length(rl.ink_m);
  }

  // tile set: road corridor with margin
  double min_x = 1e18, min_y = 1e18, max_x = -1e18, max_y = -1e18;
  for (const auto& rl : scene.render_lines) {
    for (const auto& p : rl.chain_px) {
      min_x = std::min(min_x, p.x);
      max_x = std::max(max_x, p.x);
      min_y = std::min(min_y, p.y);
      max_y = std::max(max_y, p.y);
    }
  }
  const double corridor_px = (road_half_width + kDistractorOffset + 1.0) / res;
  std::vector<Vec2> center_px;
  for (double s : sample_s) center_px.push_back(to_px(frame.position(s)));

  const int tx0 = static_cast<int>(std::floor(min_x / 256.0)) - 1;
  const int tx1 = static_cast<int>(std::floor(max_x / 256.0)) + 1;
  const int ty0 = static_cast<int>(std::floor(min_y / 256.0)) - 1;
  const int ty1 = static_cast<int>(std::floor(max_y / 256.0)) + 1;
  std::vector<geo::TileIndex> tile_set;
  for (int ty = ty0; ty <= ty1; ++ty) {
    for (int tx = tx0; tx <= tx1; ++tx) {
      const double rx0 = tx * 256.0, ry0 = ty * 256.0;
      const auto rect_dist = [&](const Vec2& p) {
        const double dx = std::max({rx0 - p.x, 0.0, p.x - (rx0 + 256.0)});
        const double dy = std::max({ry0 - p.y, 0.0, p.y - (ry0 + 256.0)});
        return std::hypot(dx, dy);
      };
      bool near = false;
      for (std::size_t i = 0; i + 1 < center_px.size() && !near; ++i) {
        // segments are ~10 px long at level 20; endpoint checks suffice
        near = rect_dist(center_px[i]) <= corridor_px + 32.0 ||
               rect_dist(center_px[i + 1]) <= corridor_px + 32.0;
      }
      if (near) tile_set.push_back({tx, ty, spec.level});
    }
  }

  // render
  for (const auto& t : tile_set) {
    Raster tile = Raster::filled(geo::kTileSize, geo::kTileSize, 1, kAsphalt);
    tile.georef = t;
    const Vec2 org{t.tx * 256.0, t.ty * 256.0};

    for (const auto& rl : scene.render_lines) {
      for (const auto& iv : rl.ink_m) {
        // emit painted sub-chain for [iv.first, iv.second]
        for (std::size_t j = 0; j + 1 < rl.chain_px.size(); ++j) {
          const double s0 = rl.cum_m[j], s1 = rl.cum_m[j + 1];
          if (s1 <= iv.first || s0 >= iv.second || s1 <= s0) continue;
          const double a = std::max(s0, iv.first);
          const double b = std::min(s1, iv.second);
          const double ta = (a - s0) / (s1 - s0);
          const double tb = (b - s0) / (s1 - s0);
          const Vec2 pa =
              rl.chain_px[j] + (rl.chain_px[j + 1] - rl.chain_px[j]) * ta;
          const Vec2 pb =
              rl.chain_px[j] + (rl.chain_px[j + 1] - rl.chain_px[j]) * tb;
          stamp_band(tile, pa - org, pb - org, rl.width_px, rl.paint);
        }
      }
    }

    gaussian_blur(tile, spec.blur_sigma_px);

    if (spec.noise_sigma > 0.0) {
      std::mt19937_64 tile_rng(derive_seed(
          spec.seed, (static_cast<std::uint64_t>(static_cast<std::uint32_t>(t.tx))
                      << 32) |
                         static_cast<std::uint32_t>(t.ty)));
      for (auto& v : tile.pixels) {
        const double nv = v + normal_sample(tile_rng, spec.noise_sigma);
        v = static_cast<std::uint8_t>(std::clamp(nv, 0.0, 255.0));
      }
    }

    scene.tiles.emplace_back(geo::tile_quadkey(t.tx, t.ty, t.level),
                             std::move(tile));
  }

  scene.truth = road::chunk_road(truth_lines, trajectory, spec.chunk_length_m);
  for (auto& c : scene.truth.chunks) c.map_version = spec.map_version;
  return scene;
}

void corrupt(SceneData& scene, double occlusion_fraction, std::uint64_t seed) {
  if (occlusion_fraction < 0.0 || occlusion_fraction >= 1.0) {
    throw std::invalid_argument("occlusion fraction must be in [0, 1)");
  }
  if (occlusion_fraction == 0.0 || scene.marking_length_m <= 0.0) return;

  std::mt19937_64 rng(derive_seed(seed, 0xb10b));
  const double target = occlusion_fraction * scene.marking_length_m;
  const double res =
      geo::ground_resolution(scene.route.points.front().lat, scene.level);

  struct Tracker {
    const RenderLine* rl;
    std::vector<Interval> covered;
    double length;
  };
  std::vector<Tracker> tracks;
  double total = 0.0;
  for (const auto& rl : scene.render_lines) {
    if (!rl.is_marking) continue;
    Tracker t;
    t.rl = &rl;
    t.length = intervals_length(rl.ink_m);
    total += t.length;
    tracks.push_back(std::move(t));
  }

  const auto point_at = [](const RenderLine& rl, double s) {
    auto it = std::upper_bound(rl.cum_m.begin(), rl.cum_m.end(), s);
    std::size_t i = static_cast<std::size_t>(it - rl.cum_m.begin());
    i = std::clamp<std::size_t>(i, 1, rl.cum_m.size() - 1);
    const double seg = rl.cum_m[i] - rl.cum_m[i - 1];
    const double t = seg > 0 ? (s - rl.cum_m[i - 1]) / seg : 0.0;
    struct {
      Vec2 p, dir;
    } r{rl.chain_px[i - 1] + (rl.chain_px[i] - rl.chain_px[i - 1]) * t,
        normalized(rl.chain_px[i] - rl.chain_px[i - 1])};
    return r;
  };

  double covered = 0.0;
  for (int iter = 0; iter < 50000 && covered < target - 0.25; ++iter) {
    // length-weighted line choice
    double pick = uniform_range(rng, 0.0, total);
    std::size_t li = 0;
    for (; li + 1 < tracks.size(); ++li) {
      if (pick < tracks[li].length) break;
      pick -= tracks[li].length;
    }
    Tracker& tk = tracks[li];
    const RenderLine& rl = *tk.rl;
    const double chain_len = rl.cum_m.back();

    double ell = uniform_range(rng, 8.0, 16.0);
    const double remaining = target - covered;
    if (remaining < ell) ell = std::max(1.5, remaining * 1.2);
    const double center = uniform_range(rng, 0.0, chain_len);
    const Interval blob{std::max(0.0, center - ell / 2),
                        std::min(chain_len, center + ell / 2)};
    if (blob.second - blob.first < 0.5) continue;

    // account only spans that carry ink and were not yet covered
    std::vector<Interval> fresh;
    for (const auto& ink : rl.ink_m) {
      const double lo = std::max(ink.first, blob.first);
      const double hi = std::min(ink.second, blob.second);
      if (hi > lo) fresh.push_back({lo, hi});
    }
    fresh = subtract_intervals(std::move(fresh), tk.covered);
    const double gain = intervals_length(fresh);
    if (gain < 0.1 && iter < 40000) continue;
    covered += gain;
    tk.covered.push_back(blob);

    const auto at_a = point_at(rl, blob.first);
    const auto at_b = point_at(rl, blob.second);
    const double width_px = uniform_range(rng, 2.0, 2.6) / res;
    const std::uint8_t paints[] = {55, 140, 75};
    const std::uint8_t paint =
        paints[static_cast<std::size_t>(uniform_int(rng, 0, 2))];
    for (auto& [quadkey, tile] : scene.tiles) {
      const Vec2 org = tile.origin_px();
      stamp_band(tile, at_a.p - org, at_b.p - org, width_px, paint);
    }
  }
}

namespace {

std::string encode_occlusions(const std::vector<Occlusion>& occ) {
  std::ostringstream ss;
  ss.precision(10);
  for (std::size_t i = 0; i < occ.size(); ++i) {
    if (i) ss << ";";
    ss << occ[i].start_m << ":" << occ[i].end_m << ":";
    for (std::size_t j = 0; j < occ[i].which_lines.size(); ++j) {
      if (j) ss << ",";
      ss << occ[i].which_lines[j];
    }
  }
  return ss.str();
}

std::vector<Occlusion> decode_occlusions(const std::string& text) {
  std::vector<Occlusion> out;
  std::istringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ';')) {
    if (item.empty()) continue;
    Occlusion occ;
    const auto c1 = item.find(':');
    const auto c2 = item.find(':', c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos) {
      throw std::invalid_argument("bad occlusion spec: " + item);
    }
    occ.start_m = std::stod(item.substr(0, c1));
    occ.end_m = std::stod(item.substr(c1 + 1, c2 - c1 - 1));
    std::istringstream ls(item.substr(c2 + 1));
    std::string idx;
    while (std::getline(ls, idx, ',')) {
      if (!idx.empty()) occ.which_lines.push_back(std::stoi(idx));
    }
    out.push_back(std::move(occ));
  }
  return out;
}

}  // namespace

std::string scene_spec_to_config(const SceneSpec& spec) {
  Config cfg;
  cfg.set_double("synth.origin_lat", spec.origin.lat);
  cfg.set_double("synth.origin_lon", spec.origin.lon);
  cfg.set_double("synth.length_m", spec.length_m);
  cfg.set_int("synth.lane_count", spec.lane_count);
  cfg.set_double("synth.lane_width_m", spec.lane_width_m);
  cfg.set_double("synth.curvature", spec.curvature);
  cfg.set_double("synth.dash_length_m", spec.dash_length_m);
  cfg.set_double("synth.dash_gap_m", spec.dash_gap_m);
  cfg.set_double("synth.marking_width_m", spec.marking_width_m);
  cfg.set_double("synth.blur_sigma_px", spec.blur_sigma_px);
  cfg.set_double("synth.noise_sigma", spec.noise_sigma);
  cfg.set_int("synth.seed", static_cast<std::int64_t>(spec.seed));
  cfg.set_int("synth.level", spec.level);
  cfg.set_double("synth.chunk_length_m", spec.chunk_length_m);
  cfg.set_int("synth.map_version", spec.map_version);
  if (!spec.occlusions.empty()) {
    cfg.set("synth.occlusions", encode_occlusions(spec.occlusions));
  }
  std::string distractors;
  for (Distractor d : spec.distractors) {
    if (!distractors.empty()) distractors += ",";
    distractors += d == Distractor::guardrail ? "guardrail" : "curb";
  }
  if (!distractors.empty()) cfg.set("synth.distractors", distractors);
  return cfg.dump();
}

SceneSpec scene_spec_from_config(const std::string& text) {
  const Config cfg = Config::parse(text);
  SceneSpec spec;
  spec.origin.lat = cfg.get_double("synth.origin_lat", spec.origin.lat);
  spec.origin.lon = cfg.get_double("synth.origin_lon", spec.origin.lon);
  spec.length_m = cfg.get_double("synth.length_m", spec.length_m);
  spec.lane_count =
      static_cast<int>(cfg.get_int("synth.lane_count", spec.lane_count));
  spec.lane_width_m = cfg.get_double("synth.lane_width_m", spec.lane_width_m);
  spec.curvature = cfg.get_double("synth.curvature", spec.curvature);
  spec.dash_length_m = cfg.get_double("synth.dash_length_m", spec.dash_length_m);
  spec.dash_gap_m = cfg.get_double("synth.dash_gap_m", spec.dash_gap_m);
  spec.marking_width_m =
      cfg.get_double("synth.marking_width_m", spec.marking_width_m);
  spec.blur_sigma_px = cfg.get_double("synth.blur_sigma_px", spec.blur_sigma_px);
  spec.noise_sigma = cfg.get_double("synth.noise_sigma", spec.noise_sigma);
  spec.seed = static_cast<std::uint64_t>(
      cfg.get_int("synth.seed", static_cast<std::int64_t>(spec.seed)));
  spec.level = static_cast<int>(cfg.get_int("synth.level", spec.level));
  spec.chunk_length_m =
      cfg.get_double("synth.chunk_length_m", spec.chunk_length_m);
  spec.map_version = cfg.get_int("synth.map_version", spec.map_version);
  if (cfg.has("synth.occlusions")) {
    spec.occlusions = decode_occlusions(cfg.get("synth.occlusions", ""));
  }
  if (cfg.has("synth.distractors")) {
    std::istringstream ss(cfg.get("synth.distractors", ""));
    std::string d;
    while (std::getline(ss, d, ',')) {
      if (d == "guardrail") spec.distractors.insert(Distractor::guardrail);
      else if (d == "curb") spec.distractors.insert(Distractor::curb);
      else if (!d.empty()) throw std::invalid_argument("unknown distractor: " + d);
    }
  }
  return spec;
}

void write_scene(const std::filesystem::path& dir, const SceneData& scene,
                 std::int64_t map_version) {
  const auto tiles_dir = dir / "tiles" / std::to_string(map_version);
  std::filesystem::create_directories(tiles_dir);
  for (const auto& [quadkey, tile] : scene.tiles) {
    atomic_write_file(tiles_dir / (quadkey + ".png"), encode_png(tile));
  }
  road::save_road_model(dir / "truth", scene.truth);
  write_text_file(dir / "surface.json", road::surface_to_json(scene.surface));
  write_text_file(dir / "route.json", road::polyline_to_geojson(scene.route));
}

}  // namespace lanegeo::synth
