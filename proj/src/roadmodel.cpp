#include "lanegeo/roadmodel.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <set>

#include <json.hpp>

#include "lanegeo/imageio.hpp"

namespace lanegeo::road {

using ordered_json = nlohmann::ordered_json;

std::string to_string(LineKind k) {
  switch (k) {
    case LineKind::solid: return "solid";
    case LineKind::dashed: return "dashed";
    case LineKind::trajectory: return "trajectory";
  }
  return "solid";
}

LineKind line_kind_from_string(const std::string& s) {
  if (s == "solid") return LineKind::solid;
  if (s == "dashed") return LineKind::dashed;
  if (s == "trajectory") return LineKind::trajectory;
  throw std::invalid_argument("unknown line kind: \"" + s + "\"");
}

const BoundaryLine* Chunk::trajectory() const {
  for (const auto& l : lines) {
    if (l.kind == LineKind::trajectory) return &l;
  }
  return nullptr;
}

bool is_valid_uuid(const std::string& s) {
  if (s.size() != 36) return false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i == 8 || i == 13 || i == 18 || i == 23) {
      if (s[i] != '-') return false;
    } else if (!std::isxdigit(static_cast<unsigned char>(s[i]))) {
      return false;
    }
  }
  return true;
}

std::string uuid_from_seed(std::uint64_t seed) {
  // splitmix64 expansion into 128 bits
  auto next = [&seed]() {
    seed += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = seed;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  };
  const std::uint64_t hi = next();
  const std::uint64_t lo = next();
  char buf[37];
  std::snprintf(buf, sizeof(buf), "%08x-%04x-4%03x-%04x-%012llx",
                static_cast<unsigned>(hi >> 32),
                static_cast<unsigned>((hi >> 16) & 0xFFFF),
                static_cast<unsigned>(hi & 0x0FFF),
                static_cast<unsigned>(0x8000 | ((lo >> 48) & 0x3FFF)),
                static_cast<unsigned long long>(lo & 0xFFFFFFFFFFFFULL));
  return buf;
}

namespace {

const nlohmann::json& require_field(const nlohmann::json& obj,
                                    const std::string& key,
                                    const std::string& at) {
  auto it = obj.find(key);
  if (it == obj.end()) throw ParseError(at, "missing field \"" + key + "\"");
  return *it;
}

BoundaryLine parse_line(const nlohmann::json& jl, const std::string& at) {
  if (!jl.is_object()) throw ParseError(at, "expected object");
  BoundaryLine line;

  const auto& jid = require_field(jl, "line id", at + ".line id");
  if (!jid.is_string()) throw ParseError(at + ".line id", "expected string");
  line.line_id = jid.get<std::string>();
  if (!is_valid_uuid(line.line_id)) {
    throw ParseError(at + ".line id", "malformed UUID \"" + line.line_id + "\"");
  }

  const auto& jt = require_field(jl, "type", at + ".type");
  if (!jt.is_string()) throw ParseError(at + ".type", "expected string");
  try {
    line.kind = line_kind_from_string(jt.get<std::string>());
  } catch (const std::invalid_argument& e) {
    throw ParseError(at + ".type", e.what());
  }

  const auto& jp = require_field(jl, "points", at + ".points");
  if (!jp.is_array()) throw ParseError(at + ".points", "expected array");
  if (jp.size() < 2) {
    throw ParseError(at + ".points", "need at least 2 points, got " +
                                         std::to_string(jp.size()));
  }
  for (std::size_t i = 0; i < jp.size(); ++i) {
    const std::string pat = at + ".points[" + std::to_string(i) + "]";
    const auto& row = jp[i];
    if (!row.is_array() || row.size() != 2 || !row[0].is_number() ||
        !row[1].is_number()) {
      throw ParseError(pat, "expected [latitude, longitude]");
    }
    geo::GeoPoint p;
    p.lat = row[0].get<double>();
    p.lon = row[1].get<double>();
    if (std::abs(p.lat) > geo::kMercatorLatLimit + 1e-9) {
      throw ParseError(pat, "latitude out of range");
    }
    if (p.lon < -180.0 || p.lon >= 180.0) {
      throw ParseError(pat, "longitude out of range");
    }
    line.points.push_back(p);
  }
  for (std::size_t i = 1; i < line.points.size(); ++i) {
    if (line.points[i].lat == line.points[i - 1].lat &&
        line.points[i].lon == line.points[i - 1].lon) {
      throw ParseError(at + ".points[" + std::to_string(i) + "]",
                       "repeated consecutive point");
    }
  }
  return line;
}

}  // namespace

Chunk parse_chunk_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError("$", std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ParseError("$", "expected top-level object");

  Chunk c;
  const auto& jid = require_field(j, "id", "id");
  if (!jid.is_number_integer()) throw ParseError("id", "expected integer");
  c.id = jid.get<std::int64_t>();

  const auto& jv = require_field(j, "map version", "map version");
  if (!jv.is_number_integer()) {
    throw ParseError("map version", "expected integer");
  }
  c.map_version = jv.get<std::int64_t>();

  const auto& jl = require_field(j, "lines", "lines");
  if (!jl.is_array()) throw ParseError("lines", "expected array");
  for (std::size_t i = 0; i < jl.size(); ++i) {
    c.lines.push_back(parse_line(jl[i], "lines[" + std::to_string(i) + "]"));
  }
  return c;
}

std::string serialize_chunk_json(const Chunk& c) {
  ordered_json j;
  j["id"] = c.id;
  j["map version"] = c.map_version;
  ordered_json lines = ordered_json::array();
  for (const auto& l : c.lines) {
    ordered_json jl;
    jl["line id"] = l.line_id;
    jl["type"] = to_string(l.kind);
    ordered_json pts = ordered_json::array();
    for (const auto& p : l.points) {
      pts.push_back(ordered_json::array({p.lat, p.lon}));
    }
    jl["points"] = std::move(pts);
    lines.push_back(std::move(jl));
  }
  j["lines"] = std::move(lines);
  return j.dump(2) + "\n";
}

namespace {

struct MetricPoint {
  geo::GeoPoint gp;
  Vec2 xy;     // east, north in the route frame
  double s;    // arc length of projection onto the trajectory
};

std::vector<MetricPoint> to_metric(const std::vector<geo::GeoPoint>& pts,
                                   const geo::GeoPoint& origin,
                                   const Polyline2& traj) {
  std::vector<MetricPoint> out;
  out.reserve(pts.size());
  for (const auto& gp : pts) {
    const auto neu = geo::latlon_to_neu(gp, origin);
    MetricPoint mp;
    mp.gp = gp;
    mp.xy = {neu.e, neu.n};
    mp.s = traj.project(mp.xy).s;
    out.push_back(mp);
  }
  return out;
}

geo::GeoPoint metric_to_geo(const Vec2& xy, const geo::GeoPoint& origin) {
  geo::NeuPoint np;
  np.origin = origin;
  np.n = xy.y;
  np.e = xy.x;
  np.u = 0.0;
  return geo::neu_to_latlon(np);
}

}  // namespace

RoadModel chunk_road(const std::vector<BoundaryLine>& lines,
                     const BoundaryLine& trajectory, double chunk_length) {
  if (chunk_length <= 0.0) throw std::invalid_argument("chunk_length <= 0");
  if (trajectory.points.size() < 2) {
    throw std::invalid_argument("degenerate trajectory");
  }
  const geo::GeoPoint origin = trajectory.points.front();

  std::vector<Vec2> traj_xy;
  for (const auto& gp : trajectory.points) {
    const auto neu = geo::latlon_to_neu(gp, origin);
    traj_xy.push_back({neu.e, neu.n});
  }
  const Polyline2 traj(traj_xy);
  const double total = traj.length();
  if (total < 1e-6) throw std::invalid_argument("degenerate trajectory");
  if (total + 1e-9 < chunk_length) {
    throw std::invalid_argument("trajectory shorter than one chunk");
  }

  const int n_chunks =
      std::max(1, static_cast<int>(std::ceil(total / chunk_length - 1e-9)));
  const auto chunk_of = [&](double s) {
    return std::clamp(static_cast<int>(std::floor(s / chunk_length)), 0,
                      n_chunks - 1);
  };

  RoadModel model;
  model.chunk_length = chunk_length;
  model.chunks.resize(static_cast<std::size_t>(n_chunks));
  for (int k = 0; k < n_chunks; ++k) {
    model.chunks[static_cast<std::size_t>(k)].id = k;
  }

  // Trajectory pieces: cut at border arc lengths; border points are computed
  // once and shared by the adjacent chunks.
  {
    std::vector<geo::GeoPoint> border_geo(static_cast<std::size_t>(n_chunks) + 1);
    border_geo.front() = trajectory.points.front();
    border_geo.back() = trajectory.points.back();
    for (int k = 1; k < n_chunks; ++k) {
      border_geo[static_cast<std::size_t>(k)] =
          metric_to_geo(traj.point_at(k * chunk_length), origin);
    }
    // cumulative arc length of trajectory vertices
    std::vector<double> cum(trajectory.points.size(), 0.0);
    for (std::size_t i = 1; i < traj_xy.size(); ++i) {
      cum[i] = cum[i - 1] + norm(traj_xy[i] - traj_xy[i - 1]);
    }
    for (int k = 0; k < n_chunks; ++k) {
      const double s0 = k * chunk_length;
      const double s1 = std::min(total, (k + 1) * chunk_length);
      BoundaryLine piece;
      piece.line_id = trajectory.line_id;
      piece.kind = LineKind::trajectory;
      piece.points.push_back(border_geo[static_cast<std::size_t>(k)]);
      for (std::size_t i = 0; i < trajectory.points.size(); ++i) {
        if (cum[i] > s0 + 1e-9 && cum[i] < s1 - 1e-9) {
          piece.points.push_back(trajectory.points[i]);
        }
      }
      piece.points.push_back(border_geo[static_cast<std::size_t>(k) + 1]);
      model.chunks[static_cast<std::size_t>(k)].lines.push_back(
          std::move(piece));
    }
  }

  for (const auto& line : lines) {
    if (line.kind == LineKind::trajectory) continue;
    if (line.points.size() < 2) continue;
    auto mpts = to_metric(line.points, origin, traj);

    // refine: insert a point at every chunk-border crossing
    std::vector<MetricPoint> refined;
    refined.push_back(mpts.front());
    for (std::size_t i = 1; i < mpts.size(); ++i) {
      const MetricPoint& a = mpts[i - 1];
      const MetricPoint& b = mpts[i];
      const double lo = std::min(a.s, b.s);
      const double hi = std::max(a.s, b.s);
      const int k_lo = static_cast<int>(std::ceil(lo / chunk_length));
      const int k_hi = static_cast<int>(std::floor(hi / chunk_length));
      std::vector<double> borders;
      for (int k = k_lo; k <= k_hi; ++k) {
        const double s = k * chunk_length;
        if (s > lo + 1e-9 && s < hi - 1e-9) borders.push_back(s);
      }
      if (a.s > b.s) std::reverse(borders.begin(), borders.end());
      for (double s : borders) {
        const double t = (s - a.s) / (b.s - a.s);
        MetricPoint mid;
        mid.xy = a.xy + (b.xy - a.xy) * t;
        mid.s = s;
        mid.gp = metric_to_geo(mid.xy, origin);
        refined.push_back(mid);
      }
      refined.push_back(b);
    }

    // slice refined chain by the chunk of each segment midpoint
    std::vector<geo::GeoPoint> frag{refined.front().gp};
    int cur = -1;
    auto flush = [&](int k) {
      if (cur >= 0 && frag.size() >= 2) {
        BoundaryLine piece;
        piece.line_id = line.line_id;
        piece.kind = line.kind;
        piece.points = frag;
        model.chunks[static_cast<std::size_t>(cur)].lines.push_back(
            std::move(piece));
      }
      cur = k;
    };
    for (std::size_t i = 1; i < refined.size(); ++i) {
      const double mid_s = 0.5 * (refined[i - 1].s + refined[i].s);
      const int k = chunk_of(mid_s);
      if (k != cur) {
        const geo::GeoPoint joint = refined[i - 1].gp;
        flush(k);
        frag = {joint};
      }
      if (std::abs(refined[i].gp.lat - frag.back().lat) > 1e-12 ||
          std::abs(refined[i].gp.lon - frag.back().lon) > 1e-12) {
        frag.push_back(refined[i].gp);
      }
    }
    flush(-1);
  }

  return model;
}

std::vector<PixelPolyline> project_chunk_to_pixels(const Chunk& c, int level) {
  std::vector<PixelPolyline> out;
  for (const auto& l : c.lines) {
    PixelPolyline pl;
    pl.line_id = l.line_id;
    pl.kind = l.kind;
    for (const auto& p : l.points) {
      pl.points.push_back(geo::latlon_to_pixel(p, level));
    }
    out.push_back(std::move(pl));
  }
  return out;
}

MaskPair rasterize_masks(const Chunk& c, const RoadSurface& surface,
                         const Raster& tile) {
  if (!tile.georef) throw std::invalid_argument("tile raster lacks georef");
  const int level = tile.georef->level;
  const Vec2 org = tile.origin_px();
  const auto to_local = [&](const geo::GeoPoint& p) {
    const auto px = geo::latlon_to_pixel(p, level);
    return Vec2{px.x - org.x, px.y - org.y};
  };

  MaskPair masks;
  masks.surface_mask = Raster::filled(tile.width, tile.height, 1, 0);
  masks.surface_mask.georef = tile.georef;
  masks.marking_mask = Raster::filled(tile.width, tile.height, 1, 0);
  masks.marking_mask.georef = tile.georef;

  std::vector<Vec2> polygon;
  for (const auto& p : surface.left_boundary) polygon.push_back(to_local(p));
  for (auto it = surface.right_boundary.rbegin();
       it != surface.right_boundary.rend(); ++it) {
    polygon.push_back(to_local(*it));
  }
  fill_polygon(masks.surface_mask, polygon, 255);

  for (const auto& l : c.lines) {
    if (l.kind == LineKind::trajectory) continue;
    std::vector<Vec2> pts;
    for (const auto& p : l.points) pts.push_back(to_local(p));
    draw_polyline(masks.marking_mask, pts, 255);
  }
  return masks;
}

void save_road_model(const std::filesystem::path& dir, const RoadModel& m) {
  std::filesystem::create_directories(dir);
  ordered_json index;
  index["chunk_length"] = m.chunk_length;
  ordered_json ids = ordered_json::array();
  for (const auto& c : m.chunks) {
    ids.push_back(c.id);
    write_text_file(dir / ("chunk_" + std::to_string(c.id) + ".json"),
                    serialize_chunk_json(c));
  }
  index["chunks"] = std::move(ids);
  write_text_file(dir / "road.json", index.dump(2) + "\n");
}

RoadModel load_road_model(const std::filesystem::path& dir) {
  const auto index_path = dir / "road.json";
  nlohmann::json index;
  try {
    index = nlohmann::json::parse(read_text_file(index_path));
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError("road.json", std::string("invalid JSON: ") + e.what());
  }
  RoadModel m;
  m.chunk_length = index.value("chunk_length", 12.0);
  if (!index.contains("chunks") || !index["chunks"].is_array()) {
    throw ParseError("road.json.chunks", "missing chunk id list");
  }
  for (const auto& jid : index["chunks"]) {
    const auto id = jid.get<std::int64_t>();
    const auto path = dir / ("chunk_" + std::to_string(id) + ".json");
    Chunk c = parse_chunk_json(read_text_file(path));
    if (c.id != id) {
      throw ParseError(path.filename().string(),
                       "chunk id does not match file name");
    }
    if (!c.trajectory()) {
      throw ParseError(path.filename().string(), "chunk has no trajectory line");
    }
    m.chunks.push_back(std::move(c));
  }
  return m;
}

std::string to_geojson(const RoadModel& m) {
  ordered_json features = ordered_json::array();
  for (const auto& c : m.chunks) {
    for (const auto& l : c.lines) {
      ordered_json f;
      f["type"] = "Feature";
      f["properties"] = {{"kind", to_string(l.kind)},
                         {"line_id", l.line_id},
                         {"chunk_id", c.id}};
      ordered_json coords = ordered_json::array();
      for (const auto& p : l.points) {
        coords.push_back(ordered_json::array({p.lon, p.lat}));
      }
      f["geometry"] = {{"type", "LineString"}, {"coordinates", coords}};
      features.push_back(std::move(f));
    }
  }
  ordered_json root;
  root["type"] = "FeatureCollection";
  root["features"] = std::move(features);
  return root.dump(2) + "\n";
}

std::string surface_to_json(const RoadSurface& s) {
  ordered_json j;
  auto dump_side = [](const std::vector<geo::GeoPoint>& side) {
    ordered_json arr = ordered_json::array();
    for (const auto& p : side) arr.push_back(ordered_json::array({p.lat, p.lon}));
    return arr;
  };
  j["left"] = dump_side(s.left_boundary);
  j["right"] = dump_side(s.right_boundary);
  return j.dump(2) + "\n";
}

RoadSurface surface_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError("$", std::string("invalid JSON: ") + e.what());
  }
  RoadSurface s;
  auto load_side = [&](const char* key, std::vector<geo::GeoPoint>& side) {
    if (!j.contains(key) || !j[key].is_array()) {
      throw ParseError(key, "missing boundary array");
    }
    for (const auto& row : j[key]) {
      side.push_back({row[0].get<double>(), row[1].get<double>(), 0.0});
    }
  };
  load_side("left", s.left_boundary);
  load_side("right", s.right_boundary);
  return s;
}

MergedModel merge_model_lines(const RoadModel& m) {
  MergedModel out;
  out.trajectory.kind = LineKind::trajectory;
  std::vector<std::string> order;
  std::map<std::string, BoundaryLine> by_id;

  const auto append_points = [](std::vector<geo::GeoPoint>& dst,
                                const std::vector<geo::GeoPoint>& src) {
    for (const auto& p : src) {
      if (!dst.empty() && std::abs(dst.back().lat - p.lat) < 1e-10 &&
          std::abs(dst.back().lon - p.lon) < 1e-10) {
        continue;
      }
      dst.push_back(p);
    }
  };

  for (const auto& c : m.chunks) {
    for (const auto& l : c.lines) {
      if (l.kind == LineKind::trajectory) {
        if (out.trajectory.line_id.empty()) {
          out.trajectory.line_id = l.line_id;
        }
        append_points(out.trajectory.points, l.points);
        continue;
      }
      auto it = by_id.find(l.line_id);
      if (it == by_id.end()) {
        order.push_back(l.line_id);
        BoundaryLine nl;
        nl.line_id = l.line_id;
        nl.kind = l.kind;
        it = by_id.emplace(l.line_id, std::move(nl)).first;
      }
      append_points(it->second.points, l.points);
    }
  }
  for (const auto& id : order) out.lines.push_back(std::move(by_id[id]));
  return out;
}

std::vector<BoundaryLine> merge_dashed_chains(
    const std::vector<BoundaryLine>& lines, double max_gap_m) {
  std::vector<BoundaryLine> out;
  std::vector<BoundaryLine> dashed;
  for (const auto& l : lines) {
    if (l.kind == LineKind::dashed) {
      dashed.push_back(l);
    } else {
      out.push_back(l);
    }
  }
  if (dashed.empty()) return out;

  const geo::GeoPoint origin = dashed.front().points.front();
  struct Frag {
    BoundaryLine line;
    Vec2 head, tail, dir;
    bool used = false;
  };
  std::vector<Frag> frags;
  for (auto& l : dashed) {
    Frag f;
    const auto h = geo::latlon_to_neu(l.points.front(), origin);
    const auto t = geo::latlon_to_neu(l.points.back(), origin);
    f.head = {h.e, h.n};
    f.tail = {t.e, t.n};
    f.dir = normalized(f.tail - f.head);
    f.line = std::move(l);
    frags.push_back(std::move(f));
  }

  const auto chainable = [&](const Frag& a, const Frag& b) {
    const Vec2 gap = b.head - a.tail;
    const double gap_len = norm(gap);
    if (gap_len > max_gap_m) return false;
    if (gap_len < 1e-9) return true;
    const Vec2 gap_dir = normalized(gap);
    // collinear: aligned headings and the gap follows the same direction
    return dot(a.dir, b.dir) > 0.95 && dot(a.dir, gap_dir) > 0.95 &&
           std::abs(cross(a.dir, gap)) < 0.8;
  };

  for (std::size_t i = 0; i < frags.size(); ++i) {
    if (frags[i].used) continue;
    // walk back to the chain head; iteration bound guards against cycles
    std::size_t head = i;
    for (std::size_t step = 0; step < frags.size(); ++step) {
      std::size_t pred = frags.size();
      for (std::size_t j = 0; j < frags.size(); ++j) {
        if (j == head || frags[j].used || j == i) continue;
        if (chainable(frags[j], frags[head])) {
          pred = j;
          break;
        }
      }
      if (pred == frags.size()) break;
      head = pred;
    }
    BoundaryLine chain;
    chain.line_id = frags[head].line.line_id;
    chain.kind = LineKind::dashed;
    std::size_t cur = head;
    while (true) {
      frags[cur].used = true;
      for (const auto& p : frags[cur].line.points) {
        if (!chain.points.empty() &&
            std::abs(chain.points.back().lat - p.lat) < 1e-10 &&
            std::abs(chain.points.back().lon - p.lon) < 1e-10) {
          continue;
        }
        chain.points.push_back(p);
      }
      bool advanced = false;
      for (std::size_t j = 0; j < frags.size(); ++j) {
        if (frags[j].used) continue;
        if (chainable(frags[cur], frags[j])) {
          cur = j;
          advanced = true;
          break;
        }
      }
      if (!advanced) break;
    }
    out.push_back(std::move(chain));
  }
  return out;
}

std::string polyline_to_geojson(const BoundaryLine& line) {
  ordered_json f;
  f["type"] = "Feature";
  f["properties"] = {{"kind", to_string(line.kind)}, {"line_id", line.line_id}};
  ordered_json coords = ordered_json::array();
  for (const auto& p : line.points) {
    coords.push_back(ordered_json::array({p.lon, p.lat}));
  }
  f["geometry"] = {{"type", "LineString"}, {"coordinates", coords}};
  return f.dump(2) + "\n";
}

BoundaryLine polyline_from_geojson(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError("$", std::string("invalid JSON: ") + e.what());
  }
  if (j.value("type", "") == "FeatureCollection") {
    if (!j.contains("features") || j["features"].empty()) {
      throw ParseError("features", "empty feature collection");
    }
    j = j["features"][0];
  }
  BoundaryLine line;
  line.kind = LineKind::trajectory;
  if (j.contains("properties") && j["properties"].is_object()) {
    const auto& props = j["properties"];
    if (props.contains("line_id") && props["line_id"].is_string()) {
      line.line_id = props["line_id"].get<std::string>();
    }
    if (props.contains("kind") && props["kind"].is_string()) {
      line.kind = line_kind_from_string(props["kind"].get<std::string>());
    }
  }
  if (line.line_id.empty()) line.line_id = uuid_from_seed(0);
  if (!j.contains("geometry") || !j["geometry"].contains("coordinates")) {
    throw ParseError("geometry", "missing LineString coordinates");
  }
  for (const auto& row : j["geometry"]["coordinates"]) {
    // GeoJSON stores [lon, lat]
    line.points.push_back({row[1].get<double>(), row[0].get<double>(), 0.0});
  }
  if (line.points.size() < 2) {
    throw ParseError("geometry.coordinates", "need at least 2 points");
  }
  return line;
}

}  // namespace lanegeo::road
