#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "lanegeo/geo.hpp"
#include "lanegeo/geometry.hpp"
#include "lanegeo/raster.hpp"

namespace lanegeo::road {

struct ParseError : std::runtime_error {
  ParseError(std::string at, const std::string& message)
      : std::runtime_error(at + ": " + message), path(std::move(at)) {}
  std::string path;  // JSON path of the offending element, e.g. lines[0].type
};

enum class LineKind { solid, dashed, trajectory };

std::string to_string(LineKind k);
LineKind line_kind_from_string(const std::string& s);  // exact strings only

/// One functional lane-boundary line (or the trajectory) as ordered control
/// points along the travel direction.
struct BoundaryLine {
  std::string line_id;  // UUID string
  LineKind kind = LineKind::solid;
  std::vector<geo::GeoPoint> points;
};

/// A 12-meter (by default) slice of road: one trajectory piece plus the
/// boundary-line fragments crossing it.
struct Chunk {
  std::int64_t id = 0;
  std::int64_t map_version = 0;
  std::vector<BoundaryLine> lines;

  const BoundaryLine* trajectory() const;
};

struct RoadModel {
  std::vector<Chunk> chunks;
  double chunk_length = 12.0;
};

/// Drivable-surface bounds; everything lane-marking-like outside is ignored.
struct RoadSurface {
  std::vector<geo::GeoPoint> left_boundary;
  std::vector<geo::GeoPoint> right_boundary;
};

bool is_valid_uuid(const std::string& s);
/// Deterministic UUIDv4-format string from a 64-bit seed.
std::string uuid_from_seed(std::uint64_t seed);

Chunk parse_chunk_json(const std::string& text);
std::string serialize_chunk_json(const Chunk& c);

/// Splits lines and trajectory at arc-length multiples of chunk_length along
/// the trajectory; the last chunk may be shorter. Fragments inherit line ids
/// and share border points exactly.
RoadModel chunk_road(const std::vector<BoundaryLine>& lines,
                     const BoundaryLine& trajectory, double chunk_length);

struct PixelPolyline {
  std::string line_id;
  LineKind kind = LineKind::solid;
  std::vector<geo::TilePixel> points;
};

std::vector<PixelPolyline> project_chunk_to_pixels(const Chunk& c, int level);

struct MaskPair {
  Raster surface_mask;
  Raster marking_mask;
};

/// Rasterizes the surface polygon and the chunk's marking lines (1 px wide)
/// into masks matching a georeferenced tile. A chunk outside the tile yields
/// empty (all-zero) masks.
MaskPair rasterize_masks(const Chunk& c, const RoadSurface& surface,
                         const Raster& tile);

void save_road_model(const std::filesystem::path& dir, const RoadModel& m);
RoadModel load_road_model(const std::filesystem::path& dir);

std::string to_geojson(const RoadModel& m);

std::string surface_to_json(const RoadSurface& s);
RoadSurface surface_from_json(const std::string& text);

/// All chunk fragments re-joined per line id, in chunk order.
struct MergedModel {
  std::vector<BoundaryLine> lines;
  BoundaryLine trajectory;
};
MergedModel merge_model_lines(const RoadModel& m);

/// Normalization between the two dashed-line encodings: merges collinear
/// dashed fragments separated by gaps below max_gap into one control-point
/// chain. Non-dashed lines pass through untouched.
std::vector<BoundaryLine> merge_dashed_chains(
    const std::vector<BoundaryLine>& lines, double max_gap_m);

/// Single line as a GeoJSON LineString feature (route files).
std::string polyline_to_geojson(const BoundaryLine& line);
BoundaryLine polyline_from_geojson(const std::string& text);

}  // namespace lanegeo::road
