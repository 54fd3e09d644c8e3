#pragma once

#include <string>

namespace lanegeo::geo {

// WGS84 ellipsoid.
inline constexpr double kEquatorialRadius = 6378137.0;
inline constexpr double kFlattening = 1.0 / 298.257223563;
inline constexpr double kEccentricitySq = kFlattening * (2.0 - kFlattening);

// Web-Mercator latitude limit (tile y in [0, map_size)).
inline constexpr double kMercatorLatLimit = 85.05112878;

inline constexpr int kMinLevel = 1;
inline constexpr int kMaxLevel = 23;
inline constexpr int kTileSize = 256;

/// Geodetic position, angles in degrees. Altitude in meters, 0 unless stated.
struct GeoPoint {
  double lat = 0.0;
  double lon = 0.0;
  double alt = 0.0;
};

/// Global (not tile-relative) pixel position at a zoom level. Sub-pixel valued.
struct TilePixel {
  int level = 0;
  double x = 0.0;
  double y = 0.0;
};

struct EcefPoint {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

/// Local tangent-plane offset (north/east/up, meters) from a geodetic origin.
struct NeuPoint {
  GeoPoint origin;
  double n = 0.0;
  double e = 0.0;
  double u = 0.0;
};

struct TileIndex {
  int tx = 0;
  int ty = 0;
  int level = 0;
};

/// Pixels per side of the world map at `level` (256 * 2^level).
double map_size(int level);

TilePixel latlon_to_pixel(const GeoPoint& p, int level);
GeoPoint pixel_to_latlon(const TilePixel& px);

std::string tile_quadkey(int tx, int ty, int level);
TileIndex quadkey_to_tile(const std::string& quadkey);

/// Tile containing a global pixel position.
TileIndex pixel_tile(const TilePixel& px);

EcefPoint latlon_to_ecef(const GeoPoint& p);
GeoPoint ecef_to_latlon(const EcefPoint& p);

NeuPoint ecef_to_neu(const EcefPoint& p, const GeoPoint& origin);
EcefPoint neu_to_ecef(const NeuPoint& p);

NeuPoint latlon_to_neu(const GeoPoint& p, const GeoPoint& origin);
GeoPoint neu_to_latlon(const NeuPoint& p);

/// Meters spanned by one pixel at the given latitude and level.
double ground_resolution(double lat_deg, int level);

/// Disagreement (meters) between back-projecting a pixel shift through the
/// Mercator map and applying the equivalent metric shift in the local
/// tangent plane. Zero at zero shift.
double mercator_cartesian_error_dp(double lat_deg, double dx, double dy,
                                   int level);

/// Absolute difference (meters) between the lengths of a tile's north and
/// south edges measured through ECEF.
double tile_span_error_de(int tx, int ty, int level);

double distance(const EcefPoint& a, const EcefPoint& b);

}  // namespace lanegeo::geo
