#include "lanegeo/geo.hpp"

#include <cmath>
#include <stdexcept>

namespace lanegeo::geo {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

double deg2rad(double d) { return d * (kPi / 180.0); }
double rad2deg(double r) { return r * (180.0 / kPi); }

void check_level(int level) {
  if (level < kMinLevel || level > kMaxLevel) {
    throw std::domain_error("tile level out of range [1, 23]: " +
                            std::to_string(level));
  }
}

double wrap_lon(double lon) {
  while (lon >= 180.0) lon -= 360.0;
  while (lon < -180.0) lon += 360.0;
  return lon;
}

// Unchecked forward/inverse map used internally where coordinates may sit on
// or slightly past the map boundary (tile corners, large pixel shifts).
double pixel_y_unchecked(double lat_deg, double msize) {
  const double s = std::sin(deg2rad(lat_deg));
  return (0.5 - std::log((1.0 + s) / (1.0 - s)) / (4.0 * kPi)) * msize;
}

GeoPoint pixel_to_latlon_unchecked(double x, double y, double msize) {
  GeoPoint p;
  p.lon = x / msize * 360.0 - 180.0;
  const double t = (0.5 - y / msize) * 2.0 * kPi;
  p.lat = rad2deg(std::asin(std::tanh(t)));
  return p;
}

}  // namespace

double map_size(int level) {
  check_level(level);
  return 256.0 * std::exp2(static_cast<double>(level));
}

TilePixel latlon_to_pixel(const GeoPoint& p, int level) {
  const double msize = map_size(level);
  if (!(std::abs(p.lat) <= kMercatorLatLimit + 1e-9)) {
    throw std::domain_error("latitude beyond Mercator limit: " +
                            std::to_string(p.lat));
  }
  TilePixel px;
  px.level = level;
  px.x = (wrap_lon(p.lon) + 180.0) / 360.0 * msize;
  px.y = pixel_y_unchecked(p.lat, msize);
  return px;
}

GeoPoint pixel_to_latlon(const TilePixel& px) {
  const double msize = map_size(px.level);
  if (!(px.x >= 0.0 && px.x < msize && px.y >= 0.0 && px.y < msize)) {
    throw std::domain_error("pixel coordinates outside the map");
  }
  return pixel_to_latlon_unchecked(px.x, px.y, msize);
}

std::string tile_quadkey(int tx, int ty, int level) {
  check_level(level);
  const int n = 1 << level;
  if (tx < 0 || ty < 0 || tx >= n || ty >= n) {
    throw std::domain_error("tile index out of range for level");
  }
  std::string key;
  key.reserve(static_cast<size_t>(level));
  for (int i = level; i > 0; --i) {
    const int bit = i - 1;
    const int digit = (((ty >> bit) & 1) << 1) | ((tx >> bit) & 1);
    key.push_back(static_cast<char>('0' + digit));
  }
  return key;
}

TileIndex quadkey_to_tile(const std::string& quadkey) {
  const int level = static_cast<int>(quadkey.size());
  if (level < kMinLevel || level > kMaxLevel) {
    throw std::invalid_argument("quadkey length out of range: \"" + quadkey +
                                "\"");
  }
  TileIndex t;
  t.level = level;
  for (char c : quadkey) {
    if (c < '0' || c > '3') {
      throw std::invalid_argument("malformed quadkey digit in \"" + quadkey +
                                  "\"");
    }
    const int digit = c - '0';
    t.tx = (t.tx << 1) | (digit & 1);
    t.ty = (t.ty << 1) | (digit >> 1);
  }
  return t;
}

TileIndex pixel_tile(const TilePixel& px) {
  TileIndex t;
  t.level = px.level;
  t.tx = static_cast<int>(std::floor(px.x / kTileSize));
  t.ty = static_cast<int>(std::floor(px.y / kTileSize));
  return t;
}

EcefPoint latlon_to_ecef(const GeoPoint& p) {
  const double phi = deg2rad(p.lat);
  const double lam = deg2rad(p.lon);
  const double sp = std::sin(phi);
  const double cp = std::cos(phi);
  const double n = kEquatorialRadius / std::sqrt(1.0 - kEccentricitySq * sp * sp);
  EcefPoint e;
  e.x = (n + p.alt) * cp * std::cos(lam);
  e.y = (n + p.alt) * cp * std::sin(lam);
  e.z = (n * (1.0 - kEccentricitySq) + p.alt) * sp;
  return e;
}

GeoPoint ecef_to_latlon(const EcefPoint& p) {
  GeoPoint g;
  g.lon = rad2deg(std::atan2(p.y, p.x));
  const double rho = std::hypot(p.x, p.y);
  double phi = std::atan2(p.z, rho * (1.0 - kEccentricitySq));
  double h = 0.0;
  for (int i = 0; i < 10; ++i) {
    const double sp = std::sin(phi);
    const double n =
        kEquatorialRadius / std::sqrt(1.0 - kEccentricitySq * sp * sp);
    const double prev_phi = phi;
    const double prev_h = h;
    if (rho > 1.0) {
      h = rho / std::cos(phi) - n;
      phi = std::atan2(p.z, rho * (1.0 - kEccentricitySq * n / (n + h)));
    } else {
      // near the pole the radial form is better conditioned
      h = std::abs(p.z) - n * (1.0 - kEccentricitySq);
      phi = p.z >= 0.0 ? kPi / 2 : -kPi / 2;
    }
    if (std::abs(phi - prev_phi) < 1e-14 && std::abs(h - prev_h) < 1e-9) break;
  }
  g.lat = rad2deg(phi);
  g.alt = h;
  return g;
}

NeuPoint ecef_to_neu(const EcefPoint& p, const GeoPoint& origin) {
  const EcefPoint o = latlon_to_ecef(origin);
  const double dx = p.x - o.x;
  const double dy = p.y - o.y;
  const double dz = p.z - o.z;
  const double phi = deg2rad(origin.lat);
  const double lam = deg2rad(origin.lon);
  const double sp = std::sin(phi), cp = std::cos(phi);
  const double sl = std::sin(lam), cl = std::cos(lam);
  NeuPoint r;
  r.origin = origin;
  r.n = -sp * cl * dx - sp * sl * dy + cp * dz;
  r.e = -sl * dx + cl * dy;
  r.u = cp * cl * dx + cp * sl * dy + sp * dz;
  return r;
}

EcefPoint neu_to_ecef(const NeuPoint& p) {
  const EcefPoint o = latlon_to_ecef(p.origin);
  const double phi = deg2rad(p.origin.lat);
  const double lam = deg2rad(p.origin.lon);
  const double sp = std::sin(phi), cp = std::cos(phi);
  const double sl = std::sin(lam), cl = std::cos(lam);
  EcefPoint r;
  r.x = o.x - sp * cl * p.n - sl * p.e + cp * cl * p.u;
  r.y = o.y - sp * sl * p.n + cl * p.e + cp * sl * p.u;
  r.z = o.z + cp * p.n + sp * p.u;
  return r;
}

NeuPoint latlon_to_neu(const GeoPoint& p, const GeoPoint& origin) {
  return ecef_to_neu(latlon_to_ecef(p), origin);
}

GeoPoint neu_to_latlon(const NeuPoint& p) {
  return ecef_to_latlon(neu_to_ecef(p));
}

double ground_resolution(double lat_deg, int level) {
  return std::cos(deg2rad(lat_deg)) * (2.0 * kPi * kEquatorialRadius) /
         map_size(level);
}

double mercator_cartesian_error_dp(double lat_deg, double dx, double dy,
                                   int level) {
  const double msize = map_size(level);
  if (!(std::abs(dx) <= 65536.0 && std::abs(dy) <= 65536.0)) {
    throw std::domain_error("pixel shift out of range");
  }
  // Anchor both back-projections at the pixel-grid position of the input so
  // the two branches coincide exactly at zero shift.
  const TilePixel px = latlon_to_pixel({lat_deg, 0.0, 0.0}, level);
  const GeoPoint anchor = pixel_to_latlon_unchecked(px.x, px.y, msize);

  const GeoPoint back =
      pixel_to_latlon_unchecked(px.x + dx, px.y + dy, msize);
  const EcefPoint via_mercator = latlon_to_ecef(back);

  const double res = ground_resolution(anchor.lat, level);
  NeuPoint shifted;
  shifted.origin = anchor;
  shifted.n = -dy * res;
  shifted.e = dx * res;
  shifted.u = 0.0;
  const EcefPoint via_tangent = neu_to_ecef(shifted);

  return distance(via_mercator, via_tangent);
}

double tile_span_error_de(int tx, int ty, int level) {
  const double msize = map_size(level);
  const int n = 1 << level;
  if (tx < 0 || ty < 0 || tx >= n || ty >= n) {
    throw std::domain_error("tile index out of range for level");
  }
  const double x0 = tx * 256.0;
  const double x1 = (tx + 1) * 256.0;
  const double y_north = ty * 256.0;
  const double y_south = (ty + 1) * 256.0;
  const auto corner = [&](double x, double y) {
    return latlon_to_ecef(pixel_to_latlon_unchecked(x, y, msize));
  };
  const double north_len = distance(corner(x0, y_north), corner(x1, y_north));
  const double south_len = distance(corner(x0, y_south), corner(x1, y_south));
  return std::abs(north_len - south_len);
}

double distance(const EcefPoint& a, const EcefPoint& b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  const double dz = a.z - b.z;
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

}  // namespace lanegeo::geo
