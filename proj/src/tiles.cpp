#include "lanegeo/tiles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

// cpp-httplib pulls in OpenSSL only when asked; plain HTTP is enough for the
// tile endpoint in the paper's URL scheme.
#include <httplib.h>

#include "lanegeo/imageio.hpp"

namespace lanegeo::tiles {

namespace {

void replace_all(std::string& s, const std::string& from,
                 const std::string& to) {
  std::size_t pos = 0;
  while ((pos = s.find(from, pos)) != std::string::npos) {
    s.replace(pos, from.size(), to);
    pos += to.size();
  }
}

}  // namespace

std::string substitute_url(const std::string& url_template,
                           const std::string& quadkey,
                           std::int64_t map_version) {
  std::string url = url_template;
  replace_all(url, "[quadkey]", quadkey);
  replace_all(url, "[map version]", std::to_string(map_version));
  return url;
}

Raster TileClient::fetch(const std::string& quadkey) {
  const auto tile = geo::quadkey_to_tile(quadkey);  // validates the key
  const auto rel = std::filesystem::path(std::to_string(cfg_.map_version)) /
                   (quadkey + ".png");

  if (!cfg_.cache_dir.empty()) {
    const auto cached = cfg_.cache_dir / rel;
    if (std::filesystem::exists(cached)) {
      Raster r = decode_png(read_file(cached));
      r.georef = tile;
      return r;
    }
  }

  Raster r = fetch_from_source(quadkey);
  if (r.width != geo::kTileSize || r.height != geo::kTileSize) {
    throw FetchError("tile " + quadkey + " has unexpected dimensions " +
                     std::to_string(r.width) + "x" + std::to_string(r.height));
  }
  r.georef = tile;
  if (!cfg_.cache_dir.empty()) {
    atomic_write_file(cfg_.cache_dir / rel, encode_png(r));
  }
  return r;
}

Raster TileClient::fetch_from_source(const std::string& quadkey) {
  source_accesses_.fetch_add(1);
  const auto rel = std::filesystem::path(std::to_string(cfg_.map_version)) /
                   (quadkey + ".png");

  if (cfg_.mode == SourceMode::directory) {
    const auto path = cfg_.root / rel;
    if (!std::filesystem::exists(path)) {
      throw FetchError("tile file missing: " + path.string());
    }
    return decode_image(read_file(path));
  }

  const std::string url =
      substitute_url(cfg_.url_template, quadkey, cfg_.map_version);
  // split scheme://host and path
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw FetchError("malformed tile URL: " + url);
  }
  const auto path_start = url.find('/', scheme_end + 3);
  const std::string host = url.substr(0, path_start);
  const std::string path =
      path_start == std::string::npos ? "/" : url.substr(path_start);

  httplib::Client client(host);
  client.set_connection_timeout(10);
  client.set_read_timeout(30);
  auto res = client.Get(path);
  if (!res || res->status != 200) {
    throw FetchError("HTTP fetch failed for " + url +
                     (res ? " (status " + std::to_string(res->status) + ")"
                          : " (no response)"));
  }
  std::vector<std::uint8_t> bytes(res->body.begin(), res->body.end());
  return decode_image(bytes);
}

std::vector<geo::TileIndex> route_tiles(
    const std::vector<geo::GeoPoint>& route, int level) {
  std::vector<geo::TileIndex> out;
  std::set<std::pair<int, int>> seen;
  const auto push = [&](int tx, int ty) {
    if (seen.insert({tx, ty}).second) out.push_back({tx, ty, level});
  };

  // exact grid traversal per segment so corner slivers are not skipped
  const auto traverse = [&](const geo::TilePixel& a, const geo::TilePixel& b) {
    const double x0 = a.x / 256.0, y0 = a.y / 256.0;
    const double x1 = b.x / 256.0, y1 = b.y / 256.0;
    int cx = static_cast<int>(std::floor(x0));
    int cy = static_cast<int>(std::floor(y0));
    const int ex = static_cast<int>(std::floor(x1));
    const int ey = static_cast<int>(std::floor(y1));
    push(cx, cy);
    const double dx = x1 - x0, dy = y1 - y0;
    const int step_x = dx > 0 ? 1 : -1;
    const int step_y = dy > 0 ? 1 : -1;
    const double inf = std::numeric_limits<double>::infinity();
    double t_max_x = dx != 0 ? ((dx > 0 ? cx + 1 - x0 : x0 - cx) / std::abs(dx))
                             : inf;
    double t_max_y = dy != 0 ? ((dy > 0 ? cy + 1 - y0 : y0 - cy) / std::abs(dy))
                             : inf;
    const double t_delta_x = dx != 0 ? 1.0 / std::abs(dx) : inf;
    const double t_delta_y = dy != 0 ? 1.0 / std::abs(dy) : inf;
    int budget = std::abs(ex - cx) + std::abs(ey - cy);
    while ((cx != ex || cy != ey) && budget-- > 0) {
      if (t_max_x < t_max_y) {
        cx += step_x;
        t_max_x += t_delta_x;
      } else {
        cy += step_y;
        t_max_y += t_delta_y;
      }
      push(cx, cy);
    }
    push(ex, ey);
  };

  for (std::size_t i = 1; i < route.size(); ++i) {
    traverse(geo::latlon_to_pixel(route[i - 1], level),
             geo::latlon_to_pixel(route[i], level));
  }
  if (route.size() == 1) {
    const auto px = geo::latlon_to_pixel(route[0], level);
    push(static_cast<int>(std::floor(px.x / 256.0)),
         static_cast<int>(std::floor(px.y / 256.0)));
  }
  return out;
}

std::vector<std::pair<std::string, Raster>> mosaic_route(
    TileClient& client, const road::BoundaryLine& route, int level) {
  std::vector<std::pair<std::string, Raster>> out;
  for (const auto& t : route_tiles(route.points, level)) {
    const std::string key = geo::tile_quadkey(t.tx, t.ty, t.level);
    try {
      out.emplace_back(key, client.fetch(key));
    } catch (const FetchError& e) {
      throw FetchError("while fetching " + key + ": " + e.what());
    }
  }
  return out;
}

}  // namespace lanegeo::tiles
