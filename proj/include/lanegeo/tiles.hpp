#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "lanegeo/geo.hpp"
#include "lanegeo/raster.hpp"
#include "lanegeo/roadmodel.hpp"

namespace lanegeo::tiles {

struct FetchError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class SourceMode { http, directory };

struct TileSourceConfig {
  SourceMode mode = SourceMode::directory;
  /// HTTP template with [quadkey] and [map version] placeholders.
  std::string url_template;
  /// Root of a local tile directory (mirrors the cache layout).
  std::filesystem::path root;
  std::filesystem::path cache_dir;
  std::int64_t map_version = 0;
};

std::string substitute_url(const std::string& url_template,
                           const std::string& quadkey,
                           std::int64_t map_version);

/// Fetches 256x256 tiles by quadkey with a persistent PNG disk cache keyed by
/// (map version, quadkey). Safe for concurrent fetches of distinct quadkeys;
/// concurrent fetches of the same quadkey may duplicate work but never
/// corrupt the cache (temp file + atomic rename).
class TileClient {
 public:
  explicit TileClient(TileSourceConfig cfg) : cfg_(std::move(cfg)) {}

  Raster fetch(const std::string& quadkey);

  /// Number of times the underlying source (network or directory) was hit;
  /// cache hits do not count.
  std::uint64_t source_accesses() const { return source_accesses_.load(); }

  const TileSourceConfig& config() const { return cfg_; }

 private:
  Raster fetch_from_source(const std::string& quadkey);

  TileSourceConfig cfg_;
  std::atomic<std::uint64_t> source_accesses_{0};
};

/// Tiles whose footprint the route polyline intersects, in first-touch order
/// along the route, without duplicates.
std::vector<geo::TileIndex> route_tiles(
    const std::vector<geo::GeoPoint>& route, int level);

std::vector<std::pair<std::string, Raster>> mosaic_route(
    TileClient& client, const road::BoundaryLine& route, int level);

}  // namespace lanegeo::tiles
