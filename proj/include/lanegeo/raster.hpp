#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "lanegeo/geo.hpp"
#include "lanegeo/geometry.hpp"

namespace lanegeo {

/// Row-major 8-bit raster, 1 (gray) or 3 (RGB) channels, optionally
/// georeferenced to a tile footprint.
struct Raster {
  int width = 0;
  int height = 0;
  int channels = 1;
  std::vector<std::uint8_t> pixels;
  std::optional<geo::TileIndex> georef;

  static Raster filled(int w, int h, int ch, std::uint8_t value);

  std::uint8_t at(int x, int y, int c = 0) const {
    return pixels[(static_cast<std::size_t>(y) * width + x) * channels + c];
  }
  void set(int x, int y, std::uint8_t v, int c = 0) {
    pixels[(static_cast<std::size_t>(y) * width + x) * channels + c] = v;
  }
  bool inside(int x, int y) const {
    return x >= 0 && y >= 0 && x < width && y < height;
  }
  /// Bilinear sample of channel 0; coordinates in pixel units where the
  /// center of pixel (i, j) is (i + 0.5, j + 0.5). Out of bounds reads 0.
  double sample(double x, double y) const;

  /// Top-left corner of the georeferenced footprint in global pixels.
  Vec2 origin_px() const;
};

/// ITU-R BT.601 luma; identity on single-channel input.
Raster to_grayscale(const Raster& r);

std::size_t count_nonzero(const Raster& r);

/// Scanline fill of a closed polygon (pixel-center rule).
void fill_polygon(Raster& r, const std::vector<Vec2>& polygon,
                  std::uint8_t value);

/// 1-px wide polyline stamp (no anti-aliasing).
void draw_polyline(Raster& r, const std::vector<Vec2>& pts, std::uint8_t value);

/// RGB polyline for overlay rendering.
void draw_polyline_rgb(Raster& r, const std::vector<Vec2>& pts, std::uint8_t cr,
                       std::uint8_t cg, std::uint8_t cb, int half_width = 0);

/// Coverage-blended band of the given width (px) along a segment; pixels get
/// value = base + (paint - base) * coverage.
void stamp_band(Raster& r, const Vec2& a, const Vec2& b, double width_px,
                std::uint8_t paint);

void gaussian_blur(Raster& r, double sigma);

Raster dilate(const Raster& mask, int radius);

}  // namespace lanegeo
