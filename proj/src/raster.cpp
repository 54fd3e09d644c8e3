#include "lanegeo/raster.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace lanegeo {

Raster Raster::filled(int w, int h, int ch, std::uint8_t value) {
  Raster r;
  r.width = w;
  r.height = h;
  r.channels = ch;
  r.pixels.assign(static_cast<std::size_t>(w) * h * ch, value);
  return r;
}

double Raster::sample(double x, double y) const {
  // shift so integer coordinates address pixel centers
  const double fx = x - 0.5;
  const double fy = y - 0.5;
  const int x0 = static_cast<int>(std::floor(fx));
  const int y0 = static_cast<int>(std::floor(fy));
  const double ax = fx - x0;
  const double ay = fy - y0;
  auto px = [&](int xi, int yi) -> double {
    if (!inside(xi, yi)) return 0.0;
    return at(xi, yi);
  };
  return px(x0, y0) * (1 - ax) * (1 - ay) + px(x0 + 1, y0) * ax * (1 - ay) +
         px(x0, y0 + 1) * (1 - ax) * ay + px(x0 + 1, y0 + 1) * ax * ay;
}

Vec2 Raster::origin_px() const {
  if (!georef) return {0.0, 0.0};
  return {georef->tx * 256.0, georef->ty * 256.0};
}

Raster to_grayscale(const Raster& r) {
  if (r.channels == 1) return r;
  if (r.channels != 3) throw std::invalid_argument("expected 1 or 3 channels");
  Raster g;
  g.width = r.width;
  g.height = r.height;
  g.channels = 1;
  g.georef = r.georef;
  g.pixels.resize(static_cast<std::size_t>(r.width) * r.height);
  for (std::size_t i = 0; i < g.pixels.size(); ++i) {
    const double y = 0.299 * r.pixels[i * 3] + 0.587 * r.pixels[i * 3 + 1] +
                     0.114 * r.pixels[i * 3 + 2];
    g.pixels[i] = static_cast<std::uint8_t>(std::lround(y));
  }
  return g;
}

std::size_t count_nonzero(const Raster& r) {
  std::size_t n = 0;
  for (auto v : r.pixels) n += v != 0;
  return n;
}

void fill_polygon(Raster& r, const std::vector<Vec2>& polygon,
                  std::uint8_t value) {
  if (polygon.size() < 3) return;
  std::vector<double> xs;
  for (int y = 0; y < r.height; ++y) {
    const double cy = y + 0.5;
    xs.clear();
    const std::size_t n = polygon.size();
    for (std::size_t i = 0; i < n; ++i) {
      const Vec2& a = polygon[i];
      const Vec2& b = polygon[(i + 1) % n];
      if ((a.y <= cy && b.y > cy) || (b.y <= cy && a.y > cy)) {
        xs.push_back(a.x + (cy - a.y) / (b.y - a.y) * (b.x - a.x));
      }
    }
    std::sort(xs.begin(), xs.end());
    for (std::size_t i = 0; i + 1 < xs.size(); i += 2) {
      const int x0 = std::max(0, static_cast<int>(std::ceil(xs[i] - 0.5)));
      const int x1 =
          std::min(r.width - 1, static_cast<int>(std::floor(xs[i + 1] - 0.5)));
      for (int x = x0; x <= x1; ++x) {
        for (int c = 0; c < r.channels; ++c) r.set(x, y, value, c);
      }
    }
  }
}

namespace {

template <typename Plot>
void walk_segment(const Vec2& a, const Vec2& b, Plot&& plot) {
  const double len = norm(b - a);
  const int steps = std::max(1, static_cast<int>(std::ceil(len * 2.0)));
  for (int i = 0; i <= steps; ++i) {
    const double t = static_cast<double>(i) / steps;
    plot(a + (b - a) * t);
  }
}

}  // namespace

void draw_polyline(Raster& r, const std::vector<Vec2>& pts,
                   std::uint8_t value) {
  for (std::size_t i = 1; i < pts.size(); ++i) {
    walk_segment(pts[i - 1], pts[i], [&](const Vec2& p) {
      const int x = static_cast<int>(std::floor(p.x));
      const int y = static_cast<int>(std::floor(p.y));
      if (r.inside(x, y)) {
        for (int c = 0; c < r.channels; ++c) r.set(x, y, value, c);
      }
    });
  }
}

void draw_polyline_rgb(Raster& r, const std::vector<Vec2>& pts, std::uint8_t cr,
                       std::uint8_t cg, std::uint8_t cb, int half_width) {
  if (r.channels != 3) throw std::invalid_argument("RGB raster required");
  for (std::size_t i = 1; i < pts.size(); ++i) {
    walk_segment(pts[i - 1], pts[i], [&](const Vec2& p) {
      const int x = static_cast<int>(std::floor(p.x));
      const int y = static_cast<int>(std::floor(p.y));
      for (int dy = -half_width; dy <= half_width; ++dy) {
        for (int dx = -half_width; dx <= half_width; ++dx) {
          if (r.inside(x + dx, y + dy)) {
            r.set(x + dx, y + dy, cr, 0);
            r.set(x + dx, y + dy, cg, 1);
            r.set(x + dx, y + dy, cb, 2);
          }
        }
      }
    });
  }
}

void stamp_band(Raster& r, const Vec2& a, const Vec2& b, double width_px,
                std::uint8_t paint) {
  const double half = width_px / 2.0;
  const double pad = half + 1.5;
  const int x0 = std::max(0, static_cast<int>(std::floor(std::min(a.x, b.x) - pad)));
  const int x1 = std::min(r.width - 1,
                          static_cast<int>(std::ceil(std::max(a.x, b.x) + pad)));
  const int y0 = std::max(0, static_cast<int>(std::floor(std::min(a.y, b.y) - pad)));
  const int y1 = std::min(r.height - 1,
                          static_cast<int>(std::ceil(std::max(a.y, b.y) + pad)));
  for (int y = y0; y <= y1; ++y) {
    for (int x = x0; x <= x1; ++x) {
      const Vec2 c{x + 0.5, y + 0.5};
      const double d = point_segment_distance(c, a, b);
      const double coverage = std::clamp(half + 0.5 - d, 0.0, 1.0);
      if (coverage <= 0.0) continue;
      for (int ch = 0; ch < r.channels; ++ch) {
        const double base = r.at(x, y, ch);
        const double v = base + (static_cast<double>(paint) - base) * coverage;
        r.set(x, y, static_cast<std::uint8_t>(std::lround(v)), ch);
      }
    }
  }
}

void gaussian_blur(Raster& r, double sigma) {
  if (sigma <= 0.0) return;
  const int radius = std::max(1, static_cast<int>(std::ceil(sigma * 3.0)));
  std::vector<double> kernel(static_cast<std::size_t>(radius) * 2 + 1);
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    const double v = std::exp(-0.5 * (i / sigma) * (i / sigma));
    kernel[static_cast<std::size_t>(i + radius)] = v;
    sum += v;
  }
  for (auto& k : kernel) k /= sum;

  const int w = r.width, h = r.height, ch = r.channels;
  std::vector<double> tmp(r.pixels.size());
  // horizontal pass, clamped borders
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      for (int c = 0; c < ch; ++c) {
        double acc = 0.0;
        for (int k = -radius; k <= radius; ++k) {
          const int xi = std::clamp(x + k, 0, w - 1);
          acc += kernel[static_cast<std::size_t>(k + radius)] * r.at(xi, y, c);
        }
        tmp[(static_cast<std::size_t>(y) * w + x) * ch + c] = acc;
      }
    }
  }
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      for (int c = 0; c < ch; ++c) {
        double acc = 0.0;
        for (int k = -radius; k <= radius; ++k) {
          const int yi = std::clamp(y + k, 0, h - 1);
          acc += kernel[static_cast<std::size_t>(k + radius)] *
                 tmp[(static_cast<std::size_t>(yi) * w + x) * ch + c];
        }
        r.set(x, y, static_cast<std::uint8_t>(std::lround(acc)), c);
      }
    }
  }
}

Raster dilate(const Raster& mask, int radius) {
  Raster out = mask;
  for (int y = 0; y < mask.height; ++y) {
    for (int x = 0; x < mask.width; ++x) {
      if (mask.at(x, y) == 0) continue;
      for (int dy = -radius; dy <= radius; ++dy) {
        for (int dx = -radius; dx <= radius; ++dx) {
          if (out.inside(x + dx, y + dy)) out.set(x + dx, y + dy, 255);
        }
      }
    }
  }
  return out;
}

}  // namespace lanegeo
