#include "lanegeo/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace lanegeo {

double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }

double cross(const Vec2& a, const Vec2& b) { return a.x * b.y - a.y * b.x; }

double norm(const Vec2& a) { return std::hypot(a.x, a.y); }

Vec2 normalized(const Vec2& a) {
  const double n = norm(a);
  if (n <= 0.0) return {0.0, 0.0};
  return {a.x / n, a.y / n};
}

Vec2 right_normal(const Vec2& dir) { return {dir.y, -dir.x}; }

double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
  const Vec2 ab = b - a;
  const double len2 = dot(ab, ab);
  if (len2 <= 0.0) return norm(p - a);
  const double t = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
  return norm(p - (a + ab * t));
}

Polyline2::Polyline2(std::vector<Vec2> points) : points_(std::move(points)) {
  if (points_.size() < 2) {
    throw std::invalid_argument("polyline needs at least 2 points");
  }
  cum_.resize(points_.size());
  cum_[0] = 0.0;
  for (std::size_t i = 1; i < points_.size(); ++i) {
    cum_[i] = cum_[i - 1] + norm(points_[i] - points_[i - 1]);
  }
}

double Polyline2::length() const { return cum_.empty() ? 0.0 : cum_.back(); }

Vec2 Polyline2::point_at(double s) const {
  if (points_.empty()) return {};
  if (s <= 0.0) return points_.front();
  if (s >= length()) return points_.back();
  const auto it = std::upper_bound(cum_.begin(), cum_.end(), s);
  const std::size_t i = static_cast<std::size_t>(it - cum_.begin());
  const double seg = cum_[i] - cum_[i - 1];
  const double t = seg > 0.0 ? (s - cum_[i - 1]) / seg : 0.0;
  return points_[i - 1] + (points_[i] - points_[i - 1]) * t;
}

Vec2 Polyline2::direction_at(double s) const {
  if (points_.size() < 2) return {0.0, 1.0};
  const double clamped = std::clamp(s, 0.0, length());
  std::size_t i =
      static_cast<std::size_t>(std::upper_bound(cum_.begin(), cum_.end(),
                                                std::nextafter(clamped, -1.0)) -
                               cum_.begin());
  i = std::clamp<std::size_t>(i, 1, points_.size() - 1);
  return normalized(points_[i] - points_[i - 1]);
}

PolylineProjection Polyline2::project(const Vec2& p) const {
  PolylineProjection best;
  double best_dist = std::numeric_limits<double>::max();
  for (std::size_t i = 1; i < points_.size(); ++i) {
    const Vec2 a = points_[i - 1];
    const Vec2 b = points_[i];
    const Vec2 ab = b - a;
    const double len2 = dot(ab, ab);
    if (len2 <= 0.0) continue;
    const double t = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
    const Vec2 foot = a + ab * t;
    const double d = norm(p - foot);
    if (d < best_dist) {
      best_dist = d;
      best.s = cum_[i - 1] + t * std::sqrt(len2);
      // right of travel positive, left negative
      best.offset = dot(p - foot, right_normal(normalized(ab)));
    }
  }
  return best;
}

}  // namespace lanegeo
