#pragma once

#include <cstddef>
#include <vector>

namespace lanegeo {

/// Planar vector/point, x east, y north (meters in a local tangent frame).
struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
};

double dot(const Vec2& a, const Vec2& b);
double cross(const Vec2& a, const Vec2& b);
double norm(const Vec2& a);
Vec2 normalized(const Vec2& a);
/// 90-degree clockwise rotation: the right-hand normal of a travel direction.
Vec2 right_normal(const Vec2& dir);
double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b);

/// Where a point falls relative to a polyline.
struct PolylineProjection {
  double s = 0.0;       // arc length of the foot point
  double offset = 0.0;  // signed lateral offset, right of travel positive
};

/// Polyline with cached cumulative arc length.
class Polyline2 {
 public:
  Polyline2() = default;
  explicit Polyline2(std::vector<Vec2> points);

  const std::vector<Vec2>& points() const { return points_; }
  std::size_t size() const { return points_.size(); }
  double length() const;

  Vec2 point_at(double s) const;
  Vec2 direction_at(double s) const;
  PolylineProjection project(const Vec2& p) const;

 private:
  std::vector<Vec2> points_;
  std::vector<double> cum_;  // cum_[i] = arc length up to points_[i]
};

}  // namespace lanegeo
