// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <compare>
#include <optional>
#include <span>
#include <utility>
#include <variant>
#include <vector>

namespace risplace {

struct Point2 {
  double x{};
  double y{};

  Point2 operator+(Point2 o) const { return {x + o.x, y + o.y}; }
  Point2 operator-(Point2 o) const { return {x - o.x, y - o.y}; }
  Point2 operator*(double s) const { return {x * s, y * s}; }
  friend auto operator<=>(const Point2&, const Point2&) = default;
};

inline double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point2 a, Point2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point2 v) { return std::hypot(v.x, v.y); }
inline double distance(Point2 a, Point2 b) { return norm(b - a); }

struct Circle {
  Point2 center;
  double radius{};
  bool operator==(const Circle&) const = default;
};

/// Zero-thickness wall segment. Orientation is kept in [0, pi).
struct Wall {
  Point2 center;
  double length{};
  double orientation{};
  bool operator==(const Wall&) const = default;
};

using Obstacle = std::variant<Circle, Wall>;

/// Points within this distance of a wall segment count as lying on it.
inline constexpr double kWallTolerance = 1e-6;
/// Relative tolerance of the orientation predicate.
inline constexpr double kOrientationEps = 1e-12;

Circle make_circle(Point2 center, double radius);
Wall make_wall(Point2 center, double length, double orientation);
double normalize_orientation(double radians);

struct Cell {
  Point2 center;
  double radius{};

  bool contains(Point2 p) const;
  bool operator==(const Cell&) const = default;
};

struct CoveragePoint {
  Point2 point;
  bool covered{};
};

struct CoverageMap {
  double resolution{};
  std::vector<CoveragePoint> points;
  double fraction{};
};

std::pair<Point2, Point2> wall_endpoints(const Wall& w);

double distance_to_segment(Point2 p, Point2 a, Point2 b);

/// Closed-segment intersection, collinear overlap and endpoint contact included.
bool segments_intersect(Point2 p1, Point2 p2, Point2 q1, Point2 q2);

/// True when the link a-b touches any obstacle. Tangent contact with a
/// circle counts as blocked.
bool segment_blocked(Point2 a, Point2 b, std::span<const Obstacle> obstacles);

bool point_in_obstacle(Point2 p, std::span<const Obstacle> obstacles);

/// Far-field boundary 2 D^2 / lambda of a uniform linear array with
/// aperture D = (antennas - 1) * spacing.
double fraunhofer_distance(int antennas, double wavelength, double spacing);

/// Lattice points of the cell (cell center on the lattice) that are not
/// inside any obstacle, each flagged by direct or RIS-relayed visibility.
CoverageMap coverage(const Cell& cell, Point2 bs, std::span<const Obstacle> obstacles,
                     std::optional<Point2> ris, double resolution);

/// Lattice points of `cell` at `resolution`, in row-major (y, then x) order.
std::vector<Point2> cell_lattice(const Cell& cell, double resolution);

}  // namespace risplace
