// SPDX-License-Identifier: Apache-2.0
#include "risplace/geom.hpp"

#include <algorithm>
#include <numbers>
#include <string>

#include "risplace/error.hpp"

namespace risplace {

namespace {

int orientation_sign(Point2 a, Point2 b, Point2 c) {
  const Point2 ab = b - a;
  const Point2 ac = c - a;
  const double o = cross(ab, ac);
  const double scale = norm(ab) * norm(ac);
  if (std::abs(o) <= kOrientationEps * scale) return 0;
  return o > 0 ? 1 : -1;
}

// c is known collinear with a-b.
bool within_box(Point2 a, Point2 b, Point2 c) {
  const double tol = kOrientationEps * (1.0 + std::max(std::abs(a.x), std::abs(b.x)));
  const double toly = kOrientationEps * (1.0 + std::max(std::abs(a.y), std::abs(b.y)));
  return c.x >= std::min(a.x, b.x) - tol && c.x <= std::max(a.x, b.x) + tol &&
         c.y >= std::min(a.y, b.y) - toly && c.y <= std::max(a.y, b.y) + toly;
}

bool segment_hits_circle(Point2 a, Point2 b, const Circle& c) {
  return distance_to_segment(c.center, a, b) <= c.radius;
}

}  // namespace

double normalize_orientation(double radians) {
  double t = std::fmod(radians, std::numbers::pi);
  if (t < 0) t += std::numbers::pi;
  if (t >= std::numbers::pi) t = 0.0;
  return t;
}

Circle make_circle(Point2 center, double radius) {
  if (!(radius > 0) || !std::isfinite(radius))
    throw Error(ErrorCode::ValidationError, "circle radius must be positive", "radius");
  return {center, radius};
}

Wall make_wall(Point2 center, double length, double orientation) {
  if (!(length > 0) || !std::isfinite(length))
    throw Error(ErrorCode::ValidationError, "wall length must be positive", "length");
  if (!std::isfinite(orientation))
    throw Error(ErrorCode::ValidationError, "wall orientation must be finite", "orientation");
  return {center, length, normalize_orientation(orientation)};
}

bool Cell::contains(Point2 p) const {
  return distance(p, center) <= radius * (1.0 + 1e-12);
}

std::pair<Point2, Point2> wall_endpoints(const Wall& w) {
  const Point2 half{0.5 * w.length * std::cos(w.orientation),
                    0.5 * w.length * std::sin(w.orientation)};
  return {w.center - half, w.center + half};
}

double distance_to_segment(Point2 p, Point2 a, Point2 b) {
  const Point2 ab = b - a;
  const double len2 = dot(ab, ab);
  if (len2 == 0.0) return distance(p, a);
  const double t = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
  return distance(p, a + ab * t);
}

bool segments_intersect(Point2 p1, Point2 p2, Point2 q1, Point2 q2) {
  const int d1 = orientation_sign(q1, q2, p1);
  const int d2 = orientation_sign(q1, q2, p2);
  const int d3 = orientation_sign(p1, p2, q1);
  const int d4 = orientation_sign(p1, p2, q2);
  if (d1 * d2 < 0 && d3 * d4 < 0) return true;
  if (d1 == 0 && within_box(q1, q2, p1)) return true;
  if (d2 == 0 && within_box(q1, q2, p2)) return true;
  if (d3 == 0 && within_box(p1, p2, q1)) return true;
  if (d4 == 0 && within_box(p1, p2, q2)) return true;
  return false;
}

bool segment_blocked(Point2 a, Point2 b, std::span<const Obstacle> obstacles) {
  for (const auto& ob : obstacles) {
    const bool hit = std::visit(
        [&](const auto& o) {
          using T = std::decay_t<decltype(o)>;
          if constexpr (std::is_same_v<T, Circle>) {
            return segment_hits_circle(a, b, o);
          } else {
            const auto [w1, w2] = wall_endpoints(o);
            return segments_intersect(a, b, w1, w2);
          }
        },
        ob);
    if (hit) return true;
  }
  return false;
}

bool point_in_obstacle(Point2 p, std::span<const Obstacle> obstacles) {
  for (const auto& ob : obstacles) {
    if (const auto* c = std::get_if<Circle>(&ob)) {
      if (distance(p, c->center) <= c->radius) return true;
    } else {
      const auto [w1, w2] = wall_endpoints(std::get<Wall>(ob));
      if (distance_to_segment(p, w1, w2) <= kWallTolerance) return true;
    }
  }
  return false;
}

double fraunhofer_distance(int antennas, double wavelength, double spacing) {
  if (antennas < 1 || !(wavelength > 0))
    throw Error(ErrorCode::ValidationError, "fraunhofer_distance needs antennas >= 1 and wavelength > 0");
  const double aperture = (antennas - 1) * spacing;
  return 2.0 * aperture * aperture / wavelength;
}

std::vector<Point2> cell_lattice(const Cell& cell, double resolution) {
  if (!(resolution > 0))
    throw Error(ErrorCode::ValidationError, "grid resolution must be positive", "resolution");
  if (resolution > 2.0 * cell.radius)
    throw Error(ErrorCode::EmptyGrid, "grid resolution exceeds the cell diameter");
  const long n = static_cast<long>(std::floor(cell.radius / resolution + 1e-9));
  std::vector<Point2> out;
  out.reserve(static_cast<size_t>(4 * n * n));
  for (long j = -n; j <= n; ++j) {
    for (long i = -n; i <= n; ++i) {
      const Point2 p{cell.center.x + static_cast<double>(i) * resolution,
                     cell.center.y + static_cast<double>(j) * resolution};
      if (cell.contains(p)) out.push_back(p);
    }
  }
  return out;
}

CoverageMap coverage(const Cell& cell, Point2 bs, std::span<const Obstacle> obstacles,
                     std::optional<Point2> ris, double resolution) {
  CoverageMap map;
  map.resolution = resolution;
  const bool ris_fed = ris && *ris != bs && !segment_blocked(bs, *ris, obstacles);
  std::size_t covered = 0;
  for (const Point2& p : cell_lattice(cell, resolution)) {
    if (point_in_obstacle(p, obstacles)) continue;
    bool ok = p == bs || !segment_blocked(bs, p, obstacles);
    if (!ok && ris_fed) ok = p == *ris || !segment_blocked(*ris, p, obstacles);
    map.points.push_back({p, ok});
    covered += ok ? 1 : 0;
  }
  if (map.points.empty())
    throw Error(ErrorCode::EmptyGrid, "no grid point lies outside the obstacles");
  map.fraction = static_cast<double>(covered) / static_cast<double>(map.points.size());
  return map;
}

}  // namespace risplace
