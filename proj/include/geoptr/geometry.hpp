#pragma once

// Planar predicates and the exact solvers used to label and verify instances.
// Everything here is pure; indices always refer to positions in the PointSet
// that was passed in.

#include <compare>
#include <cstddef>
#include <span>
#include <vector>

namespace geoptr {

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

using PointSet = std::vector<Point>;
using Tour = std::vector<std::size_t>;

// Lexicographic order: x first, then y.
inline bool lex_less(const Point& a, const Point& b) {
  return a.x < b.x || (a.x == b.x && a.y < b.y);
}

struct TriangleIdx {
  std::size_t a = 0;
  std::size_t b = 0;
  std::size_t c = 0;

  // Same triangle with a < b < c.
  TriangleIdx canonical() const;

  auto operator<=>(const TriangleIdx&) const = default;
};

struct Circle {
  Point center;
  double radius_sq = 0.0;
};

enum class Orientation { CCW, CW, Collinear };
enum class Position { Inside, OnBoundary, Outside };

// Absolute tolerance on determinant signs.
inline constexpr double kGeoEpsilon = 1e-12;
inline constexpr std::size_t kDefaultHeldKarpMax = 13;

// (b - a) x (c - a).
double cross(const Point& a, const Point& b, const Point& c);
Orientation orient2d(const Point& a, const Point& b, const Point& c);

// Incircle determinant, positive when q lies inside the circle through a, b, c
// and a, b, c are counter-clockwise.
double incircle_det(const Point& a, const Point& b, const Point& c, const Point& q);

Circle circumcircle(const Point& a, const Point& b, const Point& c);
Position in_circumcircle(const Point& a, const Point& b, const Point& c, const Point& q);
Point incenter(const Point& a, const Point& b, const Point& c);

// True when no point of ps lies strictly inside the circumcircle of t.
// Degenerate (collinear or repeated-index) triangles are never empty.
bool has_empty_circumcircle(const PointSet& ps, const TriangleIdx& t);

// Bowyer-Watson insertion in lexicographic order. Triangles come back
// canonical and sorted.
std::vector<TriangleIdx> delaunay_triangulate(const PointSet& ps);

// Strict hull (collinear boundary points dropped), counter-clockwise, starting
// at the lexicographically smallest point.
std::vector<std::size_t> convex_hull(const PointSet& ps);

struct TourResult {
  Tour tour;
  double length = 0.0;
};

TourResult held_karp(const PointSet& ps, std::size_t hk_max = kDefaultHeldKarpMax);
Tour nearest_neighbor_tour(const PointSet& ps);
Tour two_opt(const PointSet& ps, Tour start);

// Throws InvalidTour unless t is a permutation of 0..m-1.
void validate_tour(const Tour& t, std::size_t m);
double tour_length(const PointSet& ps, const Tour& t);

double signed_area(const PointSet& ps, std::span<const std::size_t> boundary);
double polygon_area(const PointSet& ps, std::span<const std::size_t> boundary);

// Whether two non-adjacent edges of the closed polygon cross.
bool is_self_intersecting(const PointSet& ps, std::span<const std::size_t> boundary);

// Throws DuplicatePoints if two points coincide.
void require_distinct(const PointSet& ps);

}  // namespace geoptr
