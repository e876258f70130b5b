#include "geoptr/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "geoptr/error.hpp"

namespace geoptr {

namespace {

double dist(const Point& a, const Point& b) { return std::hypot(a.x - b.x, a.y - b.y); }

std::vector<std::size_t> lex_order(const PointSet& ps) {
  std::vector<std::size_t> order(ps.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return lex_less(ps[i], ps[j]); });
  return order;
}

void require_non_degenerate(const Point& a, const Point& b, const Point& c) {
  if (orient2d(a, b, c) == Orientation::Collinear) {
    throw Error(ErrorCode::DegenerateTriangle, "triangle vertices are collinear");
  }
}

// q strictly inside the open segment uv, assuming the three are collinear.
bool strictly_between(const Point& u, const Point& v, const Point& q) {
  const double dx = v.x - u.x;
  const double dy = v.y - u.y;
  const double t = (q.x - u.x) * dx + (q.y - u.y) * dy;
  return t > 0.0 && t < dx * dx + dy * dy;
}

}  // namespace

TriangleIdx TriangleIdx::canonical() const {
  std::size_t v[3] = {a, b, c};
  std::sort(v, v + 3);
  return {v[0], v[1], v[2]};
}

double cross(const Point& a, const Point& b, const Point& c) {
  return (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
}

Orientation orient2d(const Point& a, const Point& b, const Point& c) {
  const double v = cross(a, b, c);
  if (std::abs(v) <= kGeoEpsilon) return Orientation::Collinear;
  return v > 0.0 ? Orientation::CCW : Orientation::CW;
}

double incircle_det(const Point& a, const Point& b, const Point& c, const Point& q) {
  const double adx = a.x - q.x, ady = a.y - q.y;
  const double bdx = b.x - q.x, bdy = b.y - q.y;
  const double cdx = c.x - q.x, cdy = c.y - q.y;
  const double alift = adx * adx + ady * ady;
  const double blift = bdx * bdx + bdy * bdy;
  const double clift = cdx * cdx + cdy * cdy;
  return adx * (bdy * clift - blift * cdy) - ady * (bdx * clift - blift * cdx) +
         alift * (bdx * cdy - bdy * cdx);
}

Circle circumcircle(const Point& a, const Point& b, const Point& c) {
  require_non_degenerate(a, b, c);
  const double bx = b.x - a.x, by = b.y - a.y;
  const double cx = c.x - a.x, cy = c.y - a.y;
  const double d = 2.0 * (bx * cy - by * cx);
  const double b2 = bx * bx + by * by;
  const double c2 = cx * cx + cy * cy;
  const double ux = (cy * b2 - by * c2) / d;
  const double uy = (bx * c2 - cx * b2) / d;
  return {{a.x + ux, a.y + uy}, ux * ux + uy * uy};
}

Position in_circumcircle(const Point& a, const Point& b, const Point& c, const Point& q) {
  const Orientation o = orient2d(a, b, c);
  if (o == Orientation::Collinear) {
    throw Error(ErrorCode::DegenerateTriangle, "triangle vertices are collinear");
  }
  double det = incircle_det(a, b, c, q);
  if (o == Orientation::CW) det = -det;
  if (std::abs(det) <= kGeoEpsilon) return Position::OnBoundary;
  return det > 0.0 ? Position::Inside : Position::Outside;
}

Point incenter(const Point& a, const Point& b, const Point& c) {
  require_non_degenerate(a, b, c);
  const double la = dist(b, c);
  const double lb = dist(a, c);
  const double lc = dist(a, b);
  const double s = la + lb + lc;
  return {(la * a.x + lb * b.x + lc * c.x) / s, (la * a.y + lb * b.y + lc * c.y) / s};
}

bool has_empty_circumcircle(const PointSet& ps, const TriangleIdx& t) {
  const std::size_t m = ps.size();
  if (t.a >= m || t.b >= m || t.c >= m) return false;
  if (t.a == t.b || t.b == t.c || t.a == t.c) return false;
  const Point& a = ps[t.a];
  const Point& b = ps[t.b];
  const Point& c = ps[t.c];
  if (orient2d(a, b, c) == Orientation::Collinear) return false;
  for (std::size_t q = 0; q < m; ++q) {
    if (q == t.a || q == t.b || q == t.c) continue;
    if (in_circumcircle(a, b, c, ps[q]) == Position::Inside) return false;
  }
  return true;
}

void require_distinct(const PointSet& ps) {
  const auto order = lex_order(ps);
  for (std::size_t i = 1; i < order.size(); ++i) {
    if (ps[order[i]] == ps[order[i - 1]]) {
      throw Error(ErrorCode::DuplicatePoints, "points " + std::to_string(order[i - 1]) +
                                                  " and " + std::to_string(order[i]) +
                                                  " coincide");
    }
  }
}

// Bowyer-Watson with the super-triangle pushed to infinity: hull edges carry
// "ghost" triangles whose apex is the point at infinity. A ghost over the hull
// edge (u, v) has the outside on the left of u->v; its circumcircle degenerates
// to that open half-plane plus the open segment uv.
std::vector<TriangleIdx> delaunay_triangulate(const PointSet& ps) {
  const std::size_t m = ps.size();
  if (m < 3) throw Error(ErrorCode::TooFewPoints, "need at least 3 points");
  require_distinct(ps);
  const auto order = lex_order(ps);

  std::size_t third = 0;
  for (std::size_t k = 2; k < m; ++k) {
    if (orient2d(ps[order[0]], ps[order[1]], ps[order[k]]) != Orientation::Collinear) {
      third = k;
      break;
    }
  }
  if (third == 0) throw Error(ErrorCode::AllCollinear, "all points are collinear");

  constexpr std::size_t kGhost = std::numeric_limits<std::size_t>::max();
  struct Tri {
    std::size_t v[3];
    bool ghost() const { return v[2] == kGhost; }
  };
  std::vector<Tri> tris;

  {
    std::size_t a = order[0], b = order[1], c = order[third];
    if (orient2d(ps[a], ps[b], ps[c]) == Orientation::CW) std::swap(b, c);
    tris.push_back({{a, b, c}});
    tris.push_back({{b, a, kGhost}});
    tris.push_back({{c, b, kGhost}});
    tris.push_back({{a, c, kGhost}});
  }

  auto conflicts = [&](const Tri& t, const Point& q) {
    if (!t.ghost()) {
      return incircle_det(ps[t.v[0]], ps[t.v[1]], ps[t.v[2]], q) > kGeoEpsilon;
    }
    const Point& u = ps[t.v[0]];
    const Point& v = ps[t.v[1]];
    const double side = cross(u, v, q);
    if (side > kGeoEpsilon) return true;
    return std::abs(side) <= kGeoEpsilon && strictly_between(u, v, q);
  };

  std::vector<char> in_cavity;
  std::vector<std::pair<std::size_t, std::size_t>> boundary;
  for (std::size_t k = 2; k < m; ++k) {
    if (k == third) continue;
    const std::size_t qi = order[k];
    const Point& q = ps[qi];

    in_cavity.assign(tris.size(), 0);
    bool any = false;
    for (std::size_t t = 0; t < tris.size(); ++t) {
      if (conflicts(tris[t], q)) {
        in_cavity[t] = 1;
        any = true;
      }
    }
    if (!any) {
      throw Error(ErrorCode::InvariantViolation,
                  "point " + std::to_string(qi) + " conflicts with no triangle");
    }

    // Directed cavity edges whose reverse is not also a cavity edge.
    boundary.clear();
    for (std::size_t t = 0; t < tris.size(); ++t) {
      if (!in_cavity[t]) continue;
      for (int e = 0; e < 3; ++e) {
        const std::size_t x = tris[t].v[e];
        const std::size_t y = tris[t].v[(e + 1) % 3];
        bool shared = false;
        for (std::size_t s = 0; s < tris.size() && !shared; ++s) {
          if (s == t || !in_cavity[s]) continue;
          for (int f = 0; f < 3; ++f) {
            if (tris[s].v[f] == y && tris[s].v[(f + 1) % 3] == x) {
              shared = true;
              break;
            }
          }
        }
        if (!shared) boundary.emplace_back(x, y);
      }
    }

    std::vector<Tri> next;
    next.reserve(tris.size() + 2);
    for (std::size_t t = 0; t < tris.size(); ++t) {
      if (!in_cavity[t]) next.push_back(tris[t]);
    }
    for (const auto& [x, y] : boundary) {
      if (x == kGhost) {
        next.push_back({{y, qi, kGhost}});
      } else if (y == kGhost) {
        next.push_back({{qi, x, kGhost}});
      } else {
        next.push_back({{x, y, qi}});
      }
    }
    tris = std::move(next);
  }

  std::vector<TriangleIdx> out;
  for (const Tri& t : tris) {
    if (t.ghost()) continue;
    out.push_back(TriangleIdx{t.v[0], t.v[1], t.v[2]}.canonical());
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::size_t> convex_hull(const PointSet& ps) {
  const std::size_t m = ps.size();
  if (m < 3) throw Error(ErrorCode::TooFewPoints, "need at least 3 points");
  const auto order = lex_order(ps);

  // Andrew's monotone chain; collinear boundary points are popped.
  std::vector<std::size_t> hull(2 * m);
  std::size_t k = 0;
  for (std::size_t i = 0; i < m; ++i) {
    while (k >= 2 && cross(ps[hull[k - 2]], ps[hull[k - 1]], ps[order[i]]) <= kGeoEpsilon) --k;
    hull[k++] = order[i];
  }
  for (std::size_t i = m - 1, lower = k + 1; i-- > 0;) {
    while (k >= lower && cross(ps[hull[k - 2]], ps[hull[k - 1]], ps[order[i]]) <= kGeoEpsilon) {
      --k;
    }
    hull[k++] = order[i];
  }
  hull.resize(k - 1);
  if (hull.size() < 3) throw Error(ErrorCode::AllCollinear, "all points are collinear");
  return hull;
}

void validate_tour(const Tour& t, std::size_t m) {
  if (t.size() != m) {
    throw Error(ErrorCode::InvalidTour, "tour has " + std::to_string(t.size()) +
                                            " entries for " + std::to_string(m) + " cities");
  }
  std::vector<char> seen(m, 0);
  for (std::size_t v : t) {
    if (v >= m) throw Error(ErrorCode::InvalidTour, "city index out of range");
    if (seen[v]) throw Error(ErrorCode::InvalidTour, "city " + std::to_string(v) + " repeated");
    seen[v] = 1;
  }
}

double tour_length(const PointSet& ps, const Tour& t) {
  validate_tour(t, ps.size());
  if (t.empty()) return 0.0;
  double total = dist(ps[t.back()], ps[t.front()]);
  for (std::size_t i = 0; i + 1 < t.size(); ++i) total += dist(ps[t[i]], ps[t[i + 1]]);
  return total;
}

TourResult held_karp(const PointSet& ps, std::size_t hk_max) {
  const std::size_t m = ps.size();
  if (m < 2) throw Error(ErrorCode::TooFewPoints, "need at least 2 cities");
  if (m > hk_max) {
    throw Error(ErrorCode::TooManyPoints,
                std::to_string(m) + " cities exceeds hk_max " + std::to_string(hk_max));
  }
  std::vector<double> d(m * m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) d[i * m + j] = dist(ps[i], ps[j]);

  // Paths start at city 0; subsets range over cities 1..m-1 (bit j-1).
  const std::size_t n = m - 1;
  const std::size_t full = (std::size_t{1} << n) - 1;
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> cost((full + 1) * n, kInf);
  std::vector<std::uint8_t> parent((full + 1) * n, 0);
  for (std::size_t j = 0; j < n; ++j) cost[(std::size_t{1} << j) * n + j] = d[j + 1];

  for (std::size_t set = 1; set <= full; ++set) {
    for (std::size_t j = 0; j < n; ++j) {
      if (!(set & (std::size_t{1} << j))) continue;
      const double here = cost[set * n + j];
      if (here == kInf) continue;
      for (std::size_t k = 0; k < n; ++k) {
        if (set & (std::size_t{1} << k)) continue;
        const std::size_t grown = set | (std::size_t{1} << k);
        const double cand = here + d[(j + 1) * m + (k + 1)];
        if (cand < cost[grown * n + k]) {
          cost[grown * n + k] = cand;
          parent[grown * n + k] = static_cast<std::uint8_t>(j);
        }
      }
    }
  }

  std::size_t last = 0;
  double best = kInf;
  for (std::size_t j = 0; j < n; ++j) {
    const double cand = cost[full * n + j] + d[(j + 1) * m];
    if (cand < best) {
      best = cand;
      last = j;
    }
  }

  Tour tour(m);
  std::size_t set = full;
  for (std::size_t pos = m - 1; pos >= 1; --pos) {
    tour[pos] = last + 1;
    const std::size_t prev = parent[set * n + last];
    set &= ~(std::size_t{1} << last);
    last = prev;
  }
  tour[0] = 0;
  const double length = tour_length(ps, tour);
  return {std::move(tour), length};
}

Tour nearest_neighbor_tour(const PointSet& ps) {
  const std::size_t m = ps.size();
  Tour tour;
  if (m == 0) return tour;
  std::vector<char> used(m, 0);
  tour.push_back(0);
  used[0] = 1;
  while (tour.size() < m) {
    const Point& from = ps[tour.back()];
    std::size_t best = m;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < m; ++j) {
      if (used[j]) continue;
      const double dj = dist(from, ps[j]);
      if (dj < best_d) {
        best_d = dj;
        best = j;
      }
    }
    used[best] = 1;
    tour.push_back(best);
  }
  return tour;
}

Tour two_opt(const PointSet& ps, Tour t) {
  validate_tour(t, ps.size());
  const std::size_t n = t.size();
  if (n < 4) return t;
  bool improved = true;
  while (improved) {
    improved = false;
    for (std::size_t i = 0; i + 2 < n; ++i) {
      for (std::size_t j = i + 2; j < n; ++j) {
        if (i == 0 && j == n - 1) continue;
        const Point& a = ps[t[i]];
        const Point& b = ps[t[i + 1]];
        const Point& c = ps[t[j]];
        const Point& e = ps[t[(j + 1) % n]];
        const double delta = dist(a, c) + dist(b, e) - dist(a, b) - dist(c, e);
        if (delta < -kGeoEpsilon) {
          std::reverse(t.begin() + static_cast<std::ptrdiff_t>(i + 1),
                       t.begin() + static_cast<std::ptrdiff_t>(j + 1));
          improved = true;
        }
      }
    }
  }
  return t;
}

double signed_area(const PointSet& ps, std::span<const std::size_t> boundary) {
  double twice = 0.0;
  const std::size_t n = boundary.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point& p = ps.at(boundary[i]);
    const Point& q = ps.at(boundary[(i + 1) % n]);
    twice += p.x * q.y - q.x * p.y;
  }
  return 0.5 * twice;
}

double polygon_area(const PointSet& ps, std::span<const std::size_t> boundary) {
  return std::abs(signed_area(ps, boundary));
}

bool is_self_intersecting(const PointSet& ps, std::span<const std::size_t> boundary) {
  const std::size_t n = boundary.size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (boundary[i] == boundary[j]) return true;
  if (n < 4) return false;

  auto segments_cross = [&](const Point& p1, const Point& p2, const Point& q1, const Point& q2) {
    const double d1 = cross(q1, q2, p1);
    const double d2 = cross(q1, q2, p2);
    const double d3 = cross(p1, p2, q1);
    const double d4 = cross(p1, p2, q2);
    if (((d1 > kGeoEpsilon && d2 < -kGeoEpsilon) || (d1 < -kGeoEpsilon && d2 > kGeoEpsilon)) &&
        ((d3 > kGeoEpsilon && d4 < -kGeoEpsilon) || (d3 < -kGeoEpsilon && d4 > kGeoEpsilon))) {
      return true;
    }
    auto touches = [](double d, const Point& a, const Point& b, const Point& p) {
      return std::abs(d) <= kGeoEpsilon && std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) &&
             std::min(a.y, b.y) <= p.y && p.y <= std::max(a.y, b.y);
    };
    return touches(d1, q1, q2, p1) || touches(d2, q1, q2, p2) || touches(d3, p1, p2, q1) ||
           touches(d4, p1, p2, q2);
  };

  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 2; j < n; ++j) {
      if (i == 0 && j == n - 1) continue;
      if (segments_cross(ps[boundary[i]], ps[boundary[i + 1]], ps[boundary[j]],
                         ps[boundary[(j + 1) % n]])) {
        return true;
      }
    }
  }
  return false;
}

}  // namespace geoptr
