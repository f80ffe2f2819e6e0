/*
   Copyright 2026 The fdisac Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#pragma once

// Planar primitives for the simulator: convex polygons, half-plane clipping,
// Voronoi cells and area-uniform sampling.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

#include "fdisac/rng.hpp"

namespace fdisac::geometry {

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
  friend Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
  friend Point operator*(double k, Point a) { return {k * a.x, k * a.y}; }
};

inline double dot(Point a, Point b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point a, Point b) { return a.x * b.y - a.y * b.x; }
inline double norm2(Point a) { return dot(a, a); }
inline double norm(Point a) { return std::hypot(a.x, a.y); }

/// Counter-clockwise convex polygon.
using Polygon = std::vector<Point>;

inline Polygon square(Point center, double half_side) {
  return {{center.x - half_side, center.y - half_side},
          {center.x + half_side, center.y - half_side},
          {center.x + half_side, center.y + half_side},
          {center.x - half_side, center.y + half_side}};
}

/// Regular n-gon circumscribing the circle of the given radius.
inline Polygon circumscribed_ngon(Point center, double radius, int sides) {
  Polygon out;
  out.reserve(sides);
  const double vertex_radius = radius / std::cos(std::numbers::pi / sides);
  for (int k = 0; k < sides; ++k) {
    const double a = 2.0 * std::numbers::pi * (k + 0.5) / sides;
    out.push_back({center.x + vertex_radius * std::cos(a), center.y + vertex_radius * std::sin(a)});
  }
  return out;
}

inline double area(const Polygon& poly) {
  double twice = 0.0;
  for (std::size_t i = 0, n = poly.size(); i < n; ++i) twice += cross(poly[i], poly[(i + 1) % n]);
  return 0.5 * twice;
}

inline bool contains(const Polygon& poly, Point p) {
  for (std::size_t i = 0, n = poly.size(); i < n; ++i) {
    if (cross(poly[(i + 1) % n] - poly[i], p - poly[i]) < 0.0) return false;
  }
  return !poly.empty();
}

/// Keeps the part of `poly` closer to `site` than to `other` (Sutherland-Hodgman
/// against the perpendicular bisector).
inline void clip_to_bisector(Polygon& poly, Point site, Point other, Polygon& scratch) {
  const Point normal = other - site;
  const double offset = 0.5 * (norm2(other) - norm2(site));  // keep dot(p, normal) <= offset
  scratch.clear();
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point a = poly[i];
    const Point b = poly[(i + 1) % n];
    const double da = dot(a, normal) - offset;
    const double db = dot(b, normal) - offset;
    if (da <= 0.0) scratch.push_back(a);
    if ((da < 0.0 && db > 0.0) || (da > 0.0 && db < 0.0)) {
      const double t = da / (da - db);
      scratch.push_back(a + t * (b - a));
    }
  }
  poly.swap(scratch);
}

inline double max_vertex_distance2(const Polygon& poly, Point site) {
  double m = 0.0;
  for (const Point& v : poly) m = std::max(m, norm2(v - site));
  return m;
}

/// Uniform bucket grid over a square, for nearest-first neighbour scans.
class SiteGrid {
 public:
  SiteGrid(std::span<const Point> sites, double half_extent, double cell_size)
      : sites_(sites), origin_{-half_extent, -half_extent}, cell_(cell_size) {
    dim_ = std::max(1, static_cast<int>(std::ceil(2.0 * half_extent / cell_size)));
    start_.assign(static_cast<std::size_t>(dim_) * dim_ + 1, 0);
    std::vector<int> bucket_of(sites.size());
    for (std::size_t i = 0; i < sites.size(); ++i) {
      bucket_of[i] = bucket(sites[i]);
      ++start_[bucket_of[i] + 1];
    }
    for (std::size_t b = 1; b < start_.size(); ++b) start_[b] += start_[b - 1];
    items_.resize(sites.size());
    std::vector<int> fill(start_.begin(), start_.end() - 1);
    for (std::size_t i = 0; i < sites.size(); ++i) items_[fill[bucket_of[i]]++] = static_cast<int>(i);
  }

  /// Voronoi cell of site `index`, starting from `bounds`.
  Polygon cell(std::size_t index, Polygon bounds) const {
    const Point site = sites_[index];
    const int cx = coord(site.x - origin_.x);
    const int cy = coord(site.y - origin_.y);
    Polygon scratch;
    for (int ring = 0; ring <= dim_; ++ring) {
      for (int gy = cy - ring; gy <= cy + ring; ++gy) {
        if (gy < 0 || gy >= dim_) continue;
        const bool edge_row = (gy == cy - ring || gy == cy + ring);
        for (int gx = cx - ring; gx <= cx + ring; gx += edge_row ? 1 : 2 * ring) {
          if (gx >= 0 && gx < dim_) {
            const int b = gy * dim_ + gx;
            for (int k = start_[b]; k < start_[b + 1]; ++k) {
              const auto j = static_cast<std::size_t>(items_[k]);
              if (j != index) clip_to_bisector(bounds, site, sites_[j], scratch);
            }
          }
          if (ring == 0) break;
        }
      }
      // Every unvisited site is at least ring * cell away; its bisector is
      // beyond half of that.
      const double reach = 0.5 * ring * cell_;
      if (bounds.empty() || reach * reach >= max_vertex_distance2(bounds, site)) break;
    }
    return bounds;
  }

 private:
  int coord(double offset) const { return std::clamp(static_cast<int>(std::floor(offset / cell_)), 0, dim_ - 1); }
  int bucket(Point p) const { return coord(p.y - origin_.y) * dim_ + coord(p.x - origin_.x); }

  std::span<const Point> sites_;
  Point origin_;
  double cell_;
  int dim_ = 1;
  std::vector<int> start_;
  std::vector<int> items_;
};

/// Area-uniform point in a convex polygon via fan triangulation. The fan
/// starts at the lowest-x vertex, so the same cell listed from a different
/// starting vertex maps the same draws to the same point.
inline Point sample_uniform(const Polygon& poly, rng::Stream& stream) {
  if (poly.empty()) return {};
  if (poly.size() < 3) return poly.front();
  const std::size_t n = poly.size();
  const std::size_t k = static_cast<std::size_t>(
      std::min_element(poly.begin(), poly.end(),
                       [](Point a, Point b) { return a.x < b.x || (a.x == b.x && a.y < b.y); }) -
      poly.begin());
  auto at = [&](std::size_t j) { return poly[(k + j) % n]; };
  const Point a = at(0);
  const std::size_t tri = n - 2;
  std::vector<double> cumulative(tri);
  double total = 0.0;
  for (std::size_t i = 0; i < tri; ++i) {
    total += 0.5 * std::abs(cross(at(i + 1) - a, at(i + 2) - a));
    cumulative[i] = total;
  }
  const double pick = stream.uniform() * total;
  const std::size_t i = static_cast<std::size_t>(
      std::min<std::ptrdiff_t>(std::upper_bound(cumulative.begin(), cumulative.end(), pick) - cumulative.begin(),
                               static_cast<std::ptrdiff_t>(tri - 1)));
  double u = stream.uniform();
  double v = stream.uniform();
  if (u + v > 1.0) {
    u = 1.0 - u;
    v = 1.0 - v;
  }
  return a + u * (at(i + 1) - a) + v * (at(i + 2) - a);
}

}  // namespace fdisac::geometry
