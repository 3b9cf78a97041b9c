#pragma once

#include <array>
#include <vector>

namespace greenxva::geom {

using Point2 = std::array<double, 2>;
using Triangle = std::array<int, 3>;

// Counter-clockwise triangles of the Delaunay triangulation, indexing into
// `points`. Exact duplicates are merged onto their first occurrence.
// Throws GeometryError for fewer than three distinct or all collinear points.
[[nodiscard]] std::vector<Triangle> delaunay(const std::vector<Point2>& points);

// Orientation and in-circle tests with a relative epsilon guard.
[[nodiscard]] double orient2d(const Point2& a, const Point2& b, const Point2& c);
[[nodiscard]] bool ccw(const Point2& a, const Point2& b, const Point2& c);
[[nodiscard]] bool in_circle(const Point2& a, const Point2& b, const Point2& c, const Point2& d);

}  // namespace greenxva::geom
