#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <vector>

#include "greenxva/delaunay.hpp"
#include "greenxva/domain3d.hpp"

namespace greenxva::mesh {

using geom::Point2;
using geom::Triangle;

// Relative element size h(phi, theta); only ratios matter.
using SizeField = std::function<double(const domain3d::DomainSpec&, double, double)>;

[[nodiscard]] SizeField uniform_size();
// Elements shrink by `ratio` at the boundary and grow linearly to full size
// at distance `band` inside.
[[nodiscard]] SizeField boundary_size(double ratio = 3.0, double band = 0.25);

struct MeshOptions {
    int n_points = 1500;
    int max_iter = 1500;
    std::uint64_t seed = 20240601;
    double fscale = 1.2;
    double dt = 0.2;
    double tol = 1e-3;
    SizeField size;
};

// Triangulated (phi, theta) chart. Triangles are counter-clockwise in
// (phi, theta). Free vertices are numbered 0..free_count-1 in free_index.
struct SurfaceMesh {
    std::vector<Point2> vertices;
    std::vector<Triangle> triangles;
    std::vector<std::uint8_t> boundary;
    std::vector<int> free_index;
    int free_count = 0;
    int iterations = 0;
    bool converged = false;
    double h0 = 0.0;
};

[[nodiscard]] SurfaceMesh build_mesh(const domain3d::DomainSpec& d, const MeshOptions& opt);

// Assemble a mesh from given vertices and triangles; boundary flags come from
// the signed distance with tolerance `tol`.
[[nodiscard]] SurfaceMesh from_triangles(const domain3d::DomainSpec& d,
                                         std::vector<Point2> vertices,
                                         std::vector<Triangle> triangles, double tol);

struct MeshQuality {
    double min_angle_deg = 0.0;
    double fraction_above_15deg = 0.0;
    double total_area = 0.0;
    double mean_edge = 0.0;
};

[[nodiscard]] double triangle_area(const SurfaceMesh& m, const Triangle& t);
[[nodiscard]] MeshQuality mesh_quality(const SurfaceMesh& m);

// Sections "vertices" (index,phi,theta,boundary) and "triangles" (index,v0,v1,v2).
void write_mesh_csv(std::ostream& os, const SurfaceMesh& m);

}  // namespace greenxva::mesh
