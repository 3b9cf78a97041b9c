#include "greenxva/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <random>
#include <utility>

#include "greenxva/error.hpp"

namespace greenxva::mesh {

namespace {

using domain3d::DomainSpec;

double edge_len(const Point2& a, const Point2& b) { return std::hypot(a[0] - b[0], a[1] - b[1]); }

std::vector<Point2> hex_grid(const DomainSpec& d, double h, double theta_hi) {
    std::vector<Point2> pts;
    const double dy = h * std::sqrt(3.0) / 2.0;
    int row = 0;
    for (double th = d.pole_clamp; th <= theta_hi + 1e-12; th += dy, ++row) {
        const double shift = (row % 2 != 0) ? h / 2.0 : 0.0;
        for (double ph = shift; ph <= d.varpi + 1e-12; ph += h) pts.push_back({ph, th});
    }
    return pts;
}

std::vector<std::pair<int, int>> unique_edges(const std::vector<Triangle>& tris) {
    std::vector<std::pair<int, int>> bars;
    bars.reserve(3 * tris.size());
    for (const auto& t : tris) {
        for (int k = 0; k < 3; ++k) {
            int a = t[static_cast<std::size_t>(k)];
            int b = t[static_cast<std::size_t>((k + 1) % 3)];
            if (a > b) std::swap(a, b);
            bars.emplace_back(a, b);
        }
    }
    std::sort(bars.begin(), bars.end());
    bars.erase(std::unique(bars.begin(), bars.end()), bars.end());
    return bars;
}

std::vector<Triangle> interior_triangles(const DomainSpec& d, const std::vector<Point2>& p,
                                         double geps) {
    std::vector<Triangle> out;
    for (const auto& t : geom::delaunay(p)) {
        const auto& a = p[static_cast<std::size_t>(t[0])];
        const auto& b = p[static_cast<std::size_t>(t[1])];
        const auto& c = p[static_cast<std::size_t>(t[2])];
        const double cx = (a[0] + b[0] + c[0]) / 3.0;
        const double cy = (a[1] + b[1] + c[1]) / 3.0;
        if (domain3d::signed_distance(d, cx, cy) < -geps) out.push_back(t);
    }
    return out;
}

}  // namespace

SizeField uniform_size() {
    return [](const DomainSpec&, double, double) { return 1.0; };
}

SizeField boundary_size(double ratio, double band) {
    return [ratio, band](const DomainSpec& d, double phi, double theta) {
        const double dist = std::max(0.0, -domain3d::signed_distance(d, phi, theta));
        return 1.0 / ratio + (1.0 - 1.0 / ratio) * std::min(1.0, dist / band);
    };
}

SurfaceMesh build_mesh(const DomainSpec& d, const MeshOptions& opt) {
    if (opt.n_points < 50) throw DomainError("build_mesh: n_points must be at least 50");
    const SizeField size = opt.size ? opt.size : uniform_size();
    const double area = domain3d::chart_area(d);
    double theta_hi = 0.0;
    for (double t : d.curve_theta) theta_hi = std::max(theta_hi, t);

    const std::vector<Point2> fixed = {{0.0, d.pole_clamp},
                                       {d.varpi, d.pole_clamp},
                                       {0.0, d.curve_theta.front()},
                                       {d.varpi, d.curve_theta.back()}};

    // Grid spacing for the requested count: uniform spacing first, then
    // shrink by the mean acceptance rate of the rejection step.
    double h0 = std::sqrt(2.0 * area / (std::sqrt(3.0) * opt.n_points));
    const auto acceptance = [&](const Point2& q, double hmin) {
        const double h = size(d, q[0], q[1]);
        return (hmin * hmin) / (h * h);
    };
    double hmin = 1.0;
    {
        double sum = 0.0;
        int cnt = 0;
        std::vector<Point2> inside;
        for (const auto& q : hex_grid(d, h0, theta_hi)) {
            if (domain3d::signed_distance(d, q[0], q[1]) < 0.0) inside.push_back(q);
        }
        for (const auto& q : inside) hmin = std::min(hmin, size(d, q[0], q[1]));
        for (const auto& q : inside) {
            sum += acceptance(q, hmin);
            ++cnt;
        }
        if (cnt > 0) h0 *= std::sqrt(sum / cnt);
    }
    const double geps = 1e-3 * h0;

    std::mt19937_64 rng(opt.seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::vector<Point2> p = fixed;
    for (const auto& q : hex_grid(d, h0, theta_hi)) {
        if (domain3d::signed_distance(d, q[0], q[1]) >= -geps) continue;
        if (unif(rng) >= acceptance(q, hmin)) continue;
        bool near_fixed = false;
        for (const auto& f : fixed) near_fixed = near_fixed || edge_len(f, q) < 0.5 * h0;
        if (!near_fixed) p.push_back(q);
    }
    const std::size_t n_fixed = fixed.size();

    SurfaceMesh m;
    m.h0 = h0;
    std::vector<Point2> force(p.size());
    std::vector<Point2> p_tri;
    std::vector<Triangle> tris;
    std::vector<std::pair<int, int>> bars;
    for (int it = 1; it <= opt.max_iter; ++it) {
        m.iterations = it;
        // Retriangulate once any node has moved a tenth of the spacing.
        double moved = p_tri.empty() ? h0 : 0.0;
        for (std::size_t i = 0; i < p_tri.size(); ++i) moved = std::max(moved, edge_len(p[i], p_tri[i]));
        if (moved > 0.1 * h0) {
            p_tri = p;
            tris = interior_triangles(d, p, geps);
            bars = unique_edges(tris);
        }
        double sum_l2 = 0.0, sum_h2 = 0.0, sum_l = 0.0;
        std::vector<double> len(bars.size()), hb(bars.size());
        for (std::size_t i = 0; i < bars.size(); ++i) {
            const auto& a = p[static_cast<std::size_t>(bars[i].first)];
            const auto& b = p[static_cast<std::size_t>(bars[i].second)];
            len[i] = edge_len(a, b);
            hb[i] = size(d, 0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1]));
            sum_l2 += len[i] * len[i];
            sum_h2 += hb[i] * hb[i];
            sum_l += len[i];
        }
        const double mean_edge = sum_l / static_cast<double>(bars.size());
        const double scale = opt.fscale * std::sqrt(sum_l2 / sum_h2);
        std::fill(force.begin(), force.end(), Point2{0.0, 0.0});
        for (std::size_t i = 0; i < bars.size(); ++i) {
            const double f = std::max(hb[i] * scale - len[i], 0.0) / len[i];
            const auto ia = static_cast<std::size_t>(bars[i].first);
            const auto ib = static_cast<std::size_t>(bars[i].second);
            const double fx = f * (p[ia][0] - p[ib][0]);
            const double fy = f * (p[ia][1] - p[ib][1]);
            force[ia][0] += fx;
            force[ia][1] += fy;
            force[ib][0] -= fx;
            force[ib][1] -= fy;
        }
        double max_move = 0.0;
        for (std::size_t i = n_fixed; i < p.size(); ++i) {
            Point2 q{p[i][0] + opt.dt * force[i][0], p[i][1] + opt.dt * force[i][1]};
            if (domain3d::signed_distance(d, q[0], q[1]) > 0.0) {
                q = domain3d::project_to_boundary(d, q[0], q[1]);
            }
            if (domain3d::signed_distance(d, q[0], q[1]) < -geps) {
                max_move = std::max(max_move, edge_len(q, p[i]));
            }
            p[i] = q;
        }
        if (max_move < opt.tol * mean_edge) {
            m.converged = true;
            break;
        }
    }

    tris = interior_triangles(d, p, geps);
    SurfaceMesh out = from_triangles(d, std::move(p), std::move(tris), 1e-4 * h0);
    out.iterations = m.iterations;
    out.converged = m.converged;
    out.h0 = h0;
    return out;
}

SurfaceMesh from_triangles(const DomainSpec& d, std::vector<Point2> vertices,
                           std::vector<Triangle> triangles, double tol) {
    std::vector<int> remap(vertices.size(), -1);
    SurfaceMesh m;
    for (auto& t : triangles) {
        for (auto& v : t) {
            auto& r = remap[static_cast<std::size_t>(v)];
            if (r < 0) {
                r = static_cast<int>(m.vertices.size());
                m.vertices.push_back(vertices[static_cast<std::size_t>(v)]);
            }
            v = r;
        }
        const auto& a = m.vertices[static_cast<std::size_t>(t[0])];
        const auto& b = m.vertices[static_cast<std::size_t>(t[1])];
        const auto& c = m.vertices[static_cast<std::size_t>(t[2])];
        if (geom::orient2d(a, b, c) < 0.0) std::swap(t[1], t[2]);
    }
    m.triangles = std::move(triangles);
    m.boundary.resize(m.vertices.size());
    m.free_index.assign(m.vertices.size(), -1);
    for (std::size_t i = 0; i < m.vertices.size(); ++i) {
        const auto& v = m.vertices[i];
        m.boundary[i] = std::abs(domain3d::signed_distance(d, v[0], v[1])) <= tol ? 1 : 0;
        if (m.boundary[i] == 0) m.free_index[i] = m.free_count++;
    }
    return m;
}

double triangle_area(const SurfaceMesh& m, const Triangle& t) {
    return 0.5 * geom::orient2d(m.vertices[static_cast<std::size_t>(t[0])],
                                m.vertices[static_cast<std::size_t>(t[1])],
                                m.vertices[static_cast<std::size_t>(t[2])]);
}

MeshQuality mesh_quality(const SurfaceMesh& m) {
    MeshQuality q;
    q.min_angle_deg = 180.0;
    int good = 0;
    double sum_edge = 0.0;
    for (const auto& t : m.triangles) {
        std::array<Point2, 3> v;
        for (int k = 0; k < 3; ++k) {
            v[static_cast<std::size_t>(k)] = m.vertices[static_cast<std::size_t>(t[static_cast<std::size_t>(k)])];
        }
        double tmin = 180.0;
        for (int k = 0; k < 3; ++k) {
            const auto& a = v[static_cast<std::size_t>(k)];
            const auto& b = v[static_cast<std::size_t>((k + 1) % 3)];
            const auto& c = v[static_cast<std::size_t>((k + 2) % 3)];
            const double ux = b[0] - a[0], uy = b[1] - a[1];
            const double wx = c[0] - a[0], wy = c[1] - a[1];
            const double ang = std::atan2(std::abs(ux * wy - uy * wx), ux * wx + uy * wy);
            tmin = std::min(tmin, ang * 180.0 / std::numbers::pi);
            sum_edge += std::hypot(ux, uy);
        }
        q.min_angle_deg = std::min(q.min_angle_deg, tmin);
        if (tmin >= 15.0) ++good;
        q.total_area += triangle_area(m, t);
    }
    if (!m.triangles.empty()) {
        q.fraction_above_15deg = static_cast<double>(good) / static_cast<double>(m.triangles.size());
        q.mean_edge = sum_edge / (3.0 * static_cast<double>(m.triangles.size()));
    }
    return q;
}

void write_mesh_csv(std::ostream& os, const SurfaceMesh& m) {
    const auto old = os.precision(17);
    os << "vertices\nindex,phi,theta,boundary\n";
    for (std::size_t i = 0; i < m.vertices.size(); ++i) {
        os << i << ',' << m.vertices[i][0] << ',' << m.vertices[i][1] << ','
           << static_cast<int>(m.boundary[i]) << '\n';
    }
    os << "triangles\nindex,v0,v1,v2\n";
    for (std::size_t i = 0; i < m.triangles.size(); ++i) {
        const auto& t = m.triangles[i];
        os << i << ',' << t[0] << ',' << t[1] << ',' << t[2] << '\n';
    }
    os.precision(old);
}

}  // namespace greenxva::mesh
