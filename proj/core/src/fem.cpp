#include "greenxva/fem.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "greenxva/error.hpp"

namespace greenxva::fem {

namespace {

constexpr double kBaryTol = 1e-12;

struct QuadPoint {
    std::array<double, 3> phi;  // basis values
    double weight;              // fraction of the area
};

std::vector<QuadPoint> rule_points(Rule r) {
    if (r == Rule::Centroid) return {{{1.0 / 3, 1.0 / 3, 1.0 / 3}, 1.0}};
    return {{{0.5, 0.5, 0.0}, 1.0 / 3}, {{0.0, 0.5, 0.5}, 1.0 / 3}, {{0.5, 0.0, 0.5}, 1.0 / 3}};
}

template <class T>
void write_pod(std::ostream& os, const T& v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
void write_vec(std::ostream& os, const std::vector<T>& v) {
    write_pod(os, static_cast<std::uint64_t>(v.size()));
    os.write(reinterpret_cast<const char*>(v.data()), static_cast<std::streamsize>(v.size() * sizeof(T)));
}

template <class T>
bool read_pod(std::istream& is, T& v) {
    return static_cast<bool>(is.read(reinterpret_cast<char*>(&v), sizeof(T)));
}

template <class T>
bool read_vec(std::istream& is, std::vector<T>& v) {
    std::uint64_t n = 0;
    if (!read_pod(is, n) || n > (std::uint64_t{1} << 32)) return false;
    v.resize(static_cast<std::size_t>(n));
    return static_cast<bool>(is.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(n * sizeof(T))));
}

constexpr char kMagic[8] = {'G', 'X', 'E', 'B', 'A', 'S', '0', '1'};

}  // namespace

P1Triangle p1_triangle(const mesh::SurfaceMesh& m, std::size_t t) {
    P1Triangle e;
    e.v = m.triangles[t];
    std::array<mesh::Point2, 3> p;
    for (int k = 0; k < 3; ++k) p[static_cast<std::size_t>(k)] = m.vertices[static_cast<std::size_t>(e.v[static_cast<std::size_t>(k)])];
    const double two_a = geom::orient2d(p[0], p[1], p[2]);
    if (!(two_a > 0.0)) throw LinearAlgebraError("p1_triangle: nonpositive triangle area");
    e.area = 0.5 * two_a;
    for (int i = 0; i < 3; ++i) {
        const auto& pj = p[static_cast<std::size_t>((i + 1) % 3)];
        const auto& pk = p[static_cast<std::size_t>((i + 2) % 3)];
        const auto I = static_cast<std::size_t>(i);
        e.a[I] = (pj[0] * pk[1] - pk[0] * pj[1]) / two_a;
        e.b[I] = (pj[1] - pk[1]) / two_a;
        e.c[I] = (pk[0] - pj[0]) / two_a;
    }
    e.centroid = {(p[0][0] + p[1][0] + p[2][0]) / 3.0, (p[0][1] + p[1][1] + p[2][1]) / 3.0};
    return e;
}

System assemble(const mesh::SurfaceMesh& m, const AssemblyOptions& opt) {
    const int n = m.free_count;
    System s{linalg::Matrix(n), linalg::Matrix(n), std::vector<double>(static_cast<std::size_t>(n), 0.0)};
    const auto pts = rule_points(opt.rule);
    for (std::size_t t = 0; t < m.triangles.size(); ++t) {
        const P1Triangle e = p1_triangle(m, t);
        std::array<mesh::Point2, 3> p;
        for (int k = 0; k < 3; ++k) p[static_cast<std::size_t>(k)] = m.vertices[static_cast<std::size_t>(e.v[static_cast<std::size_t>(k)])];
        // Stiffness weights averaged over the rule; mass is the consistent
        // P1 mass scaled by sin(theta) at each point.
        double w_phi = 0.0, w_theta = 0.0;
        std::array<std::array<double, 3>, 3> me{};
        std::array<double, 3> le{};
        for (const auto& q : pts) {
            const double th = q.phi[0] * p[0][1] + q.phi[1] * p[1][1] + q.phi[2] * p[2][1];
            const double st = opt.unit_weight ? 1.0 : std::sin(th);
            w_phi += q.weight / st;
            w_theta += q.weight * st;
            for (std::size_t i = 0; i < 3; ++i) {
                le[i] += q.weight * st * q.phi[i];
                for (std::size_t j = 0; j < 3; ++j) {
                    const double consistent = (opt.rule == Rule::Centroid)
                                                  ? (i == j ? 1.0 / 6.0 : 1.0 / 12.0)
                                                  : q.phi[i] * q.phi[j];
                    me[i][j] += q.weight * st * consistent;
                }
            }
        }
        for (std::size_t i = 0; i < 3; ++i) {
            const int fi = m.free_index[static_cast<std::size_t>(e.v[i])];
            if (fi < 0) continue;
            s.load[static_cast<std::size_t>(fi)] += e.area * le[i];
            for (std::size_t j = 0; j < 3; ++j) {
                const int fj = m.free_index[static_cast<std::size_t>(e.v[j])];
                if (fj < 0) continue;
                s.stiffness(fi, fj) += e.area * (w_phi * (e.b[i] * e.b[j]) + w_theta * (e.c[i] * e.c[j]));
                s.mass(fi, fj) += e.area * me[i][j];
            }
        }
    }
    return s;
}

void finalize_basis(EigenBasis& b) {
    const auto& m = *b.mesh;
    b.elements.clear();
    for (std::size_t t = 0; t < m.triangles.size(); ++t) b.elements.push_back(p1_triangle(m, t));
    const std::size_t k = b.values.size();
    b.nodal.assign(m.vertices.size() * k, 0.0);
    for (std::size_t v = 0; v < m.vertices.size(); ++v) {
        const int f = m.free_index[v];
        if (f < 0) continue;
        for (std::size_t n = 0; n < k; ++n) b.nodal[v * k + n] = b.vectors[n][static_cast<std::size_t>(f)];
    }
    double lo0 = std::numeric_limits<double>::infinity(), lo1 = lo0, hi0 = -lo0, hi1 = -lo0;
    for (const auto& p : m.vertices) {
        lo0 = std::min(lo0, p[0]);
        hi0 = std::max(hi0, p[0]);
        lo1 = std::min(lo1, p[1]);
        hi1 = std::max(hi1, p[1]);
    }
    const int side = std::max(1, static_cast<int>(std::sqrt(static_cast<double>(m.triangles.size()) / 2.0)));
    b.grid_nphi = side;
    b.grid_ntheta = side;
    b.grid_phi0 = lo0;
    b.grid_theta0 = lo1;
    b.grid_dphi = (hi0 - lo0) / side * (1.0 + 1e-12);
    b.grid_dtheta = (hi1 - lo1) / side * (1.0 + 1e-12);
    b.buckets.assign(static_cast<std::size_t>(side * side), {});
    const auto cell = [&](double x, double x0, double dx) {
        return std::clamp(static_cast<int>(std::floor((x - x0) / dx)), 0, side - 1);
    };
    for (std::size_t t = 0; t < m.triangles.size(); ++t) {
        double a0 = std::numeric_limits<double>::infinity(), a1 = a0, z0 = -a0, z1 = -a0;
        for (int v : m.triangles[t]) {
            const auto& p = m.vertices[static_cast<std::size_t>(v)];
            a0 = std::min(a0, p[0]);
            z0 = std::max(z0, p[0]);
            a1 = std::min(a1, p[1]);
            z1 = std::max(z1, p[1]);
        }
        for (int i = cell(a0, lo0, b.grid_dphi); i <= cell(z0, lo0, b.grid_dphi); ++i) {
            for (int j = cell(a1, lo1, b.grid_dtheta); j <= cell(z1, lo1, b.grid_dtheta); ++j) {
                b.buckets[static_cast<std::size_t>(i * side + j)].push_back(static_cast<int>(t));
            }
        }
    }
}

EigenBasis compute_basis(mesh::SurfaceMesh m, int count, const AssemblyOptions& opt) {
    const System s = assemble(m, opt);
    auto pairs = linalg::generalized_eigen(s.stiffness, s.mass, count);
    EigenBasis b;
    b.mesh = std::make_shared<const mesh::SurfaceMesh>(std::move(m));
    b.values = std::move(pairs.values);
    b.vectors = std::move(pairs.vectors);
    for (auto& v : b.vectors) {
        double integral = 0.0;
        for (std::size_t i = 0; i < v.size(); ++i) integral += s.load[i] * v[i];
        bool flip = integral < 0.0;
        if (std::abs(integral) < 1e-12) {
            const auto it = std::find_if(v.begin(), v.end(), [](double x) { return std::abs(x) > 1e-12; });
            flip = it != v.end() && *it < 0.0;
        }
        if (flip) {
            for (auto& x : v) x = -x;
            integral = -integral;
        }
        b.sin_integrals.push_back(integral);
    }
    finalize_basis(b);
    return b;
}

int locate(const EigenBasis& b, double phi, double theta) {
    int i = static_cast<int>(std::floor((phi - b.grid_phi0) / b.grid_dphi));
    int j = static_cast<int>(std::floor((theta - b.grid_theta0) / b.grid_dtheta));
    // Boundary points can land one rounding step outside the grid.
    if (i < -1 || j < -1 || i > b.grid_nphi || j > b.grid_ntheta) return -1;
    i = std::clamp(i, 0, b.grid_nphi - 1);
    j = std::clamp(j, 0, b.grid_ntheta - 1);
    for (int t : b.buckets[static_cast<std::size_t>(i * b.grid_ntheta + j)]) {
        const auto& e = b.elements[static_cast<std::size_t>(t)];
        bool in = true;
        for (std::size_t k = 0; k < 3 && in; ++k) in = e.a[k] + e.b[k] * phi + e.c[k] * theta >= -kBaryTol;
        if (in) return t;
    }
    return -1;
}

void eval_all(const EigenBasis& b, const domain3d::DomainSpec& d, double phi, double theta,
              std::span<double> out) {
    std::fill(out.begin(), out.end(), 0.0);
    const int t = locate(b, phi, theta);
    if (t < 0) {
        if (domain3d::signed_distance(d, phi, theta) > 1e-9 && theta >= d.pole_clamp) {
            throw DomainError("eval_basis: point outside the domain");
        }
        if (phi < -1e-9 || phi > d.varpi + 1e-9 || theta < 0.0) {
            throw DomainError("eval_basis: point outside the domain");
        }
        return;
    }
    const auto& e = b.elements[static_cast<std::size_t>(t)];
    const std::size_t k = b.values.size();
    const std::size_t n = std::min(out.size(), k);
    for (std::size_t i = 0; i < 3; ++i) {
        double w = e.a[i] + e.b[i] * phi + e.c[i] * theta;
        // Points on an edge get exactly zero weight from the opposite vertex.
        if (std::abs(w) < kBaryTol) w = 0.0;
        const double* row = b.nodal.data() + static_cast<std::size_t>(e.v[i]) * k;
        for (std::size_t j = 0; j < n; ++j) out[j] += w * row[j];
    }
}

double eval_basis(const EigenBasis& b, const domain3d::DomainSpec& d, int n, double phi,
                  double theta) {
    std::vector<double> all(b.values.size());
    eval_all(b, d, phi, theta, all);
    return all.at(static_cast<std::size_t>(n));
}

std::array<double, 2> eval_basis_gradient(const EigenBasis& b, int n, int t) {
    const auto& e = b.elements[static_cast<std::size_t>(t)];
    std::array<double, 2> g{0.0, 0.0};
    for (std::size_t i = 0; i < 3; ++i) {
        const double v = b.nodal_value(n, e.v[i]);
        g[0] += v * e.b[i];
        g[1] += v * e.c[i];
    }
    return g;
}

std::string cache_key(const model::CorrelationTriple& rho, int n_points, std::uint64_t seed,
                      Rule rule, int count) {
    char buf[256];
    std::snprintf(buf, sizeof buf, "rho=%.17g,%.17g,%.17g;n=%d;seed=%llu;rule=%s;count=%d", rho.rho_xy,
                  rho.rho_xz, rho.rho_yz, n_points, static_cast<unsigned long long>(seed),
                  rule == Rule::Centroid ? "centroid" : "midpoint", count);
    return buf;
}

std::string cache_file_name(const std::string& key) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : key) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[64];
    std::snprintf(buf, sizeof buf, "basis_%016llx.bin", static_cast<unsigned long long>(h));
    return buf;
}

void save_basis(const EigenBasis& b, const std::string& path, const std::string& key) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw ConfigError("save_basis: cannot open " + path);
    os.write(kMagic, sizeof kMagic);
    write_vec(os, std::vector<char>(key.begin(), key.end()));
    const auto& m = *b.mesh;
    write_vec(os, m.vertices);
    write_vec(os, m.triangles);
    write_vec(os, m.boundary);
    write_vec(os, m.free_index);
    write_pod(os, m.free_count);
    write_pod(os, m.iterations);
    write_pod(os, static_cast<std::uint8_t>(m.converged));
    write_pod(os, m.h0);
    write_vec(os, b.values);
    write_vec(os, b.sin_integrals);
    for (const auto& v : b.vectors) write_vec(os, v);
    if (!os) throw ConfigError("save_basis: write failed for " + path);
}

std::optional<EigenBasis> load_basis(const std::string& path, const std::string& key) {
    std::ifstream is(path, std::ios::binary);
    if (!is) return std::nullopt;
    char magic[sizeof kMagic];
    if (!is.read(magic, sizeof magic) || !std::equal(magic, magic + sizeof magic, kMagic)) return std::nullopt;
    std::vector<char> k;
    if (!read_vec(is, k) || std::string(k.begin(), k.end()) != key) return std::nullopt;
    mesh::SurfaceMesh m;
    std::uint8_t conv = 0;
    EigenBasis b;
    if (!read_vec(is, m.vertices) || !read_vec(is, m.triangles) || !read_vec(is, m.boundary) ||
        !read_vec(is, m.free_index) || !read_pod(is, m.free_count) || !read_pod(is, m.iterations) ||
        !read_pod(is, conv) || !read_pod(is, m.h0) || !read_vec(is, b.values) ||
        !read_vec(is, b.sin_integrals)) {
        return std::nullopt;
    }
    m.converged = conv != 0;
    b.vectors.resize(b.values.size());
    for (auto& v : b.vectors) {
        if (!read_vec(is, v) || static_cast<int>(v.size()) != m.free_count) return std::nullopt;
    }
    b.mesh = std::make_shared<const mesh::SurfaceMesh>(std::move(m));
    finalize_basis(b);
    return b;
}

}  // namespace greenxva::fem
