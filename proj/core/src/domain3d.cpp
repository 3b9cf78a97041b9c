#include "greenxva/domain3d.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "greenxva/error.hpp"
#include "greenxva/quadrature.hpp"

namespace greenxva::domain3d {

namespace {

constexpr int kCurveSegments = 128;

struct Nearest {
    double dist = std::numeric_limits<double>::infinity();
    double phi = 0.0;
    double theta = 0.0;
    bool on_curve = false;
};

void segment_nearest(double px, double py, double ax, double ay, double bx, double by,
                     bool curve, Nearest& best) {
    const double vx = bx - ax;
    const double vy = by - ay;
    const double len2 = vx * vx + vy * vy;
    double t = len2 > 0.0 ? ((px - ax) * vx + (py - ay) * vy) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    const double qx = ax + t * vx;
    const double qy = ay + t * vy;
    const double dd = std::hypot(px - qx, py - qy);
    if (dd < best.dist) best = {dd, qx, qy, curve};
}

Nearest nearest_boundary(const DomainSpec& d, double phi, double theta) {
    const double lo = d.pole_clamp;
    const double t0 = d.curve_theta.front();
    const double t1 = d.curve_theta.back();
    Nearest straight;
    segment_nearest(phi, theta, 0.0, lo, 0.0, t0, false, straight);
    segment_nearest(phi, theta, d.varpi, lo, d.varpi, t1, false, straight);
    segment_nearest(phi, theta, 0.0, lo, d.varpi, lo, false, straight);

    // Coarse polyline foot point, then Gauss-Newton on the exact curve.
    const double h = d.varpi / kCurveSegments;
    Nearest curve;
    for (int i = 0; i < kCurveSegments; ++i) {
        segment_nearest(phi, theta, i * h, d.curve_theta[static_cast<std::size_t>(i)], (i + 1) * h,
                        d.curve_theta[static_cast<std::size_t>(i + 1)], true, curve);
    }
    double ph = curve.phi;
    for (int k = 0; k < 4; ++k) {
        const double a = std::max(ph - 1e-7, 0.0);
        const double b = std::min(ph + 1e-7, d.varpi);
        const double slope = (theta_max(d, b) - theta_max(d, a)) / (b - a);
        const double g = (ph - phi) + (theta_max(d, ph) - theta) * slope;
        ph = std::clamp(ph - g / (1.0 + slope * slope), 0.0, d.varpi);
    }
    const double th = theta_max(d, ph);
    const double dd = std::hypot(phi - ph, theta - th);
    if (dd < curve.dist) curve = {dd, ph, th, true};
    return curve.dist < straight.dist ? curve : straight;
}

}  // namespace

DomainSpec build_domain(const model::CorrelationTriple& rho, double pole_clamp) {
    DomainSpec d;
    d.rho = rho;
    d.chi = model::validate_correlation(rho);
    const double rxy = rho.rho_xy, rxz = rho.rho_xz, ryz = rho.rho_yz;
    d.rho_bar_xy = std::sqrt(1.0 - rxy * rxy);
    d.rho_bar_xz = std::sqrt(1.0 - rxz * rxz);
    d.rho_bar_yz = std::sqrt(1.0 - ryz * ryz);
    d.varpi = std::acos(-rxy);
    d.pole_clamp = pole_clamp;
    const double bxy = d.rho_bar_xy, bxz = d.rho_bar_xz, byz = d.rho_bar_yz, chi = d.chi;
    d.e3 = {0.0, 0.0, 1.0};
    d.e2 = {0.0, chi / (bxy * bxz), -(ryz - rxz * rxy) / (bxy * bxz)};
    d.e1 = {chi / byz, -rxy * chi / (bxy * byz), -(rxz - ryz * rxy) / (bxy * byz)};
    d.n_x = {1.0, 0.0, 0.0};
    d.n_y = {rxy, bxy, 0.0};
    d.n_z = {rxz, (ryz - rxy * rxz) / bxy, chi / bxy};
    d.curve_theta.resize(kCurveSegments + 1);
    for (int i = 0; i <= kCurveSegments; ++i) {
        d.curve_theta[static_cast<std::size_t>(i)] = theta_max(d, d.varpi * i / kCurveSegments);
    }
    if (d.curve_theta.front() <= pole_clamp || d.curve_theta.back() <= pole_clamp) {
        throw GeometryError("build_domain: pole clamp exceeds the domain height");
    }
    return d;
}

Vec3 to_whitened(const DomainSpec& d, const Vec3& p) {
    const double rxy = d.rho.rho_xy, rxz = d.rho.rho_xz, ryz = d.rho.rho_yz;
    const double bxy = d.rho_bar_xy;
    return {p[0], (p[1] - rxy * p[0]) / bxy,
            ((rxy * ryz - rxz) * p[0] + (rxy * rxz - ryz) * p[1] + bxy * bxy * p[2]) / (bxy * d.chi)};
}

Vec3 from_whitened(const DomainSpec& d, const Vec3& a) {
    const double x = a[0];
    const double y = d.rho.rho_xy * a[0] + d.rho_bar_xy * a[1];
    const double z = d.n_z[0] * a[0] + d.n_z[1] * a[1] + d.n_z[2] * a[2];
    return {x, y, z};
}

Spherical to_spherical(const DomainSpec& d, const Vec3& xyz) {
    const Vec3 a = to_whitened(d, xyz);
    Spherical s;
    s.r = std::sqrt(a[0] * a[0] + a[1] * a[1] + a[2] * a[2]);
    if (s.r == 0.0) return s;
    s.theta = std::acos(std::clamp(a[2] / s.r, -1.0, 1.0));
    s.phi = std::atan2(a[0], a[1]);
    return s;
}

Vec3 from_spherical(const DomainSpec& d, const Spherical& s) {
    const double st = std::sin(s.theta);
    return from_whitened(d, {s.r * st * std::sin(s.phi), s.r * st * std::cos(s.phi),
                             s.r * std::cos(s.theta)});
}

double boundary_phi(const DomainSpec& d, double omega) {
    if (std::isinf(omega)) return d.varpi;
    const double rxy = d.rho.rho_xy;
    return std::acos(std::clamp((1.0 - rxy * omega) / std::sqrt(1.0 - 2.0 * rxy * omega + omega * omega),
                                -1.0, 1.0));
}

double boundary_theta(const DomainSpec& d, double omega) {
    const double rxy = d.rho.rho_xy, rxz = d.rho.rho_xz, ryz = d.rho.rho_yz;
    const double bxy = d.rho_bar_xy, bxz = d.rho_bar_xz, byz = d.rho_bar_yz;
    const double a0 = ryz - rxz * rxy;
    const double a1 = rxz - ryz * rxy;
    const double c1 = rxy - rxz * ryz;
    double num, den;
    if (std::isinf(omega)) {
        num = a1;
        den = bxy * byz;
    } else if (omega <= 1.0) {
        num = a0 + omega * a1;
        den = bxy * std::sqrt(bxz * bxz - 2.0 * omega * c1 + omega * omega * byz * byz);
    } else {
        const double u = 1.0 / omega;
        num = a0 * u + a1;
        den = bxy * std::sqrt(bxz * bxz * u * u - 2.0 * u * c1 + byz * byz);
    }
    return std::acos(std::clamp(-num / den, -1.0, 1.0));
}

std::array<double, 2> boundary_curve(const DomainSpec& d, double omega) {
    if (!(omega >= 0.0)) throw DomainError("boundary_curve: omega must be nonnegative");
    return {boundary_phi(d, omega), boundary_theta(d, omega)};
}

double omega_of_phi(const DomainSpec& d, double phi) {
    const double s = std::sin(d.varpi - phi);
    if (s <= 0.0) return std::numeric_limits<double>::infinity();
    return std::sin(phi) / s;
}

double theta_max(const DomainSpec& d, double phi) {
    if (phi >= d.varpi) return boundary_theta(d, std::numeric_limits<double>::infinity());
    return boundary_theta(d, omega_of_phi(d, std::max(phi, 0.0)));
}

double signed_distance(const DomainSpec& d, double phi, double theta) {
    const Nearest n = nearest_boundary(d, phi, theta);
    const bool inside = phi > 0.0 && phi < d.varpi && theta > d.pole_clamp &&
                        theta < theta_max(d, phi);
    return inside ? -n.dist : n.dist;
}

std::array<double, 2> project_to_boundary(const DomainSpec& d, double phi, double theta) {
    const Nearest n = nearest_boundary(d, phi, theta);
    if (n.on_curve) {
        const double p = std::clamp(n.phi, 0.0, d.varpi);
        return {p, theta_max(d, p)};
    }
    return {n.phi, n.theta};
}

double chart_area(const DomainSpec& d) {
    const auto rule = quad::composite_gauss_legendre(16, 16, 0.0, d.varpi);
    double a = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        a += rule.weights[i] * (theta_max(d, rule.nodes[i]) - d.pole_clamp);
    }
    return a;
}

}  // namespace greenxva::domain3d
