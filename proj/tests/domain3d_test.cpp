#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "greenxva/domain3d.hpp"
#include "greenxva/error.hpp"

using namespace greenxva;
using namespace greenxva::domain3d;
using std::numbers::pi;

namespace {

const model::CorrelationTriple kRhoA{0.8, 0.2, 0.5};
const model::CorrelationTriple kRhoB{0.2, -0.1, -0.6};

double norm(const Vec3& v) { return std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]); }

std::vector<model::CorrelationTriple> random_triples(int n, unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> u(-0.95, 0.95);
    std::vector<model::CorrelationTriple> out;
    while (static_cast<int>(out.size()) < n) {
        model::CorrelationTriple r{u(rng), u(rng), u(rng)};
        if (model::chi_squared(r) > 0.01) out.push_back(r);
    }
    return out;
}

// Polar angle where the z = 0 plane cuts the meridian phi, found by bisection
// on the sign of z along the meridian.
double theta_by_bisection(const DomainSpec& d, double phi) {
    double lo = 1e-9, hi = pi - 1e-9;
    const auto z = [&](double th) { return from_spherical(d, {1.0, phi, th})[2]; };
    EXPECT_GT(z(lo), 0.0);
    EXPECT_LT(z(hi), 0.0);
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (z(mid) > 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

TEST(Domain3d, UncorrelatedIsOctant) {
    const auto d = build_domain({0.0, 0.0, 0.0});
    EXPECT_NEAR(d.varpi, pi / 2, 1e-15);
    for (int k = 0; k < 3; ++k) {
        EXPECT_NEAR(d.e1[static_cast<std::size_t>(k)], k == 0 ? 1.0 : 0.0, 1e-15);
        EXPECT_NEAR(d.e2[static_cast<std::size_t>(k)], k == 1 ? 1.0 : 0.0, 1e-15);
        EXPECT_NEAR(d.e3[static_cast<std::size_t>(k)], k == 2 ? 1.0 : 0.0, 1e-15);
    }
    for (double w : {0.0, 0.3, 1.0, 7.0, 1e6}) EXPECT_NEAR(boundary_theta(d, w), pi / 2, 1e-14);
    EXPECT_NEAR(chart_area(d), pi / 2 * (pi / 2 - 1e-3), 1e-13);
}

TEST(Domain3d, CorrelatedVersorsByHand) {
    const auto d = build_domain(kRhoA);
    EXPECT_NEAR(d.chi, std::sqrt(0.23), 1e-15);
    EXPECT_NEAR(d.chi, 0.4796, 5e-5);
    const double bxy = 0.6, bxz = std::sqrt(0.96), byz = std::sqrt(0.75), chi = std::sqrt(0.23);
    EXPECT_NEAR(d.e1[0], chi / byz, 1e-15);
    EXPECT_NEAR(d.e1[1], -0.8 * chi / (bxy * byz), 1e-15);
    EXPECT_NEAR(d.e1[2], -(0.2 - 0.5 * 0.8) / (bxy * byz), 1e-15);
    EXPECT_NEAR(d.e2[1], chi / (bxy * bxz), 1e-15);
    EXPECT_NEAR(d.e2[2], -(0.5 - 0.2 * 0.8) / (bxy * bxz), 1e-15);
    EXPECT_NEAR(d.varpi, std::acos(-0.8), 1e-15);
    EXPECT_NEAR(boundary_theta(d, 0.0), std::acos(-0.34 / (0.6 * 0.9797958971)), 1e-9);
    EXPECT_NEAR(std::cos(boundary_theta(d, 0.0)), -0.5784, 5e-5);
}

TEST(Domain3d, VersorsAreUnitAndLieOnFaces) {
    for (const auto& r : random_triples(200, 7)) {
        const auto d = build_domain(r);
        EXPECT_NEAR(norm(d.e1), 1.0, 1e-12);
        EXPECT_NEAR(norm(d.e2), 1.0, 1e-12);
        EXPECT_NEAR(norm(d.e3), 1.0, 1e-12);
        const Vec3 x1 = from_whitened(d, d.e1);
        const Vec3 x2 = from_whitened(d, d.e2);
        const Vec3 x3 = from_whitened(d, d.e3);
        EXPECT_NEAR(x1[1], 0.0, 1e-12);
        EXPECT_NEAR(x1[2], 0.0, 1e-12);
        EXPECT_GT(x1[0], 0.0);
        EXPECT_NEAR(x2[0], 0.0, 1e-12);
        EXPECT_NEAR(x2[2], 0.0, 1e-12);
        EXPECT_GT(x2[1], 0.0);
        EXPECT_NEAR(x3[0], 0.0, 1e-12);
        EXPECT_NEAR(x3[1], 0.0, 1e-12);
        EXPECT_GT(x3[2], 0.0);
    }
}

TEST(Domain3d, WhiteningReproducesCorrelation) {
    for (const auto& r : random_triples(50, 11)) {
        const auto d = build_domain(r);
        // Columns of the inverse map B satisfy B B^T = C.
        std::array<Vec3, 3> cols;
        for (int k = 0; k < 3; ++k) {
            Vec3 e{0.0, 0.0, 0.0};
            e[static_cast<std::size_t>(k)] = 1.0;
            cols[static_cast<std::size_t>(k)] = from_whitened(d, e);
        }
        const auto cov = [&](int i, int j) {
            double s = 0.0;
            for (const auto& c : cols) s += c[static_cast<std::size_t>(i)] * c[static_cast<std::size_t>(j)];
            return s;
        };
        EXPECT_NEAR(cov(0, 0), 1.0, 1e-12);
        EXPECT_NEAR(cov(1, 1), 1.0, 1e-12);
        EXPECT_NEAR(cov(2, 2), 1.0, 1e-12);
        EXPECT_NEAR(cov(0, 1), r.rho_xy, 1e-12);
        EXPECT_NEAR(cov(0, 2), r.rho_xz, 1e-12);
        EXPECT_NEAR(cov(1, 2), r.rho_yz, 1e-12);
        const Vec3 p{0.3, -1.2, 2.5};
        const Vec3 q = from_whitened(d, to_whitened(d, p));
        for (int k = 0; k < 3; ++k) EXPECT_NEAR(q[static_cast<std::size_t>(k)], p[static_cast<std::size_t>(k)], 1e-12);
    }
}

TEST(Domain3d, FaceOrientation) {
    for (const auto& r : {kRhoA, kRhoB, model::CorrelationTriple{0.0, 0.0, 0.0}}) {
        const auto d = build_domain(r);
        for (double th : {0.2, 0.7, 1.0}) {
            EXPECT_NEAR(from_spherical(d, {1.0, 0.0, th})[0], 0.0, 1e-14);
            EXPECT_NEAR(from_spherical(d, {1.0, d.varpi, th})[1], 0.0, 1e-14);
        }
        for (double phi : {0.1, 0.5 * d.varpi, 0.9 * d.varpi}) {
            EXPECT_NEAR(from_spherical(d, {1.0, phi, theta_max(d, phi)})[2], 0.0, 1e-13);
            const Vec3 in = from_spherical(d, {1.0, phi, 0.5 * theta_max(d, phi)});
            EXPECT_GT(in[0], 0.0);
            EXPECT_GT(in[1], 0.0);
            EXPECT_GT(in[2], 0.0);
            const auto s = to_spherical(d, in);
            EXPECT_NEAR(s.phi, phi, 1e-13);
            EXPECT_NEAR(s.theta, 0.5 * theta_max(d, phi), 1e-13);
        }
    }
}

TEST(Domain3d, ThetaMaxMatchesBisectionOracle) {
    for (const auto& r : random_triples(40, 3)) {
        const auto d = build_domain(r);
        for (int i = 0; i <= 20; ++i) {
            const double phi = d.varpi * i / 20.0;
            EXPECT_NEAR(theta_max(d, phi), theta_by_bisection(d, phi), 1e-10);
        }
    }
}

TEST(Domain3d, BoundaryCurveEndpointsAndRoundTrip) {
    const auto d = build_domain(kRhoA);
    const double t0 = std::acos(-(0.5 - 0.2 * 0.8) / (d.rho_bar_xy * d.rho_bar_xz));
    const double tinf = std::acos(-(0.2 - 0.5 * 0.8) / (d.rho_bar_xy * d.rho_bar_yz));
    EXPECT_NEAR(theta_max(d, 0.0), t0, 1e-14);
    EXPECT_NEAR(theta_max(d, d.varpi), tinf, 1e-14);
    EXPECT_NEAR(boundary_theta(d, 1e12), tinf, 1e-10);
    EXPECT_EQ(boundary_phi(d, 0.0), 0.0);
    EXPECT_NEAR(boundary_phi(d, 1e12), d.varpi, 1e-10);
    for (double w : {1e-3, 0.1, 0.5, 1.0, 2.0, 10.0, 300.0}) {
        const auto c = boundary_curve(d, w);
        EXPECT_NEAR(theta_max(d, c[0]), c[1], 1e-10);
        EXPECT_NEAR(omega_of_phi(d, c[0]), w, 1e-9 * std::max(1.0, w * w));
    }
    EXPECT_THROW((void)boundary_curve(d, -1.0), DomainError);
}

TEST(Domain3d, PhiMonotoneInOmega) {
    for (const auto& r : {kRhoA, kRhoB}) {
        const auto d = build_domain(r);
        double prev = boundary_phi(d, 0.0);
        for (int i = 1; i <= 4000; ++i) {
            const double w = 1e3 * std::pow(i / 4000.0, 3.0);
            const double cur = boundary_phi(d, w);
            EXPECT_GT(cur, prev);
            prev = cur;
        }
    }
}

TEST(Domain3d, SignedDistance) {
    for (const auto& r : {kRhoA, kRhoB}) {
        const auto d = build_domain(r);
        const double phic = 0.5 * d.varpi;
        EXPECT_LT(signed_distance(d, phic, 0.5 * theta_max(d, phic)), 0.0);
        for (double phi : {0.0, 0.3, phic, d.varpi}) {
            EXPECT_NEAR(signed_distance(d, phi, theta_max(d, phi)), 0.0, 1e-6);
            EXPECT_GT(signed_distance(d, phi, theta_max(d, phi) + 0.05), 0.0);
        }
        EXPECT_NEAR(signed_distance(d, -0.1, 0.5), 0.1, 1e-12);
        EXPECT_NEAR(signed_distance(d, 0.02, 0.5), -0.02, 1e-12);
        EXPECT_NEAR(signed_distance(d, phic, d.pole_clamp + 0.01), -0.01, 1e-12);
        const auto p = project_to_boundary(d, phic, theta_max(d, phic) + 0.01);
        EXPECT_NEAR(p[1], theta_max(d, p[0]), 1e-15);
    }
}

TEST(Domain3d, RejectsInvalidCorrelation) {
    EXPECT_THROW((void)build_domain({0.9, 0.9, -0.9}), CorrelationError);
}
