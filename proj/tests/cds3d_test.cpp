#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "greenxva/cds1d.hpp"
#include "greenxva/cds2d.hpp"
#include "greenxva/cds3d.hpp"
#include "greenxva/error.hpp"
#include "greenxva/quadrature.hpp"

using namespace greenxva;
using namespace greenxva::cds3d;
using std::numbers::pi;

namespace {

constexpr double kX = 1.47, kY = 2.904, kZ = 1.903;

struct Case {
    domain3d::DomainSpec d;
    fem::EigenBasis basis;
};

Case make_case(const model::CorrelationTriple& rho) {
    Case c{domain3d::build_domain(rho), {}};
    mesh::MeshOptions o;
    o.n_points = 1500;
    c.basis = fem::compute_basis(mesh::build_mesh(c.d, o), kPricingTerms);
    return c;
}

const Case& octant() {
    static const Case c = make_case({0.0, 0.0, 0.0});
    return c;
}

const Case& correlated() {
    static const Case c = make_case({0.8, 0.5, 0.3});
    return c;
}

Green3d green(const Case& c, double x, double y, double z, int terms = kPricingTerms) {
    return Green3d(c.d, c.basis, transform_3d(c.d, x, y, z), terms);
}

model::CdsTerms five_year() {
    model::CdsTerms t;
    t.maturity = 5.0;
    t.rate = 0.03;
    t.coupon = cds1d::breakeven_coupon_1d(5.0, kY, 0.03, 0.4);
    return t;
}

double first_passage(double t, double a) {
    return a / std::sqrt(2.0 * pi * t * t * t) * std::exp(-a * a / (2.0 * t));
}

// Probability that the name at distance `a` defaults first before T, the
// other two independent.
double first_default_independent(double horizon, double a, double b, double c) {
    return quad::integrate_adaptive(
        [&](double t) {
            if (t <= 0.0) return 0.0;
            return first_passage(t, a) * cds1d::survival_1d(t, b) * cds1d::survival_1d(t, c);
        },
        0.0, horizon, 1e-14, 1e-11);
}

// Adjustment for independent drivers: first passage of the counterparty, the
// other counterparty alive, killed density of the reference name.
double independent_adjustment(const model::CdsTerms& terms, double x0, double y0, double z0,
                              bool positive) {
    auto inner = [&](double t) {
        const double tau = terms.maturity - t;
        return quad::integrate_adaptive(
            [&](double y) {
                const double v = cds1d::cds_value_1d(tau, y, terms.coupon, terms.rate, terms.recovery_rn);
                return cds1d::green_1d_images(t, y0, y) * (positive ? std::max(v, 0.0) : std::max(-v, 0.0));
            },
            0.0, y0 + 10.0 * std::sqrt(t), 1e-13, 1e-10);
    };
    return quad::integrate_adaptive(
        [&](double t) {
            if (t <= 0.0) return 0.0;
            const double f = first_passage(t, x0);
            if (f == 0.0) return 0.0;
            return std::exp(-terms.rate * t) * f * cds1d::survival_1d(t, z0) * inner(t);
        },
        0.0, terms.maturity, 1e-13, 1e-9);
}

}  // namespace

TEST(Cds3d, TransformAtZeroCorrelationIsSpherical) {
    const auto& d = octant().d;
    const auto s = transform_3d(d, 1.0, 2.0, 3.0);
    EXPECT_NEAR(s.r, std::sqrt(14.0), 1e-12);
    EXPECT_NEAR(s.r * std::cos(s.theta), 3.0, 1e-12);
    EXPECT_NEAR(std::tan(s.phi), 1.0 / 2.0, 1e-12);
    EXPECT_THROW((void)transform_3d(d, 0.0, 1.0, 1.0), DomainError);
    EXPECT_THROW((void)transform_3d(d, 1.0, -1.0, 1.0), DomainError);
}

TEST(Cds3d, FacesAttachToTheRightNames) {
    for (const auto* c : {&octant(), &correlated()}) {
        const auto& d = c->d;
        const auto near_x = transform_3d(d, 1e-6, 1.0, 1.0);
        const auto near_y = transform_3d(d, 1.0, 1e-6, 1.0);
        const auto near_z = transform_3d(d, 1.0, 1.0, 1e-6);
        EXPECT_NEAR(near_x.phi, 0.0, 1e-5);
        EXPECT_NEAR(near_y.phi, d.varpi, 1e-5);
        EXPECT_NEAR(near_z.theta, domain3d::theta_max(d, near_z.phi), 1e-5);
    }
}

TEST(Cds3d, SurvivalFactorisesAtZeroCorrelation) {
    const auto g = green(octant(), kX, kY, kZ, 50);
    for (double tau : {0.25, 1.0, 2.0, 5.0, 10.0}) {
        const double expect = cds1d::survival_1d(tau, kX) * cds1d::survival_1d(tau, kY) * cds1d::survival_1d(tau, kZ);
        SeriesReport rep;
        const double s = survival_3d(tau, g, &rep);
        EXPECT_NEAR(s / expect, 1.0, 0.01) << tau;
        EXPECT_FALSE(rep.out_of_range);
    }
}

TEST(Cds3d, SurvivalInsensitiveToTermsBeyondFifty) {
    const auto g50 = green(octant(), kX, kY, kZ, 50);
    const auto g80 = green(octant(), kX, kY, kZ, 80);
    for (double tau : {0.25, 1.0, 5.0, 10.0}) {
        EXPECT_NEAR(survival_3d(tau, g50) / survival_3d(tau, g80), 1.0, 1e-3) << tau;
    }
    // The wider correlated domain packs its spectrum more densely.
    const auto c50 = green(correlated(), kX, kY, kZ, 50);
    const auto c80 = green(correlated(), kX, kY, kZ, 80);
    for (double tau : {1.0, 5.0, 10.0}) {
        EXPECT_NEAR(survival_3d(tau, c50) / survival_3d(tau, c80), 1.0, 1e-3) << tau;
    }
}

TEST(Cds3d, SurvivalTrivialLimits) {
    const auto g = green(octant(), kX, kY, kZ, 50);
    EXPECT_EQ(survival_3d(0.0, g), 1.0);
    const auto tiny = green(octant(), 1e-4, 1e-4, 1e-4, 50);
    EXPECT_LT(survival_3d(1.0, tiny), 1e-6);
}

TEST(Cds3d, RadialIntegralMatchesSurvivalTerms) {
    const auto g = green(correlated(), kX, kY, kZ, 50);
    const double tau = 2.0;
    const double r0 = g.source().r;
    std::vector<double> rad;
    std::vector<double> moments(static_cast<std::size_t>(g.terms()), 0.0);
    const auto rule = quad::composite_gauss_legendre(20, 64, 0.0, r0 + 12.0 * std::sqrt(tau));
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        g.radial(tau, rule.nodes[i], rad);
        for (std::size_t n = 0; n < rad.size(); ++n) moments[n] += rule.weights[i] * rule.nodes[i] * rule.nodes[i] * rad[n];
    }
    double sum = 0.0;
    for (int n = 0; n < g.terms(); ++n) {
        sum += moments[static_cast<std::size_t>(n)] * g.psi_source(n) * g.basis().sin_integrals[static_cast<std::size_t>(n)];
    }
    SeriesReport rep;
    (void)survival_3d(tau, g, &rep);
    EXPECT_NEAR(sum, rep.raw, 1e-10);
}

TEST(Cds3d, GreensFunctionIsSymmetric) {
    const auto& c = correlated();
    const auto a = transform_3d(c.d, 1.2, 2.0, 1.7);
    const auto b = transform_3d(c.d, 0.9, 1.1, 2.5);
    const Green3d ga(c.d, c.basis, a, 50), gb(c.d, c.basis, b, 50);
    for (double tau : {0.5, 2.0}) {
        const double ab = green_3d(tau, ga, b), ba = green_3d(tau, gb, a);
        EXPECT_GT(ab, 0.0);
        EXPECT_NEAR(ab, ba, 1e-12 * std::abs(ab) + 1e-15);
    }
}

// Tolerance covers the P1 interpolation of the modes near the corners.
TEST(Cds3d, SurvivalMonotoneScan) {
    const auto& c = correlated();
    const double vals[] = {1.0, 2.0, 3.0};
    for (double x : vals) {
        for (double y : vals) {
            for (double z : vals) {
                const auto g = green(c, x, y, z);
                double prev = 1.0;
                for (double tau : {0.5, 1.0, 2.0, 4.0}) {
                    const double s = survival_3d(tau, g);
                    EXPECT_LE(s, prev + 1e-9);
                    prev = s;
                    const double tol = 1e-2 * s;
                    EXPECT_LE(s, survival_3d(tau, green(c, x + 0.5, y, z)) + tol);
                    EXPECT_LE(s, survival_3d(tau, green(c, x, y + 0.5, z)) + tol);
                    EXPECT_LE(s, survival_3d(tau, green(c, x, y, z + 0.5)) + tol);
                }
            }
        }
    }
}

TEST(Cds3d, SurvivalBelowPairwiseAndMarginals) {
    const auto& c = correlated();
    const auto& r = c.d.rho;
    const auto g = green(c, kX, kY, kZ, 50);
    for (double tau : {1.0, 2.0, 5.0}) {
        const double s3 = survival_3d(tau, g);
        const double s2 = std::min({cds2d::survival_2d_1f1(tau, kX, kY, r.rho_xy),
                                    cds2d::survival_2d_1f1(tau, kX, kZ, r.rho_xz),
                                    cds2d::survival_2d_1f1(tau, kY, kZ, r.rho_yz)});
        const double s1 = std::min({cds1d::survival_1d(tau, kX), cds1d::survival_1d(tau, kY),
                                    cds1d::survival_1d(tau, kZ)});
        EXPECT_LE(s3, s2 * (1.0 + 1e-3)) << tau;
        EXPECT_LE(s2, s1 + 1e-12) << tau;
    }
}

TEST(Cds3d, FirstModeFluxIsInwardOnEveryFace) {
    const auto g = green(octant(), kX, kY, kZ);
    for (Face f : {Face::Seller, Face::Reference}) {
        const auto s = side_face_samples(g, f);
        ASSERT_FALSE(s.empty());
        for (const auto& p : s) EXPECT_GE(p.flux[0], -1e-12);
    }
    const auto b = buyer_face_samples(g);
    ASSERT_FALSE(b.chart.empty());
    EXPECT_TRUE(b.omega.empty());
    for (const auto& p : b.chart) EXPECT_GE(p.flux[0], -1e-12);
}

TEST(Cds3d, FaceFluxMethodsAgree) {
    const auto g = green(octant(), kX, kY, kZ);
    Quadrature3d grad;
    grad.flux = FluxMethod::Gradient;
    for (Face f : {Face::Seller, Face::Reference, Face::Buyer}) {
        const double a = first_default_probability(5.0, g, f);
        const double b = first_default_probability(5.0, g, f, grad);
        EXPECT_NEAR(a / b, 1.0, 0.02);
    }
}

TEST(Cds3d, FirstDefaultMatchesIndependentOracle) {
    const auto g = green(octant(), kX, kY, kZ);
    for (double horizon : {1.0, 5.0, 10.0}) {
        EXPECT_NEAR(first_default_probability(horizon, g, Face::Seller) /
                        first_default_independent(horizon, kX, kY, kZ), 1.0, 5e-3);
        EXPECT_NEAR(first_default_probability(horizon, g, Face::Reference) /
                        first_default_independent(horizon, kY, kX, kZ), 1.0, 0.02);
        EXPECT_NEAR(first_default_probability(horizon, g, Face::Buyer) /
                        first_default_independent(horizon, kZ, kX, kY), 1.0, 5e-3);
    }
}

TEST(Cds3d, ProbabilityIsConserved) {
    for (const auto* c : {&octant(), &correlated()}) {
        const auto g = green(*c, kX, kY, kZ);
        for (double horizon : {0.25, 1.0, 5.0, 10.0}) {
            double total = survival_3d(horizon, g);
            for (Face f : {Face::Seller, Face::Reference, Face::Buyer}) total += first_default_probability(horizon, g, f);
            EXPECT_NEAR(total, 1.0, 2e-3) << horizon;
        }
    }
}

TEST(Cds3d, AdjustmentsMatchIndependentOracle) {
    const auto g = green(octant(), kX, kY, kZ);
    const auto terms = five_year();
    const double cva = cva_3d(terms, g);
    const double dva = dva_3d(terms, g);
    EXPECT_NEAR(cva / (0.6 * independent_adjustment(terms, kX, kY, kZ, true)), 1.0, 0.01);
    EXPECT_NEAR(dva / (0.6 * independent_adjustment(terms, kZ, kY, kX, false)), 1.0, 0.01);
}

TEST(Cds3d, AdjustmentTrivialLimits) {
    auto terms = five_year();
    const auto riskless = green(octant(), 20.0, kY, 20.0);
    EXPECT_LT(cva_3d(terms, riskless), 1e-12);
    EXPECT_LT(dva_3d(terms, riskless), 1e-12);
    const auto g = green(octant(), kX, kY, kZ);
    EXPECT_GT(cva_3d(terms, g), 0.0);
    EXPECT_GT(dva_3d(terms, g), 0.0);
    terms.recovery_ps = 1.0;
    terms.recovery_pb = 1.0;
    EXPECT_EQ(cva_3d(terms, g), 0.0);
    EXPECT_EQ(dva_3d(terms, g), 0.0);
}

TEST(Cds3d, CvaFallsAsSellerGetsSafer) {
    const auto terms = five_year();
    double prev = cva_3d(terms, green(correlated(), 2.0, kY, kZ));
    for (double x : {3.0, 4.0, 6.0}) {
        const double v = cva_3d(terms, green(correlated(), x, kY, kZ));
        EXPECT_LT(v, prev);
        prev = v;
    }
}

TEST(Cds3d, BreakevenOrderingAtZeroCorrelation) {
    const auto terms = five_year();
    const auto b = breakeven_coupons_3d(terms, green(octant(), kX, kY, kZ));
    EXPECT_NEAR(b.risk_free, terms.coupon, 1e-10);
    EXPECT_LT(b.cva_only, b.risk_free);
    EXPECT_GT(b.dva_only, b.risk_free);
    EXPECT_GT(b.bilateral, b.cva_only);
    EXPECT_LT(b.bilateral, b.dva_only);
    EXPECT_EQ(breakeven_coupon_3d(terms, green(octant(), kX, kY, kZ)), b.bilateral);
}

TEST(Cds3d, RisklessCounterpartiesGiveRiskFreeCoupon) {
    const auto terms = five_year();
    const auto b = breakeven_coupons_3d(terms, green(octant(), 20.0, kY, 20.0));
    EXPECT_NEAR(b.bilateral, terms.coupon, 1e-8);
}

TEST(Cds3d, ReducesToTwoDimensionsForDistantBuyer) {
    static const Case c = make_case({0.5, 0.0, 0.0});
    const auto terms = five_year();
    const double z0 = 5.0;
    const double c3 = cva_3d(terms, green(c, kX, kY, z0));
    const double c2 = cds2d::cva_2d(terms, kX, kY, 0.5);
    // The buyer survives with probability erf(5 / sqrt(10)) ~ 0.989 over the life.
    EXPECT_LT(c3 / c2, 1.0 + 5e-3);
    EXPECT_GT(c3 / c2, 0.97);
}

TEST(Cds3d, ShortMaturityAdjustmentsStayNonnegative) {
    const auto g = green(correlated(), kX, kY, kZ);
    for (double maturity : {0.25, 0.5}) {
        auto terms = five_year();
        terms.maturity = maturity;
        terms.coupon = cds1d::breakeven_coupon_1d(maturity, kY, terms.rate, 0.4);
        EXPECT_GE(cva_3d(terms, g), 0.0);
        EXPECT_GE(dva_3d(terms, g), 0.0);
        const auto b = breakeven_coupons_3d(terms, g);
        EXPECT_LE(b.cva_only, b.risk_free);
        EXPECT_GE(b.dva_only, b.risk_free);
    }
}

TEST(Cds3d, OneYearAdjustmentsMatchIndependentOracle) {
    const auto g = green(octant(), kX, kY, kZ);
    auto terms = five_year();
    terms.maturity = 1.0;
    terms.coupon = cds1d::breakeven_coupon_1d(1.0, kY, terms.rate, 0.4);
    EXPECT_NEAR(cva_3d(terms, g) / (0.6 * independent_adjustment(terms, kX, kY, kZ, true)), 1.0, 0.03);
    EXPECT_NEAR(dva_3d(terms, g) / (0.6 * independent_adjustment(terms, kZ, kY, kX, false)), 1.0, 0.03);
}
