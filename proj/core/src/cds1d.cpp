#include "greenxva/cds1d.hpp"

#include <cmath>
#include <numbers>

#include "greenxva/error.hpp"
#include "greenxva/quadrature.hpp"
#include "greenxva/specfun.hpp"

namespace greenxva::cds1d {

using specfun::log_norm_cdf;
using specfun::norm_cdf;

namespace {

// Below this rate the closed form loses digits to cancellation (error ~
// 1e-16 / rate); the annuity is then the zero-rate value plus a quadrature
// of the small discounting correction.
constexpr double kCorrectionRate = 1e-4;

// int_0^tau (2 N(y0/sqrt(s)) - 1) ds
double annuity_zero_rate(double tau, double y0) {
    const double st = std::sqrt(tau);
    return tau - (tau + y0 * y0) * 2.0 * norm_cdf(-y0 / st) +
           y0 * std::sqrt(2.0 * tau / std::numbers::pi) * std::exp(-y0 * y0 / (2.0 * tau));
}

}  // namespace

double green_1d_images(double tau, double y0, double y) {
    if (!(tau > 0.0)) throw DomainError("green_1d_images: tau must be positive");
    if (y <= 0.0 || y0 <= 0.0) return 0.0;
    const double norm = 1.0 / std::sqrt(2.0 * std::numbers::pi * tau);
    // e^{-(y-y0)^2/2tau} (1 - e^{-2 y y0 / tau})
    return norm * std::exp(-(y - y0) * (y - y0) / (2.0 * tau)) * -std::expm1(-2.0 * y * y0 / tau);
}

double green_1d_integral(double tau, double y0, double y, double k_max, int n_nodes) {
    if (!(tau > 0.0)) throw DomainError("green_1d_integral: tau must be positive");
    if (std::exp(-k_max * k_max * tau / 2.0) > 1e-12) {
        throw ConvergenceError("green_1d_integral: k_max too small for tau");
    }
    const int per_panel = 16;
    const int panels = std::max(1, n_nodes / per_panel);
    const auto rule = quad::composite_gauss_legendre(per_panel, panels, 0.0, k_max);
    double sum = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        const double k = rule.nodes[i];
        sum += rule.weights[i] * std::exp(-k * k * tau / 2.0) * std::sin(k * y0) * std::sin(k * y);
    }
    return 2.0 / std::numbers::pi * sum;
}

double survival_1d(double tau, double y0) {
    if (y0 <= 0.0) return 0.0;
    if (tau <= 0.0) return 1.0;
    return std::erf(y0 / std::sqrt(2.0 * tau));
}

namespace {

// int_0^tau e^{-rate s} f(s) ds with f the first-passage density of 0.
double discounted_default_probability(double tau, double y0, double rate) {
    const double st = std::sqrt(tau);
    const double a = -y0 / st;
    if (rate <= 0.0) return std::erfc(y0 / (std::numbers::sqrt2 * st));
    const double s = std::sqrt(2.0 * rate);
    return std::exp(y0 * s + log_norm_cdf(a - s * st)) +
           std::exp(-y0 * s + log_norm_cdf(a + s * st));
}

}  // namespace

double annuity_1d(double tau, double y0, double rate) {
    if (tau <= 0.0 || y0 <= 0.0) return 0.0;
    if (rate <= 0.0) return annuity_zero_rate(tau, y0);
    if (rate < kCorrectionRate) {
        const double corr = quad::integrate_adaptive(
            [&](double s) {
                const double q = s > 0.0 ? std::erf(y0 / std::sqrt(2.0 * s)) : 1.0;
                return std::expm1(-rate * s) * q;
            },
            0.0, tau, 1e-300, 1e-12);
        return annuity_zero_rate(tau, y0) + corr;
    }
    const double tail = std::erfc(y0 / std::sqrt(2.0 * tau));
    const double df = std::exp(-rate * tau);
    return (-std::expm1(-rate * tau) + df * tail - discounted_default_probability(tau, y0, rate)) /
           rate;
}

double default_leg_1d(double tau, double y0, double rate, double recovery) {
    if (tau <= 0.0) return 0.0;
    if (y0 <= 0.0) return 1.0 - recovery;
    return (1.0 - recovery) * discounted_default_probability(tau, y0, rate);
}

CdsLegs cds_legs_1d(double tau, double y0, double rate, double recovery) {
    CdsLegs legs;
    if (tau <= 0.0) return legs;
    legs.annuity = annuity_1d(tau, y0, rate);
    legs.protection_net = default_leg_1d(tau, y0, rate, recovery);
    return legs;
}

double cds_value_1d(double tau, double y0, double coupon, double rate, double recovery) {
    return cds_legs_1d(tau, y0, rate, recovery).value(coupon);
}

double breakeven_coupon_1d(double tau, double y0, double rate, double recovery) {
    if (y0 <= 0.0) throw DomainError("breakeven_coupon_1d: reference name already in default");
    if (!(tau > 0.0)) throw DomainError("breakeven_coupon_1d: maturity must be positive");
    const double a = annuity_1d(tau, y0, rate);
    return default_leg_1d(tau, y0, rate, recovery) / a;
}

}  // namespace greenxva::cds1d
