#include "greenxva/cds2d.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "greenxva/cds1d.hpp"
#include "greenxva/error.hpp"
#include "greenxva/quadrature.hpp"
#include "greenxva/specfun.hpp"

namespace greenxva::cds2d {

using specfun::bessel_i_scaled;
using std::numbers::pi;

namespace {

constexpr double kSeriesRelTol = 1e-17;
constexpr int kSurvivalMaxTerms = 20000;

// cosh(x) - cos(q) without cancellation near x = q = 0.
double cosh_minus_cos(double x, double q) {
    const double a = std::sinh(0.5 * x);
    const double b = std::sin(0.5 * q);
    return 2.0 * (a * a + b * b);
}

double sign(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

// int_0^inf e^{-p (cosh(q u) - cos q)} / (1 + u^2) du, via u = tan(t).
double angular_integral(double p, double q) {
    if (p == 0.0 || q == 0.0) return 0.5 * pi;
    auto f = [p, q](double t) {
        if (t >= 0.5 * pi) return 0.0;
        const double x = std::abs(q) * std::tan(t);
        if (x > 700.0) return 0.0;
        return std::exp(-p * cosh_minus_cos(x, q));
    };
    return quad::integrate_adaptive(f, 0.0, 0.5 * pi, 1e-15, 1e-13, 4000);
}

// Sum over wedge eigenmodes with Bessel weights, stopping once the scaled
// Bessel factor is negligible against the first one.
template <class Coef>
double bessel_mode_sum(double p, double varpi, int max_terms, Coef coef, SeriesInfo* info) {
    double sum = 0.0;
    const double i_first = bessel_i_scaled(pi / varpi, p);
    int n = 1;
    bool truncated = false;
    if (i_first > 0.0) {
        for (; n <= max_terms; ++n) {
            const double nu = n * pi / varpi;
            const double iv = n == 1 ? i_first : bessel_i_scaled(nu, p);
            sum += iv * coef(n, nu);
            if (iv <= kSeriesRelTol * i_first) break;
        }
        if (n > max_terms) {
            --n;
            const double nu = n * pi / varpi;
            truncated = bessel_i_scaled(nu, p) > 1e-12 * std::max(std::abs(sum), i_first * 1e-300);
        }
    }
    if (info) {
        info->terms = n;
        info->truncated = truncated;
    }
    return sum;
}

}  // namespace

Wedge make_wedge(double rho) {
    model::validate_pair_correlation(rho);
    return {rho, std::sqrt(1.0 - rho * rho), std::acos(-rho)};
}

WedgePoint to_wedge(double x, double y, double rho) {
    const Wedge w = make_wedge(rho);
    const double a = x;
    const double b = (y - rho * x) / w.rho_bar;
    WedgePoint p;
    p.r = std::hypot(a, b);
    p.phi = p.r == 0.0 ? 0.0 : w.varpi + std::atan2(-a, b);
    return p;
}

std::pair<double, double> from_wedge(const WedgePoint& p, double rho) {
    const Wedge w = make_wedge(rho);
    const double a = -p.r * std::sin(p.phi - w.varpi);
    const double b = p.r * std::cos(p.phi - w.varpi);
    return {a, rho * a + w.rho_bar * b};
}

double green_2d_eigen(double tau, const WedgePoint& src, const WedgePoint& tgt, double rho,
                      int max_terms, SeriesInfo* info) {
    if (!(tau > 0.0)) throw DomainError("green_2d_eigen: tau must be positive");
    const Wedge w = make_wedge(rho);
    const double p = src.r * tgt.r / tau;
    if (p == 0.0) return 0.0;
    const double s = bessel_mode_sum(
        p, w.varpi, max_terms,
        [&](int, double nu) { return std::sin(nu * tgt.phi) * std::sin(nu * src.phi); }, info);
    const double dr = tgt.r - src.r;
    return 2.0 / (w.varpi * tau) * std::exp(-dr * dr / (2.0 * tau)) * s;
}

double green_2d_flux(double tau, const WedgePoint& src, double r, double rho, int max_terms) {
    if (!(tau > 0.0)) throw DomainError("green_2d_flux: tau must be positive");
    const Wedge w = make_wedge(rho);
    const double p = src.r * r / tau;
    if (p == 0.0) return 0.0;
    const double s = bessel_mode_sum(
        p, w.varpi, max_terms,
        [&](int n, double nu) { return nu * (n % 2 == 0 ? 1.0 : -1.0) * std::sin(nu * src.phi); },
        nullptr);
    const double dr = r - src.r;
    return 2.0 / (w.varpi * tau) * std::exp(-dr * dr / (2.0 * tau)) * s;
}

double h_kernel(double p, double psi) {
    if (p < 0.0) throw DomainError("h_kernel: p must be non-negative");
    const double sp = sign(pi + psi);
    const double sm = sign(pi - psi);
    double j = 0.0;
    if (sp != 0.0) j += sp * angular_integral(p, pi + psi);
    if (sm != 0.0) j += sm * angular_integral(p, pi - psi);
    return 0.5 * (sp + sm) - j / pi;
}

double image_kernel(double tau, double r0, double r, double psi) {
    const double p = r * r0 / tau;
    const double e = (r * r + r0 * r0 - 2.0 * r * r0 * std::cos(psi)) / (2.0 * tau);
    return std::exp(-e) / (2.0 * pi * tau) * h_kernel(p, psi);
}

double image_kernel_split(double tau, double r0, double r, double psi) {
    const double p = r * r0 / tau;
    const double base = (r * r + r0 * r0) / (2.0 * tau);
    const double sp = sign(pi + psi);
    const double sm = sign(pi - psi);
    const double h1 = 0.5 * (sp + sm) * std::exp(-base + p * std::cos(psi)) / (2.0 * pi * tau);
    auto g = [&](double q) {
        auto f = [&, q](double t) {
            if (t >= 0.5 * pi) return 0.0;
            const double x = std::abs(q) * std::tan(t);
            if (x > 700.0) return 0.0;
            return std::exp(-base - p * std::cosh(x));
        };
        return quad::integrate_adaptive(f, 0.0, 0.5 * pi, 1e-300, 1e-13, 4000);
    };
    double j = 0.0;
    if (sp != 0.0) j += sp * g(pi + psi);
    if (sm != 0.0) j += sm * g(pi - psi);
    return h1 - j / (2.0 * pi * pi * tau);
}

namespace {

constexpr int kTailMoments = 9;

// digamma for x >= 6 by its asymptotic series.
double digamma_large(double x) {
    const double i2 = 1.0 / (x * x);
    return std::log(x) - 0.5 / x -
           i2 * (1.0 / 12.0 - i2 * (1.0 / 120.0 - i2 * (1.0 / 252.0 - i2 * (1.0 / 240.0 - i2 / 132.0))));
}

// Hurwitz zeta(s, x) for s >= 2 and x >= 6 by Euler-Maclaurin.
double hurwitz_zeta_large(double s, double x) {
    static constexpr double kB[] = {1.0 / 6.0, -1.0 / 30.0, 1.0 / 42.0, -1.0 / 30.0,
                                    5.0 / 66.0, -691.0 / 2730.0, 7.0 / 6.0};
    double sum = std::pow(x, 1.0 - s) / (s - 1.0) + 0.5 * std::pow(x, -s);
    double rising = s;       // s (s+1) ... (s+2j-2)
    double fact = 2.0;       // (2j)!
    double xp = std::pow(x, -s - 1.0);
    for (int j = 1; j <= 7; ++j) {
        sum += kB[j - 1] / fact * rising * xp;
        rising *= (s + 2.0 * j - 1.0) * (s + 2.0 * j);
        fact *= (2.0 * j + 1.0) * (2.0 * j + 2.0);
        xp /= x * x;
    }
    return sum;
}

// sum_{n > n0} [(a1 + d n)^{-s} - (a2 + d n)^{-s}]
double progression_difference(int s, double a1, double a2, double d, int n0) {
    const double x1 = n0 + 1 + a1 / d;
    const double x2 = n0 + 1 + a2 / d;
    if (s == 1) return (digamma_large(x2) - digamma_large(x1)) / d;
    return std::pow(d, -s) * (hurwitz_zeta_large(s, x1) - hurwitz_zeta_large(s, x2));
}

}  // namespace

double green_2d_images(double tau, const WedgePoint& src, const WedgePoint& tgt, double rho) {
    if (!(tau > 0.0)) throw DomainError("green_2d_images: tau must be positive");
    const Wedge w = make_wedge(rho);
    const int n_images = static_cast<int>(std::ceil(8.0 * pi / w.varpi));
    double sum = 0.0;
    for (int n = -n_images; n <= n_images; ++n) {
        sum += image_kernel(tau, src.r, tgt.r, tgt.phi - src.phi - 2.0 * n * w.varpi);
        sum -= image_kernel(tau, src.r, tgt.r, tgt.phi + src.phi - 2.0 * n * w.varpi);
    }

    // Remote images all have |psi| > pi, where H depends on psi only through
    // J(|psi| - pi) - J(|psi| + pi) with J(q) = sum_k (-1)^k m_2k q^{-2k-1}
    // and m_2k = int_0^inf u^{2k} e^{-p (cosh u - 1)} du. The image tail is
    // then a combination of Hurwitz zeta tails.
    const double p = src.r * tgt.r / tau;
    if (p == 0.0) return sum;
    const double scale = std::exp(-(src.r + tgt.r) * (src.r + tgt.r) / (2.0 * tau)) /
                         (2.0 * pi * pi * tau);
    if (scale == 0.0) return sum;
    const double d = 2.0 * w.varpi;
    double tail = 0.0;
    for (int k = 0; k < kTailMoments; ++k) {
        const double m2k = quad::integrate_adaptive(
            [p, k](double u) {
                const double c = std::cosh(u) - 1.0;
                if (p * c > 745.0) return 0.0;
                return std::pow(u, 2 * k) * std::exp(-p * c);
            },
            0.0, std::acosh(1.0 + 745.0 / p) + 1.0, 1e-300, 1e-12, 4000);
        double seq = 0.0;
        for (double sgn : {1.0, -1.0}) {
            const double off = tgt.phi - sgn * src.phi;
            // n -> +inf: |psi| = d n - off; n -> -inf: |psi| = d n + off.
            const double t = progression_difference(2 * k + 1, -off - pi, -off + pi, d, n_images) +
                             progression_difference(2 * k + 1, off - pi, off + pi, d, n_images);
            seq += sgn * t;
        }
        tail += (k % 2 == 0 ? 1.0 : -1.0) * m2k * seq;
    }
    return sum + scale * tail;
}

double survival_2d_bessel(double tau, double x0, double y0, double rho, SeriesInfo* info) {
    if (x0 <= 0.0 || y0 <= 0.0) return 0.0;
    if (tau <= 0.0) return 1.0;
    const Wedge w = make_wedge(rho);
    const WedgePoint s = to_wedge(x0, y0, rho);
    const double arg = s.r * s.r / (4.0 * tau);
    const double pref = 2.0 * s.r / std::sqrt(2.0 * pi * tau);
    double sum = 0.0;
    int k = 0;
    for (; k < kSurvivalMaxTerms; ++k) {
        const double m = 2.0 * k + 1.0;
        const double nu = m * pi / w.varpi;
        const double lo = bessel_i_scaled(0.5 * (nu - 1.0), arg);
        const double hi = bessel_i_scaled(0.5 * (nu + 1.0), arg);
        sum += std::sin(nu * s.phi) / m * (lo + hi);
        if (pref * 2.0 * lo / m < kSeriesRelTol) break;
    }
    if (info) {
        info->terms = k + 1;
        info->truncated = k == kSurvivalMaxTerms;
    }
    return pref * sum;
}

double survival_2d_1f1(double tau, double x0, double y0, double rho, SeriesInfo* info) {
    if (x0 <= 0.0 || y0 <= 0.0) return 0.0;
    if (tau <= 0.0) return 1.0;
    const Wedge w = make_wedge(rho);
    const WedgePoint s = to_wedge(x0, y0, rho);
    const double z = s.r * s.r / (2.0 * tau);
    double sum = 0.0;
    int k = 0;
    for (; k < kSurvivalMaxTerms; ++k) {
        const double m = 2.0 * k + 1.0;
        const double nu = m * pi / w.varpi;
        const double log_radial = 0.5 * nu * std::log(z) + specfun::ln_gamma(1.0 + 0.5 * nu) -
                                  specfun::ln_gamma(1.0 + nu) +
                                  specfun::log_hyp1f1_neg(0.5 * nu, 1.0 + nu, -z);
        const double bound = 4.0 / (m * pi) * std::exp(log_radial);
        sum += bound * std::sin(nu * s.phi);
        if (bound < kSeriesRelTol && nu > 2.0 * std::sqrt(z) + 1.0) break;
    }
    if (info) {
        info->terms = k + 1;
        info->truncated = k == kSurvivalMaxTerms;
    }
    return sum;
}

AdjustmentKernel counterparty_kernel_2d(const model::CdsTerms& terms, double x0, double y0,
                                        double rho, const Quadrature2d& q) {
    const Wedge w = make_wedge(rho);
    AdjustmentKernel kernel(terms.rate, terms.recovery_rn);
    if (x0 <= 0.0 || y0 <= 0.0 || terms.maturity <= 0.0) return kernel;
    const WedgePoint src = to_wedge(x0, y0, rho);
    const double delta = w.varpi - src.phi;
    const double cos_d = std::cos(delta);
    // Nearest point of the face ray to the source, and the distance to it.
    const double centre = cos_d > 0.0 ? src.r * cos_d : 0.0;
    const double gap = cos_d > 0.0 ? src.r * std::sin(delta) : src.r;

    const auto time_rule = quad::gauss_legendre(q.time_nodes, 0.0, terms.maturity);
    for (std::size_t i = 0; i < time_rule.nodes.size(); ++i) {
        const double t = time_rule.nodes[i];
        const double half = q.width * std::sqrt(t);
        if (gap > half) continue;
        const double lo = std::max(0.0, centre - half);
        const double hi = centre + half;
        const auto radial = quad::gauss_legendre(q.radial_nodes, lo, hi);
        const double df = model::discount(terms.rate, t);
        for (std::size_t j = 0; j < radial.nodes.size(); ++j) {
            const double r = radial.nodes[j];
            const double flux = green_2d_flux(t, src, r, rho);
            const double weight = -0.5 * df * flux / r * time_rule.weights[i] * radial.weights[j];
            kernel.add(terms.maturity - t, w.rho_bar * r, weight);
        }
    }
    return kernel;
}

double cva_2d(const model::CdsTerms& terms, double x0, double y0, double rho_xy,
              const Quadrature2d& q) {
    const auto k = counterparty_kernel_2d(terms, x0, y0, rho_xy, q);
    return (1.0 - terms.recovery_ps) * k.expected_positive(terms.coupon);
}

double dva_2d(const model::CdsTerms& terms, double z0, double y0, double rho_yz,
              const Quadrature2d& q) {
    const auto k = counterparty_kernel_2d(terms, z0, y0, rho_yz, q);
    return (1.0 - terms.recovery_pb) * k.expected_negative(terms.coupon);
}

double breakeven_coupon_cva_2d(const model::CdsTerms& terms, double x0, double y0, double rho_xy,
                               const Quadrature2d& q) {
    const auto k = counterparty_kernel_2d(terms, x0, y0, rho_xy, q);
    const auto v0 = cds1d::cds_legs_1d(terms.maturity, y0, terms.rate, terms.recovery_rn);
    return solve_breakeven(v0, &k, terms.recovery_ps, nullptr, terms.recovery_pb);
}

double breakeven_coupon_dva_2d(const model::CdsTerms& terms, double z0, double y0, double rho_yz,
                               const Quadrature2d& q) {
    const auto k = counterparty_kernel_2d(terms, z0, y0, rho_yz, q);
    const auto v0 = cds1d::cds_legs_1d(terms.maturity, y0, terms.rate, terms.recovery_rn);
    return solve_breakeven(v0, nullptr, terms.recovery_ps, &k, terms.recovery_pb);
}

}  // namespace greenxva::cds2d
