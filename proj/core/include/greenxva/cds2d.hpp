#pragma once

#include <utility>

#include "greenxva/adjustment.hpp"
#include "greenxva/model.hpp"

namespace greenxva::cds2d {

// Polar coordinates in the wedge 0 <= phi <= varpi obtained by decorrelating
// two drivers (x, y). The face phi = varpi is x = 0, the face phi = 0 is y = 0.
struct WedgePoint {
    double r = 0.0;
    double phi = 0.0;
};

struct Wedge {
    double rho = 0.0;
    double rho_bar = 1.0;
    double varpi = 0.0;  // arccos(-rho)
};

[[nodiscard]] Wedge make_wedge(double rho);
[[nodiscard]] WedgePoint to_wedge(double x, double y, double rho);
// Inverse of to_wedge, returns (x, y).
[[nodiscard]] std::pair<double, double> from_wedge(const WedgePoint& p, double rho);

// Truncation report for the Bessel series.
struct SeriesInfo {
    int terms = 0;
    bool truncated = false;
};

// Transition density of the decorrelated pair killed on both faces, with
// respect to r dr dphi, from its eigenfunction expansion.
[[nodiscard]] double green_2d_eigen(double tau, const WedgePoint& src, const WedgePoint& tgt,
                                    double rho, int max_terms = 500, SeriesInfo* info = nullptr);

// The same density assembled from images of the kernel H.
[[nodiscard]] double green_2d_images(double tau, const WedgePoint& src, const WedgePoint& tgt,
                                     double rho);

// Angular factor h(p, psi) of the image kernel.
[[nodiscard]] double h_kernel(double p, double psi);

// Image kernel H(tau, r0, r, psi), and its split form H1 - H2.
[[nodiscard]] double image_kernel(double tau, double r0, double r, double psi);
[[nodiscard]] double image_kernel_split(double tau, double r0, double r, double psi);

// Joint survival of both names to tau.
[[nodiscard]] double survival_2d_bessel(double tau, double x0, double y0, double rho,
                                        SeriesInfo* info = nullptr);
[[nodiscard]] double survival_2d_1f1(double tau, double x0, double y0, double rho,
                                     SeriesInfo* info = nullptr);

// Flux of the transition density through the face phi = varpi (x = 0),
// i.e. dG/dphi there.
[[nodiscard]] double green_2d_flux(double tau, const WedgePoint& src, double r, double rho,
                                   int max_terms = 500);

struct Quadrature2d {
    int time_nodes = 64;
    int radial_nodes = 200;
    double width = 8.0;  // radial window half-width in units of sqrt(tau)
};

// Kernel over the x = 0 face for a counterparty driver x against the
// reference name y. Weights include the 1/2 flux factor and discounting.
[[nodiscard]] AdjustmentKernel counterparty_kernel_2d(const model::CdsTerms& terms, double x0,
                                                      double y0, double rho,
                                                      const Quadrature2d& q = {});

// Unilateral adjustments for a risky protection seller (CVA, driver x) and a
// risky protection buyer (DVA, driver z), at terms.coupon.
[[nodiscard]] double cva_2d(const model::CdsTerms& terms, double x0, double y0, double rho_xy,
                            const Quadrature2d& q = {});
[[nodiscard]] double dva_2d(const model::CdsTerms& terms, double z0, double y0, double rho_yz,
                            const Quadrature2d& q = {});

[[nodiscard]] double breakeven_coupon_cva_2d(const model::CdsTerms& terms, double x0, double y0,
                                             double rho_xy, const Quadrature2d& q = {});
[[nodiscard]] double breakeven_coupon_dva_2d(const model::CdsTerms& terms, double z0, double y0,
                                             double rho_yz, const Quadrature2d& q = {});

}  // namespace greenxva::cds2d
