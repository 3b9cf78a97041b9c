#pragma once

namespace greenxva::cds1d {

// Density of a driver started at y0 > 0, killed at 0, observed at y after
// time tau (method of images).
[[nodiscard]] double green_1d_images(double tau, double y0, double y);

// The same density from its sine-transform representation, truncated at
// k_max and integrated with n_nodes Gauss-Legendre nodes. Throws
// ConvergenceError if the neglected tail e^{-k_max^2 tau/2} exceeds 1e-12.
[[nodiscard]] double green_1d_integral(double tau, double y0, double y, double k_max,
                                       int n_nodes);

// Probability that the driver has not hit 0 by tau.
[[nodiscard]] double survival_1d(double tau, double y0);

// Risky annuity int_0^tau e^{-rate s} Q(s, y0) ds.
[[nodiscard]] double annuity_1d(double tau, double y0, double rate);

// Present value of the protection leg per unit notional.
[[nodiscard]] double default_leg_1d(double tau, double y0, double rate, double recovery);

// Both legs in the form V(c) = -c * annuity + protection_net, where
// protection_net already contains the rate * (1 - R) * annuity accrual term.
struct CdsLegs {
    double annuity = 0.0;
    double protection_net = 0.0;
    [[nodiscard]] double value(double coupon) const { return -coupon * annuity + protection_net; }
};

[[nodiscard]] CdsLegs cds_legs_1d(double tau, double y0, double rate, double recovery);

// Value to the protection buyer of a CDS with remaining life tau.
[[nodiscard]] double cds_value_1d(double tau, double y0, double coupon, double rate,
                                  double recovery);

// Coupon making the CDS worth zero. Throws DomainError when y0 <= 0.
[[nodiscard]] double breakeven_coupon_1d(double tau, double y0, double rate, double recovery);

}  // namespace greenxva::cds1d
