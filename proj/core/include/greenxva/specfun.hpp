#pragma once

// Special functions used by the pricing formulas. All functions are pure.

namespace greenxva::specfun {

// Standard normal cdf and density.
[[nodiscard]] double norm_cdf(double x);
[[nodiscard]] double norm_pdf(double x);

// log N(x), accurate deep in the left tail where N(x) underflows.
[[nodiscard]] double log_norm_cdf(double x);

// e^{-x} I_nu(x) for nu >= 0, x >= 0. Throws DomainError otherwise.
[[nodiscard]] double bessel_i_scaled(double nu, double x);

// Confluent hypergeometric 1F1(a; b; x). Negative x goes through Kummer's
// transformation. Throws ConvergenceError if the series needs more than
// 10^4 terms.
[[nodiscard]] double hyp1f1(double a, double b, double x);

// log 1F1(a; b; x) for x <= 0 with b > 0 and b - a >= 0, where the function
// is positive. Stays finite when 1F1 itself would under- or overflow.
[[nodiscard]] double log_hyp1f1_neg(double a, double b, double x);

// log Gamma(x) for x > 0. Throws DomainError for x <= 0.
[[nodiscard]] double ln_gamma(double x);

}  // namespace greenxva::specfun
