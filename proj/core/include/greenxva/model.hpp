#pragma once

#include <cmath>
#include <string>

namespace greenxva::model {

// Structural description of one firm: equity s0, liability l0, recovery R,
// asset volatility sigma.
struct FirmInput {
    double s0 = 0.0;
    double l0 = 0.0;
    double recovery = 0.0;
    double sigma = 0.0;
};

// Dimensionless distance of one driver from its default barrier, in units of
// sqrt(time).
struct DriverState {
    double x0 = 0.0;
};

// Calibrated firm as tabulated by a data vendor: initial log distance
// ln(a0/l0), annualised asset volatility, recovery.
struct CalibratedFirm {
    std::string name;
    double initial_value = 0.0;
    double sigma = 0.0;
    double recovery = 0.0;
};

enum class InitialValueConvention {
    LogDistance,       // initial_value = ln(a0/l0), so x0 = initial_value / sigma
    DistanceToDefault  // initial_value is already x0
};

[[nodiscard]] double distance_to_default(const FirmInput& firm);

[[nodiscard]] DriverState driver_from_calibration(
    const CalibratedFirm& firm,
    InitialValueConvention convention = InitialValueConvention::LogDistance);

// Pairwise correlations of the protection seller (x), reference name (y) and
// protection buyer (z).
struct CorrelationTriple {
    double rho_xy = 0.0;
    double rho_xz = 0.0;
    double rho_yz = 0.0;
};

inline constexpr double kRhoBoundTol = 1e-6;
inline constexpr double kChiSquaredTol = 1e-10;

// 1 - rho_xy^2 - rho_xz^2 - rho_yz^2 + 2 rho_xy rho_xz rho_yz
[[nodiscard]] double chi_squared(const CorrelationTriple& rho);

// Returns chi = sqrt(chi^2). Throws CorrelationError unless every
// |rho| <= 1 - kRhoBoundTol and chi^2 > kChiSquaredTol.
[[nodiscard]] double validate_correlation(const CorrelationTriple& rho);

// Pairwise check used by the two-name formulas.
void validate_pair_correlation(double rho);

// Contract terms: maturity T, coupon c, flat short rate, recoveries of the
// reference name, protection seller and protection buyer.
struct CdsTerms {
    double maturity = 5.0;
    double coupon = 0.0;
    double rate = 0.0;
    double recovery_rn = 0.4;
    double recovery_ps = 0.4;
    double recovery_pb = 0.4;
};

// Flat-rate discount factor e^{-rate t}.
[[nodiscard]] inline double discount(double rate, double t) noexcept { return std::exp(-rate * t); }

// Sample names: protection seller X, reference name Y, protection buyer Z.
[[nodiscard]] CalibratedFirm sample_protection_seller();
[[nodiscard]] CalibratedFirm sample_reference_name();
[[nodiscard]] CalibratedFirm sample_protection_buyer();

}  // namespace greenxva::model

