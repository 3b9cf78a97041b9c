#include "greenxva/model.hpp"

#include <cmath>
#include <sstream>

#include "greenxva/error.hpp"

namespace greenxva::model {

double distance_to_default(const FirmInput& firm) {
    const double barrier = firm.recovery * firm.l0;
    if (barrier <= 0.0) throw DomainError("distance_to_default: R * L0 must be positive");
    if (!(firm.sigma > 0.0)) throw DomainError("distance_to_default: sigma must be positive");
    return std::log((firm.s0 + barrier) / barrier) / firm.sigma;
}

DriverState driver_from_calibration(const CalibratedFirm& firm,
                                    InitialValueConvention convention) {
    if (!(firm.sigma > 0.0)) throw DomainError("driver_from_calibration: sigma must be positive");
    if (convention == InitialValueConvention::DistanceToDefault) return {firm.initial_value};
    return {firm.initial_value / firm.sigma};
}

double chi_squared(const CorrelationTriple& r) {
    return 1.0 - r.rho_xy * r.rho_xy - r.rho_xz * r.rho_xz - r.rho_yz * r.rho_yz +
           2.0 * r.rho_xy * r.rho_xz * r.rho_yz;
}

void validate_pair_correlation(double rho) {
    if (!(std::abs(rho) <= 1.0 - kRhoBoundTol)) {
        std::ostringstream os;
        os << "correlation " << rho << " outside (-1, 1)";
        throw CorrelationError(os.str());
    }
}

double validate_correlation(const CorrelationTriple& r) {
    validate_pair_correlation(r.rho_xy);
    validate_pair_correlation(r.rho_xz);
    validate_pair_correlation(r.rho_yz);
    const double chi2 = chi_squared(r);
    if (!(chi2 > kChiSquaredTol)) {
        std::ostringstream os;
        os << "correlation triple (" << r.rho_xy << ", " << r.rho_xz << ", " << r.rho_yz
           << ") is not positive definite, chi^2 = " << chi2;
        throw CorrelationError(os.str());
    }
    return std::sqrt(chi2);
}

CalibratedFirm sample_protection_seller() { return {"X", 0.0359, 0.0244, 0.50}; }
CalibratedFirm sample_reference_name() { return {"Y", 0.3035, 0.1045, 0.40}; }
CalibratedFirm sample_protection_buyer() { return {"Z", 0.1199, 0.0630, 0.40}; }

}  // namespace greenxva::model
