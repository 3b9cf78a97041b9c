#include "greenxva/adjustment.hpp"

#include <algorithm>
#include <cmath>

#include "greenxva/error.hpp"

namespace greenxva {

void AdjustmentKernel::add(double remaining, double y, double weight) {
    weights_.push_back(weight);
    legs_.push_back(cds1d::cds_legs_1d(remaining, y, rate_, recovery_rn_));
}

double AdjustmentKernel::expected_positive(double coupon) const {
    double s = 0.0;
    for (std::size_t i = 0; i < weights_.size(); ++i) {
        s += weights_[i] * std::max(legs_[i].value(coupon), 0.0);
    }
    return s;
}

double AdjustmentKernel::expected_negative(double coupon) const {
    double s = 0.0;
    for (std::size_t i = 0; i < weights_.size(); ++i) {
        s += weights_[i] * std::max(-legs_[i].value(coupon), 0.0);
    }
    return s;
}

double AdjustmentKernel::total_weight() const {
    double s = 0.0;
    for (double w : weights_) s += w;
    return s;
}

double solve_breakeven(const cds1d::CdsLegs& v0, const AdjustmentKernel* cva, double recovery_ps,
                       const AdjustmentKernel* dva, double recovery_pb, double tol) {
    auto value = [&](double c) {
        double v = v0.value(c);
        if (cva) v -= (1.0 - recovery_ps) * cva->expected_positive(c);
        if (dva) v += (1.0 - recovery_pb) * dva->expected_negative(c);
        return v;
    };
    double lo = 0.0;
    double hi = 4.0 * v0.protection_net / std::max(v0.annuity, 1e-300) + 1e-300;
    if (value(lo) <= 0.0) return 0.0;
    int expand = 0;
    while (value(hi) > 0.0) {
        hi *= 2.0;
        if (++expand > 200) throw ConvergenceError("solve_breakeven: no sign change");
    }
    for (int it = 0; it < 400 && hi - lo > tol * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (value(mid) > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace greenxva
