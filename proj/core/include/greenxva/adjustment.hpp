#pragma once

#include <vector>

#include "greenxva/cds1d.hpp"

namespace greenxva {

// Boundary integral of a CDS exposure, discretised once per contract.
// Each node carries the remaining CDS life, the reference name's distance at
// the moment a counterparty defaults there, and a weight that already holds
// discounting, the Green's function flux and the quadrature weight. The
// adjustment for any coupon is then a weighted sum of (V(c))^+ or (V(c))^-.
class AdjustmentKernel {
public:
    AdjustmentKernel() = default;
    AdjustmentKernel(double rate, double recovery_rn) : rate_(rate), recovery_rn_(recovery_rn) {}

    void add(double remaining, double y, double weight);

    // sum_i w_i max(V_i(c), 0)
    [[nodiscard]] double expected_positive(double coupon) const;
    // sum_i w_i max(-V_i(c), 0)
    [[nodiscard]] double expected_negative(double coupon) const;
    // sum_i w_i, the discounted probability mass carried by the kernel.
    [[nodiscard]] double total_weight() const;

    [[nodiscard]] std::size_t size() const { return weights_.size(); }

private:
    double rate_ = 0.0;
    double recovery_rn_ = 0.4;
    std::vector<double> weights_;
    std::vector<cds1d::CdsLegs> legs_;
};

// Solves V(c) - cva(c) + dva(c) = 0 for c by bisection. Either kernel may be
// null. `v0` holds the counterparty-free legs at inception.
[[nodiscard]] double solve_breakeven(const cds1d::CdsLegs& v0, const AdjustmentKernel* cva,
                                     double recovery_ps, const AdjustmentKernel* dva,
                                     double recovery_pb, double tol = 1e-12);

}  // namespace greenxva
