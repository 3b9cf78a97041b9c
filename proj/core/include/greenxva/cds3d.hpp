#pragma once

#include <vector>

#include "greenxva/adjustment.hpp"
#include "greenxva/domain3d.hpp"
#include "greenxva/fem.hpp"
#include "greenxva/model.hpp"

namespace greenxva::cds3d {

using domain3d::Spherical;

// Distances to default of the protection seller (x), reference name (y) and
// protection buyer (z).
struct Drivers {
    double x0 = 0.0;
    double y0 = 0.0;
    double z0 = 0.0;
};

// (x, y, z) -> (r, phi, theta). Throws DomainError unless all are positive.
[[nodiscard]] Spherical transform_3d(const domain3d::DomainSpec& d, double x, double y, double z);

struct SeriesReport {
    int terms = 0;
    bool truncated = false;    // last term above 1e-10 of the partial sum
    bool out_of_range = false; // survival outside [0, 1] by more than 1e-3
    double raw = 0.0;          // survival before clipping
};

// Eigen-series Green's function for one source point.
class Green3d {
public:
    Green3d(const domain3d::DomainSpec& d, const fem::EigenBasis& basis, const Spherical& source,
            int n_terms = 50);

    [[nodiscard]] const domain3d::DomainSpec& domain() const { return *d_; }
    [[nodiscard]] const fem::EigenBasis& basis() const { return *basis_; }
    [[nodiscard]] const Spherical& source() const { return src_; }
    [[nodiscard]] int terms() const { return static_cast<int>(nu_.size()); }
    [[nodiscard]] double nu(int n) const { return nu_[static_cast<std::size_t>(n)]; }
    [[nodiscard]] double psi_source(int n) const { return psi_src_[static_cast<std::size_t>(n)]; }

    // Radial factors e^{-(r^2+r0^2)/2t} I_nu(r r0/t) / (t sqrt(r r0)) for all modes.
    void radial(double tau, double r, std::vector<double>& out) const;

    // Density with respect to r^2 sin(theta) dr dphi dtheta.
    [[nodiscard]] double density(double tau, const Spherical& target, SeriesReport* rep = nullptr) const;

    // Probability that none of the three names has defaulted by tau.
    [[nodiscard]] double survival(double tau, SeriesReport* rep = nullptr) const;

private:
    const domain3d::DomainSpec* d_;
    const fem::EigenBasis* basis_;
    Spherical src_;
    std::vector<double> nu_;
    std::vector<double> psi_src_;
};

[[nodiscard]] double green_3d(double tau, const Green3d& g, const Spherical& target,
                              SeriesReport* rep = nullptr);
[[nodiscard]] double survival_3d(double tau, const Green3d& g, SeriesReport* rep = nullptr);

enum class Face { Seller, Reference, Buyer };

// Angular sample on a face. `weight` is the angular quadrature weight,
// `payout_scale` maps r to the reference name's distance (y = r * scale) and
// `flux` holds, per mode, the inward conormal derivative with the face
// metric folded in.
struct FaceSample {
    double phi = 0.0;
    double theta = 0.0;
    double weight = 0.0;
    double payout_scale = 0.0;
    // |du/ds| of the unit direction u along the face parameter s; zero for
    // samples that only carry part of the flux and cannot be bounded alone.
    double arc_scale = 0.0;
    std::vector<double> flux;
};

// Face flux of each mode. Gradient takes the constant P1 gradient of the
// boundary triangle. Residual recovers the flux from the weak-form residual
// K Psi - Lambda^2 M Psi at the boundary vertices, projected onto piecewise
// linears along the face, which converges one order faster.
enum class FluxMethod { Gradient, Residual };

// Seller face phi = 0 and reference face phi = varpi are sampled per boundary
// edge in theta. The buyer face theta = Theta(phi) gives two sample sets: the
// phi-chart term with -sin(Theta) dPsi/dtheta, and the omega-parametrised
// term with Theta_omega / sin(Theta) dPsi/dphi. With the residual flux the
// chart set already holds the full conormal flux and `omega` is empty.
struct BuyerFaceSamples {
    std::vector<FaceSample> chart;
    std::vector<FaceSample> omega;
};

[[nodiscard]] std::vector<FaceSample> side_face_samples(const Green3d& g, Face face,
                                                        int nodes_per_edge = 3,
                                                        FluxMethod method = FluxMethod::Residual);
[[nodiscard]] BuyerFaceSamples buyer_face_samples(const Green3d& g, int nodes_per_edge = 3,
                                                  int omega_nodes = 96,
                                                  FluxMethod method = FluxMethod::Residual);

struct Quadrature3d {
    int time_nodes = 32;
    int radial_nodes = 128;
    double width = 8.0;  // radial window half-width in units of sqrt(t)
    // Time integration starts where d^2 / 2t = cutoff, d the distance of the
    // source from the face plane; the first-passage mass skipped is of order
    // exp(-cutoff).
    double cutoff = 12.5;
    // Clamp each face flux to [0, margin x half-space flux]: the domain lies
    // inside the half-space bounded by the face plane, so the comparison
    // principle bounds the true flux there. Removes truncation ripple at short
    // times; the margin leaves the discretisation overshoot next to the
    // closest face point alone.
    bool clamp = true;
    double clamp_margin = 1.25;
    int nodes_per_edge = 3;
    int omega_nodes = 96;
    FluxMethod flux = FluxMethod::Residual;
};

// Face fluxes converge far more slowly in the mode count than survival does.
inline constexpr int kPricingTerms = 400;

// Discounted first-passage kernel through one face: weights carry 1/2 flux,
// discounting and quadrature weights; y is the reference name's distance.
[[nodiscard]] AdjustmentKernel face_kernel_3d(const model::CdsTerms& terms, const Green3d& g,
                                              Face face, const Quadrature3d& q = {});

[[nodiscard]] double cva_3d(const model::CdsTerms& terms, const Green3d& g,
                            const Quadrature3d& q = {});
[[nodiscard]] double dva_3d(const model::CdsTerms& terms, const Green3d& g,
                            const Quadrature3d& q = {});
// Breakeven coupon with V - CVA + DVA = 0 and both counterparties risky.
[[nodiscard]] double breakeven_coupon_3d(const model::CdsTerms& terms, const Green3d& g,
                                         const Quadrature3d& q = {});

struct BreakevenSet {
    double risk_free = 0.0;
    double cva_only = 0.0;
    double dva_only = 0.0;
    double bilateral = 0.0;
};

// All four breakeven coupons from one pair of kernels.
[[nodiscard]] BreakevenSet breakeven_coupons_3d(const model::CdsTerms& terms, const Green3d& g,
                                                const Quadrature3d& q = {});

// Probability that the given name defaults first, before `horizon`.
[[nodiscard]] double first_default_probability(double horizon, const Green3d& g, Face face,
                                               const Quadrature3d& q = {});

}  // namespace greenxva::cds3d
