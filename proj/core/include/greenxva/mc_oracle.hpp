#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "greenxva/cds3d.hpp"
#include "greenxva/model.hpp"

namespace greenxva::mc {

struct McConfig {
    std::int64_t n_paths = 100000;
    double dt = 0.01;  // years
    std::uint64_t seed = 20240601;
    bool antithetic = true;
    int threads = 0;  // 0: hardware concurrency
};

struct McEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    std::int64_t n_effective = 0;  // independent samples (antithetic pairs count once)
};

// Throws ConfigError unless n_paths >= 1e4, 0 < dt <= horizon / 50 and
// threads >= 0.
void validate_config(const McConfig& cfg, double horizon);

// Euler paths of the first `dims` drivers (x0s), correlated by rho (rho_xy
// for two names), monitored at every step. Survival means every coordinate
// stayed positive at every monitoring date.
[[nodiscard]] McEstimate simulate_survival(int dims, std::span<const double> x0s,
                                           const model::CorrelationTriple& rho, double tau,
                                           const McConfig& cfg);

struct CvaDva {
    McEstimate cva;
    McEstimate dva;
};

// First-to-default among seller, reference and buyer: a seller default before
// T pays (1 - R_PS) e^{-rate t} V^+ of the risk-free CDS at the reference
// name's current distance, a buyer default (1 - R_PB) e^{-rate t} V^-.
[[nodiscard]] CvaDva simulate_cva_dva(const cds3d::Drivers& drivers,
                                      const model::CorrelationTriple& rho,
                                      const model::CdsTerms& terms, const McConfig& cfg);

// Estimates at nested step sizes from one set of paths, coarsest first, and
// the Richardson extrapolation over the two finest levels for a bias in
// sqrt(dt).
struct LevelEstimates {
    std::vector<McEstimate> levels;
    McEstimate extrapolated;
};

struct MultiLevelResult {
    std::vector<double> dt;
    LevelEstimates survival_y;    // reference name alone
    LevelEstimates survival_xy;   // seller and reference
    LevelEstimates survival_xyz;  // all three
    LevelEstimates cva;
    LevelEstimates dva;
};

// Step sizes maturity / coarse_steps, halved `levels - 1` times. cfg.dt is
// not used.
[[nodiscard]] MultiLevelResult simulate_levels(const cds3d::Drivers& drivers,
                                               const model::CorrelationTriple& rho,
                                               const model::CdsTerms& terms, const McConfig& cfg,
                                               int coarse_steps = 50, int levels = 4);

}  // namespace greenxva::mc
