#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "greenxva/cds3d.hpp"
#include "greenxva/mc_oracle.hpp"
#include "greenxva/mesh.hpp"
#include "greenxva/model.hpp"

namespace greenxva::cli {

enum class SizeFunction { Uniform, Boundary };

struct MeshSettings {
    int n_points = 1500;
    int max_iter = 1500;
    SizeFunction size_fn = SizeFunction::Uniform;
    std::uint64_t seed = 20240601;
};

struct SeriesSettings {
    int n_terms = 50;                         // survival
    int pricing_terms = cds3d::kPricingTerms; // face fluxes
};

struct McSettings {
    std::int64_t n_paths = 100000;
    int coarse_steps = 50;
    int levels = 4;
    std::uint64_t seed = 20240601;
    bool antithetic = true;
    int threads = 0;
    std::vector<double> maturities{5.0};
};

struct RunConfig {
    std::string scenario = "base";
    model::CalibratedFirm seller = model::sample_protection_seller();
    model::CalibratedFirm reference = model::sample_reference_name();
    model::CalibratedFirm buyer = model::sample_protection_buyer();
    model::InitialValueConvention convention = model::InitialValueConvention::LogDistance;
    model::CorrelationTriple rho{};
    double rate = 0.01;
    std::vector<double> maturities{0.25, 0.5, 1.0, 2.0, 3.0, 4.0, 5.0, 7.0, 10.0};
    MeshSettings mesh;
    SeriesSettings series;
    cds3d::Quadrature3d quadrature;
    McSettings mc;
    double validate_n_se = 3.0;
};

// Parses JSON text. Missing keys take the defaults, unknown keys and invalid
// values throw ConfigError, invalid correlations CorrelationError.
[[nodiscard]] RunConfig parse_config(const std::string& json_text);
[[nodiscard]] RunConfig load_config(const std::string& path);
void validate(const RunConfig& cfg);

// Canonical JSON with every field present.
[[nodiscard]] std::string to_json(const RunConfig& cfg);
// FNV-1a of the canonical JSON, 16 hex digits.
[[nodiscard]] std::string config_hash(const RunConfig& cfg);

[[nodiscard]] cds3d::Drivers drivers(const RunConfig& cfg);
// Terms for one maturity with the recoveries of the three firms; coupon 0.
[[nodiscard]] model::CdsTerms terms_for(const RunConfig& cfg, double maturity);
[[nodiscard]] mesh::MeshOptions mesh_options(const RunConfig& cfg);
[[nodiscard]] mc::McConfig mc_config(const RunConfig& cfg);

}  // namespace greenxva::cli
