#include "greenxva_cli/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include <json.hpp>

#include "greenxva/error.hpp"

namespace greenxva::cli {

using nlohmann::json;

namespace {

void allow_only(const json& j, const std::string& where, std::initializer_list<const char*> keys) {
    if (!j.is_object()) throw ConfigError(where + ": expected an object");
    for (const auto& [k, v] : j.items()) {
        bool known = false;
        for (const char* key : keys) known = known || k == key;
        if (!known) throw ConfigError(where + ": unknown key '" + k + "'");
    }
}

template <class T>
void read(const json& j, const char* key, T& out, const std::string& where) {
    if (!j.contains(key)) return;
    try {
        out = j.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError(where + "." + key + ": wrong type");
    }
}

const char* convention_name(model::InitialValueConvention c) {
    return c == model::InitialValueConvention::LogDistance ? "log_distance" : "distance_to_default";
}

const char* flux_name(cds3d::FluxMethod f) { return f == cds3d::FluxMethod::Residual ? "residual" : "gradient"; }

const char* size_name(SizeFunction s) { return s == SizeFunction::Uniform ? "uniform" : "boundary"; }

void read_firm(const json& j, const char* key, model::CalibratedFirm& f) {
    if (!j.contains(key)) return;
    const std::string where = std::string("firms.") + key;
    const auto& o = j.at(key);
    allow_only(o, where, {"name", "initial_value", "sigma", "recovery"});
    read(o, "name", f.name, where);
    read(o, "initial_value", f.initial_value, where);
    read(o, "sigma", f.sigma, where);
    read(o, "recovery", f.recovery, where);
}

json firm_json(const model::CalibratedFirm& f) {
    return {{"name", f.name}, {"initial_value", f.initial_value}, {"sigma", f.sigma}, {"recovery", f.recovery}};
}

void check_maturities(const std::vector<double>& m, const std::string& where) {
    if (m.empty()) throw ConfigError(where + ": at least one maturity");
    for (double t : m) {
        if (!(t > 0.0) || !std::isfinite(t)) throw ConfigError(where + ": maturities must be positive");
    }
}

void check_firm(const model::CalibratedFirm& f, model::InitialValueConvention c) {
    if (!(f.sigma > 0.0)) throw ConfigError("firm " + f.name + ": sigma must be positive");
    if (!(f.recovery >= 0.0 && f.recovery < 1.0)) throw ConfigError("firm " + f.name + ": recovery must be in [0, 1)");
    if (!(model::driver_from_calibration(f, c).x0 > 0.0)) {
        throw ConfigError("firm " + f.name + ": distance to default must be positive");
    }
}

}  // namespace

RunConfig parse_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    RunConfig c;
    allow_only(j, "config", {"scenario", "firms", "initial_value_convention", "rho", "rate", "maturities", "mesh",
                             "series", "quadrature", "mc", "validate"});
    read(j, "scenario", c.scenario, "config");
    if (j.contains("firms")) {
        allow_only(j["firms"], "firms", {"seller", "reference", "buyer"});
        read_firm(j["firms"], "seller", c.seller);
        read_firm(j["firms"], "reference", c.reference);
        read_firm(j["firms"], "buyer", c.buyer);
    }
    if (j.contains("initial_value_convention")) {
        std::string s;
        read(j, "initial_value_convention", s, "config");
        if (s == "log_distance") {
            c.convention = model::InitialValueConvention::LogDistance;
        } else if (s == "distance_to_default") {
            c.convention = model::InitialValueConvention::DistanceToDefault;
        } else {
            throw ConfigError("initial_value_convention: expected log_distance or distance_to_default");
        }
    }
    if (j.contains("rho")) {
        allow_only(j["rho"], "rho", {"xy", "xz", "yz"});
        read(j["rho"], "xy", c.rho.rho_xy, "rho");
        read(j["rho"], "xz", c.rho.rho_xz, "rho");
        read(j["rho"], "yz", c.rho.rho_yz, "rho");
    }
    read(j, "rate", c.rate, "config");
    read(j, "maturities", c.maturities, "config");
    if (j.contains("mesh")) {
        const auto& o = j["mesh"];
        allow_only(o, "mesh", {"n_points", "max_iter", "size_fn", "seed"});
        read(o, "n_points", c.mesh.n_points, "mesh");
        read(o, "max_iter", c.mesh.max_iter, "mesh");
        read(o, "seed", c.mesh.seed, "mesh");
        if (o.contains("size_fn")) {
            std::string s;
            read(o, "size_fn", s, "mesh");
            if (s == "uniform") {
                c.mesh.size_fn = SizeFunction::Uniform;
            } else if (s == "boundary") {
                c.mesh.size_fn = SizeFunction::Boundary;
            } else {
                throw ConfigError("mesh.size_fn: expected uniform or boundary");
            }
        }
    }
    if (j.contains("series")) {
        allow_only(j["series"], "series", {"n_terms", "pricing_terms"});
        read(j["series"], "n_terms", c.series.n_terms, "series");
        read(j["series"], "pricing_terms", c.series.pricing_terms, "series");
    }
    if (j.contains("quadrature")) {
        const auto& o = j["quadrature"];
        allow_only(o, "quadrature",
                   {"time_nodes", "radial_nodes", "width", "cutoff", "clamp", "clamp_margin", "nodes_per_edge",
                    "omega_nodes", "flux"});
        auto& q = c.quadrature;
        read(o, "time_nodes", q.time_nodes, "quadrature");
        read(o, "radial_nodes", q.radial_nodes, "quadrature");
        read(o, "width", q.width, "quadrature");
        read(o, "cutoff", q.cutoff, "quadrature");
        read(o, "clamp", q.clamp, "quadrature");
        read(o, "clamp_margin", q.clamp_margin, "quadrature");
        read(o, "nodes_per_edge", q.nodes_per_edge, "quadrature");
        read(o, "omega_nodes", q.omega_nodes, "quadrature");
        if (o.contains("flux")) {
            std::string s;
            read(o, "flux", s, "quadrature");
            if (s == "residual") {
                q.flux = cds3d::FluxMethod::Residual;
            } else if (s == "gradient") {
                q.flux = cds3d::FluxMethod::Gradient;
            } else {
                throw ConfigError("quadrature.flux: expected residual or gradient");
            }
        }
    }
    if (j.contains("mc")) {
        const auto& o = j["mc"];
        allow_only(o, "mc", {"n_paths", "coarse_steps", "levels", "seed", "antithetic", "threads", "maturities"});
        read(o, "n_paths", c.mc.n_paths, "mc");
        read(o, "coarse_steps", c.mc.coarse_steps, "mc");
        read(o, "levels", c.mc.levels, "mc");
        read(o, "seed", c.mc.seed, "mc");
        read(o, "antithetic", c.mc.antithetic, "mc");
        read(o, "threads", c.mc.threads, "mc");
        read(o, "maturities", c.mc.maturities, "mc");
    }
    if (j.contains("validate")) {
        allow_only(j["validate"], "validate", {"n_se"});
        read(j["validate"], "n_se", c.validate_n_se, "validate");
    }
    validate(c);
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

void validate(const RunConfig& c) {
    check_firm(c.seller, c.convention);
    check_firm(c.reference, c.convention);
    check_firm(c.buyer, c.convention);
    (void)model::validate_correlation(c.rho);
    if (!(c.rate >= 0.0) || !std::isfinite(c.rate)) throw ConfigError("rate must be nonnegative");
    check_maturities(c.maturities, "maturities");
    if (c.mesh.n_points < 50) throw ConfigError("mesh.n_points must be at least 50");
    if (c.mesh.max_iter < 1) throw ConfigError("mesh.max_iter must be positive");
    if (c.series.n_terms < 1) throw ConfigError("series.n_terms must be positive");
    if (c.series.pricing_terms < c.series.n_terms) throw ConfigError("series.pricing_terms must be >= n_terms");
    if (c.series.pricing_terms >= c.mesh.n_points) throw ConfigError("series.pricing_terms must be below mesh.n_points");
    const auto& q = c.quadrature;
    if (q.time_nodes < 1 || q.radial_nodes < 1 || q.nodes_per_edge < 1 || q.omega_nodes < 1) {
        throw ConfigError("quadrature node counts must be positive");
    }
    if (!(q.width > 0.0) || !(q.cutoff > 0.0)) throw ConfigError("quadrature width and cutoff must be positive");
    if (!(q.clamp_margin >= 1.0)) throw ConfigError("quadrature.clamp_margin must be at least 1");
    if (c.mc.n_paths < 10000) throw ConfigError("mc.n_paths must be at least 1e4");
    if (c.mc.coarse_steps < 50) throw ConfigError("mc.coarse_steps must be at least 50");
    if (c.mc.levels < 1 || c.mc.levels > 10) throw ConfigError("mc.levels must be in [1, 10]");
    if (c.mc.threads < 0) throw ConfigError("mc.threads must be nonnegative");
    check_maturities(c.mc.maturities, "mc.maturities");
    if (!(c.validate_n_se > 0.0)) throw ConfigError("validate.n_se must be positive");
}

std::string to_json(const RunConfig& c) {
    const auto& q = c.quadrature;
    json j = {
        {"scenario", c.scenario},
        {"firms", {{"seller", firm_json(c.seller)}, {"reference", firm_json(c.reference)}, {"buyer", firm_json(c.buyer)}}},
        {"initial_value_convention", convention_name(c.convention)},
        {"rho", {{"xy", c.rho.rho_xy}, {"xz", c.rho.rho_xz}, {"yz", c.rho.rho_yz}}},
        {"rate", c.rate},
        {"maturities", c.maturities},
        {"mesh", {{"n_points", c.mesh.n_points}, {"max_iter", c.mesh.max_iter}, {"size_fn", size_name(c.mesh.size_fn)},
                  {"seed", c.mesh.seed}}},
        {"series", {{"n_terms", c.series.n_terms}, {"pricing_terms", c.series.pricing_terms}}},
        {"quadrature", {{"time_nodes", q.time_nodes}, {"radial_nodes", q.radial_nodes}, {"width", q.width},
                        {"cutoff", q.cutoff}, {"clamp", q.clamp}, {"clamp_margin", q.clamp_margin},
                        {"nodes_per_edge", q.nodes_per_edge}, {"omega_nodes", q.omega_nodes},
                        {"flux", flux_name(q.flux)}}},
        {"mc", {{"n_paths", c.mc.n_paths}, {"coarse_steps", c.mc.coarse_steps}, {"levels", c.mc.levels},
                {"seed", c.mc.seed}, {"antithetic", c.mc.antithetic}, {"threads", c.mc.threads},
                {"maturities", c.mc.maturities}}},
        {"validate", {{"n_se", c.validate_n_se}}},
    };
    return j.dump(2);
}

std::string config_hash(const RunConfig& c) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char ch : to_json(c)) {
        h ^= ch;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

cds3d::Drivers drivers(const RunConfig& c) {
    return {model::driver_from_calibration(c.seller, c.convention).x0,
            model::driver_from_calibration(c.reference, c.convention).x0,
            model::driver_from_calibration(c.buyer, c.convention).x0};
}

model::CdsTerms terms_for(const RunConfig& c, double maturity) {
    model::CdsTerms t;
    t.maturity = maturity;
    t.rate = c.rate;
    t.recovery_rn = c.reference.recovery;
    t.recovery_ps = c.seller.recovery;
    t.recovery_pb = c.buyer.recovery;
    return t;
}

mesh::MeshOptions mesh_options(const RunConfig& c) {
    mesh::MeshOptions o;
    o.n_points = c.mesh.n_points;
    o.max_iter = c.mesh.max_iter;
    o.seed = c.mesh.seed;
    o.size = c.mesh.size_fn == SizeFunction::Uniform ? mesh::uniform_size() : mesh::boundary_size();
    return o;
}

mc::McConfig mc_config(const RunConfig& c) {
    mc::McConfig m;
    m.n_paths = c.mc.n_paths;
    m.seed = c.mc.seed;
    m.antithetic = c.mc.antithetic;
    m.threads = c.mc.threads;
    return m;
}

}  // namespace greenxva::cli
