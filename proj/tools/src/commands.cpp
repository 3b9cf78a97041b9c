#include "greenxva_cli/commands.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <tuple>

#include "greenxva/adjustment.hpp"
#include "greenxva/cds1d.hpp"
#include "greenxva/cds2d.hpp"
#include "greenxva/cds3d.hpp"
#include "greenxva/error.hpp"
#include "greenxva/fem.hpp"
#include "greenxva/mc_oracle.hpp"

namespace greenxva::cli {

namespace fs = std::filesystem;

namespace {

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

void note(const CommandOptions& opt, const std::string& line) {
    if (opt.log) *opt.log << line << '\n';
}

std::ofstream open_csv(const CommandOptions& opt, const std::string& name) {
    std::error_code ec;
    fs::create_directories(opt.out_dir, ec);
    const auto path = fs::path(opt.out_dir) / name;
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write " + path.string());
    return out;
}

std::string basis_key(const RunConfig& cfg) {
    return fem::cache_key(cfg.rho, cfg.mesh.n_points, cfg.mesh.seed, fem::Rule::Centroid, cfg.series.pricing_terms) +
           ";max_iter=" + std::to_string(cfg.mesh.max_iter) +
           ";size=" + (cfg.mesh.size_fn == SizeFunction::Uniform ? "uniform" : "boundary");
}

void comment(std::ostream& os, const RunConfig& cfg, const std::string& key = "none") {
    os << "# greenxva config_hash=" << config_hash(cfg) << " cache_key=" << key << '\n';
}

fem::EigenBasis basis_for(const RunConfig& cfg, const domain3d::DomainSpec& d, const CommandOptions& opt) {
    const std::string key = basis_key(cfg);
    fs::path file;
    if (opt.cache_dir) {
        file = fs::path(*opt.cache_dir) / fem::cache_file_name(key);
        if (auto cached = fem::load_basis(file.string(), key)) {
            note(opt, "cache hit: " + file.string());
            return std::move(*cached);
        }
        note(opt, "cache miss: " + file.string());
    }
    note(opt, "meshing " + std::to_string(cfg.mesh.n_points) + " points");
    auto m = mesh::build_mesh(d, mesh_options(cfg));
    if (!m.converged) note(opt, "warning: mesher stopped at max_iter before converging");
    note(opt, "solving for " + std::to_string(cfg.series.pricing_terms) + " eigenpairs");
    auto b = fem::compute_basis(std::move(m), cfg.series.pricing_terms);
    if (opt.cache_dir) {
        std::error_code ec;
        fs::create_directories(*opt.cache_dir, ec);
        fem::save_basis(b, file.string(), key);
        note(opt, "cached: " + file.string());
    }
    return b;
}

struct Pricing {
    double bec_1d = 0.0;
    cds3d::BreakevenSet bec;
    double bec_cva_2d = 0.0;  // seller risky, buyer riskless
    double bec_dva_2d = 0.0;
    double cva = 0.0;  // at the risk-free breakeven coupon
    double dva = 0.0;
    double survival_3d = 0.0;
};

Pricing price_one(const RunConfig& cfg, const cds3d::Green3d& g, const cds3d::Green3d& gs, double maturity) {
    auto terms = terms_for(cfg, maturity);
    const auto drv = drivers(cfg);
    Pricing p;
    p.bec_1d = cds1d::breakeven_coupon_1d(maturity, drv.y0, cfg.rate, terms.recovery_rn);
    const auto cva = cds3d::face_kernel_3d(terms, g, cds3d::Face::Seller, cfg.quadrature);
    const auto dva = cds3d::face_kernel_3d(terms, g, cds3d::Face::Buyer, cfg.quadrature);
    const auto v0 = cds1d::cds_legs_1d(maturity, drv.y0, cfg.rate, terms.recovery_rn);
    p.bec.risk_free = p.bec_1d;
    p.bec.cva_only = solve_breakeven(v0, &cva, terms.recovery_ps, nullptr, terms.recovery_pb);
    p.bec.dva_only = solve_breakeven(v0, nullptr, terms.recovery_ps, &dva, terms.recovery_pb);
    p.bec.bilateral = solve_breakeven(v0, &cva, terms.recovery_ps, &dva, terms.recovery_pb);
    p.bec_cva_2d = cds2d::breakeven_coupon_cva_2d(terms, drv.x0, drv.y0, cfg.rho.rho_xy);
    p.bec_dva_2d = cds2d::breakeven_coupon_dva_2d(terms, drv.z0, drv.y0, cfg.rho.rho_yz);
    p.cva = (1.0 - terms.recovery_ps) * cva.expected_positive(p.bec_1d);
    p.dva = (1.0 - terms.recovery_pb) * dva.expected_negative(p.bec_1d);
    p.survival_3d = cds3d::survival_3d(maturity, gs);
    return p;
}

}  // namespace

int cmd_defaults(const RunConfig& cfg, const CommandOptions& opt) {
    auto out = open_csv(opt, "defaults.json");
    out << to_json(cfg) << '\n';
    if (opt.log) *opt.log << to_json(cfg) << '\n';
    return kOk;
}

int cmd_mesh(const RunConfig& cfg, const CommandOptions& opt) {
    const auto d = domain3d::build_domain(cfg.rho);
    const auto m = mesh::build_mesh(d, mesh_options(cfg));
    const auto q = mesh::mesh_quality(m);
    {
        auto out = open_csv(opt, "mesh.csv");
        comment(out, cfg);
        mesh::write_mesh_csv(out, m);
    }
    auto out = open_csv(opt, "mesh_quality.csv");
    comment(out, cfg);
    out << "vertices,triangles,iterations,converged,min_angle_deg,fraction_above_15deg,total_area,mean_edge\n";
    out << m.vertices.size() << ',' << m.triangles.size() << ',' << m.iterations << ',' << (m.converged ? 1 : 0)
        << ',' << num(q.min_angle_deg) << ',' << num(q.fraction_above_15deg) << ',' << num(q.total_area) << ','
        << num(q.mean_edge) << '\n';
    note(opt, "mesh: " + std::to_string(m.vertices.size()) + " vertices, " + std::to_string(m.triangles.size()) +
                  " triangles, min angle " + num(q.min_angle_deg) + " deg, " + num(100.0 * q.fraction_above_15deg) +
                  "% above 15 deg");
    return kOk;
}

int cmd_eig(const RunConfig& cfg, const CommandOptions& opt) {
    const auto d = domain3d::build_domain(cfg.rho);
    const auto b = basis_for(cfg, d, opt);
    auto out = open_csv(opt, "eigenvalues.csv");
    comment(out, cfg, basis_key(cfg));
    out << "n,lambda2\n";
    for (int n = 0; n < b.count(); ++n) out << n + 1 << ',' << num(b.values[static_cast<std::size_t>(n)]) << '\n';
    note(opt, "lambda2_1 = " + num(b.values.front()));
    return kOk;
}

int cmd_price(const RunConfig& cfg, const CommandOptions& opt) {
    const auto d = domain3d::build_domain(cfg.rho);
    const auto b = basis_for(cfg, d, opt);
    const auto drv = drivers(cfg);
    const auto src = cds3d::transform_3d(d, drv.x0, drv.y0, drv.z0);
    const cds3d::Green3d g(d, b, src, cfg.series.pricing_terms);
    const cds3d::Green3d gs(d, b, src, cfg.series.n_terms);
    auto out = open_csv(opt, "results.csv");
    comment(out, cfg, basis_key(cfg));
    out << "scenario,maturity,bec_1d,bec_cva_2d,bec_dva_2d,bec_cva_only,bec_dva_only,bec_bilateral,cva,dva,"
           "survival_3d\n";
    for (double t : cfg.maturities) {
        const auto p = price_one(cfg, g, gs, t);
        out << cfg.scenario << ',' << num(t) << ',' << num(p.bec_1d) << ',' << num(p.bec_cva_2d) << ','
            << num(p.bec_dva_2d) << ',' << num(p.bec.cva_only) << ','
            << num(p.bec.dva_only) << ',' << num(p.bec.bilateral) << ',' << num(p.cva) << ',' << num(p.dva) << ','
            << num(p.survival_3d) << '\n';
        note(opt, "T=" + num(t) + " bec_1d=" + num(p.bec_1d) + " bilateral=" + num(p.bec.bilateral));
    }
    return kOk;
}

int cmd_mc(const RunConfig& cfg, const CommandOptions& opt) {
    auto out = open_csv(opt, "mc.csv");
    comment(out, cfg);
    out << "scenario,maturity,quantity,dt,mean,std_error,n_effective\n";
    const auto drv = drivers(cfg);
    for (double t : cfg.mc.maturities) {
        auto terms = terms_for(cfg, t);
        terms.coupon = cds1d::breakeven_coupon_1d(t, drv.y0, cfg.rate, terms.recovery_rn);
        const auto r = mc::simulate_levels(drv, cfg.rho, terms, mc_config(cfg), cfg.mc.coarse_steps, cfg.mc.levels);
        const std::pair<const char*, const mc::LevelEstimates*> rows[] = {
            {"survival_y", &r.survival_y}, {"survival_xy", &r.survival_xy}, {"survival_xyz", &r.survival_xyz},
            {"cva", &r.cva}, {"dva", &r.dva}};
        for (const auto& [name, le] : rows) {
            for (std::size_t l = 0; l < le->levels.size(); ++l) {
                const auto& e = le->levels[l];
                out << cfg.scenario << ',' << num(t) << ',' << name << ',' << num(r.dt[l]) << ',' << num(e.mean) << ','
                    << num(e.std_error) << ',' << e.n_effective << '\n';
            }
            const auto& e = le->extrapolated;
            out << cfg.scenario << ',' << num(t) << ',' << name << ",extrapolated," << num(e.mean) << ','
                << num(e.std_error) << ',' << e.n_effective << '\n';
        }
        note(opt, "T=" + num(t) + " mc done");
    }
    return kOk;
}

int cmd_validate(const RunConfig& cfg, const CommandOptions& opt) {
    const auto d = domain3d::build_domain(cfg.rho);
    const auto b = basis_for(cfg, d, opt);
    const auto drv = drivers(cfg);
    const auto src = cds3d::transform_3d(d, drv.x0, drv.y0, drv.z0);
    const cds3d::Green3d g(d, b, src, cfg.series.pricing_terms);
    const cds3d::Green3d gs(d, b, src, cfg.series.n_terms);
    auto out = open_csv(opt, "validate.csv");
    comment(out, cfg, basis_key(cfg));
    out << "scenario,maturity,check,model,mc_mean,mc_std_error,z,pass\n";
    bool all = true;
    for (double t : cfg.mc.maturities) {
        auto terms = terms_for(cfg, t);
        terms.coupon = cds1d::breakeven_coupon_1d(t, drv.y0, cfg.rate, terms.recovery_rn);
        const auto r = mc::simulate_levels(drv, cfg.rho, terms, mc_config(cfg), cfg.mc.coarse_steps, cfg.mc.levels);
        const std::tuple<const char*, double, const mc::McEstimate*> checks[] = {
            {"survival_2d", cds2d::survival_2d_1f1(t, drv.x0, drv.y0, cfg.rho.rho_xy), &r.survival_xy.extrapolated},
            {"survival_3d", cds3d::survival_3d(t, gs), &r.survival_xyz.extrapolated},
            {"cva_3d", cds3d::cva_3d(terms, g, cfg.quadrature), &r.cva.extrapolated},
            {"dva_3d", cds3d::dva_3d(terms, g, cfg.quadrature), &r.dva.extrapolated}};
        for (const auto& [name, model_value, e] : checks) {
            const double z = e->std_error > 0.0 ? (model_value - e->mean) / e->std_error
                                                : (model_value == e->mean ? 0.0 : INFINITY);
            const bool pass = std::abs(z) <= cfg.validate_n_se;
            all = all && pass;
            out << cfg.scenario << ',' << num(t) << ',' << name << ',' << num(model_value) << ',' << num(e->mean)
                << ',' << num(e->std_error) << ',' << num(z) << ',' << (pass ? "pass" : "fail") << '\n';
            note(opt, std::string(pass ? "PASS " : "FAIL ") + name + " T=" + num(t) + " model=" + num(model_value) +
                          " mc=" + num(e->mean) + " se=" + num(e->std_error));
        }
    }
    return all ? kOk : kValidationFailure;
}

int guarded(const std::function<int()>& f, std::ostream& err) {
    try {
        return f();
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const CorrelationError& e) {
        err << "invalid correlation: " << e.what() << '\n';
        return kConfigError;
    } catch (const std::exception& e) {
        err << "numeric failure: " << e.what() << '\n';
        return kNumericFailure;
    }
}

}  // namespace greenxva::cli
