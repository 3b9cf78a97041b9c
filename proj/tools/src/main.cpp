#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "greenxva_cli/commands.hpp"

using namespace greenxva::cli;

int main(int argc, char** argv) {
    CLI::App app{"CDS pricing with bilateral counterparty adjustments"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path, out_dir = ".", cache_dir;
    std::uint64_t seed = 0;
    int terms = 0, points = 0;
    app.add_option("--config", config_path, "JSON run configuration")->check(CLI::ExistingFile);
    app.add_option("--out", out_dir, "Output directory for CSV files");
    app.add_option("--seed", seed, "Seed for the mesher and the Monte Carlo oracle");
    app.add_option("--terms", terms, "Eigenpairs in the survival series");
    app.add_option("--points", points, "Mesh points");
    app.add_option("--cache", cache_dir, "Eigenbasis cache directory");

    const std::map<std::string, std::string> help = {
        {"defaults", "Print the default configuration"},
        {"mesh", "Build the angular mesh and report its quality"},
        {"eig", "Solve and cache the eigenbasis"},
        {"price", "Breakeven coupons and adjustments per maturity"},
        {"mc", "Monte Carlo estimates at nested step sizes"},
        {"validate", "Compare analytic values against Monte Carlo"}};
    for (const auto& [name, text] : help) app.add_subcommand(name, text);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfigError;
    }

    const std::string cmd = app.get_subcommands().front()->get_name();
    return guarded(
        [&]() -> int {
            RunConfig cfg = config_path.empty() ? RunConfig{} : load_config(config_path);
            if (app.count("--seed")) {
                cfg.mesh.seed = seed;
                cfg.mc.seed = seed;
            }
            if (app.count("--terms")) cfg.series.n_terms = terms;
            if (app.count("--points")) cfg.mesh.n_points = points;
            validate(cfg);

            CommandOptions opt;
            opt.out_dir = out_dir;
            if (!cache_dir.empty()) opt.cache_dir = cache_dir;
            opt.log = &std::cerr;
            if (cmd == "defaults") {
                opt.log = nullptr;
                if (app.count("--out")) (void)cmd_defaults(cfg, opt);
                std::cout << to_json(cfg) << '\n';
                return kOk;
            }
            if (cmd == "mesh") return cmd_mesh(cfg, opt);
            if (cmd == "eig") return cmd_eig(cfg, opt);
            if (cmd == "price") return cmd_price(cfg, opt);
            if (cmd == "mc") return cmd_mc(cfg, opt);
            return cmd_validate(cfg, opt);
        },
        std::cerr);
}
