#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "dpac/errors.hpp"
#include "dpac/experiment.hpp"

namespace ex = dpac::experiment;

int main(int argc, char** argv) {
    CLI::App app{"dpac: communication-metered distributed PAC learning runs"};
    app.require_subcommand(0, 1);
    bool list = false;
    app.add_flag("--list-protocols", list, "print every protocol name and exit");

    auto* run = app.add_subcommand("run", "run every seed of a config");
    std::string config;
    std::string seed_range;
    std::string out;
    bool timing = false;
    run->add_option("config", config, "YAML config")->required();
    run->add_option("--seed-range", seed_range, "override seeds, a..b inclusive");
    run->add_option("--out", out, "output directory (default: config output, else $DPAC_OUT_ROOT/<stem>)");
    run->add_flag("--timing", timing, "fill wall_ms (otherwise 0 so reruns are byte-identical)");

    auto* cmp = app.add_subcommand("compare", "ratios of median costs between two run directories");
    std::string dir_a;
    std::string dir_b;
    std::string cmp_out;
    cmp->add_option("dirA", dir_a)->required();
    cmp->add_option("dirB", dir_b)->required();
    cmp->add_option("--out", cmp_out, "also write the table to this file");

    CLI11_PARSE(app, argc, argv);

    if (list) {
        for (const auto& p : ex::protocols()) std::cout << p.name << "  " << p.summary << "\n";
        return 0;
    }
    try {
        if (*run) {
            ex::Config cfg = ex::load_config(config);
            if (!seed_range.empty()) cfg.seeds = ex::parse_seed_range(seed_range);
            const auto report = ex::run_config(cfg, {out, timing}, std::cerr);
            std::cout << report.rows << " rows written to " << report.out.string() << "\n";
            if (report.failures > 0) {
                std::cerr << report.failures << " seed(s) failed\n";
                return 3;
            }
            return 0;
        }
        if (*cmp) {
            const auto c = ex::compare_runs(dir_a, dir_b);
            ex::print_comparison(std::cout, c);
            if (!cmp_out.empty()) {
                std::ofstream f(cmp_out);
                ex::print_comparison(f, c);
            }
            return 0;
        }
    } catch (const dpac::ConfigurationError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    std::cout << app.help();
    return 1;
}
