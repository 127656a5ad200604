#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "mcfh/config.hpp"
#include "mcfh/runner.hpp"

int main(int argc, char** argv) {
    CLI::App app{"mcfhomog: forced mean curvature flow laboratory"};
    app.require_subcommand(1);

    std::string config_path, out_dir;
    int workers = 0;
    bool dry_run = false;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "TOML config file")->required();
        sub->add_option("--out", out_dir, "output directory (overrides run.out_dir)");
        sub->add_option("--workers", workers, "worker thread count");
    };

    const char* scenarios[] = {"simulate", "obstacle", "speeds",      "sweep",
                               "finger",   "laminar",  "discrepancy", "lcp"};
    for (const char* name : scenarios) add_common(app.add_subcommand(name));
    CLI::App* explain = app.add_subcommand("explain", "validate and print the plan");
    add_common(explain);

    CLI11_PARSE(app, argc, argv);

    try {
        mcfh::RunConfig cfg = mcfh::RunConfig::load(config_path, out_dir, workers);
        CLI::App* sub = app.get_subcommands().front();
        dry_run = sub->get_name() == "explain";
        if (!dry_run) {
            mcfh::Scenario named = mcfh::parse_scenario(sub->get_name());
            if (named != cfg.scenario) {
                std::cerr << "error: config declares scenario '"
                          << mcfh::scenario_name(cfg.scenario)
                          << "' but the command line asked for '" << sub->get_name()
                          << "'\n";
                return 2;
            }
        }
        return dry_run ? mcfh::explain_scenario(cfg) : mcfh::run_scenario(cfg);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
